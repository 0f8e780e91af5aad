//! From theta constants to the Aronhold frame, the Riemann model and the
//! 28 bitangents.
//!
//! Conventions. For an Aronhold system `q1, …, q7` the Aronhold frame puts
//! `β1: X1 = 0`, `β2: X2 = 0`, `β3: X3 = 0`, `β4: X1 + X2 + X3 = 0` and
//! `β_{4+i}: a_i1 X1 + a_i2 X2 + a_i3 X3 = 0`. Sums such as `(q4 + q_r + q_j)`
//! are integer characteristics; the lattice sum of a non-reduced
//! characteristic equals the reduced one times the reduction sign, which is
//! where the `ρ_ij` of [`weber_symbolic`] come from.

use nalgebra::{Matrix3, Matrix4x3};
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::chars::{char_sum, derived_forms, is_aronhold, AronholdSystem, Characteristic, QuadForm};
use crate::error::{Error, Result};
use crate::linalg::{condition_number, cross_residual, lstsq_4x3, norm3, solve3, to_matrix, CMat3};
use crate::poly::{QuarticCurve, TernaryForm};
use crate::theta::{e_int, i_pow, CVec3, ThetaTable};

/// Relative residual allowed when the 12 equations for the ξ forms are
/// solved in the least-squares sense.
pub const XI_CONSISTENCY_TOL: f64 = 1e-8;

/// Frame matrices with a larger condition number are refused.
pub const FRAME_COND_LIMIT: f64 = 1e10;

/// A line `c1 X1 + c2 X2 + c3 X3 = 0`. The covector keeps its scale; use
/// [`ProjLine::normalized`] or [`ProjLine::residual_to`] for projective work.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjLine {
    c: CVec3,
}

impl ProjLine {
    pub fn new(c: CVec3) -> Result<Self> {
        if norm3(&c) == 0.0 || c.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return Err(Error::Degenerate("line covector is zero or not finite"));
        }
        Ok(ProjLine { c })
    }

    pub fn coeffs(&self) -> &CVec3 {
        &self.c
    }

    /// Scaled so that the entry of largest modulus (first on ties) is 1.
    pub fn normalized(&self) -> ProjLine {
        let mut best = 0;
        for i in 1..3 {
            if self.c[i].norm() > self.c[best].norm() {
                best = i;
            }
        }
        let p = self.c[best];
        ProjLine { c: self.c.map(|x| x / p) }
    }

    /// Projective distance: 0 iff the covectors are proportional.
    pub fn residual_to(&self, other: &ProjLine) -> f64 {
        cross_residual(&self.c, &other.c)
    }
}

impl Serialize for ProjLine {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::json::complex_vec(&self.c).serialize(s)
    }
}

/// The data attached to an Aronhold system by Weber's formula and the
/// Riemann model.
#[derive(Debug, Clone, PartialEq)]
pub struct AronholdFrame {
    pub system: AronholdSystem,
    pub eps: [i8; 3],
    /// Coefficients of `β5, β6, β7`; row `i` is `β_{4+i}`.
    pub a: CMat3,
    /// `η_i = ε_i · i^{(q4+q_{4+i})'·(q4+q5+q6+q7)''}`.
    pub eta: CVec3,
    pub k: CVec3,
    pub lambda: CVec3,
    /// `ξ23, ξ13, ξ12` with the scale fixed by the linear system.
    pub xi: [ProjLine; 3],
    /// Maps Aronhold-frame covectors to theta-frame covectors.
    pub phi: CMat3,
}

/// Symbolic content of one Weber coefficient:
/// `a_ij = ε_i · i^quarter_turns · θ[num0] θ[num1] / (θ[den0] θ[den1])`
/// with reduced characteristics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeberTerm {
    /// Exponent `k` of `i^k`; includes `η_i / ε_i`, `e(q_j'·(q4+q_{4+i})'')` and `ρ_ij`.
    pub quarter_turns: u8,
    pub numerator: [Characteristic; 2],
    pub denominator: [Characteristic; 2],
    /// Product of the four reduction signs.
    pub rho: i8,
}

impl WeberTerm {
    pub fn phase(&self, eps: i8) -> Complex64 {
        i_pow(i64::from(self.quarter_turns)) * f64::from(eps)
    }

    /// Renders the prefactor as `ε1`, `-ε1`, `ε1·i` or `-ε1·i`.
    pub fn phase_label(&self, i: usize) -> String {
        match self.quarter_turns {
            0 => format!("ε{i}"),
            1 => format!("ε{i}·i"),
            2 => format!("-ε{i}"),
            _ => format!("-ε{i}·i"),
        }
    }
}

fn dot_prime_dprime(a: &Characteristic, b: &Characteristic) -> i64 {
    (0..3).map(|i| i64::from(a.m_prime[i]) * i64::from(b.m_double_prime[i])).sum()
}

/// Indices `r < s` with `{4+i, r, s} = {5, 6, 7}`.
fn complement(i: usize) -> (usize, usize) {
    let rest: Vec<usize> = (5..=7).filter(|&x| x != 4 + i).collect();
    (rest[0], rest[1])
}

fn check_row_col(i: usize, j: usize) -> Result<()> {
    for x in [i, j] {
        if !(1..=3).contains(&x) {
            return Err(Error::IndexOutOfRange { index: x, len: 4 });
        }
    }
    Ok(())
}

/// The integer characteristic sums entering `a_ij`: numerator
/// `(q4+q_r+q_j), (q4+q_s+q_j)`, denominator `(q_{4+i}+q_r+q_j), (q_{4+i}+q_s+q_j)`.
fn weber_sums(sys: &AronholdSystem, i: usize, j: usize) -> ([Characteristic; 2], [Characteristic; 2]) {
    let (r, s) = complement(i);
    let q = |n: usize| sys.q(n);
    (
        [char_sum(&[q(4), q(r), q(j)]), char_sum(&[q(4), q(s), q(j)])],
        [char_sum(&[q(4 + i), q(r), q(j)]), char_sum(&[q(4 + i), q(s), q(j)])],
    )
}

/// Exponent of `i` in `η_i / ε_i`.
fn eta_quarter_turns(sys: &AronholdSystem, i: usize) -> i64 {
    let q = |n: usize| sys.q(n);
    dot_prime_dprime(&char_sum(&[q(4), q(4 + i)]), &char_sum(&[q(4), q(5), q(6), q(7)]))
}

/// Exact symbolic form of `a_ij` (1-based `i`, `j`) before any series is
/// evaluated.
pub fn weber_symbolic(sys: &AronholdSystem, i: usize, j: usize) -> Result<WeberTerm> {
    check_row_col(i, j)?;
    let (num, den) = weber_sums(sys, i, j);
    let mut rho = 1i8;
    let reduce = |m: &Characteristic, rho: &mut i8| {
        let (r, sign) = m.reduce();
        *rho *= sign;
        r
    };
    let numerator = [reduce(&num[0], &mut rho), reduce(&num[1], &mut rho)];
    let denominator = [reduce(&den[0], &mut rho), reduce(&den[1], &mut rho)];
    let q = |n: usize| sys.q(n);
    let sign_exp = dot_prime_dprime(&q(j).characteristic(), &char_sum(&[q(4), q(4 + i)]));
    let mut turns = eta_quarter_turns(sys, i) + 2 * sign_exp;
    if rho < 0 {
        turns += 2;
    }
    Ok(WeberTerm { quarter_turns: turns.rem_euclid(4) as u8, numerator, denominator, rho })
}

fn check_odd_distinct(forms: &[QuadForm]) -> Result<()> {
    for (x, a) in forms.iter().enumerate() {
        if !a.is_odd() {
            return Err(Error::NotOdd(a.characteristic()));
        }
        if forms[x + 1..].contains(a) {
            return Err(Error::RepeatedForm);
        }
    }
    Ok(())
}

fn nonvanishing(table: &ThetaTable, chars: &[Characteristic]) -> Result<()> {
    let bad: Vec<Characteristic> = chars.iter().filter(|m| table.is_vanishing(m)).map(|m| m.reduce().0).collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::SpecialLocus(bad))
    }
}

/// Both sides of
///
/// ```text
/// D[q4,q2,q3] / D[q1,q2,q3]
///   = −e((q5+q6+q7)'·(q1+q4)'') · θ(q5+q6+q1) θ(q5+q7+q1) θ(q6+q7+q1)
///                               / θ(q5+q6+q4) θ(q5+q7+q4) θ(q6+q7+q4)
/// ```
///
/// for an azygetic 4-tuple of distinct odd forms and one of its completions.
pub fn jacobi_ratio(
    quad: [QuadForm; 4],
    completion: [QuadForm; 3],
    table: &ThetaTable,
) -> Result<(Complex64, Complex64)> {
    check_odd_distinct(&quad).map_err(|_| Error::NotAzygetic)?;
    let [q1, q2, q3, q4] = quad;
    let [q5, q6, q7] = completion;
    if !is_aronhold(&[q1, q2, q3, q4, q5, q6, q7]) {
        return Err(Error::NotAronhold);
    }
    let c = |q: QuadForm| q.characteristic();
    let den_det = table.det(&c(q1), &c(q2), &c(q3));
    if den_det.norm() == 0.0 {
        return Err(Error::Degenerate("vanishing Jacobian determinant"));
    }
    let lhs = table.det(&c(q4), &c(q2), &c(q3)) / den_det;

    let den_chars = [char_sum(&[q5, q6, q4]), char_sum(&[q5, q7, q4]), char_sum(&[q6, q7, q4])];
    nonvanishing(table, &den_chars)?;
    let num_chars = [char_sum(&[q5, q6, q1]), char_sum(&[q5, q7, q1]), char_sum(&[q6, q7, q1])];
    let num: Complex64 = num_chars.iter().map(|m| table.constant(m)).product();
    let den: Complex64 = den_chars.iter().map(|m| table.constant(m)).product();
    let sign = -f64::from(e_int(dot_prime_dprime(&char_sum(&[q5, q6, q7]), &char_sum(&[q1, q4]))));
    Ok((lhs, num / den * sign))
}

/// Rows `(a_i1 : a_i2 : a_i3)` from ratios of Jacobian determinants,
///
/// ```text
/// a_i1 = D[q_{4+i},q2,q3]/D[q4,q2,q3],  a_i2 = D[q1,q_{4+i},q3]/D[q1,q4,q3],  a_i3 = D[q1,q2,q_{4+i}]/D[q1,q2,q4]
/// ```
pub fn aronhold_coeffs_dets(sys: &AronholdSystem, table: &ThetaTable) -> Result<CMat3> {
    table.require_generic()?;
    let c = |n: usize| sys.q(n).characteristic();
    let replace = |slot: usize, by: usize| {
        let mut v = [c(1), c(2), c(3)];
        v[slot] = c(by);
        table.det(&v[0], &v[1], &v[2])
    };
    let mut a = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 1..=3 {
        for slot in 0..3 {
            let den = replace(slot, 4);
            if den.norm() == 0.0 {
                return Err(Error::Degenerate("vanishing Jacobian determinant"));
            }
            a[i - 1][slot] = replace(slot, 4 + i) / den;
        }
    }
    Ok(a)
}

/// Weber's coefficients with `η_i = ε_i e^{(π/2) i (q4+q_{4+i})'·(q4+q5+q6+q7)''}`,
/// followed by the Riemann-model data and the frame matrix.
pub fn weber_coefficients(sys: &AronholdSystem, table: &ThetaTable, eps: [i8; 3]) -> Result<AronholdFrame> {
    if eps.iter().any(|&e| e != 1 && e != -1) {
        return Err(Error::Degenerate("sign choices must be +1 or -1"));
    }
    table.require_generic()?;
    let mut a = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 1..=3 {
        for j in 1..=3 {
            let term = weber_symbolic(sys, i, j)?;
            let num = table.constant(&term.numerator[0]) * table.constant(&term.numerator[1]);
            let den = table.constant(&term.denominator[0]) * table.constant(&term.denominator[1]);
            a[i - 1][j - 1] = term.phase(eps[i - 1]) * num / den;
        }
    }
    let eta: CVec3 = std::array::from_fn(|i| i_pow(eta_quarter_turns(sys, i + 1)) * f64::from(eps[i]));
    let lambda = solve_lambda(&a)?;
    let k = solve_k(&a, &lambda)?;
    let xi = xi_forms(&a, &k)?;
    let phi = frame_matrix(sys, table)?;
    Ok(AronholdFrame { system: *sys, eps, a, eta, k, lambda, xi, phi })
}

/// Solves `Σ_i λ_i / a_ij = −1` for `j = 1, 2, 3`.
pub fn solve_lambda(a: &CMat3) -> Result<CVec3> {
    if a.iter().flatten().any(|x| x.norm() == 0.0) {
        return Err(Error::Singular("zero coefficient in reciprocal matrix"));
    }
    let m = Matrix3::from_fn(|j, i| a[i][j].inv());
    solve3(&m, &[Complex64::new(-1.0, 0.0); 3], "reciprocal coefficient matrix")
}

/// Solves `Σ_i λ_i a_ij k_i = −1` for `j = 1, 2, 3`.
pub fn solve_k(a: &CMat3, lambda: &CVec3) -> Result<CVec3> {
    let m = Matrix3::from_fn(|j, i| lambda[i] * a[i][j]);
    solve3(&m, &[Complex64::new(-1.0, 0.0); 3], "λ-weighted coefficient matrix")
}

/// The forms `ξ23, ξ13, ξ12` determined by
///
/// ```text
/// ξ23 + ξ13 + ξ12 + X1 + X2 + X3 = 0
/// ξ23/a_i1 + ξ13/a_i2 + ξ12/a_i3 + k_i (a_i1 X1 + a_i2 X2 + a_i3 X3) = 0,   i = 1, 2, 3
/// ```
///
/// twelve scalar equations in nine unknowns, solved by least squares and
/// gated on the residual.
pub fn xi_forms(a: &CMat3, k: &CVec3) -> Result<[ProjLine; 3]> {
    let one = Complex64::new(1.0, 0.0);
    if a.iter().flatten().any(|x| x.norm() == 0.0) {
        return Err(Error::Degenerate("zero coefficient in the ξ system"));
    }
    let r = Matrix4x3::from_fn(|row, col| if row == 0 { one } else { a[row - 1][col].inv() });
    let rhs = Matrix4x3::from_fn(|row, col| if row == 0 { -one } else { -k[row - 1] * a[row - 1][col] });
    let (x, resid) = lstsq_4x3(&r, &rhs)?;
    if !(resid < XI_CONSISTENCY_TOL) {
        return Err(Error::Inconsistent(resid));
    }
    let line = |row: usize| ProjLine::new([x[(row, 0)], x[(row, 1)], x[(row, 2)]]);
    Ok([line(0)?, line(1)?, line(2)?])
}

/// Riemann's model `4 X1ξ23 X2ξ13 − (X1ξ23 + X2ξ13 − X3ξ12)²`, i.e. the
/// rationalization of `√(X1ξ23) + √(X2ξ13) + √(X3ξ12) = 0`, normalized to
/// unit largest coefficient.
pub fn riemann_quartic(xi: &[ProjLine; 3]) -> Result<QuarticCurve> {
    let p1 = TernaryForm::variable(0).mul(&TernaryForm::linear(xi[0].coeffs()));
    let p2 = TernaryForm::variable(1).mul(&TernaryForm::linear(xi[1].coeffs()));
    let p3 = TernaryForm::variable(2).mul(&TernaryForm::linear(xi[2].coeffs()));
    let four = Complex64::new(4.0, 0.0);
    let minus_one = Complex64::new(-1.0, 0.0);
    let s = p1.add(&p2).add(&p3.scale(minus_one));
    let f = p1.mul(&p2).scale(four).add(&s.mul(&s).scale(minus_one));
    let curve = QuarticCurve::from_form(&f);
    if curve.max_abs() <= 1e-300 {
        return Err(Error::Degenerate("Riemann model polynomial vanishes"));
    }
    Ok(curve.normalized())
}

/// The matrix whose `j`-th column is `w_j · grad θ[q_j]`, with weights
/// `D[q4,q2,q3], D[q1,q4,q3], D[q1,q2,q4]`. It sends Aronhold-frame
/// covectors to theta-frame covectors: `A e1 ∝ grad θ[q1]`,
/// `A (1,1,1)ᵀ ∝ grad θ[q4]`.
pub fn frame_matrix(sys: &AronholdSystem, table: &ThetaTable) -> Result<CMat3> {
    let c = |n: usize| sys.q(n).characteristic();
    let weights = [
        table.det(&c(4), &c(2), &c(3)),
        table.det(&c(1), &c(4), &c(3)),
        table.det(&c(1), &c(2), &c(4)),
    ];
    let grads = [table.gradient(&c(1)), table.gradient(&c(2)), table.gradient(&c(3))];
    let m: CMat3 = std::array::from_fn(|row| std::array::from_fn(|col| weights[col] * grads[col][row]));
    if !(condition_number(&to_matrix(&m)) <= FRAME_COND_LIMIT) {
        return Err(Error::Degenerate("frame matrix is near-singular"));
    }
    Ok(m)
}

/// Applies `A⁻¹` to a theta-frame covector.
pub fn to_aronhold_frame(phi: &CMat3, theta_covector: &CVec3) -> Result<ProjLine> {
    ProjLine::new(solve3(&to_matrix(phi), theta_covector, "frame matrix")?)
}

/// A bitangent with its odd form and its name in the Aronhold labelling.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelledLine {
    /// `"q1"…"q7"` or `"q12"…"q67"`.
    pub label: String,
    pub q: QuadForm,
    pub line: ProjLine,
}

/// The 28 bitangents in the Aronhold frame: `q1…q7` followed by the `q_ij`
/// in lexicographic order of `(i, j)`. Each line is the gradient of the odd
/// theta function transported through the frame matrix, normalized.
pub fn all_bitangents(sys: &AronholdSystem, table: &ThetaTable) -> Result<Vec<LabelledLine>> {
    table.require_generic()?;
    let phi = frame_matrix(sys, table)?;
    bitangents_with_frame(sys, table, &phi)
}

pub(crate) fn bitangents_with_frame(
    sys: &AronholdSystem,
    table: &ThetaTable,
    phi: &CMat3,
) -> Result<Vec<LabelledLine>> {
    let derived = derived_forms(sys)?;
    let mut labelled: Vec<(String, QuadForm)> = (1..=7).map(|i| (format!("q{i}"), sys.q(i))).collect();
    labelled.extend(derived.pairs.iter().map(|((i, j), q)| (format!("q{i}{j}"), *q)));
    labelled
        .into_iter()
        .map(|(label, q)| {
            let g = table.gradient(&q.characteristic());
            let line = to_aronhold_frame(phi, &g)?.normalized();
            Ok(LabelledLine { label, q, line })
        })
        .collect()
}
