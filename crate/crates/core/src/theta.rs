//! Riemann theta functions with integer characteristics in genus 3.
//!
//! ```text
//! θ_m(τ, z) = Σ_{n ∈ Z³} e[ (n + m'/2)ᵀ τ (n + m'/2) + 2 (n + m'/2)·(z + m''/2) ],   e(x) = exp(πi x)
//! ```
//!
//! The sum is truncated to a box around the maximum of the Gaussian envelope
//! `exp(-π (p - p*)ᵀ Y (p - p*))`, `Y = Im τ`, `p* = -Y⁻¹ Im z`. The half-width
//! is chosen so that every omitted term is below `target_tail` times the
//! largest retained term.

use std::f64::consts::PI;

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;

use crate::chars::{Characteristic, QuadForm};
use crate::error::{Error, Result};
use crate::par::Exec;

pub type CVec3 = [Complex64; 3];

pub(crate) const ZERO3: CVec3 = [Complex64::new(0.0, 0.0); 3];

/// Largest tolerated `|τ_ij - τ_ji|` before a matrix is rejected.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// A theta constant counts as zero when `|θ| < VANISHING_TOL · max_even |θ|`.
pub const VANISHING_TOL: f64 = 1e-8;

/// `e(x) = exp(πi x)`. All phases in the crate go through this helper or
/// its exact integer variants below.
pub fn e(x: Complex64) -> Complex64 {
    (Complex64::new(0.0, PI) * x).exp()
}

/// `e(k)` for an integer `k`, i.e. `(-1)^k`.
pub fn e_int(k: i64) -> i8 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `i^k` for an integer `k`, exact.
pub fn i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// A point of the Siegel upper half-space of degree 3.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodMatrix {
    tau: Matrix3<Complex64>,
    im_inv: Matrix3<f64>,
    im_min_eig: f64,
    im_max_eig: f64,
}

impl PeriodMatrix {
    /// Validates and symmetrizes a raw 3×3 matrix.
    pub fn new(raw: [[Complex64; 3]; 3]) -> Result<Self> {
        if raw.iter().flatten().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut asym = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                asym = asym.max((raw[i][j] - raw[j][i]).norm());
            }
        }
        if asym > SYMMETRY_TOL {
            return Err(Error::Asymmetric(asym));
        }
        let tau = Matrix3::from_fn(|i, j| (raw[i][j] + raw[j][i]) * 0.5);
        let im = tau.map(|c| c.im);
        let eig = SymmetricEigen::new(im).eigenvalues;
        let im_min_eig = eig.min();
        if !(im_min_eig > 0.0) {
            return Err(Error::NotPositiveDefinite(im_min_eig));
        }
        let im_inv = im.try_inverse().ok_or(Error::NotPositiveDefinite(im_min_eig))?;
        Ok(PeriodMatrix { tau, im_inv, im_min_eig, im_max_eig: eig.max() })
    }

    /// `τ = diag(t1, t2, t3)`.
    pub fn diagonal(t: [Complex64; 3]) -> Result<Self> {
        let zero = Complex64::new(0.0, 0.0);
        let mut raw = [[zero; 3]; 3];
        for i in 0..3 {
            raw[i][i] = t[i];
        }
        PeriodMatrix::new(raw)
    }

    /// `τ = i·I₃`, a decomposable (product of elliptic curves) point.
    pub fn i_identity() -> Self {
        PeriodMatrix::diagonal([Complex64::new(0.0, 1.0); 3]).expect("i·I is in the Siegel space")
    }

    pub fn matrix(&self) -> &Matrix3<Complex64> {
        &self.tau
    }

    pub fn entries(&self) -> [[Complex64; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.tau[(i, j)]))
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.tau[(i, j)]
    }

    /// Smallest eigenvalue of `Im τ`.
    pub fn min_im_eigenvalue(&self) -> f64 {
        self.im_min_eig
    }

    /// `xᵀ τ y` for complex vectors.
    pub fn bilinear(&self, x: &CVec3, y: &CVec3) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                acc += x[i] * self.tau[(i, j)] * y[j];
            }
        }
        acc
    }
}

/// Controls where the lattice sum is cut off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    /// Minimum half-width of the summation box.
    pub radius: u32,
    /// Bound on each omitted term relative to the largest retained one.
    pub target_tail: f64,
    /// Hard cap on the half-width.
    pub max_radius: u32,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { radius: 1, target_tail: 1e-15, max_radius: 64 }
    }
}

impl TruncationPolicy {
    pub fn with_tail(target_tail: f64) -> Self {
        TruncationPolicy { target_tail, ..Default::default() }
    }

    fn check(&self) -> Result<()> {
        if self.radius < 1 {
            return Err(Error::InvalidPolicy("radius must be at least 1"));
        }
        if !(self.target_tail > 0.0 && self.target_tail < 1.0) {
            return Err(Error::InvalidPolicy("target_tail must lie in (0, 1)"));
        }
        Ok(())
    }

    /// Half-width of the box for a Gaussian centred at `center` (in `p` space).
    fn half_width(&self, tau: &PeriodMatrix, center: &Vector3<f64>, m_prime: &[i32; 3]) -> Result<f64> {
        self.check()?;
        // gap between the Gaussian peak and the best lattice point p = n + m'/2
        let offset = Vector3::from_fn(|i, _| {
            let shift = f64::from(m_prime[i]) / 2.0;
            let c = center[i] - shift;
            c - c.round()
        });
        let peak_gap = tau.im_max_eig * offset.norm_squared();
        let r2 = (-self.target_tail.ln() / PI + peak_gap) / tau.im_min_eig;
        let width = r2.sqrt().max(f64::from(self.radius));
        if width > f64::from(self.max_radius) {
            return Err(Error::TruncationCap { needed: width.ceil() as u64, cap: self.max_radius });
        }
        Ok(width)
    }

    /// Effective half-width used for `θ_m(τ, 0)`.
    pub fn effective_radius(&self, m: &Characteristic, tau: &PeriodMatrix) -> Result<u32> {
        let w = self.half_width(tau, &Vector3::zeros(), &m.m_prime)?;
        Ok(w.ceil() as u32)
    }
}

/// `(∂θ/∂z1, ∂θ/∂z2, ∂θ/∂z3)` at `z = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaGradient(pub CVec3);

impl ThetaGradient {
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Raw lattice sum for `m` exactly as given (no reduction), optionally with
/// the z-gradient.
fn series(
    m: &Characteristic,
    tau: &PeriodMatrix,
    z: &CVec3,
    pol: &TruncationPolicy,
    with_grad: bool,
) -> Result<(Complex64, CVec3)> {
    let im_z = Vector3::new(z[0].im, z[1].im, z[2].im);
    let center = -(tau.im_inv * im_z);
    let width = pol.half_width(tau, &center, &m.m_prime)?;

    let half_p: [f64; 3] = m.m_prime.map(|x| f64::from(x) / 2.0);
    let half_pp: [f64; 3] = m.m_double_prime.map(|x| f64::from(x) / 2.0);
    let lo: [i64; 3] = std::array::from_fn(|i| (center[i] - half_p[i] - width).floor() as i64);
    let hi: [i64; 3] = std::array::from_fn(|i| (center[i] - half_p[i] + width).ceil() as i64);
    let shifted: CVec3 = std::array::from_fn(|i| z[i] + half_pp[i]);
    let t = &tau.tau;
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);

    let mut value = Complex64::new(0.0, 0.0);
    let mut grad = ZERO3;
    for n0 in lo[0]..=hi[0] {
        let p0 = n0 as f64 + half_p[0];
        for n1 in lo[1]..=hi[1] {
            let p1 = n1 as f64 + half_p[1];
            for n2 in lo[2]..=hi[2] {
                let p2 = n2 as f64 + half_p[2];
                let quad = t[(0, 0)] * (p0 * p0)
                    + t[(1, 1)] * (p1 * p1)
                    + t[(2, 2)] * (p2 * p2)
                    + (t[(0, 1)] * (p0 * p1) + t[(0, 2)] * (p0 * p2) + t[(1, 2)] * (p1 * p2)) * 2.0;
                let lin = (shifted[0] * p0 + shifted[1] * p1 + shifted[2] * p2) * 2.0;
                let term = e(quad + lin);
                value += term;
                if with_grad {
                    grad[0] += two_pi_i * p0 * term;
                    grad[1] += two_pi_i * p1 * term;
                    grad[2] += two_pi_i * p2 * term;
                }
            }
        }
    }
    Ok((value, grad))
}

/// The lattice sum for `m` taken literally, without reducing the
/// characteristic first.
pub fn theta_series(m: &Characteristic, tau: &PeriodMatrix, z: &CVec3, pol: &TruncationPolicy) -> Result<Complex64> {
    series(m, tau, z, pol, false).map(|r| r.0)
}

/// `θ_m(τ, z)`. Non-reduced characteristics are evaluated through their
/// reduction and the tracked sign.
pub fn theta(m: &Characteristic, tau: &PeriodMatrix, z: &CVec3, pol: &TruncationPolicy) -> Result<Complex64> {
    let (r, sign) = m.reduce();
    Ok(series(&r, tau, z, pol, false)?.0 * f64::from(sign))
}

pub fn theta_const(m: &Characteristic, tau: &PeriodMatrix, pol: &TruncationPolicy) -> Result<Complex64> {
    theta(m, tau, &ZERO3, pol)
}

/// Term-wise differentiated series at `z = 0`.
pub fn grad_theta0(m: &Characteristic, tau: &PeriodMatrix, pol: &TruncationPolicy) -> Result<ThetaGradient> {
    let (r, sign) = m.reduce();
    let (_, g) = series(&r, tau, &ZERO3, pol, true)?;
    Ok(ThetaGradient(g.map(|c| c * f64::from(sign))))
}

pub fn det3(rows: [&CVec3; 3]) -> Complex64 {
    let [a, b, c] = rows;
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// `D[q1, q2, q3] = det(grad θ[q1]; grad θ[q2]; grad θ[q3])` at `z = 0`.
pub fn jacobian_det(
    q1: &Characteristic,
    q2: &Characteristic,
    q3: &Characteristic,
    tau: &PeriodMatrix,
    pol: &TruncationPolicy,
) -> Result<Complex64> {
    for q in [q1, q2, q3] {
        if !q.is_odd() {
            return Err(Error::NotOdd(*q));
        }
    }
    let g1 = grad_theta0(q1, tau, pol)?;
    let g2 = grad_theta0(q2, tau, pol)?;
    let g3 = grad_theta0(q3, tau, pol)?;
    Ok(det3([&g1.0, &g2.0, &g3.0]))
}

/// Characteristics `(n1, …, n4) = ½ (m1, …, m4) H` with `H` the 4×4 sign
/// matrix of the addition formula.
pub fn addition_partners(ms: &[Characteristic; 4]) -> Result<[Characteristic; 4]> {
    let [m1, m2, m3, m4] = *ms;
    let sums = [m1 + m2 + m3 + m4, m1 + m2 - m3 - m4, m1 - m2 + m3 - m4, m1 - m2 - m3 + m4];
    let mut out = [Characteristic::ZERO; 4];
    for (slot, s) in out.iter_mut().zip(sums) {
        *slot = s.halve().ok_or(Error::NonIntegral)?;
    }
    Ok(out)
}

fn add3(a: &CVec3, b: &CVec3, sign: f64) -> CVec3 {
    std::array::from_fn(|i| a[i] + b[i] * sign)
}

/// Normalized residual of the addition formula
///
/// ```text
/// θ_{m1}(u+v) θ_{m2}(u−v) θ_{m3}(0) θ_{m4}(0)
///   = 2⁻³ Σ_{a ∈ {0,1}⁶} e(m1'·a'') θ_{n1+a}(u) θ_{n2+a}(u) θ_{n3+a}(v) θ_{n4+a}(v)
/// ```
///
/// scaled by the larger of `|LHS|` and `2⁻³ Σ |term|`.
pub fn addition_formula_residual(
    ms: &[Characteristic; 4],
    u: &CVec3,
    v: &CVec3,
    tau: &PeriodMatrix,
    pol: &TruncationPolicy,
) -> Result<f64> {
    addition_formula_residual_with(ms, u, v, tau, pol, Exec::default())
}

pub fn addition_formula_residual_with(
    ms: &[Characteristic; 4],
    u: &CVec3,
    v: &CVec3,
    tau: &PeriodMatrix,
    pol: &TruncationPolicy,
    exec: Exec,
) -> Result<f64> {
    let ns = addition_partners(ms)?;
    let lhs = theta(&ms[0], tau, &add3(u, v, 1.0), pol)?
        * theta(&ms[1], tau, &add3(u, v, -1.0), pol)?
        * theta(&ms[2], tau, &ZERO3, pol)?
        * theta(&ms[3], tau, &ZERO3, pol)?;

    let terms: Vec<Result<Complex64>> = exec.map_range(64, |idx| {
        let a = QuadForm::all().nth(idx).expect("64 forms").characteristic();
        let phase: i64 = (0..3).map(|i| i64::from(ms[0].m_prime[i]) * i64::from(a.m_double_prime[i])).sum();
        let t = theta(&(ns[0] + a), tau, u, pol)?
            * theta(&(ns[1] + a), tau, u, pol)?
            * theta(&(ns[2] + a), tau, v, pol)?
            * theta(&(ns[3] + a), tau, v, pol)?;
        Ok(t * f64::from(e_int(phase)))
    });
    let mut rhs = Complex64::new(0.0, 0.0);
    let mut mass = 0.0;
    for t in terms {
        let t = t?;
        rhs += t;
        mass += t.norm();
    }
    rhs /= 8.0;
    let scale = lhs.norm().max(mass / 8.0).max(f64::MIN_POSITIVE);
    Ok((lhs - rhs).norm() / scale)
}

/// Normalized residual of the half-period shift law
///
/// ```text
/// θ[q](τ, z + h/2 + τk/2) = e(−½ k·(m''+h) − k·z − ¼ kᵀτk) θ[q + (k, h)](τ, z)
/// ```
pub fn quasi_periodicity_residual(
    q: &Characteristic,
    k: [u8; 3],
    h: [u8; 3],
    tau: &PeriodMatrix,
    z: &CVec3,
    pol: &TruncationPolicy,
) -> Result<f64> {
    let (lhs, rhs) = quasi_periodicity_sides(q, k, h, tau, z, pol)?;
    let scale = lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE);
    Ok((lhs - rhs).norm() / scale)
}

/// Both sides of the shift law, for composing it in tests.
pub fn quasi_periodicity_sides(
    q: &Characteristic,
    k: [u8; 3],
    h: [u8; 3],
    tau: &PeriodMatrix,
    z: &CVec3,
    pol: &TruncationPolicy,
) -> Result<(Complex64, Complex64)> {
    let kc: CVec3 = k.map(|x| Complex64::new(f64::from(x), 0.0));
    let tau_k: CVec3 = std::array::from_fn(|i| (0..3).map(|j| tau.get(i, j) * kc[j]).sum());
    let shifted: CVec3 = std::array::from_fn(|i| z[i] + f64::from(h[i]) / 2.0 + tau_k[i] / 2.0);
    let lhs = theta(q, tau, &shifted, pol)?;

    let k_mh: f64 = (0..3).map(|i| f64::from(k[i]) * f64::from(q.m_double_prime[i] + i32::from(h[i]))).sum();
    let k_z: Complex64 = (0..3).map(|i| kc[i] * z[i]).sum();
    let k_tau_k = tau.bilinear(&kc, &kc);
    let factor = e(Complex64::new(-0.5 * k_mh, 0.0) - k_z - k_tau_k / 4.0);
    let target = *q + Characteristic::new(k.map(i32::from), h.map(i32::from));
    let rhs = factor * theta(&target, tau, z, pol)?;
    Ok((lhs, rhs))
}

/// All 64 reduced theta constants and z-gradients at one `τ`.
///
/// Lookups reduce their argument and apply the sign, so the table answers
/// exactly what [`theta_const`] and [`grad_theta0`] would.
#[derive(Debug, Clone)]
pub struct ThetaTable {
    tau: PeriodMatrix,
    constants: [Complex64; 64],
    gradients: [CVec3; 64],
    scale: f64,
}

impl ThetaTable {
    pub fn new(tau: &PeriodMatrix, pol: &TruncationPolicy) -> Result<Self> {
        ThetaTable::new_with(tau, pol, Exec::default())
    }

    pub fn new_with(tau: &PeriodMatrix, pol: &TruncationPolicy, exec: Exec) -> Result<Self> {
        let chars: Vec<Characteristic> = QuadForm::all().map(|q| q.characteristic()).collect();
        let values = exec.map(&chars, |m| series(m, tau, &ZERO3, pol, true));
        let mut constants = [Complex64::new(0.0, 0.0); 64];
        let mut gradients = [ZERO3; 64];
        for (i, v) in values.into_iter().enumerate() {
            let (c, g) = v?;
            constants[i] = c;
            gradients[i] = g;
        }
        let scale = QuadForm::even()
            .iter()
            .map(|q| constants[q.index() as usize].norm())
            .fold(0.0, f64::max);
        Ok(ThetaTable { tau: tau.clone(), constants, gradients, scale })
    }

    pub fn tau(&self) -> &PeriodMatrix {
        &self.tau
    }

    pub fn constant(&self, m: &Characteristic) -> Complex64 {
        let (r, sign) = m.reduce();
        self.constants[r.form().index() as usize] * f64::from(sign)
    }

    pub fn gradient(&self, m: &Characteristic) -> CVec3 {
        let (r, sign) = m.reduce();
        self.gradients[r.form().index() as usize].map(|c| c * f64::from(sign))
    }

    pub fn det(&self, a: &Characteristic, b: &Characteristic, c: &Characteristic) -> Complex64 {
        det3([&self.gradient(a), &self.gradient(b), &self.gradient(c)])
    }

    /// Largest modulus among the 36 even constants.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn is_vanishing(&self, m: &Characteristic) -> bool {
        self.constant(m).norm() < VANISHING_TOL * self.scale
    }

    /// Reduced even characteristics whose constant vanishes.
    pub fn vanishing_even(&self) -> Vec<Characteristic> {
        QuadForm::even()
            .into_iter()
            .map(|q| q.characteristic())
            .filter(|m| self.is_vanishing(m))
            .collect()
    }

    /// Fails with the vanishing list unless every even constant is nonzero.
    pub fn require_generic(&self) -> Result<()> {
        let vanishing = self.vanishing_even();
        if vanishing.is_empty() {
            Ok(())
        } else {
            Err(Error::SpecialLocus(vanishing))
        }
    }
}
