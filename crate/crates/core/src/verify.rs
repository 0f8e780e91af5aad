//! Numerical certificates: period-matrix validation, special-locus scan and
//! the bitangency test of a line against a quartic.

use num_complex::Complex64;

use crate::chars::Characteristic;
use crate::error::{Error, Result};
use crate::linalg::norm3;
use crate::par::Exec;
use crate::poly::{binary_mul, monomials, QuarticCurve};
use crate::theta::{CVec3, PeriodMatrix, ThetaTable, TruncationPolicy};
use crate::weber::ProjLine;

pub const DEFAULT_BITANGENT_TOL: f64 = 1e-6;

/// A restriction whose coefficients are all below this fraction of the
/// quartic's scale counts as identically zero.
const RESTRICTION_ZERO_TOL: f64 = 1e-13;

/// Double roots closer than this multiple of the cluster radius are
/// reported as a single (near-flex) contact.
const FLEX_SEPARATION_FACTOR: f64 = 10.0;

const ABERTH_MAX_ITER: usize = 2000;

pub fn validate_tau(raw: [[Complex64; 3]; 3]) -> Result<PeriodMatrix> {
    PeriodMatrix::new(raw)
}

/// Reduced even characteristics whose theta constant vanishes at `tau`.
/// Uses the same table and tolerance as the Weber pipeline's admission gate.
pub fn special_locus_scan(tau: &PeriodMatrix, pol: &TruncationPolicy) -> Result<Vec<Characteristic>> {
    Ok(ThetaTable::new(tau, pol)?.vanishing_even())
}

/// A quartic pulled back to a line `x = s·p1 + t·p2`; `coeffs[d]` multiplies
/// `s^{4-d} t^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineRestriction {
    pub coeffs: [Complex64; 5],
    pub p1: CVec3,
    pub p2: CVec3,
}

impl LineRestriction {
    pub fn point(&self, st: [Complex64; 2]) -> CVec3 {
        std::array::from_fn(|i| st[0] * self.p1[i] + st[1] * self.p2[i])
    }
}

/// Two points spanning the line: with `k` the index of the largest covector
/// entry and `i < j` the others, `p1 = e_i - (c_i/c_k) e_k`,
/// `p2 = e_j - (c_j/c_k) e_k`. Invariant under rescaling of the covector.
fn line_basis(line: &ProjLine) -> (CVec3, CVec3) {
    let c = line.coeffs();
    let mut k = 0;
    for idx in 1..3 {
        if c[idx].norm() > c[k].norm() {
            k = idx;
        }
    }
    let others: Vec<usize> = (0..3).filter(|&x| x != k).collect();
    let one = Complex64::new(1.0, 0.0);
    let make = |i: usize| {
        let mut p = [Complex64::new(0.0, 0.0); 3];
        p[i] = one;
        p[k] = -c[i] / c[k];
        p
    };
    (make(others[0]), make(others[1]))
}

pub fn restrict_to_line(f: &QuarticCurve, line: &ProjLine) -> Result<LineRestriction> {
    let scale = f.max_abs();
    if scale == 0.0 {
        return Err(Error::Degenerate("quartic is identically zero"));
    }
    let (p1, p2) = line_basis(line);
    let coords: [Vec<Complex64>; 3] = std::array::from_fn(|i| vec![p1[i], p2[i]]);
    let mut out = [Complex64::new(0.0, 0.0); 5];
    for (e, c) in monomials(4).iter().zip(f.coeffs.iter()) {
        if *c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mut prod = vec![*c];
        for (var, &power) in e.iter().enumerate() {
            for _ in 0..power {
                prod = binary_mul(&prod, &coords[var]);
            }
        }
        for (o, p) in out.iter_mut().zip(prod) {
            *o += p;
        }
    }
    let basis = norm3(&p1).max(norm3(&p2));
    let size = out.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if size <= RESTRICTION_ZERO_TOL * scale * basis.powi(4) {
        return Err(Error::Degenerate("quartic vanishes on the line"));
    }
    Ok(LineRestriction { coeffs: out, p1, p2 })
}

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Roots of `coeffs[0] z^n + … + coeffs[n]` (leading coefficient nonzero)
/// by Aberth–Ehrlich iteration.
fn aberth(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[0];
    let radius = (coeffs[n] / lead).norm().powf(1.0 / n as f64).max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    for _ in 0..ABERTH_MAX_ITER {
        let mut biggest = 0.0f64;
        for k in 0..n {
            let (p, dp) = horner(coeffs, z[k]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let repulsion: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let denom = dp / p - repulsion;
            if denom == Complex64::new(0.0, 0.0) || !denom.is_finite() {
                continue;
            }
            let w = denom.inv();
            z[k] -= w;
            biggest = biggest.max(w.norm() / z[k].norm().max(1.0));
        }
        if biggest < 1e-16 {
            break;
        }
    }
    z
}

fn unit(v: [Complex64; 2]) -> [Complex64; 2] {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

/// Chordal distance between projective points of P¹.
fn chordal(a: &[Complex64; 2], b: &[Complex64; 2]) -> f64 {
    let num = (a[0] * b[1] - a[1] * b[0]).norm();
    let den = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt() * (b[0].norm_sqr() + b[1].norm_sqr()).sqrt();
    num / den
}

/// The four roots `(s : t)` of a binary quartic, as unit vectors.
pub fn binary_quartic_roots(b: &[Complex64; 5]) -> Result<Vec<[Complex64; 2]>> {
    let size = b.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if size == 0.0 {
        return Err(Error::Degenerate("binary quartic is zero"));
    }
    let zero = |c: &Complex64| c.norm() <= 1e-15 * size;
    let one = Complex64::new(1.0, 0.0);
    let nil = Complex64::new(0.0, 0.0);
    // chart t = 1 reads the coefficients as Σ b_d s^{4-d}; chart s = 1 as Σ b_d t^d
    let s_chart = b[0].norm() >= b[4].norm();
    let poly: Vec<Complex64> = if s_chart { b.to_vec() } else { b.iter().rev().copied().collect() };
    let (at_zero, at_inf) = if s_chart { ([nil, one], [one, nil]) } else { ([one, nil], [nil, one]) };
    let leading = poly.iter().take_while(|c| zero(c)).count();
    let trailing = poly.iter().rev().take_while(|c| zero(c)).count();
    let mut roots = Vec::with_capacity(4);
    roots.extend(std::iter::repeat_n(at_inf, leading));
    roots.extend(std::iter::repeat_n(at_zero, trailing));
    if leading + trailing < 4 {
        for x in aberth(&poly[leading..5 - trailing]) {
            roots.push(if s_chart { unit([x, one]) } else { unit([one, x]) });
        }
    }
    Ok(roots)
}

/// Splits four roots into two pairs, the closest pair first.
fn pair_roots(r: &[[Complex64; 2]]) -> [([Complex64; 2], [Complex64; 2]); 2] {
    let pairings = [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]];
    let mut best = (f64::INFINITY, 0, 0);
    for (idx, pairing) in pairings.iter().enumerate() {
        for (side, &(a, b)) in pairing.iter().enumerate() {
            let d = chordal(&r[a], &r[b]);
            if d < best.0 {
                best = (d, idx, side);
            }
        }
    }
    let pairing = pairings[best.1];
    let first = pairing[best.2];
    let second = pairing[1 - best.2];
    [(r[first.0], r[first.1]), (r[second.0], r[second.1])]
}

/// Midpoint of two nearby unit vectors after removing their relative phase.
fn merge(a: &[Complex64; 2], b: &[Complex64; 2]) -> [Complex64; 2] {
    let inner = a[0].conj() * b[0] + a[1].conj() * b[1];
    let phase = if inner.norm() > 0.0 { inner / inner.norm() } else { Complex64::new(1.0, 0.0) };
    unit([(a[0] + b[0] / phase) / 2.0, (a[1] + b[1] / phase) / 2.0])
}

/// Newton steps on the derivative, which has a simple root at a double root
/// of the quartic. Steps that do not decrease `|P'|` are discarded.
fn polish_double_root(b: &[Complex64; 5], m: [Complex64; 2]) -> [Complex64; 2] {
    // affine chart on the larger coordinate; coefficients highest degree first
    let s_chart = m[0].norm() <= m[1].norm();
    let poly: Vec<Complex64> = if s_chart { b.to_vec() } else { b.iter().rev().copied().collect() };
    let deriv: Vec<Complex64> = (0..4).map(|d| poly[d] * (4 - d) as f64).collect();
    let mut x = if s_chart { m[0] / m[1] } else { m[1] / m[0] };
    let mut size = horner(&deriv, x).0.norm();
    for _ in 0..8 {
        let (dp, ddp) = horner(&deriv, x);
        if dp == Complex64::new(0.0, 0.0) || ddp == Complex64::new(0.0, 0.0) {
            break;
        }
        let next = x - dp / ddp;
        let next_size = horner(&deriv, next).0.norm();
        if !(next_size < size) {
            break;
        }
        x = next;
        size = next_size;
    }
    let one = Complex64::new(1.0, 0.0);
    if s_chart { unit([x, one]) } else { unit([one, x]) }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BitangencyReport {
    pub line: ProjLine,
    pub is_bitangent: bool,
    /// Two contact points, or one when the double roots merge.
    pub contact_points: Vec<CVec3>,
    /// `‖P − c g²‖ / ‖P‖` for the restriction `P` and the best multiple of
    /// the square of the clustered double-root form `g`.
    pub residual: f64,
    /// Chordal distance between the two double roots.
    pub separation: f64,
    /// Half the larger within-pair chordal distance.
    pub cluster_radius: f64,
    /// The two double roots are not separated by more than ten cluster radii.
    pub near_flex: bool,
}

/// Decides whether `line` meets `f` in two double points.
pub fn bitangency_check(f: &QuarticCurve, line: &ProjLine, tol: f64) -> Result<BitangencyReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidPolicy("tolerance must be positive"));
    }
    let restriction = restrict_to_line(f, line)?;
    let p = restriction.coeffs;
    let roots = binary_quartic_roots(&p)?;
    let pairs = pair_roots(&roots);
    let doubles = pairs.map(|(a, b)| polish_double_root(&p, merge(&a, &b)));
    let cluster_radius = pairs.iter().map(|(a, b)| chordal(a, b)).fold(0.0, f64::max) / 2.0;
    let separation = chordal(&doubles[0], &doubles[1]);

    // g = Π (m1 s − m0 t) vanishes at both double roots
    let linear = |m: &[Complex64; 2]| vec![m[1], -m[0]];
    let g = binary_mul(&linear(&doubles[0]), &linear(&doubles[1]));
    let g2 = binary_mul(&g, &g);
    let dot: Complex64 = g2.iter().zip(&p).map(|(x, y)| x.conj() * y).sum();
    let g2_norm2: f64 = g2.iter().map(|x| x.norm_sqr()).sum();
    let c = dot / g2_norm2;
    let p_norm = p.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let residual = g2.iter().zip(&p).map(|(x, y)| (y - c * x).norm_sqr()).sum::<f64>().sqrt() / p_norm;

    let near_flex = separation <= FLEX_SEPARATION_FACTOR * cluster_radius;
    let contact_points = if near_flex {
        vec![restriction.point(merge(&doubles[0], &doubles[1]))]
    } else {
        doubles.iter().map(|m| restriction.point(*m)).collect()
    };
    Ok(BitangencyReport {
        line: *line,
        is_bitangent: residual < tol,
        contact_points,
        residual,
        separation,
        cluster_radius,
        near_flex,
    })
}

/// Runs [`bitangency_check`] on every line, preserving order.
pub fn check_all(
    f: &QuarticCurve,
    lines: &[ProjLine],
    tol: f64,
    exec: Exec,
) -> Result<Vec<BitangencyReport>> {
    exec.map(lines, |l| bitangency_check(f, l, tol)).into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct VerifySummary {
    pub pass: usize,
    pub fail: usize,
    pub max_residual: f64,
}

pub fn summarize(reports: &[BitangencyReport]) -> VerifySummary {
    let pass = reports.iter().filter(|r| r.is_bitangent).count();
    VerifySummary {
        pass,
        fail: reports.len() - pass,
        max_residual: reports.iter().map(|r| r.residual).fold(0.0, f64::max),
    }
}
