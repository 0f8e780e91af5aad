//! Ternary forms, plane quartics and binary quartics.

use num_complex::Complex64;

use crate::theta::CVec3;

/// Exponents `(a, b, c)` of the monomials of degree `d` in graded-lex order,
/// `X1^d` first.
pub fn monomials(degree: u8) -> Vec<[u8; 3]> {
    let mut out = Vec::new();
    for a in (0..=degree).rev() {
        for b in (0..=degree - a).rev() {
            out.push([a, b, degree - a - b]);
        }
    }
    out
}

/// A homogeneous polynomial in `X1, X2, X3`.
#[derive(Debug, Clone, PartialEq)]
pub struct TernaryForm {
    degree: u8,
    coeffs: Vec<Complex64>,
}

impl TernaryForm {
    pub fn zero(degree: u8) -> Self {
        let n = monomials(degree).len();
        TernaryForm { degree, coeffs: vec![Complex64::new(0.0, 0.0); n] }
    }

    pub fn linear(c: &CVec3) -> Self {
        TernaryForm { degree: 1, coeffs: c.to_vec() }
    }

    /// The coordinate function `X_{i+1}`.
    pub fn variable(i: usize) -> Self {
        let mut c = [Complex64::new(0.0, 0.0); 3];
        c[i] = Complex64::new(1.0, 0.0);
        TernaryForm::linear(&c)
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    fn index_of(degree: u8, e: [u8; 3]) -> usize {
        // position of (a, b, c) in graded-lex order
        let d = usize::from(degree);
        let a = usize::from(e[0]);
        let b = usize::from(e[1]);
        let before_a: usize = (a + 1..=d).map(|aa| d - aa + 1).sum();
        before_a + (d - a - b)
    }

    pub fn mul(&self, other: &TernaryForm) -> TernaryForm {
        let mut out = TernaryForm::zero(self.degree + other.degree);
        let ma = monomials(self.degree);
        let mb = monomials(other.degree);
        for (ea, ca) in ma.iter().zip(&self.coeffs) {
            for (eb, cb) in mb.iter().zip(&other.coeffs) {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                out.coeffs[Self::index_of(out.degree, e)] += ca * cb;
            }
        }
        out
    }

    pub fn add(&self, other: &TernaryForm) -> TernaryForm {
        assert_eq!(self.degree, other.degree, "degree mismatch");
        TernaryForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> TernaryForm {
        TernaryForm { degree: self.degree, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn eval(&self, x: &CVec3) -> Complex64 {
        monomials(self.degree)
            .iter()
            .zip(&self.coeffs)
            .map(|(e, c)| c * x[0].powu(u32::from(e[0])) * x[1].powu(u32::from(e[1])) * x[2].powu(u32::from(e[2])))
            .sum()
    }
}

/// A plane quartic: 15 coefficients in graded-lex monomial order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticCurve {
    pub coeffs: [Complex64; 15],
}

impl QuarticCurve {
    pub fn from_form(f: &TernaryForm) -> Self {
        assert_eq!(f.degree(), 4, "quartic expected");
        let mut coeffs = [Complex64::new(0.0, 0.0); 15];
        coeffs.copy_from_slice(f.coeffs());
        QuarticCurve { coeffs }
    }

    pub fn monomials() -> Vec<[u8; 3]> {
        monomials(4)
    }

    pub fn form(&self) -> TernaryForm {
        TernaryForm { degree: 4, coeffs: self.coeffs.to_vec() }
    }

    pub fn coefficient(&self, e: [u8; 3]) -> Complex64 {
        self.coeffs[TernaryForm::index_of(4, e)]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() == 0.0
    }

    /// Divides by the coefficient of largest modulus (first one on ties).
    pub fn normalized(&self) -> QuarticCurve {
        let mut best = 0;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.norm() > self.coeffs[best].norm() {
                best = i;
            }
        }
        let pivot = self.coeffs[best];
        QuarticCurve { coeffs: self.coeffs.map(|c| c / pivot) }
    }

    pub fn eval(&self, x: &CVec3) -> Complex64 {
        self.form().eval(x)
    }
}

/// Product of binary forms given by coefficients of `s^{n-d} t^d`.
pub(crate) fn binary_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}
