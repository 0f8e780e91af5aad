//! Quadratic forms on the symplectic space F2^6 and integer theta
//! characteristics.
//!
//! A vector `w = (λ, μ)` is stored as two 3-bit masks, with the first
//! coordinate in the most significant bit so that the numeric order of
//! [`F2Vector::index`] matches the lexicographic order of the bracket notation
//! `[λ1λ2λ3|μ1μ2μ3]`. Quadratic forms are identified with their coordinates
//! `[m'; m'']` relative to the origin form `q0(λ, μ) = λ·μ`:
//!
//! ```text
//! q(λ, μ) = λ·μ + λ·m' + m''·μ
//! ```
//!
//! With this origin the symplectic form is `ω(v, w) = λv·μw + μv·λw`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Exec;

#[inline]
fn dot3(a: u8, b: u8) -> u8 {
    ((a & b).count_ones() & 1) as u8
}

fn bits_of(mask: u8) -> [u8; 3] {
    [(mask >> 2) & 1, (mask >> 1) & 1, mask & 1]
}

fn mask_of(bits: [u8; 3]) -> u8 {
    ((bits[0] & 1) << 2) | ((bits[1] & 1) << 1) | (bits[2] & 1)
}

/// A vector of the 6-dimensional symplectic space over F2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct F2Vector {
    lambda: u8,
    mu: u8,
}

impl F2Vector {
    pub const ZERO: F2Vector = F2Vector { lambda: 0, mu: 0 };

    pub const fn new(lambda: u8, mu: u8) -> Self {
        F2Vector { lambda: lambda & 7, mu: mu & 7 }
    }

    pub fn from_bits(lambda: [u8; 3], mu: [u8; 3]) -> Self {
        F2Vector::new(mask_of(lambda), mask_of(mu))
    }

    pub const fn from_index(index: u8) -> Self {
        F2Vector::new(index >> 3, index)
    }

    pub const fn index(self) -> u8 {
        (self.lambda << 3) | self.mu
    }

    pub const fn lambda(self) -> u8 {
        self.lambda
    }

    pub const fn mu(self) -> u8 {
        self.mu
    }

    pub fn lambda_bits(self) -> [u8; 3] {
        bits_of(self.lambda)
    }

    pub fn mu_bits(self) -> [u8; 3] {
        bits_of(self.mu)
    }

    /// All 64 vectors in index order.
    pub fn all() -> impl Iterator<Item = F2Vector> {
        (0..64u8).map(F2Vector::from_index)
    }
}

impl Add for F2Vector {
    type Output = F2Vector;

    fn add(self, rhs: F2Vector) -> F2Vector {
        F2Vector::new(self.lambda ^ rhs.lambda, self.mu ^ rhs.mu)
    }
}

impl fmt::Display for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = self.lambda_bits();
        let m = self.mu_bits();
        write!(f, "[{}{}{}|{}{}{}]", l[0], l[1], l[2], m[0], m[1], m[2])
    }
}

/// The symplectic pairing `ω(v, w) = λv·μw + μv·λw` (mod 2).
pub fn symplectic_form(v: F2Vector, w: F2Vector) -> u8 {
    dot3(v.lambda, w.mu) ^ dot3(v.mu, w.lambda)
}

/// A quadratic form on F2^6, stored by its coordinates relative to `q0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadForm {
    coords: F2Vector,
}

impl QuadForm {
    /// The origin form `q0(λ, μ) = λ·μ`.
    pub const ORIGIN: QuadForm = QuadForm { coords: F2Vector::ZERO };

    pub const fn new(coords: F2Vector) -> Self {
        QuadForm { coords }
    }

    /// Form with coordinates `[m'; m'']`, each given as three bits.
    pub fn from_bits(m_prime: [u8; 3], m_double_prime: [u8; 3]) -> Self {
        QuadForm::new(F2Vector::from_bits(m_prime, m_double_prime))
    }

    pub const fn coords(self) -> F2Vector {
        self.coords
    }

    pub const fn index(self) -> u8 {
        self.coords.index()
    }

    /// `q(w) = λ·μ + λ·m' + m''·μ`.
    pub fn eval(self, w: F2Vector) -> u8 {
        dot3(w.lambda, w.mu) ^ dot3(w.lambda, self.coords.lambda) ^ dot3(self.coords.mu, w.mu)
    }

    /// Arf invariant, `m'·m''`.
    pub fn arf(self) -> u8 {
        dot3(self.coords.lambda, self.coords.mu)
    }

    pub fn is_odd(self) -> bool {
        self.arf() == 1
    }

    pub fn is_even(self) -> bool {
        self.arf() == 0
    }

    /// All 64 forms in index order.
    pub fn all() -> impl Iterator<Item = QuadForm> {
        F2Vector::all().map(QuadForm::new)
    }

    /// The 28 odd forms in index order.
    pub fn odd() -> Vec<QuadForm> {
        QuadForm::all().filter(|q| q.is_odd()).collect()
    }

    /// The 36 even forms in index order.
    pub fn even() -> Vec<QuadForm> {
        QuadForm::all().filter(|q| q.is_even()).collect()
    }

    /// The reduced integer characteristic with the same coordinates.
    pub fn characteristic(self) -> Characteristic {
        let l = self.coords.lambda_bits();
        let m = self.coords.mu_bits();
        Characteristic::new(l.map(i32::from), m.map(i32::from))
    }
}

/// Coordinate-wise sum. For an odd number of summands the result is again a
/// quadratic form (the affine structure of the set of forms over F2^6).
impl Add for QuadForm {
    type Output = QuadForm;

    fn add(self, rhs: QuadForm) -> QuadForm {
        QuadForm::new(self.coords + rhs.coords)
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.coords.fmt(f)
    }
}

/// Evaluates `q` at `w`.
pub fn eval_form(q: QuadForm, w: F2Vector) -> u8 {
    q.eval(w)
}

pub fn arf(q: QuadForm) -> u8 {
    q.arf()
}

/// Arf-sum test: `a(q1) + a(q2) + a(q3) + a(q1 + q2 + q3) = 1`.
pub fn is_azygetic_triple(q1: QuadForm, q2: QuadForm, q3: QuadForm) -> Result<bool> {
    if q1 == q2 || q1 == q3 || q2 == q3 {
        return Err(Error::RepeatedForm);
    }
    Ok(azygetic_unchecked(q1, q2, q3))
}

#[inline]
fn azygetic_unchecked(q1: QuadForm, q2: QuadForm, q3: QuadForm) -> bool {
    (q1.arf() ^ q2.arf() ^ q3.arf() ^ (q1 + q2 + q3).arf()) == 1
}

fn all_distinct(forms: &[QuadForm]) -> bool {
    let mut seen = 0u64;
    for q in forms {
        let bit = 1u64 << q.index();
        if seen & bit != 0 {
            return false;
        }
        seen |= bit;
    }
    true
}

fn all_triples_azygetic(forms: &[QuadForm]) -> bool {
    let n = forms.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if !azygetic_unchecked(forms[i], forms[j], forms[k]) {
                    return false;
                }
            }
        }
    }
    true
}

/// True iff `forms` are seven distinct odd forms with every sub-triple
/// azygetic.
pub fn is_aronhold(forms: &[QuadForm]) -> bool {
    forms.len() == 7
        && all_distinct(forms)
        && forms.iter().all(|q| q.is_odd())
        && all_triples_azygetic(forms)
}

/// An ordered Aronhold system `q1, …, q7`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AronholdSystem {
    forms: [QuadForm; 7],
}

impl AronholdSystem {
    pub fn new(forms: [QuadForm; 7]) -> Result<Self> {
        if is_aronhold(&forms) {
            Ok(AronholdSystem { forms })
        } else {
            Err(Error::NotAronhold)
        }
    }

    /// Builds a system from bracket strings such as `"[111|111]"`.
    pub fn from_brackets(brackets: [&str; 7]) -> Result<Self> {
        let mut forms = [QuadForm::ORIGIN; 7];
        for (slot, text) in forms.iter_mut().zip(brackets) {
            *slot = parse_bracket(text).ok_or(Error::Degenerate("malformed bracket characteristic"))?;
        }
        AronholdSystem::new(forms)
    }

    /// Weber's classical example system; the CLI default.
    pub fn reference() -> Self {
        AronholdSystem::from_brackets([
            "[111|111]",
            "[001|011]",
            "[011|001]",
            "[101|100]",
            "[100|101]",
            "[110|010]",
            "[010|110]",
        ])
        .expect("reference system is Aronhold")
    }

    /// An Aronhold system whose forms sum to the origin `q0`.
    pub fn summing_to_origin() -> Self {
        AronholdSystem::from_brackets([
            "[111|111]",
            "[110|100]",
            "[101|001]",
            "[100|110]",
            "[010|011]",
            "[001|101]",
            "[011|010]",
        ])
        .expect("system is Aronhold")
    }

    pub fn forms(&self) -> &[QuadForm; 7] {
        &self.forms
    }

    /// The form `q_i` for a 1-based label `i`.
    pub fn q(&self, i: usize) -> QuadForm {
        self.forms[i - 1]
    }

    /// `q_S = q1 + … + q7`.
    pub fn sum(&self) -> QuadForm {
        self.forms.iter().fold(QuadForm::ORIGIN, |acc, &q| acc + q)
    }

    /// Forms sorted by index; the canonical representative of the unordered set.
    pub fn sorted(&self) -> [QuadForm; 7] {
        let mut forms = self.forms;
        forms.sort();
        forms
    }
}

impl fmt::Display for AronholdSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, q) in self.forms.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{q}")?;
        }
        Ok(())
    }
}

/// Parses `"[abc|def]"` into a form.
pub fn parse_bracket(text: &str) -> Option<QuadForm> {
    let inner = text.trim().strip_prefix('[')?.strip_suffix(']')?;
    let (l, m) = inner.split_once('|')?;
    let parse3 = |s: &str| -> Option<[u8; 3]> {
        let digits: Vec<u8> = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Some(0),
                '1' => Some(1),
                _ => None,
            })
            .collect::<Option<_>>()?;
        digits.try_into().ok()
    };
    Some(QuadForm::from_bits(parse3(l)?, parse3(m)?))
}

fn aronhold_extend(
    odd: &[QuadForm],
    chosen: &mut Vec<QuadForm>,
    start: usize,
    out: &mut Vec<AronholdSystem>,
) {
    if chosen.len() == 7 {
        let forms: [QuadForm; 7] = chosen.as_slice().try_into().expect("seven forms");
        out.push(AronholdSystem { forms });
        return;
    }
    let remaining = 7 - chosen.len();
    for idx in start..=odd.len() - remaining {
        let cand = odd[idx];
        let ok = (0..chosen.len())
            .all(|i| (i + 1..chosen.len()).all(|j| azygetic_unchecked(chosen[i], chosen[j], cand)));
        if ok {
            chosen.push(cand);
            aronhold_extend(odd, chosen, idx + 1, out);
            chosen.pop();
        }
    }
}

/// All 288 Aronhold systems as sorted 7-sets, in lexicographic order.
pub fn enumerate_aronhold() -> Vec<AronholdSystem> {
    enumerate_aronhold_with(Exec::default())
}

pub fn enumerate_aronhold_with(exec: Exec) -> Vec<AronholdSystem> {
    let odd = QuadForm::odd();
    exec.map_range(odd.len(), |first| {
        let mut out = Vec::new();
        if first + 7 <= odd.len() {
            let mut chosen = vec![odd[first]];
            aronhold_extend(&odd, &mut chosen, first + 1, &mut out);
        }
        out
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Reference enumeration: tests every 7-subset of the odd forms with
/// [`is_aronhold`]. Slow; kept as an oracle for [`enumerate_aronhold`].
pub fn enumerate_aronhold_brute(exec: Exec) -> Vec<AronholdSystem> {
    let odd = QuadForm::odd();
    let n = odd.len();
    exec.map_range(n, |a| {
        let mut out = Vec::new();
        let mut idx = [a, 0, 0, 0, 0, 0, 0];
        // odometer over strictly increasing tails
        fn rec(
            odd: &[QuadForm],
            idx: &mut [usize; 7],
            depth: usize,
            out: &mut Vec<AronholdSystem>,
        ) {
            if depth == 7 {
                let forms = idx.map(|i| odd[i]);
                if is_aronhold(&forms) {
                    out.push(AronholdSystem { forms });
                }
                return;
            }
            for i in idx[depth - 1] + 1..odd.len() {
                idx[depth] = i;
                rec(odd, idx, depth + 1, out);
            }
        }
        rec(&odd, &mut idx, 1, &mut out);
        out
    })
    .into_iter()
    .flatten()
    .collect()
}

/// The labelling of the remaining forms induced by an Aronhold system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedForms {
    /// `q_S`, even.
    pub sum: QuadForm,
    /// `q_ij = q_S + q_i + q_j` for `1 <= i < j <= 7`, all odd.
    pub pairs: Vec<((usize, usize), QuadForm)>,
    /// `q_ijk = q_i + q_j + q_k` for `1 <= i < j < k <= 7`, all even.
    pub triples: Vec<((usize, usize, usize), QuadForm)>,
}

impl DerivedForms {
    /// `q_ij` for 1-based labels, in either order.
    pub fn pair(&self, i: usize, j: usize) -> QuadForm {
        let key = (i.min(j), i.max(j));
        self.pairs
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, q)| *q)
            .expect("pair label in range")
    }
}

pub fn derived_forms(sys: &AronholdSystem) -> Result<DerivedForms> {
    if !is_aronhold(sys.forms()) {
        return Err(Error::NotAronhold);
    }
    let sum = sys.sum();
    let mut pairs = Vec::with_capacity(21);
    let mut triples = Vec::with_capacity(35);
    for i in 1..=7 {
        for j in i + 1..=7 {
            pairs.push(((i, j), sum + sys.q(i) + sys.q(j)));
            for k in j + 1..=7 {
                triples.push(((i, j, k), sys.q(i) + sys.q(j) + sys.q(k)));
            }
        }
    }
    Ok(DerivedForms { sum, pairs, triples })
}

/// The two triples `{q5, q6, q7}` completing an azygetic 4-tuple of odd forms
/// to an Aronhold system, each sorted by index.
pub fn complete_4tuple(quad: [QuadForm; 4]) -> Result<Vec<[QuadForm; 3]>> {
    if !all_distinct(&quad) || !quad.iter().all(|q| q.is_odd()) || !all_triples_azygetic(&quad) {
        return Err(Error::NotAzygetic);
    }
    let candidates: Vec<QuadForm> = QuadForm::odd()
        .into_iter()
        .filter(|q| !quad.contains(q) && quad.iter().enumerate().all(|(i, &a)| {
            quad[i + 1..].iter().all(|&b| azygetic_unchecked(a, b, *q))
        }))
        .collect();
    let mut out = Vec::new();
    for (x, &a) in candidates.iter().enumerate() {
        for (y, &b) in candidates.iter().enumerate().skip(x + 1) {
            for &c in &candidates[y + 1..] {
                let forms = [quad[0], quad[1], quad[2], quad[3], a, b, c];
                if is_aronhold(&forms) {
                    out.push([a, b, c]);
                }
            }
        }
    }
    Ok(out)
}

/// An integer theta characteristic `m = (m', m'')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Characteristic {
    #[serde(rename = "mp")]
    pub m_prime: [i32; 3],
    #[serde(rename = "mpp")]
    pub m_double_prime: [i32; 3],
}

impl Characteristic {
    pub const ZERO: Characteristic = Characteristic { m_prime: [0; 3], m_double_prime: [0; 3] };

    pub const fn new(m_prime: [i32; 3], m_double_prime: [i32; 3]) -> Self {
        Characteristic { m_prime, m_double_prime }
    }

    pub fn is_reduced(&self) -> bool {
        self.m_prime.iter().chain(&self.m_double_prime).all(|&x| x == 0 || x == 1)
    }

    /// Component-wise reduction mod 2 together with the sign
    /// `(-1)^{r'·n''}` where `m = r + 2n`, so that `θ_m = sign · θ_r`.
    pub fn reduce(&self) -> (Characteristic, i8) {
        let r_p = self.m_prime.map(|x| x.rem_euclid(2));
        let r_pp = self.m_double_prime.map(|x| x.rem_euclid(2));
        let n_pp: Vec<i32> = (0..3).map(|i| (self.m_double_prime[i] - r_pp[i]) / 2).collect();
        let exponent: i32 = (0..3).map(|i| r_p[i] * n_pp[i]).sum();
        let sign = if exponent.rem_euclid(2) == 0 { 1 } else { -1 };
        (Characteristic::new(r_p, r_pp), sign)
    }

    /// The quadratic form with the reduced coordinates of `self`.
    pub fn form(&self) -> QuadForm {
        let (r, _) = self.reduce();
        QuadForm::from_bits(r.m_prime.map(|x| x as u8), r.m_double_prime.map(|x| x as u8))
    }

    /// Parity `m'·m''` mod 2; 1 for odd characteristics.
    pub fn parity(&self) -> u8 {
        let s: i64 = (0..3).map(|i| i64::from(self.m_prime[i]) * i64::from(self.m_double_prime[i])).sum();
        s.rem_euclid(2) as u8
    }

    pub fn is_odd(&self) -> bool {
        self.parity() == 1
    }

    /// Componentwise division by two, if every entry is even.
    pub fn halve(&self) -> Option<Characteristic> {
        let all_even = self.m_prime.iter().chain(&self.m_double_prime).all(|x| x % 2 == 0);
        all_even.then(|| Characteristic::new(self.m_prime.map(|x| x / 2), self.m_double_prime.map(|x| x / 2)))
    }
}

impl From<QuadForm> for Characteristic {
    fn from(q: QuadForm) -> Self {
        q.characteristic()
    }
}

impl Add for Characteristic {
    type Output = Characteristic;

    fn add(self, rhs: Characteristic) -> Characteristic {
        Characteristic::new(
            std::array::from_fn(|i| self.m_prime[i] + rhs.m_prime[i]),
            std::array::from_fn(|i| self.m_double_prime[i] + rhs.m_double_prime[i]),
        )
    }
}

impl Sub for Characteristic {
    type Output = Characteristic;

    fn sub(self, rhs: Characteristic) -> Characteristic {
        self + (-rhs)
    }
}

impl Neg for Characteristic {
    type Output = Characteristic;

    fn neg(self) -> Characteristic {
        Characteristic::new(self.m_prime.map(|x| -x), self.m_double_prime.map(|x| -x))
    }
}

impl Mul<Characteristic> for i32 {
    type Output = Characteristic;

    fn mul(self, rhs: Characteristic) -> Characteristic {
        Characteristic::new(rhs.m_prime.map(|x| self * x), rhs.m_double_prime.map(|x| self * x))
    }
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, pp) = (self.m_prime, self.m_double_prime);
        if self.is_reduced() {
            write!(f, "[{}{}{}|{}{}{}]", p[0], p[1], p[2], pp[0], pp[1], pp[2])
        } else {
            write!(f, "({},{},{}|{},{},{})", p[0], p[1], p[2], pp[0], pp[1], pp[2])
        }
    }
}

/// Sum of the integer characteristics of several forms (no reduction).
pub fn char_sum(forms: &[QuadForm]) -> Characteristic {
    forms.iter().fold(Characteristic::ZERO, |acc, q| acc + q.characteristic())
}

pub fn reduce_characteristic(m: &Characteristic) -> (Characteristic, i8) {
    m.reduce()
}
