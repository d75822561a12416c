//! Sparse twisted Laurent polynomials: the dense `*`-subalgebra of the
//! quantum torus spanned by the normal-ordered monomials
//! `u^a = u_1^{a_1} ⋯ u_n^{a_n}`, `a ∈ Z^n`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use super::gauss::GaussRational;
use super::phase::PhaseCoeff;
use super::twist::TwistMatrix;
use crate::error::{Error, Result};

pub type Exponent = Vec<i64>;

/// Element of the polynomial quantum torus. The term map never holds a zero
/// coefficient, so structural equality is equality in the algebra.
#[derive(Clone, Debug)]
pub struct TwistedPoly {
    twist: Arc<TwistMatrix>,
    terms: BTreeMap<Exponent, PhaseCoeff>,
}

impl PartialEq for TwistedPoly {
    fn eq(&self, other: &Self) -> bool {
        same_twist(&self.twist, &other.twist) && self.terms == other.terms
    }
}

impl Eq for TwistedPoly {}

pub(crate) fn same_twist(a: &Arc<TwistMatrix>, b: &Arc<TwistMatrix>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl TwistedPoly {
    pub fn zero(twist: &Arc<TwistMatrix>) -> Self {
        Self { twist: twist.clone(), terms: BTreeMap::new() }
    }

    pub fn one(twist: &Arc<TwistMatrix>) -> Self {
        Self::scalar(twist, PhaseCoeff::one())
    }

    pub fn scalar(twist: &Arc<TwistMatrix>, c: PhaseCoeff) -> Self {
        Self::monomial(twist, vec![0; twist.n()], c)
    }

    /// The unitary generator `u_{k+1}`.
    pub fn generator(twist: &Arc<TwistMatrix>, k: usize) -> Self {
        let mut a = vec![0; twist.n()];
        a[k] = 1;
        Self::monomial(twist, a, PhaseCoeff::one())
    }

    /// `c · u^a` with `u^a` normal-ordered.
    pub fn monomial(twist: &Arc<TwistMatrix>, a: Exponent, c: PhaseCoeff) -> Self {
        assert_eq!(a.len(), twist.n(), "exponent length must match the number of generators");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(a, c);
        }
        Self { twist: twist.clone(), terms }
    }

    /// Normal-ordered monomial with unit coefficient.
    pub fn unit_monomial(twist: &Arc<TwistMatrix>, a: &[i64]) -> Self {
        Self::monomial(twist, a.to_vec(), PhaseCoeff::one())
    }

    pub fn from_terms(twist: &Arc<TwistMatrix>, terms: impl IntoIterator<Item = (Exponent, PhaseCoeff)>) -> Self {
        let mut out = Self::zero(twist);
        for (a, c) in terms {
            assert_eq!(a.len(), twist.n(), "exponent length must match the number of generators");
            out.accumulate(a, c);
        }
        out
    }

    pub fn twist(&self) -> &Arc<TwistMatrix> {
        &self.twist
    }

    pub fn n(&self) -> usize {
        self.twist.n()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &PhaseCoeff)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.iter().all(|(a, c)| a.iter().all(|&e| e == 0) && c.is_one())
    }

    /// Coefficient of the constant monomial.
    pub fn constant_term(&self) -> PhaseCoeff {
        self.terms.get(&vec![0; self.n()]).cloned().unwrap_or_default()
    }

    /// `Some(c)` when the element is a multiple `c·1` of the identity.
    pub fn as_scalar(&self) -> Option<PhaseCoeff> {
        match self.terms.len() {
            0 => Some(PhaseCoeff::zero()),
            1 => {
                let (a, c) = self.terms.iter().next()?;
                a.iter().all(|&e| e == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    fn accumulate(&mut self, a: Exponent, c: PhaseCoeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(a) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let merged = o.get().add(&c);
                if merged.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = merged;
                }
            }
        }
    }

    fn check_twist(&self, other: &Self) -> Result<()> {
        if same_twist(&self.twist, &other.twist) {
            Ok(())
        } else {
            Err(Error::TwistMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_twist(other)?;
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.accumulate(a.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_twist(other)?;
        let mut out = Self::zero(&self.twist);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let phase = self.twist.product_phase(a, b);
                let sum: Exponent = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.accumulate(sum, ca.mul(cb).mul_monomial(&phase));
            }
        }
        Ok(out)
    }

    fn neg_ref(&self) -> Self {
        Self { twist: self.twist.clone(), terms: self.terms.iter().map(|(a, c)| (a.clone(), c.neg())).collect() }
    }

    pub fn scale(&self, c: &PhaseCoeff) -> Self {
        let mut out = Self::zero(&self.twist);
        for (a, v) in &self.terms {
            out.accumulate(a.clone(), v.mul(c));
        }
        out
    }

    pub fn scale_gauss(&self, c: &GaussRational) -> Self {
        self.scale(&PhaseCoeff::from_gauss(c.clone()))
    }

    /// The involution: antilinear on coefficients and
    /// `(u^a)^* = u_n^{-a_n} ⋯ u_1^{-a_1}`, re-normal-ordered.
    pub fn star(&self) -> Self {
        let mut out = Self::zero(&self.twist);
        for (a, c) in &self.terms {
            let phase = self.twist.star_phase(a);
            let neg: Exponent = a.iter().map(|e| -e).collect();
            out.accumulate(neg, c.conj().mul_monomial(&phase));
        }
        out
    }

    /// Integer power; negative exponents are only defined for unitary
    /// monomials `c·u^a` with `|c| = 1`, where the inverse is the adjoint.
    pub fn pow(&self, k: i64) -> Option<Self> {
        let base = if k < 0 {
            let adj = self.star();
            if !(self * &adj).is_one() {
                return None;
            }
            adj
        } else {
            self.clone()
        };
        let mut acc = Self::one(&self.twist);
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
        Some(acc)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// `x ↦ y` such that all terms of `x` are kept whose exponent satisfies
    /// `keep`.
    pub fn filter_terms(&self, mut keep: impl FnMut(&[i64]) -> bool) -> Self {
        Self {
            twist: self.twist.clone(),
            terms: self.terms.iter().filter(|(a, _)| keep(a)).map(|(a, c)| (a.clone(), c.clone())).collect(),
        }
    }

    /// Numeric substitution: `q_{j,i} ↦ exp(2πi θ_{j,i})`, `τ ↦ 2π`,
    /// `u^a ↦ ∏ z_k^{a_k}`. Linear in the terms; not multiplicative unless
    /// θ vanishes.
    pub fn evaluate(&self, theta: &[Vec<f64>], z: &[Complex64]) -> Result<Complex64> {
        let angles = numeric_slot_angles(&self.twist, theta)?;
        if z.len() != self.n() {
            return Err(Error::Shape(format!("torus point has {} coordinates, expected {}", z.len(), self.n())));
        }
        Ok(self
            .terms
            .iter()
            .map(|(a, c)| {
                let mono: Complex64 = a.iter().zip(z).map(|(&e, zk)| zk.powi(e as i32)).product();
                c.evaluate(&angles) * mono
            })
            .sum())
    }

    pub fn evaluate_exact_theta(&self, z: &[Complex64]) -> Complex64 {
        let angles = self.twist.slot_angles();
        self.terms
            .iter()
            .map(|(a, c)| {
                let mono: Complex64 = a.iter().zip(z).map(|(&e, zk)| zk.powi(e as i32)).product();
                c.evaluate(&angles) * mono
            })
            .sum()
    }
}

/// Sparse vector in the regular representation on `ℓ²(Z^n)`, basis `e_b = u^b`.
pub type NumVec = BTreeMap<Exponent, Complex64>;

impl TwistedPoly {
    /// Left multiplication by `self` on a numeric vector, built one generator
    /// at a time from `u_k e_b = (∏_{j<k} λ_{k,j}^{b_j}) e_{b+e_k}`. This is an
    /// independent numeric realization of the product and stays multiplicative
    /// for every θ.
    pub fn regular_action(&self, slot_angles: &[f64], v: &NumVec) -> NumVec {
        let mut out = NumVec::new();
        for (a, c) in &self.terms {
            let cv = c.evaluate(slot_angles);
            let mut w = v.clone();
            for k in (0..self.n()).rev() {
                for _ in 0..a[k].unsigned_abs() {
                    w = shift_generator(&self.twist, slot_angles, k, a[k] > 0, &w);
                }
            }
            for (b, z) in w {
                *out.entry(b).or_insert(Complex64::new(0.0, 0.0)) += cv * z;
            }
        }
        out
    }
}

fn shift_generator(twist: &TwistMatrix, slot_angles: &[f64], k: usize, forward: bool, v: &NumVec) -> NumVec {
    let tau = std::f64::consts::TAU;
    v.iter()
        .map(|(b, z)| {
            // λ_{k,j} = exp(-2πi θ_{j,k}) for j < k
            let angle: f64 = (0..k).map(|j| -slot_angles[twist.slot(j, k)] * b[j] as f64).sum();
            let phase = Complex64::from_polar(1.0, tau * angle);
            let mut nb = b.clone();
            if forward {
                nb[k] += 1;
                (nb, phase * z)
            } else {
                nb[k] -= 1;
                (nb, phase.conj() * z)
            }
        })
        .collect()
}

/// Validates a numeric θ (skew within `1e-12`) and extracts per-slot angles.
pub fn numeric_slot_angles(twist: &TwistMatrix, theta: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = twist.n();
    if theta.len() != n || theta.iter().any(|r| r.len() != n) {
        return Err(Error::Shape(format!("numeric theta must be {n}x{n}")));
    }
    for k in 0..n {
        for l in 0..n {
            if (theta[k][l] + theta[l][k]).abs() > 1e-12 {
                return Err(Error::InvalidTwist(format!("numeric theta not skew at ({},{})", k + 1, l + 1)));
            }
        }
    }
    Ok((0..twist.num_slots())
        .map(|s| {
            let (j, i) = twist.slot_pair(s);
            theta[j][i]
        })
        .collect())
}

impl Add for &TwistedPoly {
    type Output = TwistedPoly;
    fn add(self, rhs: &TwistedPoly) -> TwistedPoly {
        self.checked_add(rhs).expect("twist mismatch in addition")
    }
}

impl Sub for &TwistedPoly {
    type Output = TwistedPoly;
    fn sub(self, rhs: &TwistedPoly) -> TwistedPoly {
        self.checked_sub(rhs).expect("twist mismatch in subtraction")
    }
}

/// Panics on twist mismatch; use [`TwistedPoly::checked_mul`] for untrusted
/// operands.
impl Mul for &TwistedPoly {
    type Output = TwistedPoly;
    fn mul(self, rhs: &TwistedPoly) -> TwistedPoly {
        self.checked_mul(rhs).expect("twist mismatch in multiplication")
    }
}

impl Neg for &TwistedPoly {
    type Output = TwistedPoly;
    fn neg(self) -> TwistedPoly {
        self.neg_ref()
    }
}

impl fmt::Display for TwistedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = |s: usize| self.twist.slot_name(s);
        for (k, (a, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let is_const = a.iter().all(|&e| e == 0);
            if c.is_one() && !is_const {
                // bare monomial
            } else {
                let wrap = c.num_terms() > 1 && !is_const;
                if wrap {
                    write!(f, "(")?;
                }
                c.fmt_with(f, &names)?;
                if wrap {
                    write!(f, ")")?;
                }
                if !is_const {
                    write!(f, "*")?;
                }
            }
            let mut first = true;
            for (i, &e) in a.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                if e == 1 {
                    write!(f, "u{}", i + 1)?;
                } else {
                    write!(f, "u{}^{}", i + 1, e)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q3() -> Arc<TwistMatrix> {
        Arc::new(TwistMatrix::from_upper_strs(3, &["1/4", "-1/3", "-1/6"]).unwrap())
    }

    #[test]
    fn ordered_product_has_no_phase() {
        let t = q3();
        let p = &TwistedPoly::generator(&t, 0) * &TwistedPoly::generator(&t, 1);
        assert_eq!(p, TwistedPoly::unit_monomial(&t, &[1, 1, 0]));
    }

    #[test]
    fn single_swap() {
        let t = q3();
        let p = &TwistedPoly::generator(&t, 1) * &TwistedPoly::generator(&t, 0);
        let expected = TwistedPoly::monomial(&t, vec![1, 1, 0], t.lambda(1, 0));
        assert_eq!(p, expected);
        assert_eq!(t.lambda(1, 0).mul(&t.lambda(0, 1)), PhaseCoeff::one());
    }

    /// Rewrites a word in the generators by repeated adjacent swaps using
    /// only `u_k u_l = λ_{k,l} u_l u_k`.
    fn bubble_normal_order(t: &TwistMatrix, word: &[usize]) -> (Vec<i64>, PhaseCoeff) {
        let mut w = word.to_vec();
        let mut phase = PhaseCoeff::one();
        let mut changed = true;
        while changed {
            changed = false;
            for p in 0..w.len().saturating_sub(1) {
                if w[p] > w[p + 1] {
                    phase = phase.mul(&t.lambda(w[p], w[p + 1]));
                    w.swap(p, p + 1);
                    changed = true;
                }
            }
        }
        let mut a = vec![0; t.n()];
        for g in w {
            a[g] += 1;
        }
        (a, phase)
    }

    #[test]
    fn squared_generator_past_another_matches_swap_oracle() {
        let t = q3();
        let u3 = TwistedPoly::generator(&t, 2);
        let u1 = TwistedPoly::generator(&t, 0);
        let p = &(&u3 * &u3) * &u1;
        let (a, phase) = bubble_normal_order(&t, &[2, 2, 0]);
        assert_eq!(p, TwistedPoly::monomial(&t, a, phase));
        assert_eq!(p, TwistedPoly::monomial(&t, vec![1, 0, 2], t.lambda(2, 0).mul(&t.lambda(2, 0))));
    }

    #[test]
    fn random_words_match_swap_oracle() {
        let t = Arc::new(TwistMatrix::from_upper_strs(4, &["1/5", "2/7", "-1/3", "1/2", "3/11", "-5/12"]).unwrap());
        let words: [&[usize]; 4] = [&[3, 2, 1, 0], &[1, 3, 0, 2, 1], &[2, 2, 0, 3, 0, 1], &[3, 0, 3, 0]];
        for word in words {
            let prod = word
                .iter()
                .fold(TwistedPoly::one(&t), |acc, &g| &acc * &TwistedPoly::generator(&t, g));
            let (a, phase) = bubble_normal_order(&t, word);
            assert_eq!(prod, TwistedPoly::monomial(&t, a, phase), "word {word:?}");
        }
    }

    #[test]
    fn star_matches_reverse_product_of_inverses() {
        let t = q3();
        let x = TwistedPoly::monomial(&t, vec![1, 1, 0], PhaseCoeff::i());
        let inv = |k: usize| TwistedPoly::generator(&t, k).star();
        let oracle = (&inv(1) * &inv(0)).scale(&PhaseCoeff::i().neg());
        assert_eq!(x.star(), oracle);
        assert_eq!(TwistedPoly::generator(&t, 0).star(), TwistedPoly::unit_monomial(&t, &[-1, 0, 0]));
        let y = TwistedPoly::unit_monomial(&t, &[1, 1, 1]);
        assert_eq!(y.star().star(), y);
    }

    #[test]
    fn ring_operations() {
        let t = q3();
        let u1 = TwistedPoly::generator(&t, 0);
        let u2 = TwistedPoly::generator(&t, 1);
        assert!((&u1 + &(-&u1)).is_zero());
        assert_eq!(&TwistedPoly::one(&t) * &u1, u1);
        let lhs = &(&u1 + &u2) + &u1;
        assert_eq!(lhs, &u1.scale(&PhaseCoeff::from_int(2)) + &u2);
    }

    #[test]
    fn twist_mismatch_is_an_error() {
        let a = TwistedPoly::generator(&q3(), 0);
        let other = Arc::new(TwistMatrix::from_upper_strs(3, &["1/2", "0", "0"]).unwrap());
        let b = TwistedPoly::generator(&other, 0);
        assert_eq!(a.checked_mul(&b), Err(Error::TwistMismatch));
        assert_eq!(a.checked_add(&b), Err(Error::TwistMismatch));
    }

    #[test]
    fn evaluate_basics() {
        let t = q3();
        let theta = vec![vec![0.0, 0.25, -1.0 / 3.0], vec![-0.25, 0.0, -1.0 / 6.0], vec![1.0 / 3.0, 1.0 / 6.0, 0.0]];
        let one = Complex64::new(1.0, 0.0);
        let z = [Complex64::new(-1.0, 0.0), one, one];
        assert!((TwistedPoly::one(&t).evaluate(&theta, &z).unwrap() - one).norm() < 1e-12);
        assert!((TwistedPoly::generator(&t, 0).evaluate(&theta, &z).unwrap() + one).norm() < 1e-12);
        let bad = vec![vec![0.0, 0.25, 0.0], vec![0.25, 0.0, 0.0], vec![0.0, 0.0, 0.0]];
        assert!(TwistedPoly::one(&t).evaluate(&bad, &z).is_err());
    }

    #[test]
    fn pow_and_display() {
        let t = q3();
        let u3 = TwistedPoly::generator(&t, 2);
        assert_eq!(u3.pow(-2).unwrap(), TwistedPoly::unit_monomial(&t, &[0, 0, -2]));
        let not_unitary = &u3 + &TwistedPoly::one(&t);
        assert!(not_unitary.pow(-1).is_none());
        let x = &TwistedPoly::generator(&t, 1) * &TwistedPoly::generator(&t, 0);
        assert_eq!(x.to_string(), "q12^-1*u1*u2");
    }
    #[test]
    fn regular_action_is_multiplicative() {
        let t = q3();
        let angles = t.slot_angles();
        let x = &TwistedPoly::unit_monomial(&t, &[2, -1, 1]) + &TwistedPoly::generator(&t, 2);
        let y = TwistedPoly::monomial(&t, vec![-1, 3, 0], PhaseCoeff::i());
        let e0: NumVec = [(vec![0, 0, 0], Complex64::new(1.0, 0.0))].into_iter().collect();
        let lhs = (&x * &y).regular_action(&angles, &e0);
        let rhs = x.regular_action(&angles, &y.regular_action(&angles, &e0));
        for (b, z) in &lhs {
            assert!((z - rhs.get(b).copied().unwrap_or_default()).norm() < 1e-12);
        }
        assert_eq!(lhs.len(), rhs.len());
    }
}
