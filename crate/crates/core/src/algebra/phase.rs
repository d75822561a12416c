//! The coefficient ring: finite sums `c · q^e · τ^t` with `c` a Gaussian
//! rational, `q^e` a product of formal phase units `q_{j,i} = λ_{j,i}`
//! (one per strictly upper-triangular slot of the twist matrix) and `τ` a
//! formal positive real standing for `2π`.
//!
//! No relations are imposed among the units, so every identity verified in
//! this ring holds for every value of θ. [`PhaseCoeff::evaluate`] is the only
//! place where numbers are substituted.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::gauss::GaussRational;

/// Exponent data of one coefficient term. `units` is sparse, sorted by slot
/// and never stores zero exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhaseMonomial {
    units: Vec<(usize, i64)>,
    tau: u32,
}

impl PhaseMonomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn unit(slot: usize, exp: i64) -> Self {
        let units = if exp == 0 { Vec::new() } else { vec![(slot, exp)] };
        Self { units, tau: 0 }
    }

    pub fn from_units(units: impl IntoIterator<Item = (usize, i64)>, tau: u32) -> Self {
        let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
        for (s, e) in units {
            *acc.entry(s).or_default() += e;
        }
        Self { units: acc.into_iter().filter(|(_, e)| *e != 0).collect(), tau }
    }

    pub fn units(&self) -> &[(usize, i64)] {
        &self.units
    }

    pub fn tau(&self) -> u32 {
        self.tau
    }

    pub fn is_one(&self) -> bool {
        self.units.is_empty() && self.tau == 0
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.units.len() + other.units.len());
        let (mut i, mut j) = (0, 0);
        while i < self.units.len() || j < other.units.len() {
            match (self.units.get(i), other.units.get(j)) {
                (Some(&(sa, ea)), Some(&(sb, eb))) if sa == sb => {
                    if ea + eb != 0 {
                        out.push((sa, ea + eb));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(&(sa, ea)), Some(&(sb, _))) if sa < sb => {
                    out.push((sa, ea));
                    i += 1;
                }
                (Some(_), Some(&(sb, eb))) => {
                    out.push((sb, eb));
                    j += 1;
                }
                (Some(&a), None) => {
                    out.push(a);
                    i += 1;
                }
                (None, Some(&b)) => {
                    out.push(b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Self { units: out, tau: self.tau + other.tau }
    }

    /// Complex conjugate: units are inverted, `τ` is real.
    pub fn conj(&self) -> Self {
        Self { units: self.units.iter().map(|&(s, e)| (s, -e)).collect(), tau: self.tau }
    }
}

/// Finite sum of [`PhaseMonomial`]s with Gaussian rational coefficients, kept
/// canonical: no zero coefficients, one entry per monomial.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhaseCoeff {
    terms: BTreeMap<PhaseMonomial, GaussRational>,
}

impl PhaseCoeff {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_gauss(GaussRational::one())
    }

    pub fn from_gauss(c: GaussRational) -> Self {
        Self::term(c, PhaseMonomial::one())
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_gauss(v.into())
    }

    pub fn i() -> Self {
        Self::from_gauss(GaussRational::i())
    }

    /// The formal unit `q_slot^exp`.
    pub fn unit(slot: usize, exp: i64) -> Self {
        Self::term(GaussRational::one(), PhaseMonomial::unit(slot, exp))
    }

    /// `2πi`, represented as `i·τ`.
    pub fn two_pi_i() -> Self {
        Self::term(GaussRational::i(), PhaseMonomial::from_units([], 1))
    }

    pub fn term(c: GaussRational, m: PhaseMonomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PhaseMonomial, &GaussRational)> {
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
            && self.terms.iter().all(|(m, c)| m.is_one() && c.is_one())
    }

    /// Single-term coefficient `c·q^e·τ^t`, if it is one.
    pub fn as_single(&self) -> Option<(&PhaseMonomial, &GaussRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    fn accumulate(&mut self, m: PhaseMonomial, c: GaussRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.accumulate(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    /// Multiplies every term by the monomial `m`; no merging can occur.
    pub fn mul_monomial(&self, m: &PhaseMonomial) -> Self {
        if m.is_one() {
            return self.clone();
        }
        Self { terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect() }
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        let mut out = Self::zero();
        for (m, v) in &self.terms {
            out.accumulate(m.clone(), v * c);
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self { terms: self.terms.iter().map(|(m, c)| (m.conj(), c.conj())).collect() }
    }

    /// Exact inverse for single-term coefficients with invertible scalar part.
    /// Sums have no inverse in general and return `None`; so do positive
    /// powers of `τ`.
    pub fn inv(&self) -> Option<Self> {
        let (m, c) = self.as_single()?;
        if m.tau() != 0 {
            return None;
        }
        let inv_m = PhaseMonomial::from_units(m.units().iter().map(|&(s, e)| (s, -e)), 0);
        Some(Self::term(c.inv()?, inv_m))
    }

    /// Substitutes `q_slot = exp(2πi·theta_slot)` and `τ = 2π`.
    pub fn evaluate(&self, slot_angles: &[f64]) -> Complex64 {
        let tau = std::f64::consts::TAU;
        self.terms
            .iter()
            .map(|(m, c)| {
                let angle: f64 = m
                    .units()
                    .iter()
                    .map(|&(s, e)| slot_angles.get(s).copied().unwrap_or(0.0) * e as f64)
                    .sum();
                let phase = Complex64::from_polar(1.0, tau * angle);
                c.to_complex() * phase * tau.powi(m.tau() as i32)
            })
            .sum()
    }

    pub fn fmt_with(&self, f: &mut fmt::Formatter<'_>, slot_names: &dyn Fn(usize) -> String) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !c.is_one() || m.is_one() {
                let s = c.to_string();
                factors.push(if s.contains('+') || s[1..].contains('-') { format!("({s})") } else { s });
            }
            for &(s, e) in m.units() {
                if e == 1 {
                    factors.push(slot_names(s));
                } else {
                    factors.push(format!("{}^{}", slot_names(s), e));
                }
            }
            match m.tau() {
                0 => {}
                1 => factors.push("tau".into()),
                t => factors.push(format!("tau^{t}")),
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Display for PhaseCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_with(f, &|s| format!("q{s}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn units_cancel_and_merge() {
        let q = PhaseCoeff::unit(0, 1);
        let qi = PhaseCoeff::unit(0, -1);
        assert!(q.mul(&qi).is_one());
        let two_q = q.add(&q);
        assert_eq!(two_q.num_terms(), 1);
        assert!(q.sub(&q).is_zero());
    }

    #[test]
    fn conjugation_inverts_units_but_not_tau() {
        let x = PhaseCoeff::two_pi_i().mul(&PhaseCoeff::unit(2, 3));
        let xc = x.conj();
        assert_eq!(xc, PhaseCoeff::two_pi_i().neg().mul(&PhaseCoeff::unit(2, -3)));
        assert_eq!(xc.conj(), x);
    }

    #[test]
    fn inverse_of_single_terms_only() {
        let c = PhaseCoeff::from_gauss(GaussRational::from_fracs(3, 5, 4, 5)).mul(&PhaseCoeff::unit(1, 2));
        assert!(c.mul(&c.inv().unwrap()).is_one());
        assert!(PhaseCoeff::one().add(&PhaseCoeff::unit(0, 1)).inv().is_none());
        assert!(PhaseCoeff::two_pi_i().inv().is_none());
    }

    #[test]
    fn evaluation() {
        let q = PhaseCoeff::unit(0, 1);
        let v = q.evaluate(&[0.25]);
        assert!((v - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        let t = PhaseCoeff::two_pi_i().evaluate(&[]);
        assert!((t - Complex64::new(0.0, std::f64::consts::TAU)).norm() < 1e-12);
    }
}
