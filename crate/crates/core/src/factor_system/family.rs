use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::algebra::{PhaseCoeff, PolyMatrix, TwistMatrix, TwistedPoly};
use crate::dynamics::{char_string, Character};
use crate::error::{Error, Result};

type FamilyFn = dyn Fn(&[i64]) -> Result<PolyMatrix> + Send + Sync;

/// A map `σ ↦ X(σ)` from characters to matrices over `B₀`. Used for
/// conjugacy witnesses `v`, gauge unitaries, derivation families `H` and
/// the weights of isometry families.
#[derive(Clone)]
pub struct Family {
    label: String,
    f: Arc<FamilyFn>,
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Family({})", self.label)
    }
}

impl Family {
    pub fn from_fn(label: impl Into<String>, f: impl Fn(&[i64]) -> Result<PolyMatrix> + Send + Sync + 'static) -> Self {
        Self { label: label.into(), f: Arc::new(f) }
    }

    pub fn constant(label: impl Into<String>, m: PolyMatrix) -> Self {
        Self::from_fn(label, move |_| Ok(m.clone()))
    }

    pub fn one(twist: &Arc<TwistMatrix>) -> Self {
        Self::constant("1", PolyMatrix::scalar(TwistedPoly::one(twist)))
    }

    pub fn zero(twist: &Arc<TwistMatrix>) -> Self {
        Self::constant("0", PolyMatrix::scalar(TwistedPoly::zero(twist)))
    }

    /// Scalar family `σ ↦ Σ_j σ_j c_j`, additive in `σ`.
    pub fn linear(twist: &Arc<TwistMatrix>, coeffs: Vec<PhaseCoeff>) -> Self {
        let t = twist.clone();
        let label = format!("linear[{}]", coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "));
        Self::from_fn(label, move |s| {
            check_len(s, coeffs.len())?;
            let c = s.iter().zip(&coeffs).fold(PhaseCoeff::zero(), |acc, (&k, c)| acc.add(&c.scale(&k.into())));
            Ok(PolyMatrix::scalar(TwistedPoly::scalar(&t, c)))
        })
    }

    /// Multiplicative family `σ ↦ g_1^{σ_1} ⋯ g_d^{σ_d}` of unitaries.
    pub fn power(twist: &Arc<TwistMatrix>, gens: Vec<TwistedPoly>) -> Self {
        let t = twist.clone();
        let label = format!("power[{}]", gens.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", "));
        Self::from_fn(label, move |s| {
            check_len(s, gens.len())?;
            let mut acc = TwistedPoly::one(&t);
            for (g, &k) in gens.iter().zip(s) {
                let p = g.pow(k).ok_or_else(|| Error::Precondition(format!("{g} is not unitary")))?;
                acc = &acc * &p;
            }
            Ok(PolyMatrix::scalar(acc))
        })
    }

    /// Finite table with a fallback for characters not listed.
    pub fn table(label: impl Into<String>, entries: BTreeMap<Character, PolyMatrix>, default: Option<PolyMatrix>) -> Self {
        Self::from_fn(label, move |s| match entries.get(s) {
            Some(m) => Ok(m.clone()),
            None => default.clone().ok_or_else(|| Error::Precondition(format!("family undefined at {}", char_string(s)))),
        })
    }

    pub fn with_override(&self, sigma: Character, value: PolyMatrix) -> Self {
        let base = self.clone();
        let label = format!("{} with {} -> {}", self.label, char_string(&sigma), value);
        Self::from_fn(label, move |s| if s == sigma.as_slice() { Ok(value.clone()) } else { base.at(s) })
    }

    /// Pointwise product `σ ↦ X(σ) Y(σ)`.
    pub fn times(&self, other: &Family) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let label = format!("{}*{}", self.label, other.label);
        Self::from_fn(label, move |s| a.at(s)?.mul(&b.at(s)?))
    }

    pub fn difference(&self, other: &Family) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let label = format!("{}-({})", self.label, other.label);
        Self::from_fn(label, move |s| a.at(s)?.sub(&b.at(s)?))
    }

    pub fn at(&self, sigma: &[i64]) -> Result<PolyMatrix> {
        (self.f)(sigma)
    }

    /// Convenience for 1×1 families.
    pub fn poly_at(&self, sigma: &[i64]) -> Result<TwistedPoly> {
        let m = self.at(sigma)?;
        m.as_poly().cloned().ok_or_else(|| Error::Shape(format!("family value at {} is not 1x1", char_string(sigma))))
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

fn check_len(s: &[i64], d: usize) -> Result<()> {
    if s.len() != d {
        return Err(Error::Shape(format!("character {} has length {}, family expects {d}", char_string(s), s.len())));
    }
    Ok(())
}
