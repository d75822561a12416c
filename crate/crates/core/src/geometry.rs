//! Associated modules `Γ(σ)` realized inside `A₀` as the elements of degree
//! `−σ`, their frames, the frame connection and its curvature.

use std::fmt;

use serde::Serialize;

use crate::algebra::{GaussRational, PhaseCoeff, TwistedPoly};
use crate::derivations::{bracket, Derivation, DerivationOp};
use crate::dynamics::{char_neg, char_string, check_equivariance, Character, TorusAction};
use crate::error::{Error, Result};
use crate::factor_system::IsometryFamily;
use crate::report::{sweep, CheckReport, Tally, Verification};

#[derive(Clone, Debug)]
pub struct AssociatedModule {
    action: TorusAction,
    sigma: Character,
    frame: Vec<TwistedPoly>,
}

impl AssociatedModule {
    /// The module of `σ` with the cleft frame `{s(σ)*}`.
    pub fn new(s: &IsometryFamily, sigma: &[i64]) -> Result<Self> {
        let action = s.action().clone();
        if sigma.len() != action.d() {
            return Err(Error::Shape(format!("character {} for a rank {} torus", char_string(sigma), action.d())));
        }
        Self::with_frame(&action, sigma, vec![s.s(sigma)?.star()])
    }

    /// A module with an explicit frame. Every frame element must have degree
    /// `−σ` and `Σ s_k s_k* = 1` must hold.
    pub fn with_frame(action: &TorusAction, sigma: &[i64], frame: Vec<TwistedPoly>) -> Result<Self> {
        let m = Self { action: action.clone(), sigma: sigma.to_vec(), frame };
        for s in &m.frame {
            if !m.contains(s) {
                return Err(Error::NotEquivariant(format!("frame element {s} is not of degree {}", char_string(&m.weight()))));
            }
        }
        let total = m.frame.iter().fold(TwistedPoly::zero(action.twist()), |acc, s| &acc + &m.left_inner(s, s));
        if !total.is_one() {
            return Err(Error::Precondition(format!("frame is not complete: sum of s s* is {total}")));
        }
        Ok(m)
    }

    pub fn action(&self) -> &TorusAction {
        &self.action
    }

    pub fn sigma(&self) -> &[i64] {
        &self.sigma
    }

    /// Degree of the module's elements, `−σ`.
    pub fn weight(&self) -> Character {
        char_neg(&self.sigma)
    }

    pub fn frame(&self) -> &[TwistedPoly] {
        &self.frame
    }

    pub fn contains(&self, x: &TwistedPoly) -> bool {
        check_equivariance(&self.action, x, &self.weight())
    }

    fn require(&self, x: &TwistedPoly) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::NotEquivariant(format!("{x} is not in the module of {}", char_string(&self.sigma))))
        }
    }

    /// `⟨x, y⟩ = x* y`, valued in `B₀`.
    pub fn right_inner(&self, x: &TwistedPoly, y: &TwistedPoly) -> TwistedPoly {
        &x.star() * y
    }

    /// `x y*`, valued in the left coefficient algebra.
    pub fn left_inner(&self, x: &TwistedPoly, y: &TwistedPoly) -> TwistedPoly {
        x * &y.star()
    }

    /// `Σ_k s_k ⟨s_k, x⟩`.
    pub fn reproduce(&self, x: &TwistedPoly) -> TwistedPoly {
        self.frame.iter().fold(TwistedPoly::zero(self.action.twist()), |acc, s| &acc + &(s * &self.right_inner(s, x)))
    }

    /// The frame connection `∇_δ x = Σ_k s_k δ(⟨s_k, x⟩)`.
    pub fn nabla(&self, delta: &dyn DerivationOp, x: &TwistedPoly) -> Result<TwistedPoly> {
        self.require(x)?;
        let mut out = TwistedPoly::zero(self.action.twist());
        for s in &self.frame {
            out = &out + &(s * &delta.apply(&self.right_inner(s, x))?);
        }
        Ok(out)
    }

    /// `∇^χ_δ x = χ(δ)(x)` for the lifted derivation `lift = χ(δ)`.
    pub fn nabla_chi(&self, lift: &dyn DerivationOp, x: &TwistedPoly) -> Result<TwistedPoly> {
        self.require(x)?;
        let y = lift.apply(x)?;
        if !self.contains(&y) {
            return Err(Error::NotEquivariant(format!("the lift maps {x} to {y}, outside the module")));
        }
        Ok(y)
    }

    pub fn curvature(&self, d1: &Derivation, d2: &Derivation, x: &TwistedPoly, method: CurvatureMethod) -> Result<CurvatureValue> {
        self.require(x)?;
        let value = match method {
            CurvatureMethod::Commutator => {
                let a = self.nabla(d1, &self.nabla(d2, x)?)?;
                let b = self.nabla(d2, &self.nabla(d1, x)?)?;
                &(&a - &b) - &self.nabla(&bracket(d1, d2), x)?
            }
            CurvatureMethod::Formula => {
                let mut out = TwistedPoly::zero(self.action.twist());
                for sk in &self.frame {
                    for sl in &self.frame {
                        let p = self.right_inner(sk, sl);
                        let y = self.right_inner(sl, x);
                        let t = &(&d1.apply(&p)? * &d2.apply(&y)?) - &(&d2.apply(&p)? * &d1.apply(&y)?);
                        out = &out + &(sk * &t);
                    }
                }
                out
            }
        };
        Ok(CurvatureValue { delta1: d1.to_string(), delta2: d2.to_string(), x: x.to_string(), method, value })
    }

    /// Leibniz `∇(xb) = ∇(x)b + xδ(b)` and metric compatibility
    /// `δ⟨x,y⟩ = ⟨∇x,y⟩ + ⟨x,∇y⟩` on the supplied cases.
    pub fn connection_report(&self, delta: &Derivation, cases: &[(TwistedPoly, TwistedPoly, TwistedPoly)]) -> Verification {
        let leibniz = sweep("Leibniz", cases, |(x, _, b)| {
            let mut t_ = Tally::default();
            let lhs = self.nabla(delta, &(x * b))?;
            let rhs = &(&self.nabla(delta, x)? * b) + &(x * &delta.apply(b)?);
            t_.check("nabla(xb) = nabla(x)b + x delta(b)", || vec![("x", x.to_string()), ("b", b.to_string())], &lhs, &rhs);
            t_.done()
        });
        let metric = sweep("metric compatibility", cases, |(x, y, _)| {
            let mut t_ = Tally::default();
            let lhs = delta.apply(&self.right_inner(x, y))?;
            let rhs = &self.right_inner(&self.nabla(delta, x)?, y) + &self.right_inner(x, &self.nabla(delta, y)?);
            t_.check("delta<x,y> = <nabla x,y> + <x,nabla y>", || vec![("x", x.to_string()), ("y", y.to_string())], &lhs, &rhs);
            t_.done()
        });
        Verification::new("frame connection", vec![leibniz, metric])
    }

    /// Properties of `∇^χ_δ` for `lift = χ(δ)`: Leibniz, metric
    /// compatibility, skewness of `D = ∇^χ_δ − ∇_δ` and right
    /// `B₀`-linearity of `D`. Metric compatibility is reported, not assumed.
    pub fn chi_report(&self, lift: &dyn DerivationOp, delta: &Derivation, cases: &[(TwistedPoly, TwistedPoly, TwistedPoly)]) -> Verification {
        let diff = |x: &TwistedPoly| -> Result<TwistedPoly> { Ok(&self.nabla_chi(lift, x)? - &self.nabla(delta, x)?) };
        let leibniz = sweep("Leibniz", cases, |(x, _, b)| {
            let mut t_ = Tally::default();
            let lhs = self.nabla_chi(lift, &(x * b))?;
            let rhs = &(&self.nabla_chi(lift, x)? * b) + &(x * &delta.apply(b)?);
            t_.check("nabla_chi(xb) = nabla_chi(x)b + x delta(b)", || vec![("x", x.to_string()), ("b", b.to_string())], &lhs, &rhs);
            t_.done()
        });
        let metric = sweep("metric compatibility", cases, |(x, y, _)| {
            let mut t_ = Tally::default();
            let lhs = delta.apply(&self.right_inner(x, y))?;
            let rhs = &self.right_inner(&self.nabla_chi(lift, x)?, y) + &self.right_inner(x, &self.nabla_chi(lift, y)?);
            t_.check("delta<x,y> = <nabla_chi x,y> + <x,nabla_chi y>", || vec![("x", x.to_string()), ("y", y.to_string())], &lhs, &rhs);
            t_.done()
        });
        let skew = sweep("skewness of difference", cases, |(x, y, _)| {
            let mut t_ = Tally::default();
            let s = &self.right_inner(&diff(x)?, y) + &self.right_inner(x, &diff(y)?);
            t_.check("<Dx,y> + <x,Dy> = 0", || vec![("x", x.to_string()), ("y", y.to_string())], &s, &TwistedPoly::zero(self.action.twist()));
            t_.done()
        });
        let linear = sweep("difference is right linear", cases, |(x, _, b)| {
            let mut t_ = Tally::default();
            t_.check("D(xb) = D(x)b", || vec![("x", x.to_string()), ("b", b.to_string())], &diff(&(x * b))?, &(&diff(x)? * b));
            t_.done()
        });
        Verification::new("lifted connection", vec![leibniz, metric, skew, linear])
    }

    /// Frame completeness and the reproducing formula on `samples`.
    pub fn frame_report(&self, samples: &[TwistedPoly]) -> CheckReport {
        sweep("frame", samples, |x| {
            let mut t_ = Tally::default();
            let total = self.frame.iter().fold(TwistedPoly::zero(self.action.twist()), |acc, s| &acc + &self.left_inner(s, s));
            t_.check("sum s_k s_k* = 1", Vec::new, &total, &TwistedPoly::one(self.action.twist()));
            t_.check("x = sum s_k <s_k,x>", || vec![("x", x.to_string())], &self.reproduce(x), x);
            t_.done()
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CurvatureMethod {
    Commutator,
    Formula,
}

/// `R(δ₁, δ₂, x)` together with its inputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurvatureValue {
    pub delta1: String,
    pub delta2: String,
    pub x: String,
    pub method: CurvatureMethod,
    #[serde(serialize_with = "display")]
    pub value: TwistedPoly,
}

fn display<S: serde::Serializer>(v: &TwistedPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl fmt::Display for CurvatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R({}, {}, {}) = {}", self.delta1, self.delta2, self.x, self.value)
    }
}

/// Curvature of the lifted connection by commutators, `[D₁, D₂]x − D₁₂x`,
/// where `D₁₂` lifts `[δ₁, δ₂]`.
pub fn chi_curvature(d1: &dyn DerivationOp, d2: &dyn DerivationOp, d12: &dyn DerivationOp, x: &TwistedPoly) -> Result<TwistedPoly> {
    Ok(&bracket(d1, d2).apply(x)? - &d12.apply(x)?)
}

/// Rational weights `3/5, 4/5` spread over two frame elements
/// `s(σ)* b₁, s(σ)* b₂` for unitaries `b₁, b₂` of `B₀`.
pub fn split_frame(s: &IsometryFamily, sigma: &[i64], b1: &TwistedPoly, b2: &TwistedPoly) -> Result<AssociatedModule> {
    let st = s.s(sigma)?.star();
    let c1 = PhaseCoeff::from_gauss(GaussRational::from_fracs(3, 5, 0, 1));
    let c2 = PhaseCoeff::from_gauss(GaussRational::from_fracs(4, 5, 0, 1));
    AssociatedModule::with_frame(s.action(), sigma, vec![(&st * b1).scale(&c1), (&st * b2).scale(&c2)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::q3_action;

    fn isometries() -> IsometryFamily {
        IsometryFamily::standard(&q3_action("1/4", "-1/3", "-1/6").unwrap())
    }

    #[test]
    fn cleft_frames() {
        let s = isometries();
        let t = s.action().twist().clone();
        for k in -3..=3 {
            let m = AssociatedModule::new(&s, &[k]).unwrap();
            assert_eq!(m.frame(), &[TwistedPoly::unit_monomial(&t, &[0, 0, -k])]);
            assert!(m.right_inner(&m.frame()[0], &m.frame()[0]).is_one());
            let x = TwistedPoly::unit_monomial(&t, &[1, 0, -k]);
            assert_eq!(m.reproduce(&x), x);
        }
        let m0 = AssociatedModule::new(&s, &[0]).unwrap();
        assert!(m0.frame()[0].is_one());
    }

    #[test]
    fn frame_connection_values() {
        let s = isometries();
        let t = s.action().twist().clone();
        let d1 = Derivation::coordinate(&t, 0, &[0, 1]);
        for k in [-2, 1, 3] {
            let m = AssociatedModule::new(&s, &[k]).unwrap();
            assert!(m.nabla(&d1, &m.frame()[0]).unwrap().is_zero());
            let x = &TwistedPoly::unit_monomial(&t, &[0, 0, -k]) * &TwistedPoly::generator(&t, 0);
            assert_eq!(m.nabla(&d1, &x).unwrap(), x.scale(&PhaseCoeff::two_pi_i()));
            let full = Derivation::coordinate(&t, 0, &[0, 1, 2]);
            assert_eq!(m.nabla_chi(&full, &x).unwrap(), m.nabla(&d1, &x).unwrap());
            assert!(m.nabla(&d1, &TwistedPoly::generator(&t, 0)).is_err());
        }
    }

    #[test]
    fn curvature_methods_agree_on_split_frame() {
        let s = isometries();
        let t = s.action().twist().clone();
        let u1 = TwistedPoly::generator(&t, 0);
        let u2 = TwistedPoly::generator(&t, 1);
        let m = split_frame(&s, &[1], &u1, &u2).unwrap();
        let d1 = Derivation::coordinate(&t, 0, &[0, 1]);
        let ad = Derivation::inner(&t, &u1, &[0, 1]);
        let x = &TwistedPoly::unit_monomial(&t, &[1, 1, -1]) + &TwistedPoly::unit_monomial(&t, &[0, -1, -1]);
        let a = m.curvature(&d1, &ad, &x, CurvatureMethod::Commutator).unwrap();
        let b = m.curvature(&d1, &ad, &x, CurvatureMethod::Formula).unwrap();
        assert_eq!(a.value, b.value);
        let c = m.curvature(&ad, &d1, &x, CurvatureMethod::Formula).unwrap();
        assert_eq!(c.value, -&a.value);
        let r = m.curvature(&d1, &d1, &x, CurvatureMethod::Commutator).unwrap();
        assert!(r.value.is_zero());
    }
}
