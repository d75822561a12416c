use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;

use super::family::Family;
use super::morphism::Morphism;
use crate::algebra::{PolyMatrix, TwistMatrix, TwistedPoly};
use crate::dynamics::{char_add, char_string, check_equivariance, generator_s, is_in_base, Character, TorusAction};
use crate::error::{Error, Result};

/// Cleft isometries `s(σ) = w(σ) · ∏_{j∈S} u_j^{σ_j}` with `w(σ)` a unitary
/// of `B₀` and `w(0) = 1`.
#[derive(Clone, Debug)]
pub struct IsometryFamily {
    action: TorusAction,
    weight: Option<Family>,
}

impl IsometryFamily {
    pub fn standard(action: &TorusAction) -> Self {
        Self { action: action.clone(), weight: None }
    }

    pub fn weighted(action: &TorusAction, weight: Family) -> Result<Self> {
        let w0 = weight.poly_at(&vec![0; action.d()])?;
        if !w0.is_one() {
            return Err(Error::Precondition(format!("isometry weight at 0 must be 1, got {w0}")));
        }
        Ok(Self { action: action.clone(), weight: Some(weight) })
    }

    pub fn action(&self) -> &TorusAction {
        &self.action
    }

    pub fn s(&self, sigma: &[i64]) -> Result<TwistedPoly> {
        let base = generator_s(&self.action, sigma);
        match &self.weight {
            None => Ok(base),
            Some(w) => {
                let wv = w.poly_at(sigma)?;
                if !is_in_base(&self.action, &wv) {
                    return Err(Error::EscapesFixedPoint(format!("isometry weight at {} is {wv}", char_string(sigma))));
                }
                let s = &wv * &base;
                if !(&s * &s.star()).is_one() {
                    return Err(Error::Precondition(format!("s{} = {s} is not unitary", char_string(sigma))));
                }
                Ok(s)
            }
        }
    }

    pub fn check_equivariant(&self, sigma: &[i64]) -> Result<()> {
        let s = self.s(sigma)?;
        if check_equivariance(&self.action, &s, sigma) {
            Ok(())
        } else {
            Err(Error::NotEquivariant(format!("s{} = {s}", char_string(sigma))))
        }
    }
}

#[derive(Clone, Debug)]
enum Source {
    Trivial,
    Cleft(IsometryFamily),
    Transformed { base: Box<FactorSystem>, beta: Morphism, beta_inv: Morphism },
}

/// A factor system `(ℋ, γ, ω)` over `(B₀, T^d)`, evaluated on demand for
/// each character. Single entries can be overridden to inject defects.
#[derive(Clone, Debug)]
pub struct FactorSystem {
    action: TorusAction,
    source: Source,
    gamma_overrides: BTreeMap<(Character, usize), PolyMatrix>,
    omega_overrides: BTreeMap<(Character, Character), PolyMatrix>,
}

impl FactorSystem {
    /// `γ_σ = Ad[s(σ)]` on `B₀` and `ω(σ,π) = s(σ)s(π)s(σ+π)*`.
    pub fn from_cleft(s: IsometryFamily) -> Result<Self> {
        s.check_equivariant(&vec![1; s.action.d()])?;
        Ok(Self {
            action: s.action.clone(),
            source: Source::Cleft(s),
            gamma_overrides: BTreeMap::new(),
            omega_overrides: BTreeMap::new(),
        })
    }

    /// All `γ_σ = id`, `ω ≡ 1`.
    pub fn trivial(action: &TorusAction) -> Self {
        Self {
            action: action.clone(),
            source: Source::Trivial,
            gamma_overrides: BTreeMap::new(),
            omega_overrides: BTreeMap::new(),
        }
    }

    pub fn action(&self) -> &TorusAction {
        &self.action
    }

    pub fn twist(&self) -> &Arc<TwistMatrix> {
        self.action.twist()
    }

    pub fn isometries(&self) -> Option<&IsometryFamily> {
        match &self.source {
            Source::Cleft(s) => Some(s),
            _ => None,
        }
    }

    pub fn with_omega_override(mut self, sigma: Character, pi: Character, value: PolyMatrix) -> Self {
        self.omega_overrides.insert((sigma, pi), value);
        self
    }

    /// Replaces `γ_σ(u_k)` by `value`.
    pub fn with_gamma_override(mut self, sigma: Character, k: usize, value: PolyMatrix) -> Self {
        self.gamma_overrides.insert((sigma, k), value);
        self
    }

    pub fn dim(&self, sigma: &[i64]) -> Result<usize> {
        Ok(self.gamma(sigma)?.dim())
    }

    pub fn gamma(&self, sigma: &[i64]) -> Result<Morphism> {
        let fixed = self.action.fixed_coords();
        let t = self.twist();
        let mut g = match &self.source {
            Source::Trivial => Morphism::identity(t, &fixed),
            Source::Cleft(s) => {
                let sv = s.s(sigma)?;
                let svs = sv.star();
                let mut images = BTreeMap::new();
                for &k in &fixed {
                    let img = &(&sv * &TwistedPoly::generator(t, k)) * &svs;
                    if !is_in_base(&self.action, &img) {
                        return Err(Error::EscapesFixedPoint(format!("gamma{}(u{}) = {img}", char_string(sigma), k + 1)));
                    }
                    images.insert(k, img);
                }
                Morphism::algebra(t, images)?
            }
            Source::Transformed { base, beta, beta_inv } => {
                let gb = base.gamma(sigma)?;
                let mut images = BTreeMap::new();
                for &k in &fixed {
                    let inner = gb.apply(&beta_inv.apply_poly(&TwistedPoly::generator(t, k))?)?;
                    images.insert(k, inner.try_map(|e| beta.apply_poly(e))?);
                }
                let unit = gb.unit().try_map(|e| beta.apply_poly(e))?;
                Morphism::new(t, unit, images)?
            }
        };
        for ((s, k), v) in &self.gamma_overrides {
            if s.as_slice() == sigma {
                g.set_image(*k, v.clone())?;
            }
        }
        Ok(g)
    }

    pub fn omega(&self, sigma: &[i64], pi: &[i64]) -> Result<PolyMatrix> {
        if let Some(v) = self.omega_overrides.get(&(sigma.to_vec(), pi.to_vec())) {
            return Ok(v.clone());
        }
        let t = self.twist();
        match &self.source {
            Source::Trivial => Ok(PolyMatrix::scalar(TwistedPoly::one(t))),
            Source::Cleft(s) => {
                let w = &(&s.s(sigma)? * &s.s(pi)?) * &s.s(&char_add(sigma, pi))?.star();
                if !is_in_base(&self.action, &w) {
                    return Err(Error::EscapesFixedPoint(format!(
                        "omega({},{}) = {w}",
                        char_string(sigma),
                        char_string(pi)
                    )));
                }
                Ok(PolyMatrix::scalar(w))
            }
            Source::Transformed { base, beta, .. } => base.omega(sigma, pi)?.try_map(|e| beta.apply_poly(e)),
        }
    }

    /// `ω` on many pairs at once. Cleft systems evaluate each `s(σ)` once.
    pub fn omegas(&self, pairs: &[(Character, Character)]) -> Result<Vec<PolyMatrix>> {
        let Source::Cleft(s) = &self.source else {
            return pairs.par_iter().map(|(a, b)| self.omega(a, b)).collect();
        };
        let chars: BTreeSet<Character> = pairs.iter().flat_map(|(a, b)| [a.clone(), b.clone(), char_add(a, b)]).collect();
        let chars: Vec<Character> = chars.into_iter().collect();
        let values = chars.par_iter().map(|c| s.s(c)).collect::<Result<Vec<_>>>()?;
        let table: BTreeMap<&Character, TwistedPoly> = chars.iter().zip(values).collect();
        pairs
            .par_iter()
            .map(|(a, b)| {
                if self.omega_overrides.contains_key(&(a.clone(), b.clone())) {
                    return self.omega(a, b);
                }
                let w = &(&table[a] * &table[b]) * &table[&char_add(a, b)].star();
                if !is_in_base(&self.action, &w) {
                    return Err(Error::EscapesFixedPoint(format!("omega({},{}) = {w}", char_string(a), char_string(b))));
                }
                Ok(PolyMatrix::scalar(w))
            })
            .collect()
    }

    /// `(ℋ, β∘γ_σ∘β⁻¹, β(ω))`.
    pub fn beta_transform(&self, beta: &Morphism, beta_inv: &Morphism) -> Result<FactorSystem> {
        if !beta.is_inverse_of(beta_inv)? {
            return Err(Error::InvalidMorphism("supplied inverse does not invert the automorphism".into()));
        }
        beta.validate()?;
        beta.check_maps_into_base(&self.action)?;
        beta_inv.check_maps_into_base(&self.action)?;
        Ok(Self {
            action: self.action.clone(),
            source: Source::Transformed { base: Box::new(self.clone()), beta: beta.clone(), beta_inv: beta_inv.clone() },
            gamma_overrides: BTreeMap::new(),
            omega_overrides: BTreeMap::new(),
        })
    }
}

/// The Fröhlich map `Δ_σ(b) = s(σ)* b s(σ)`.
pub fn frohlich(s: &IsometryFamily, sigma: &[i64], b: &TwistedPoly) -> Result<TwistedPoly> {
    let sv = s.s(sigma)?;
    Ok(&(&sv.star() * b) * &sv)
}

/// Coefficient of the product of two isotypic elements:
/// `Tr(y_σ s(σ)) · Tr(y_π s(π)) = Tr(y_σ γ_σ(y_π) ω(σ,π) s(σ+π))`.
pub fn isotypic_mul(fs: &FactorSystem, sigma: &[i64], y_sigma: &PolyMatrix, pi: &[i64], y_pi: &PolyMatrix) -> Result<(Character, PolyMatrix)> {
    let g = fs.gamma(sigma)?;
    let y = y_sigma.mul(&g.apply_matrix(y_pi)?)?.mul(&fs.omega(sigma, pi)?)?;
    Ok((char_add(sigma, pi), y))
}

/// The element `y s(σ)` of `A₀` for a 1×1 coefficient `y`.
pub fn realize(s: &IsometryFamily, sigma: &[i64], y: &TwistedPoly) -> Result<TwistedPoly> {
    Ok(y * &s.s(sigma)?)
}

/// Inverse of [`realize`]: `y = x s(σ)*`.
pub fn coefficient(s: &IsometryFamily, sigma: &[i64], x: &TwistedPoly) -> Result<TwistedPoly> {
    Ok(x * &s.s(sigma)?.star())
}
