//! JSON input format. Every symbolic number is a rational string such as
//! `"-3/4"`, so no float is ever coerced into an exact quantity. Generators
//! and coordinates are numbered from 1.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;

use crate::algebra::{parse_rational, GaussRational, PhaseCoeff, PhaseMonomial, PolyMatrix, TwistMatrix, TwistedPoly};
use crate::cohomology::TwoCocycle;
use crate::derivations::Derivation;
use crate::dynamics::{Character, TorusAction};
use crate::error::{Error, Result};
use crate::factor_system::{FactorSystem, Family, IsometryFamily, Morphism};

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub n: usize,
    /// Upper triangle of θ in row order: `θ₁₂, θ₁₃, …, θ₂₃, …`.
    pub theta: Vec<String>,
    pub acting_coords: Vec<usize>,
    pub range: Option<i64>,
    pub gen_degree: Option<i64>,
    /// Unitaries `g_j` of `B₀` for `s(σ) = ∏ g_j^{σ_j} ∏ u_j^{σ_j}`.
    #[serde(default)]
    pub isometry_weights: Option<Vec<Poly>>,
    #[serde(default)]
    pub omega_overrides: Vec<OmegaOverride>,
    #[serde(default)]
    pub gamma_overrides: Vec<GammaOverride>,
    pub automorphism: Option<AutomorphismSpec>,
    pub witness: Option<FamilySpec>,
    pub synthetic_cocycle: Option<SyntheticCocycle>,
    pub derivation: Option<DerivationSpec>,
    pub h_family: Option<FamilySpec>,
    pub sigma: Option<Character>,
    pub derivations: Option<Vec<NamedDerivation>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coeff {
    pub re: String,
    #[serde(default = "zero_string")]
    pub im: String,
}

fn zero_string() -> String {
    "0".into()
}

/// `c · ∏ q^{e} · (2π)^{tau}`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scalar {
    pub coeff: Coeff,
    #[serde(default)]
    pub phase_exponents: Vec<i64>,
    #[serde(default)]
    pub tau: u32,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub exponents: Vec<i64>,
    pub coeff: Coeff,
    #[serde(default)]
    pub phase_exponents: Vec<i64>,
    #[serde(default)]
    pub tau: u32,
}

pub type Poly = Vec<Term>;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaOverride {
    pub sigma: Character,
    pub pi: Character,
    pub value: Poly,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaOverride {
    pub sigma: Character,
    pub generator: usize,
    pub value: Poly,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomorphismSpec {
    pub images: BTreeMap<String, Poly>,
    pub inverse: BTreeMap<String, Poly>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FamilySpec {
    One,
    Zero,
    Linear { coeffs: Vec<Scalar> },
    Power { generators: Vec<Poly> },
    Table { entries: Vec<TableEntry>, default: Option<Poly> },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub sigma: Character,
    pub value: Poly,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticCocycle {
    pub matrix: Vec<Vec<i64>>,
    pub coeff: Scalar,
    #[serde(default)]
    pub base_generators: Vec<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum DerivationSpec {
    Images { images: BTreeMap<String, Poly> },
    Coordinate { coordinate: usize },
    Inner { inner: Poly },
    Combination { combination: Vec<Weighted> },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Weighted {
    pub weight: Scalar,
    pub derivation: DerivationSpec,
}

#[derive(Clone, Debug, Deserialize)]
pub struct NamedDerivation {
    pub name: String,
    #[serde(flatten)]
    pub spec: DerivationSpec,
}

pub fn parse_config(text: &str) -> Result<SystemConfig> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn gauss(c: &Coeff) -> Result<GaussRational> {
    Ok(GaussRational::new(parse_rational(&c.re)?, parse_rational(&c.im)?))
}

fn phase(twist: &TwistMatrix, c: &Coeff, exps: &[i64], tau: u32) -> Result<PhaseCoeff> {
    if !exps.is_empty() && exps.len() != twist.num_slots() {
        return Err(Error::Parse(format!("phase_exponents has {} entries, expected {}", exps.len(), twist.num_slots())));
    }
    let m = PhaseMonomial::from_units(exps.iter().copied().enumerate(), tau);
    Ok(PhaseCoeff::term(gauss(c)?, m))
}

pub fn scalar(twist: &TwistMatrix, s: &Scalar) -> Result<PhaseCoeff> {
    phase(twist, &s.coeff, &s.phase_exponents, s.tau)
}

pub fn poly(twist: &Arc<TwistMatrix>, p: &Poly) -> Result<TwistedPoly> {
    let mut terms = Vec::with_capacity(p.len());
    for t in p {
        if t.exponents.len() != twist.n() {
            return Err(Error::Parse(format!("term has {} exponents, expected {}", t.exponents.len(), twist.n())));
        }
        terms.push((t.exponents.clone(), phase(twist, &t.coeff, &t.phase_exponents, t.tau)?));
    }
    Ok(TwistedPoly::from_terms(twist, terms))
}

fn generator_index(n: usize, key: &str) -> Result<usize> {
    let k: usize = key.trim_start_matches('u').parse().map_err(|_| Error::Parse(format!("bad generator key {key:?}")))?;
    if k == 0 || k > n {
        return Err(Error::Parse(format!("generator {k} out of range 1..={n}")));
    }
    Ok(k - 1)
}

fn image_table(twist: &Arc<TwistMatrix>, images: &BTreeMap<String, Poly>) -> Result<BTreeMap<usize, TwistedPoly>> {
    images.iter().map(|(k, p)| Ok((generator_index(twist.n(), k)?, poly(twist, p)?))).collect()
}

impl SystemConfig {
    pub fn twist(&self) -> Result<Arc<TwistMatrix>> {
        if self.n == 0 {
            return Err(Error::Parse("n must be positive".into()));
        }
        let refs: Vec<&str> = self.theta.iter().map(String::as_str).collect();
        if refs.len() != self.n * (self.n - 1) / 2 {
            return Err(Error::Parse(format!("theta has {} entries, expected {}", refs.len(), self.n * (self.n - 1) / 2)));
        }
        Ok(Arc::new(TwistMatrix::from_upper_strs(self.n, &refs)?))
    }

    pub fn action(&self) -> Result<TorusAction> {
        let acting = self
            .acting_coords
            .iter()
            .map(|&k| if k == 0 { Err(Error::Parse("acting coordinates are numbered from 1".into())) } else { Ok(k - 1) })
            .collect::<Result<Vec<_>>>()?;
        TorusAction::new(self.twist()?, acting)
    }

    pub fn factor_system(&self) -> Result<FactorSystem> {
        let action = self.action()?;
        let t = action.twist().clone();
        let s = match &self.isometry_weights {
            None => IsometryFamily::standard(&action),
            Some(ws) => {
                if ws.len() != action.d() {
                    return Err(Error::Parse(format!("{} isometry weights for {} acting coordinates", ws.len(), action.d())));
                }
                let gens = ws.iter().map(|p| poly(&t, p)).collect::<Result<Vec<_>>>()?;
                IsometryFamily::weighted(&action, Family::power(&t, gens))?
            }
        };
        let mut fs = FactorSystem::from_cleft(s)?;
        for o in &self.omega_overrides {
            fs = fs.with_omega_override(o.sigma.clone(), o.pi.clone(), PolyMatrix::scalar(poly(&t, &o.value)?));
        }
        for o in &self.gamma_overrides {
            let k = generator_index(t.n(), &o.generator.to_string())?;
            fs = fs.with_gamma_override(o.sigma.clone(), k, PolyMatrix::scalar(poly(&t, &o.value)?));
        }
        Ok(fs)
    }

    /// `(β, β⁻¹)` on `B₀`.
    pub fn automorphism(&self) -> Result<Option<(Morphism, Morphism)>> {
        let Some(spec) = &self.automorphism else { return Ok(None) };
        let t = self.twist()?;
        let beta = Morphism::algebra(&t, image_table(&t, &spec.images)?)?;
        let inv = Morphism::algebra(&t, image_table(&t, &spec.inverse)?)?;
        Ok(Some((beta, inv)))
    }

    pub fn witness(&self) -> Result<Family> {
        let t = self.twist()?;
        match &self.witness {
            None => Ok(Family::one(&t)),
            Some(f) => family(&t, f),
        }
    }

    pub fn h_family(&self) -> Result<Family> {
        let t = self.twist()?;
        match &self.h_family {
            None => Ok(Family::zero(&t)),
            Some(f) => family(&t, f),
        }
    }

    pub fn synthetic_cocycle(&self, radius: i64) -> Result<Option<TwoCocycle>> {
        let Some(sc) = &self.synthetic_cocycle else { return Ok(None) };
        let t = self.twist()?;
        let gens = sc
            .base_generators
            .iter()
            .map(|&k| generator_index(t.n(), &k.to_string()))
            .collect::<Result<Vec<_>>>()?;
        let c = scalar(&t, &sc.coeff)?;
        Ok(Some(TwoCocycle::bilinear(&t, gens, radius, sc.matrix.clone(), c)?))
    }

    /// The base derivation, defined on the generators of `B₀`.
    pub fn derivation(&self) -> Result<Option<Derivation>> {
        let Some(spec) = &self.derivation else { return Ok(None) };
        let action = self.action()?;
        Ok(Some(derivation(action.twist(), &action.fixed_coords(), spec)?))
    }

    pub fn named_derivations(&self) -> Result<Option<Vec<(String, Derivation)>>> {
        let Some(list) = &self.derivations else { return Ok(None) };
        let action = self.action()?;
        let domain = action.fixed_coords();
        list.iter().map(|d| Ok((d.name.clone(), derivation(action.twist(), &domain, &d.spec)?))).collect::<Result<Vec<_>>>().map(Some)
    }
}

pub fn family(t: &Arc<TwistMatrix>, f: &FamilySpec) -> Result<Family> {
    Ok(match f {
        FamilySpec::One => Family::one(t),
        FamilySpec::Zero => Family::zero(t),
        FamilySpec::Linear { coeffs } => Family::linear(t, coeffs.iter().map(|c| scalar(t, c)).collect::<Result<_>>()?),
        FamilySpec::Power { generators } => Family::power(t, generators.iter().map(|p| poly(t, p)).collect::<Result<_>>()?),
        FamilySpec::Table { entries, default } => {
            let map = entries.iter().map(|e| Ok((e.sigma.clone(), PolyMatrix::scalar(poly(t, &e.value)?)))).collect::<Result<_>>()?;
            let def = default.as_ref().map(|p| poly(t, p).map(PolyMatrix::scalar)).transpose()?;
            Family::table("table", map, def)
        }
    })
}

pub fn derivation(t: &Arc<TwistMatrix>, domain: &[usize], spec: &DerivationSpec) -> Result<Derivation> {
    match spec {
        DerivationSpec::Images { images } => {
            let mut table = image_table(t, images)?;
            for k in table.keys() {
                if !domain.contains(k) {
                    return Err(Error::InvalidDerivation(format!("u{} is not a generator of the domain", k + 1)));
                }
            }
            for &k in domain {
                table.entry(k).or_insert_with(|| TwistedPoly::zero(t));
            }
            Derivation::new(t, table)
        }
        DerivationSpec::Coordinate { coordinate } => {
            let k = generator_index(t.n(), &coordinate.to_string())?;
            Ok(Derivation::coordinate(t, k, domain))
        }
        DerivationSpec::Inner { inner } => Ok(Derivation::inner(t, &poly(t, inner)?, domain)),
        DerivationSpec::Combination { combination } => {
            let parts = combination
                .iter()
                .map(|w| Ok((scalar(t, &w.weight)?, derivation(t, domain, &w.derivation)?)))
                .collect::<Result<Vec<_>>>()?;
            let refs: Vec<(PhaseCoeff, &Derivation)> = parts.iter().map(|(c, d)| (c.clone(), d)).collect();
            Derivation::combination(&refs)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q3: &str = r#"{"n": 3, "theta": ["1/4", "-1/3", "-1/6"], "acting_coords": [3]}"#;

    #[test]
    fn parses_the_three_torus() {
        let c = parse_config(Q3).unwrap();
        let a = c.action().unwrap();
        assert_eq!(a.acting(), &[2]);
        assert_eq!(a.fixed_coords(), vec![0, 1]);
    }

    #[test]
    fn polynomial_terms() {
        let t = parse_config(Q3).unwrap().twist().unwrap();
        let p: Poly = serde_json::from_str(r#"[{"exponents": [1, 0, 0], "coeff": {"re": "1/2", "im": "-1"}, "phase_exponents": [0, 1, 0], "tau": 1}]"#).unwrap();
        let x = poly(&t, &p).unwrap();
        let c = PhaseCoeff::term(GaussRational::from_fracs(1, 2, -1, 1), PhaseMonomial::from_units([(1, 1)], 1));
        assert_eq!(x, TwistedPoly::monomial(&t, vec![1, 0, 0], c));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_config("{"), Err(Error::Parse(_))));
        assert!(matches!(parse_config(r#"{"n": 3, "theta": ["1/4"], "acting_coords": [3]}"#).unwrap().twist(), Err(Error::Parse(_))));
        assert!(matches!(parse_config(r#"{"n": 2, "theta": ["0.5"], "acting_coords": [1]}"#).unwrap().twist(), Err(_)));
        assert!(parse_config(r#"{"n": 2, "theta": ["1/2"], "acting_coords": [1], "extra": 1}"#).is_err());
    }

    #[test]
    fn derivation_specs() {
        let c = parse_config(
            r#"{"n": 3, "theta": ["1/4", "-1/3", "-1/6"], "acting_coords": [3],
                "derivations": [{"name": "d1", "coordinate": 1},
                                {"name": "mix", "combination": [{"weight": {"coeff": {"re": "2"}}, "derivation": {"coordinate": 2}}]}]}"#,
        )
        .unwrap();
        let ds = c.named_derivations().unwrap().unwrap();
        let t = c.twist().unwrap();
        assert_eq!(ds[0].1, Derivation::coordinate(&t, 0, &[0, 1]));
        let u2 = TwistedPoly::generator(&t, 1);
        assert_eq!(ds[1].1.image(1).unwrap(), &u2.scale(&PhaseCoeff::two_pi_i().mul(&PhaseCoeff::from_int(2))));
    }
}
