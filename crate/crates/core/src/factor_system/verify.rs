use std::borrow::Cow;
use std::collections::BTreeMap;

use rayon::prelude::*;

use super::family::Family;
use super::morphism::Morphism;
use super::system::FactorSystem;
use crate::algebra::{PolyMatrix, TwistedPoly};
use crate::dynamics::{char_add, char_string, CharBox, Character};
use crate::error::Result;
use crate::report::{sweep, CheckReport, Tally, Verification};

/// `γ_σ` precomputed on a box of characters, falling back to direct
/// evaluation outside it.
pub struct GammaCache<'a> {
    fs: &'a FactorSystem,
    cache: BTreeMap<Character, Morphism>,
}

impl<'a> GammaCache<'a> {
    pub fn new(fs: &'a FactorSystem, chars: CharBox) -> Result<Self> {
        let list = chars.chars();
        let values = list.par_iter().map(|s| fs.gamma(s)).collect::<Result<Vec<_>>>()?;
        Ok(Self { fs, cache: list.into_iter().zip(values).collect() })
    }

    pub fn get(&self, sigma: &[i64]) -> Result<Cow<'_, Morphism>> {
        match self.cache.get(sigma) {
            Some(g) => Ok(Cow::Borrowed(g)),
            None => Ok(Cow::Owned(self.fs.gamma(sigma)?)),
        }
    }

    /// `(γ_σ ⊗ id)(y)`.
    pub fn apply(&self, sigma: &[i64], y: &PolyMatrix) -> Result<PolyMatrix> {
        self.get(sigma)?.apply_matrix(y)
    }
}

/// `ω(σ,π)` for `σ` in one box and `π` in another, plus the transposed
/// pairs.
struct OmegaCache<'a> {
    fs: &'a FactorSystem,
    cache: BTreeMap<(Character, Character), PolyMatrix>,
}

impl<'a> OmegaCache<'a> {
    fn new(fs: &'a FactorSystem, wide: &CharBox, narrow: &CharBox) -> Result<Self> {
        let (w, n) = (wide.chars(), narrow.chars());
        let keys: Vec<(Character, Character)> =
            w.iter().flat_map(|a| n.iter().flat_map(move |b| [(a.clone(), b.clone()), (b.clone(), a.clone())])).collect();
        let values = fs.omegas(&keys)?;
        Ok(Self { fs, cache: keys.into_iter().zip(values).collect() })
    }

    fn get(&self, sigma: &[i64], pi: &[i64]) -> Result<PolyMatrix> {
        match self.cache.get(&(sigma.to_vec(), pi.to_vec())) {
            Some(w) => Ok(w.clone()),
            None => self.fs.omega(sigma, pi),
        }
    }
}

fn s1(sigma: &[i64]) -> Vec<(&'static str, String)> {
    vec![("sigma", char_string(sigma))]
}

fn s2(sigma: &[i64], pi: &[i64]) -> Vec<(&'static str, String)> {
    vec![("sigma", char_string(sigma)), ("pi", char_string(pi))]
}

/// Checks the factor-system relations exactly on `[-radius, radius]^d`
/// with base elements the monomials of `B₀` of degree at most `degree`.
pub fn verify_axioms(fs: &FactorSystem, radius: i64, degree: i64) -> Verification {
    let action = fs.action();
    let chars = action.chars(radius);
    let basis = action.base_monomials(degree);
    let t = fs.twist().clone();
    let cache = match GammaCache::new(fs, action.chars(2 * radius)) {
        Ok(c) => c,
        Err(e) => return evaluation_failure("factor system axioms", e),
    };
    let omegas = match OmegaCache::new(fs, &action.chars(2 * radius), &chars) {
        Ok(c) => c,
        Err(e) => return evaluation_failure("factor system axioms", e),
    };
    let zero = vec![0; action.d()];

    let normalization = sweep("normalization", &chars.chars(), |sigma| {
        let mut t_ = Tally::default();
        let one = PolyMatrix::scalar(TwistedPoly::one(&t));
        if sigma == &zero {
            let g0 = cache.get(&zero)?;
            for &k in action.fixed_coords().iter() {
                let u = PolyMatrix::scalar(TwistedPoly::generator(&t, k));
                t_.check("gamma_0 = id", || vec![("generator", format!("u{}", k + 1))], &g0.apply_matrix(&u)?, &u);
            }
        }
        let unit = cache.apply(sigma, &one)?;
        t_.check("omega(0,sigma) = gamma_sigma(1)", || s1(sigma), &fs.omega(&zero, sigma)?, &unit);
        t_.check("omega(sigma,0) = gamma_sigma(1)", || s1(sigma), &fs.omega(sigma, &zero)?, &unit);
        t_.done()
    });

    let pairs = chars.pairs();
    let ranges = sweep("ranges", &pairs, |(sigma, pi)| {
        let mut t_ = Tally::default();
        let one = PolyMatrix::scalar(TwistedPoly::one(&t));
        let w = omegas.get(sigma, pi)?;
        let sp = char_add(sigma, pi);
        t_.check("omega* omega = gamma_{sigma+pi}(1)", || s2(sigma, pi), &w.adjoint().mul(&w)?, &cache.apply(&sp, &one)?);
        let gg1 = cache.apply(sigma, &cache.apply(pi, &one)?)?;
        t_.check("omega omega* = gamma_sigma(gamma_pi(1))", || s2(sigma, pi), &w.mul(&w.adjoint())?, &gg1);
        t_.done()
    });

    let coaction = sweep("coaction", &pairs, |(sigma, pi)| {
        let mut t_ = Tally::default();
        let w = omegas.get(sigma, pi)?;
        let sp = char_add(sigma, pi);
        for b in &basis {
            let bm = PolyMatrix::scalar(b.clone());
            let lhs = w.mul(&cache.apply(&sp, &bm)?)?;
            let rhs = cache.apply(sigma, &cache.apply(pi, &bm)?)?.mul(&w)?;
            t_.check(
                "omega gamma_{sigma+pi}(b) = gamma_sigma(gamma_pi(b)) omega",
                || vec![("sigma", char_string(sigma)), ("pi", char_string(pi)), ("b", b.to_string())],
                &lhs,
                &rhs,
            );
        }
        t_.done()
    });

    let triples = chars.triples();
    let cocycle = sweep("cocycle", &triples, |(sigma, pi, rho)| {
        let mut t_ = Tally::default();
        let sp = char_add(sigma, pi);
        let pr = char_add(pi, rho);
        let d_rho = cache.get(rho)?.dim();
        let w_sp = omegas.get(sigma, pi)?;
        let lhs = w_sp.kron(&PolyMatrix::identity(&t, d_rho))?.mul(&omegas.get(&sp, rho)?)?;
        let rhs = cache.apply(sigma, &omegas.get(pi, rho)?)?.mul(&omegas.get(sigma, &pr)?)?;
        t_.check(
            "omega(sigma,pi) omega(sigma+pi,rho) = gamma_sigma(omega(pi,rho)) omega(sigma,pi+rho)",
            || vec![("sigma", char_string(sigma)), ("pi", char_string(pi)), ("rho", char_string(rho))],
            &lhs,
            &rhs,
        );
        t_.done()
    });

    Verification::new("factor system axioms", vec![normalization, ranges, coaction, cocycle])
}

/// Checks that `v` conjugates `fs` into `fs2`:
/// `γ'_σ = Ad[v(σ)]∘γ_σ`, `γ_σ = Ad[v(σ)*]∘γ'_σ` and
/// `v(σ) γ_σ(v(π)) ω(σ,π) = ω'(σ,π) v(σ+π)`.
pub fn verify_conjugacy(fs: &FactorSystem, fs2: &FactorSystem, v: &Family, radius: i64, degree: i64) -> Verification {
    let action = fs.action();
    let chars = action.chars(radius);
    let basis = action.base_monomials(degree);
    let t = fs.twist().clone();
    let (c1, c2) = match (GammaCache::new(fs, chars), GammaCache::new(fs2, chars)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return evaluation_failure("conjugacy", e),
    };

    let gamma = sweep("gamma conjugacy", &chars.chars(), |sigma| {
        let mut t_ = Tally::default();
        let vs = v.at(sigma)?;
        let vsa = vs.adjoint();
        let one = PolyMatrix::scalar(TwistedPoly::one(&t));
        t_.check("v* v = gamma_sigma(1)", || s1(sigma), &vsa.mul(&vs)?, &c1.apply(sigma, &one)?);
        t_.check("v v* = gamma'_sigma(1)", || s1(sigma), &vs.mul(&vsa)?, &c2.apply(sigma, &one)?);
        for b in &basis {
            let bm = PolyMatrix::scalar(b.clone());
            let g = c1.apply(sigma, &bm)?;
            let g2 = c2.apply(sigma, &bm)?;
            let at = || vec![("sigma", char_string(sigma)), ("b", b.to_string())];
            t_.check("v gamma_sigma(b) v* = gamma'_sigma(b)", at, &vs.mul(&g)?.mul(&vsa)?, &g2);
            t_.check("v* gamma'_sigma(b) v = gamma_sigma(b)", at, &vsa.mul(&g2)?.mul(&vs)?, &g);
        }
        t_.done()
    });

    let omega = sweep("omega conjugacy", &chars.pairs(), |(sigma, pi)| {
        let mut t_ = Tally::default();
        let lhs = v.at(sigma)?.mul(&c1.apply(sigma, &v.at(pi)?)?)?.mul(&fs.omega(sigma, pi)?)?;
        let rhs = fs2.omega(sigma, pi)?.mul(&v.at(&char_add(sigma, pi))?)?;
        t_.check("v(sigma) gamma_sigma(v(pi)) omega = omega' v(sigma+pi)", || s2(sigma, pi), &lhs, &rhs);
        t_.done()
    });

    Verification::new("conjugacy", vec![gamma, omega])
}

/// Checks that `u` is a gauge unitary of `fs`: unitary relative to
/// `γ_σ(1)`, in the commutant of `γ_σ(B₀)` and
/// `u(σ) γ_σ(u(π)) ω(σ,π) = ω(σ,π) u(σ+π)`.
pub fn verify_gauge_unitary(fs: &FactorSystem, u: &Family, radius: i64, degree: i64) -> Verification {
    let action = fs.action();
    let chars = action.chars(radius);
    let basis = action.base_monomials(degree);
    let t = fs.twist().clone();
    let cache = match GammaCache::new(fs, chars) {
        Ok(c) => c,
        Err(e) => return evaluation_failure("gauge unitary", e),
    };

    let local = sweep("unitarity and commutant", &chars.chars(), |sigma| {
        let mut t_ = Tally::default();
        let us = u.at(sigma)?;
        let usa = us.adjoint();
        let unit = cache.apply(sigma, &PolyMatrix::scalar(TwistedPoly::one(&t)))?;
        t_.check("u* u = gamma_sigma(1)", || s1(sigma), &usa.mul(&us)?, &unit);
        t_.check("u u* = gamma_sigma(1)", || s1(sigma), &us.mul(&usa)?, &unit);
        for b in &basis {
            let g = cache.apply(sigma, &PolyMatrix::scalar(b.clone()))?;
            t_.check(
                "u gamma_sigma(b) = gamma_sigma(b) u",
                || vec![("sigma", char_string(sigma)), ("b", b.to_string())],
                &us.mul(&g)?,
                &g.mul(&us)?,
            );
        }
        t_.done()
    });

    let pairs = sweep("intertwining", &chars.pairs(), |(sigma, pi)| {
        let mut t_ = Tally::default();
        let w = fs.omega(sigma, pi)?;
        let lhs = u.at(sigma)?.mul(&cache.apply(sigma, &u.at(pi)?)?)?.mul(&w)?;
        let rhs = w.mul(&u.at(&char_add(sigma, pi))?)?;
        t_.check("u(sigma) gamma_sigma(u(pi)) omega = omega u(sigma+pi)", || s2(sigma, pi), &lhs, &rhs);
        t_.done()
    });

    Verification::new("gauge unitary", vec![local, pairs])
}

pub(crate) fn evaluation_failure(name: &str, e: crate::error::Error) -> Verification {
    let cx = crate::report::Counterexample::new("evaluation", vec![], e.to_string(), "a value");
    Verification::new(name, vec![CheckReport::fail("setup", 0, cx)])
}
