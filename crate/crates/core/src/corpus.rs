//! Seeded random test data: twists, polynomials, cleft systems, automorphism
//! witnesses and scalar families. Every generator is a pure function of the
//! seed.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{GaussRational, PhaseCoeff, PolyMatrix, TwistMatrix, TwistedPoly};
use crate::dynamics::{CharBox, TorusAction};
use crate::error::Result;
use crate::factor_system::{FactorSystem, Family, IsometryFamily, Morphism};

/// Unimodular Gaussian rationals from Pythagorean triples.
const TRIPLES: [(i64, i64, i64); 4] = [(3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25)];

/// A circle-action lifting problem `(fs, β, β⁻¹, v)` with a valid witness.
#[derive(Clone, Debug)]
pub struct LiftConfig {
    pub fs: FactorSystem,
    pub beta: Morphism,
    pub beta_inv: Morphism,
    pub v: Family,
}

pub struct Corpus {
    rng: ChaCha8Rng,
}

impl Corpus {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Entries `p/q` with `q ≤ 12` and `|p| < q`.
    pub fn twist(&mut self, n: usize) -> Arc<TwistMatrix> {
        let strs: Vec<String> = (0..n * (n - 1) / 2)
            .map(|_| {
                let q = self.rng.gen_range(1..=12i64);
                let p = self.rng.gen_range(-q + 1..q);
                format!("{p}/{q}")
            })
            .collect();
        let refs: Vec<&str> = strs.iter().map(String::as_str).collect();
        Arc::new(TwistMatrix::from_upper_strs(n, &refs).expect("generated entries parse"))
    }

    pub fn unimodular(&mut self) -> GaussRational {
        match self.rng.gen_range(0..3) {
            0 => {
                let (re, im) = *[(1, 0), (-1, 0), (0, 1), (0, -1)].choose(&mut self.rng).expect("nonempty");
                GaussRational::from_ints(re, im)
            }
            _ => {
                let (a, b, c) = *TRIPLES.choose(&mut self.rng).expect("nonempty");
                let (a, b) = if self.rng.gen() { (a, b) } else { (b, a) };
                let sa = if self.rng.gen() { 1 } else { -1 };
                let sb = if self.rng.gen() { 1 } else { -1 };
                GaussRational::from_fracs(sa * a, c, sb * b, c)
            }
        }
    }

    /// Unimodular scalar, sometimes multiplied by a formal phase unit.
    pub fn unit_coeff(&mut self, twist: &TwistMatrix) -> PhaseCoeff {
        let c = PhaseCoeff::from_gauss(self.unimodular());
        if twist.num_slots() > 0 && self.rng.gen_bool(0.3) {
            let slot = self.rng.gen_range(0..twist.num_slots());
            let e = if self.rng.gen() { 1 } else { -1 };
            c.mul(&PhaseCoeff::unit(slot, e))
        } else {
            c
        }
    }

    fn coeff(&mut self, twist: &TwistMatrix) -> PhaseCoeff {
        if self.rng.gen_bool(0.3) {
            return self.unit_coeff(twist);
        }
        let mut part = || {
            let den = self.rng.gen_range(1..=3);
            (self.rng.gen_range(-4..=4), den)
        };
        let (a, b) = part();
        let (c, d) = part();
        let g = GaussRational::from_fracs(a, b, c, d);
        if g == GaussRational::from_ints(0, 0) {
            PhaseCoeff::one()
        } else {
            PhaseCoeff::from_gauss(g)
        }
    }

    fn exponents(&mut self, n: usize, range: i64) -> Vec<i64> {
        (0..n).map(|_| self.rng.gen_range(-range..=range)).collect()
    }

    /// Up to `max_terms` terms, exponents in `[-range, range]`.
    pub fn poly(&mut self, twist: &Arc<TwistMatrix>, max_terms: usize, range: i64) -> TwistedPoly {
        let k = self.rng.gen_range(1..=max_terms);
        let terms: Vec<_> = (0..k).map(|_| (self.exponents(twist.n(), range), self.coeff(twist))).collect();
        TwistedPoly::from_terms(twist, terms)
    }

    /// A unitary monomial with exponents in `[-range, range]`.
    pub fn unitary_monomial(&mut self, twist: &Arc<TwistMatrix>, range: i64) -> TwistedPoly {
        let a = self.exponents(twist.n(), range);
        let c = self.unit_coeff(twist);
        TwistedPoly::monomial(twist, a, c)
    }

    /// A polynomial whose terms all have the given acting exponents.
    pub fn graded_poly(&mut self, action: &TorusAction, sigma: &[i64], max_terms: usize, range: i64) -> TwistedPoly {
        let t = action.twist().clone();
        let k = self.rng.gen_range(1..=max_terms);
        let terms: Vec<_> = (0..k)
            .map(|_| {
                let mut a = self.exponents(t.n(), range);
                for (&j, &s) in action.acting().iter().zip(sigma) {
                    a[j] = s;
                }
                (a, self.coeff(&t))
            })
            .collect();
        TwistedPoly::from_terms(&t, terms)
    }

    pub fn base_poly(&mut self, action: &TorusAction, max_terms: usize, range: i64) -> TwistedPoly {
        self.graded_poly(action, &vec![0; action.d()], max_terms, range)
    }

    pub fn base_unitary(&mut self, action: &TorusAction, range: i64) -> TwistedPoly {
        let t = action.twist();
        let mut a = self.exponents(t.n(), range);
        for &j in action.acting() {
            a[j] = 0;
        }
        let c = self.unit_coeff(t);
        TwistedPoly::monomial(t, a, c)
    }

    /// `n` generators with `d` of them acted on.
    pub fn action(&mut self, n: usize, d: usize) -> TorusAction {
        let twist = self.twist(n);
        let mut coords: Vec<usize> = (0..n).collect();
        coords.shuffle(&mut self.rng);
        coords.truncate(d);
        TorusAction::new(twist, coords).expect("distinct coordinates")
    }

    /// A cleft system with isometries `s(σ) = ∏ g_j^{σ_j} · ∏ u_j^{σ_j}`
    /// for random unitary monomials `g_j` of `B₀`, or the standard ones.
    pub fn cleft_system(&mut self, action: &TorusAction) -> Result<FactorSystem> {
        if self.rng.gen_bool(0.3) {
            return FactorSystem::from_cleft(IsometryFamily::standard(action));
        }
        let gens: Vec<TwistedPoly> = (0..action.d()).map(|_| self.base_unitary(action, 2)).collect();
        FactorSystem::from_cleft(IsometryFamily::weighted(action, Family::power(action.twist(), gens))?)
    }

    /// A circle action with `β = Ad[b]∘τ_w` on `B₀` and witness
    /// `v(σ) = c(σ) b γ_σ(b*)` for random unimodular scalars `c(σ)` on
    /// `[-table_radius, table_radius]` (and `1` outside).
    pub fn lift_config(&mut self, n: usize, table_radius: i64) -> Result<LiftConfig> {
        let action = self.action(n, 1);
        let fs = self.cleft_system(&action)?;
        let t = action.twist().clone();
        let fixed = action.fixed_coords();
        let b = self.base_unitary(&action, 2);
        let phases: BTreeMap<usize, PhaseCoeff> = fixed.iter().map(|&k| (k, PhaseCoeff::from_gauss(self.unimodular()))).collect();
        let inv_phases: BTreeMap<usize, PhaseCoeff> = phases.iter().map(|(&k, w)| (k, w.conj())).collect();
        let tau = Morphism::diagonal(&t, phases)?;
        let tau_inv = Morphism::diagonal(&t, inv_phases)?;
        let beta = Morphism::inner(&t, &fixed, &b)?.compose(&tau)?;
        let beta_inv = tau_inv.compose(&Morphism::inner(&t, &fixed, &b.star())?)?;
        let table: BTreeMap<Vec<i64>, TwistedPoly> = CharBox::new(1, table_radius)
            .chars()
            .into_iter()
            .map(|s| {
                let c = PhaseCoeff::from_gauss(self.unimodular());
                (s, TwistedPoly::scalar(&t, c))
            })
            .collect();
        let fs2 = fs.clone();
        let one = TwistedPoly::one(&t);
        let v = Family::from_fn("c b gamma(b*)", move |s| {
            let c = table.get(s).unwrap_or(&one);
            let g = fs2.gamma(s)?.apply_poly(&b.star())?;
            Ok(PolyMatrix::scalar(&(c * &b) * &g))
        });
        Ok(LiftConfig { fs, beta, beta_inv, v })
    }

    /// A scalar family that is a crossed homomorphism into skew scalars:
    /// `σ ↦ Σ σ_j · i r_j` with rational `r_j`.
    pub fn valid_scalar_h(&mut self, twist: &Arc<TwistMatrix>, d: usize) -> Family {
        let coeffs = (0..d)
            .map(|_| {
                let r = GaussRational::from_fracs(0, 1, self.rng.gen_range(-5..=5), self.rng.gen_range(1..=4));
                let c = PhaseCoeff::from_gauss(r);
                if self.rng.gen() {
                    c.mul(&PhaseCoeff::two_pi_i()).mul(&PhaseCoeff::i().neg())
                } else {
                    c
                }
            })
            .collect();
        Family::linear(twist, coeffs)
    }

    /// A scalar family that fails to be a skew crossed homomorphism
    /// somewhere in `[-radius, radius]^d`: a real slope, a quadratic term or
    /// a single corrupted value.
    pub fn invalid_scalar_h(&mut self, twist: &Arc<TwistMatrix>, d: usize, radius: i64) -> Family {
        let valid = self.valid_scalar_h(twist, d);
        match self.rng.gen_range(0..3) {
            0 => {
                let mut coeffs: Vec<PhaseCoeff> = (0..d).map(|_| PhaseCoeff::zero()).collect();
                let j = self.rng.gen_range(0..d);
                coeffs[j] = PhaseCoeff::from_int(self.rng.gen_range(1..=3));
                let real = Family::linear(twist, coeffs);
                let (a, b) = (valid.clone(), real);
                Family::from_fn("linear with real part", move |s| a.at(s)?.add(&b.at(s)?))
            }
            1 => {
                let t = twist.clone();
                let a = valid.clone();
                Family::from_fn("quadratic", move |s| {
                    let q: i64 = s.iter().map(|x| x * x).sum();
                    a.at(s)?.add(&PolyMatrix::scalar(TwistedPoly::scalar(&t, PhaseCoeff::i().mul(&PhaseCoeff::from_int(q)))))
                })
            }
            _ => {
                let mut sigma: Vec<i64> = (0..d).map(|_| self.rng.gen_range(-radius..=radius)).collect();
                if sigma.iter().all(|&x| x == 0) {
                    sigma[0] = 1;
                }
                let bump = if self.rng.gen() { PhaseCoeff::i() } else { PhaseCoeff::from_int(1) };
                let value = valid.at(&sigma).expect("linear family is total").add(&PolyMatrix::scalar(TwistedPoly::scalar(twist, bump))).expect("scalars add");
                valid.with_override(sigma, value)
            }
        }
    }
}
