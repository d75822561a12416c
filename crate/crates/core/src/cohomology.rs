//! Group cohomology of `Z^d` with values in central unitaries of `B₀`:
//! the obstruction cocycle of an automorphism, the coboundary problem and
//! the lift `β̂` it controls.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{PhaseCoeff, PolyMatrix, TwistMatrix, TwistedPoly};
use crate::dynamics::{char_add, char_string, check_equivariance, grade, is_in_base, CharBox, Character, GradedElement, TorusAction};
use crate::error::{Error, Result};
use crate::factor_system::{coefficient, frohlich, verify_conjugacy, FactorSystem, Family, GammaCache, IsometryFamily, Morphism};
use crate::report::{sweep, Tally, Verification};

/// The action `σ ↦ Δ_σ` on central unitaries.
#[derive(Clone, Debug)]
pub enum FrohlichAction {
    Trivial,
    Isometries(IsometryFamily),
}

impl FrohlichAction {
    pub fn apply(&self, sigma: &[i64], b: &TwistedPoly) -> Result<TwistedPoly> {
        match self {
            FrohlichAction::Trivial => Ok(b.clone()),
            FrohlichAction::Isometries(s) => frohlich(s, sigma, b),
        }
    }
}

/// A map `(σ, π) ↦ u(σ, π)` stored on all pairs of a character box.
#[derive(Clone, Debug)]
pub struct TwoCocycle {
    twist: Arc<TwistMatrix>,
    chars: CharBox,
    base_gens: Vec<usize>,
    delta: FrohlichAction,
    values: BTreeMap<(Character, Character), TwistedPoly>,
}

impl TwoCocycle {
    pub fn from_fn(
        twist: &Arc<TwistMatrix>,
        base_gens: Vec<usize>,
        chars: CharBox,
        delta: FrohlichAction,
        f: impl Fn(&[i64], &[i64]) -> Result<TwistedPoly> + Sync,
    ) -> Result<Self> {
        let pairs = chars.pairs();
        let vals = pairs.par_iter().map(|(a, b)| f(a, b)).collect::<Result<Vec<_>>>()?;
        Ok(Self { twist: twist.clone(), chars, base_gens, delta, values: pairs.into_iter().zip(vals).collect() })
    }

    /// `u(σ, π) = c^{σᵀ M π}` for a unimodular scalar `c`, with trivial `Δ`.
    pub fn bilinear(twist: &Arc<TwistMatrix>, base_gens: Vec<usize>, radius: i64, matrix: Vec<Vec<i64>>, c: PhaseCoeff) -> Result<Self> {
        let d = matrix.len();
        if matrix.iter().any(|r| r.len() != d) {
            return Err(Error::Shape("bilinear form must be square".into()));
        }
        let cinv = c.inv().ok_or_else(|| Error::Precondition(format!("{c} is not invertible")))?;
        let t = twist.clone();
        Self::from_fn(twist, base_gens, CharBox::new(d, radius), FrohlichAction::Trivial, move |s, p| {
            let e: i64 = (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| s[i] * matrix[i][j] * p[j]).sum();
            let base = if e >= 0 { &c } else { &cinv };
            let v = (0..e.unsigned_abs()).fold(PhaseCoeff::one(), |acc, _| acc.mul(base));
            Ok(TwistedPoly::scalar(&t, v))
        })
    }

    pub fn chars(&self) -> CharBox {
        self.chars
    }

    pub fn delta(&self) -> &FrohlichAction {
        &self.delta
    }

    pub fn value(&self, sigma: &[i64], pi: &[i64]) -> Result<&TwistedPoly> {
        self.values
            .get(&(sigma.to_vec(), pi.to_vec()))
            .ok_or_else(|| Error::Precondition(format!("cocycle not stored at ({}, {})", char_string(sigma), char_string(pi))))
    }

    pub fn values(&self) -> impl Iterator<Item = (&(Character, Character), &TwistedPoly)> {
        self.values.iter()
    }

    pub fn is_trivial(&self) -> bool {
        self.values.values().all(TwistedPoly::is_one)
    }

    /// Pointwise `u'(σ,π) u(σ,π)*`.
    pub fn ratio(&self, other: &TwoCocycle) -> Result<TwoCocycle> {
        let values = self
            .values
            .iter()
            .map(|(k, v)| Ok((k.clone(), v * &other.value(&k.0, &k.1)?.star())))
            .collect::<Result<_>>()?;
        Ok(Self { values, ..self.clone() })
    }
}

/// A map `σ ↦ u(σ)` into central unitaries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneCochain {
    pub values: BTreeMap<Character, TwistedPoly>,
}

impl OneCochain {
    pub fn value(&self, sigma: &[i64]) -> Result<&TwistedPoly> {
        self.values.get(sigma).ok_or_else(|| Error::Precondition(format!("cochain not defined at {}", char_string(sigma))))
    }

    pub fn is_trivial(&self) -> bool {
        self.values.values().all(TwistedPoly::is_one)
    }
}

/// Failure of the coboundary equation at a pair of characters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Obstruction {
    pub sigma: Character,
    pub pi: Character,
    /// `u(σ,π) · (Δ_σ(u(π)) u(σ) u(σ+π)*)*`, which is `1` exactly when the
    /// equation holds.
    pub residual: String,
    /// Set when the failure is independent of the cochain tried: with
    /// trivial `Δ` every coboundary is symmetric, so an asymmetric value
    /// `u(σ,π) u(π,σ)* ≠ 1` rules out all cochains.
    pub certified: bool,
    pub reason: String,
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "obstruction at ({}, {}): residual {} ({})",
            char_string(&self.sigma),
            char_string(&self.pi),
            self.residual,
            self.reason
        )
    }
}

#[derive(Clone, Debug)]
pub enum CoboundarySolution {
    Cochain(OneCochain),
    Obstruction(Obstruction),
}

/// The obstruction cocycle
/// `u(σ,π) = s(σ+π)* β⁻¹(v(σ+π) ω(π,σ)* γ_π(v(σ)*) v(π)*) s(π) s(σ)`
/// on all pairs in `[-radius, radius]^d`. The witness `v` must satisfy
/// `γ^β_σ = Ad[v(σ)]∘γ_σ`; this is checked first on every character that
/// enters the formula.
pub fn extract_cocycle(fs: &FactorSystem, beta: &Morphism, beta_inv: &Morphism, v: &Family, radius: i64) -> Result<TwoCocycle> {
    let s = fs
        .isometries()
        .ok_or_else(|| Error::Unsupported("cocycle extraction needs a factor system built from isometries".into()))?
        .clone();
    let action = fs.action().clone();
    let t = fs.twist().clone();
    let fsb = fs.beta_transform(beta, beta_inv)?;
    let wide = action.chars(2 * radius);
    let c1 = GammaCache::new(fs, wide)?;
    let c2 = GammaCache::new(&fsb, wide)?;
    let fixed = action.fixed_coords();
    wide.chars().par_iter().try_for_each(|sigma| -> Result<()> {
        let vs = v.at(sigma)?;
        for &k in &fixed {
            let u = PolyMatrix::scalar(TwistedPoly::generator(&t, k));
            let lhs = vs.mul(&c1.apply(sigma, &u)?)?.mul(&vs.adjoint())?;
            if lhs != c2.apply(sigma, &u)? {
                return Err(Error::Precondition(format!(
                    "witness fails gamma-conjugacy at sigma={} on generator u{}",
                    char_string(sigma),
                    k + 1
                )));
            }
        }
        Ok(())
    })?;

    TwoCocycle::from_fn(&t, fixed, action.chars(radius), FrohlichAction::Isometries(s.clone()), |sigma, pi| {
        let sp = char_add(sigma, pi);
        let vsig_star = v.at(sigma)?.adjoint();
        let inner = v
            .at(&sp)?
            .mul(&fs.omega(pi, sigma)?.adjoint())?
            .mul(&c1.apply(pi, &vsig_star)?)?
            .mul(&v.at(pi)?.adjoint())?;
        let inner = inner.as_poly().ok_or_else(|| Error::Unsupported("cocycle extraction needs one-dimensional spaces".into()))?;
        let back = beta_inv.apply_poly(inner)?;
        Ok(&(&(&s.s(&sp)?.star() * &back) * &s.s(pi)?) * &s.s(sigma)?)
    })
}

fn is_central(twist: &Arc<TwistMatrix>, gens: &[usize], x: &TwistedPoly) -> bool {
    gens.iter().all(|&k| {
        let g = TwistedPoly::generator(twist, k);
        &g * x == x * &g
    })
}

fn is_unitary(x: &TwistedPoly) -> bool {
    (x * &x.star()).is_one() && (&x.star() * x).is_one()
}

/// Centrality, unitarity and
/// `u(σ+π,ρ) u(σ,π) = u(σ,π+ρ) Δ_σ(u(π,ρ))` on triples in
/// `[-radius, radius]^d` (the cocycle box must be at least twice as wide).
pub fn verify_cocycle(u: &TwoCocycle, radius: i64) -> Verification {
    let pairs: Vec<_> = u.values.iter().collect();
    let local = sweep("central unitary values", &pairs, |((sigma, pi), x)| {
        let mut t_ = Tally::default();
        let at = || vec![("sigma", char_string(sigma)), ("pi", char_string(pi))];
        t_.check("u(sigma,pi) is central", at, &is_central(&u.twist, &u.base_gens, x), &true);
        t_.check("u(sigma,pi) is unitary", at, &is_unitary(x), &true);
        let in_base = x.terms().all(|(a, _)| a.iter().enumerate().all(|(k, &e)| e == 0 || u.base_gens.contains(&k)));
        t_.check("u(sigma,pi) lies in B", at, &in_base, &true);
        t_.done()
    });
    let triples = CharBox::new(u.chars.d, radius).triples();
    let identity = sweep("2-cocycle identity", &triples, |(sigma, pi, rho)| {
        let mut t_ = Tally::default();
        let lhs = u.value(&char_add(sigma, pi), rho)? * u.value(sigma, pi)?;
        let rhs = u.value(sigma, &char_add(pi, rho))? * &u.delta.apply(sigma, u.value(pi, rho)?)?;
        t_.check(
            "u(sigma+pi,rho) u(sigma,pi) = u(sigma,pi+rho) Delta_sigma(u(pi,rho))",
            || vec![("sigma", char_string(sigma)), ("pi", char_string(pi)), ("rho", char_string(rho))],
            &lhs,
            &rhs,
        );
        t_.done()
    });
    Verification::new("2-cocycle", vec![local, identity])
}

fn unit_char(d: usize, j: usize, sign: i64) -> Character {
    let mut e = vec![0; d];
    e[j] = sign;
    e
}

/// Tries to write `u(σ,π) = Δ_σ(u(π)) u(σ) u(σ+π)*` on the stored box.
///
/// The cochain is built by walking from `0` along the coordinate axes in
/// lexicographic order with `u(e_j) = 1`:
/// `u(σ+e_j) = u(σ,e_j)* Δ_σ(u(e_j)) u(σ)` and
/// `u(σ-e_j) = u(σ-e_j,e_j) u(σ) Δ_{σ-e_j}(u(e_j))*`, then checked on every
/// pair. For `d = 1` this is the standard recursion and always succeeds on
/// cocycles. For `d ≥ 2` a failed check is returned as an obstruction,
/// certified only when an asymmetry under trivial `Δ` proves it.
pub fn solve_coboundary(u: &TwoCocycle) -> Result<CoboundarySolution> {
    let pre = verify_cocycle(u, u.chars.radius / 2);
    if !pre.passed {
        let why = pre.first_failure().map(|c| c.describe()).unwrap_or_default();
        return Err(Error::Precondition(format!("input is not a 2-cocycle: {why}")));
    }
    let d = u.chars.d;
    let zero = vec![0; d];
    let r = u.chars.radius;
    let mut cochain: BTreeMap<Character, TwistedPoly> = BTreeMap::new();
    cochain.insert(zero.clone(), u.value(&zero, &zero)?.clone());
    for j in 0..d {
        cochain.insert(unit_char(d, j, 1), TwistedPoly::one(&u.twist));
    }
    // Walk: extend along coordinate 0 first from the origin, then along 1
    // from every point reached so far, and so on.
    let mut frontier: Vec<Character> = vec![zero.clone()];
    for j in 0..d {
        let ej = unit_char(d, j, 1);
        let uej = cochain[&ej].clone();
        let mut reached = Vec::new();
        for start in &frontier {
            reached.push(start.clone());
            let mut cur = start.clone();
            while cur[j] < r {
                let next = char_add(&cur, &ej);
                if !cochain.contains_key(&next) {
                    let val = &(&u.value(&cur, &ej)?.star() * &u.delta.apply(&cur, &uej)?) * &cochain[&cur];
                    cochain.insert(next.clone(), val);
                }
                reached.push(next.clone());
                cur = next;
            }
            let mut cur = start.clone();
            while cur[j] > -r {
                let prev = char_add(&cur, &unit_char(d, j, -1));
                if !cochain.contains_key(&prev) {
                    let val = &(u.value(&prev, &ej)? * &cochain[&cur]) * &u.delta.apply(&prev, &uej)?.star();
                    cochain.insert(prev.clone(), val);
                }
                reached.push(prev.clone());
                cur = prev;
            }
        }
        frontier = reached;
    }
    let cochain = OneCochain { values: cochain };
    match coboundary_residual(u, &cochain)? {
        None => Ok(CoboundarySolution::Cochain(cochain)),
        Some((sigma, pi, residual)) => {
            let (certified, reason) = certify(u)?;
            Ok(CoboundarySolution::Obstruction(Obstruction { sigma, pi, residual: residual.to_string(), certified, reason }))
        }
    }
}

/// First pair in the box where the coboundary equation fails, with the
/// residual `u(σ,π) · (Δ_σ(c(π)) c(σ) c(σ+π)*)*`.
pub fn coboundary_residual(u: &TwoCocycle, c: &OneCochain) -> Result<Option<(Character, Character, TwistedPoly)>> {
    let pairs: Vec<_> = u.chars.pairs().into_iter().filter(|(s, p)| u.chars.contains(&char_add(s, p))).collect();
    let results = pairs
        .par_iter()
        .map(|(sigma, pi)| -> Result<Option<TwistedPoly>> {
            let cob = &(&u.delta.apply(sigma, c.value(pi)?)? * c.value(sigma)?) * &c.value(&char_add(sigma, pi))?.star();
            let res = u.value(sigma, pi)? * &cob.star();
            Ok((!res.is_one()).then_some(res))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(pairs.into_iter().zip(results).find_map(|((s, p), r)| r.map(|r| (s, p, r))))
}

fn certify(u: &TwoCocycle) -> Result<(bool, String)> {
    // Only an action declared trivial on the whole center makes every
    // coboundary symmetric; agreement on the stored values is not enough.
    if matches!(u.delta, FrohlichAction::Trivial) {
        for (sigma, pi) in u.chars.pairs() {
            let a = u.value(&sigma, &pi)? * &u.value(&pi, &sigma)?.star();
            if !a.is_one() {
                return Ok((
                    true,
                    format!(
                        "u({},{}) u({},{})* = {a} != 1, while coboundaries are symmetric under trivial action",
                        char_string(&sigma),
                        char_string(&pi),
                        char_string(&pi),
                        char_string(&sigma)
                    ),
                ));
            }
        }
    }
    Ok((false, "path-normalized cochain does not solve the equation; no certificate".into()))
}

/// The corrected witness `v'(σ) = β(γ_σ(c(σ))) v(σ)` from a solving cochain.
pub fn corrected_witness(fs: &FactorSystem, beta: &Morphism, v: &Family, c: &OneCochain) -> Family {
    let (fs, beta, v, c) = (fs.clone(), beta.clone(), v.clone(), c.clone());
    Family::from_fn(format!("{} corrected", v.label()), move |sigma| {
        let g = fs.gamma(sigma)?.apply(c.value(sigma)?)?;
        g.try_map(|e| beta.apply_poly(e))?.mul(&v.at(sigma)?)
    })
}

/// `β̂(Tr(y s(σ))) = Tr(β(y) v(σ) s(σ))`, built after the witness has been
/// checked against the conjugacy equations.
#[derive(Clone, Debug)]
pub struct LiftedAutomorphism {
    action: TorusAction,
    s: IsometryFamily,
    beta: Morphism,
    v: Family,
}

impl LiftedAutomorphism {
    pub fn new(fs: &FactorSystem, beta: &Morphism, beta_inv: &Morphism, v: &Family, radius: i64, degree: i64) -> Result<Self> {
        let s = fs
            .isometries()
            .ok_or_else(|| Error::Unsupported("lifting needs a factor system built from isometries".into()))?
            .clone();
        let fsb = fs.beta_transform(beta, beta_inv)?;
        let report = verify_conjugacy(fs, &fsb, v, radius, degree);
        if !report.passed {
            let why = report.first_failure().map(|c| c.describe()).unwrap_or_default();
            return Err(Error::Precondition(format!("conjugacy witness invalid: {why}")));
        }
        Ok(Self { action: fs.action().clone(), s, beta: beta.clone(), v: v.clone() })
    }

    pub fn apply(&self, x: &TwistedPoly) -> Result<TwistedPoly> {
        Ok(self.apply_graded(&grade(&self.action, x))?.total())
    }

    pub fn apply_graded(&self, x: &GradedElement) -> Result<GradedElement> {
        let mut out = TwistedPoly::zero(self.action.twist());
        for (sigma, xs) in x.components() {
            let y = coefficient(&self.s, sigma, xs)?;
            let by = self.beta.apply_poly(&y)?;
            let vs = self.v.poly_at(sigma)?;
            out = &out + &(&(&by * &vs) * &self.s.s(sigma)?);
        }
        Ok(grade(&self.action, &out))
    }
}

pub fn lift_automorphism(
    fs: &FactorSystem,
    beta: &Morphism,
    beta_inv: &Morphism,
    v: &Family,
    x: &GradedElement,
    radius: i64,
    degree: i64,
) -> Result<GradedElement> {
    LiftedAutomorphism::new(fs, beta, beta_inv, v, radius, degree)?.apply_graded(x)
}

/// Checks multiplicativity on `pairs`, and star compatibility,
/// equivariance and restriction to `β` on `singles`.
pub fn verify_lifted_automorphism(lift: &LiftedAutomorphism, singles: &[TwistedPoly], pairs: &[(TwistedPoly, TwistedPoly)]) -> Verification {
    let action = &lift.action;
    let mult = sweep("multiplicative", pairs, |(x, y)| {
        let mut t_ = Tally::default();
        let lhs = lift.apply(&(x * y))?;
        let rhs = &lift.apply(x)? * &lift.apply(y)?;
        t_.check("lift(xy) = lift(x) lift(y)", || vec![("x", x.to_string()), ("y", y.to_string())], &lhs, &rhs);
        t_.done()
    });
    let single = sweep("star, equivariance, restriction", singles, |x| {
        let mut t_ = Tally::default();
        let at = || vec![("x", x.to_string())];
        let bx = lift.apply(x)?;
        t_.check("lift(x*) = lift(x)*", at, &lift.apply(&x.star())?, &bx.star());
        for (sigma, xs) in grade(action, x).components() {
            let img = lift.apply(xs)?;
            t_.check("lift preserves degree", at, &check_equivariance(action, &img, sigma), &true);
        }
        if is_in_base(action, x) {
            t_.check("lift restricts to beta", at, &bx, &lift.beta.apply_poly(x)?);
        }
        t_.done()
    });
    Verification::new("lifted automorphism", vec![mult, single])
}

/// Summary of the full lifting pipeline.
#[derive(Clone, Debug)]
pub struct LiftOutcome {
    pub cocycle: TwoCocycle,
    pub cocycle_report: Verification,
    pub solution: CoboundarySolution,
    pub lift: Option<LiftedAutomorphism>,
}

/// Extracts the cocycle on a box of radius `2·radius`, verifies it, solves
/// the coboundary problem and, on success, builds `β̂` from the corrected
/// witness.
pub fn lift_pipeline(fs: &FactorSystem, beta: &Morphism, beta_inv: &Morphism, v: &Family, radius: i64, degree: i64) -> Result<LiftOutcome> {
    let cocycle = extract_cocycle(fs, beta, beta_inv, v, 2 * radius)?;
    let cocycle_report = verify_cocycle(&cocycle, radius);
    if !cocycle_report.passed {
        return Ok(LiftOutcome {
            solution: CoboundarySolution::Obstruction(Obstruction {
                sigma: vec![],
                pi: vec![],
                residual: String::new(),
                certified: false,
                reason: "extracted map is not a cocycle".into(),
            }),
            cocycle,
            cocycle_report,
            lift: None,
        });
    }
    let solution = solve_coboundary(&cocycle)?;
    let lift = match &solution {
        CoboundarySolution::Cochain(c) => {
            let v2 = corrected_witness(fs, beta, v, c);
            Some(LiftedAutomorphism::new(fs, beta, beta_inv, &v2, radius, degree)?)
        }
        CoboundarySolution::Obstruction(_) => None,
    };
    Ok(LiftOutcome { cocycle, cocycle_report, solution, lift })
}
