//! Derivations of `B₀` and their lifts to `A₀`: the lift conditions on a
//! family `H`, the gauge Lie algebra, crossed homomorphisms and linear
//! sections of the Atiyah sequence.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::algebra::{PhaseCoeff, PolyMatrix, TwistMatrix, TwistedPoly};
use crate::dynamics::{char_add, char_string, check_equivariance, grade, is_in_base, TorusAction};
use crate::error::{Error, Result};
use crate::factor_system::{coefficient, evaluation_failure, FactorSystem, Family, GammaCache, IsometryFamily};
use crate::report::{sweep, CheckReport, Counterexample, Tally, Verification};

/// Anything that acts on the polynomial algebra as a linear map.
pub trait DerivationOp: Send + Sync {
    fn apply(&self, x: &TwistedPoly) -> Result<TwistedPoly>;
}

/// A derivation fixed by its values on the generators in its domain and
/// extended by the Leibniz rule. Phase coefficients are constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    twist: Arc<TwistMatrix>,
    images: BTreeMap<usize, TwistedPoly>,
}

impl Derivation {
    /// Builds a derivation and checks that it respects every relation
    /// `u_k u_l = λ_{k,l} u_l u_k` among the domain generators.
    pub fn new(twist: &Arc<TwistMatrix>, images: BTreeMap<usize, TwistedPoly>) -> Result<Self> {
        for k in images.keys() {
            if *k >= twist.n() {
                return Err(Error::InvalidDerivation(format!("no generator u{}", k + 1)));
            }
        }
        let d = Self { twist: twist.clone(), images };
        let keys: Vec<usize> = d.images.keys().copied().collect();
        for (i, &k) in keys.iter().enumerate() {
            for &l in &keys[i + 1..] {
                let uk = TwistedPoly::generator(twist, k);
                let ul = TwistedPoly::generator(twist, l);
                let (dk, dl) = (&d.images[&k], &d.images[&l]);
                let lhs = &(dk * &ul) + &(&uk * dl);
                let rhs = (&(dl * &uk) + &(&ul * dk)).scale(&twist.lambda(k, l));
                let r = &lhs - &rhs;
                if !r.is_zero() {
                    return Err(Error::InvalidDerivation(format!(
                        "relation u{}u{} = lambda{}{} u{}u{} is violated: residual {r}",
                        k + 1,
                        l + 1,
                        k + 1,
                        l + 1,
                        l + 1,
                        k + 1
                    )));
                }
            }
        }
        Ok(d)
    }

    pub fn zero(twist: &Arc<TwistMatrix>, domain: &[usize]) -> Self {
        Self { twist: twist.clone(), images: domain.iter().map(|&k| (k, TwistedPoly::zero(twist))).collect() }
    }

    /// `δ_k(u_l) = 2πi δ_{k,l} u_l`.
    pub fn coordinate(twist: &Arc<TwistMatrix>, k: usize, domain: &[usize]) -> Self {
        let images = domain
            .iter()
            .map(|&l| {
                let v = if l == k { TwistedPoly::generator(twist, l).scale(&PhaseCoeff::two_pi_i()) } else { TwistedPoly::zero(twist) };
                (l, v)
            })
            .collect();
        Self { twist: twist.clone(), images }
    }

    /// `ad(a) = [a, ·]`.
    pub fn inner(twist: &Arc<TwistMatrix>, a: &TwistedPoly, domain: &[usize]) -> Self {
        let images = domain.iter().map(|&k| (k, a.commutator(&TwistedPoly::generator(twist, k)))).collect();
        Self { twist: twist.clone(), images }
    }

    pub fn twist(&self) -> &Arc<TwistMatrix> {
        &self.twist
    }

    pub fn domain(&self) -> Vec<usize> {
        self.images.keys().copied().collect()
    }

    pub fn image(&self, k: usize) -> Result<&TwistedPoly> {
        self.images.get(&k).ok_or(Error::OutsideDomain(k + 1))
    }

    pub fn restrict(&self, domain: &[usize]) -> Result<Self> {
        let images = domain.iter().map(|&k| Ok((k, self.image(k)?.clone()))).collect::<Result<_>>()?;
        Ok(Self { twist: self.twist.clone(), images })
    }

    /// `Σ c_i δ_i` over a common domain.
    pub fn combination(parts: &[(PhaseCoeff, &Derivation)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidDerivation("empty combination".into()))?;
        let twist = first.1.twist.clone();
        let mut images: BTreeMap<usize, TwistedPoly> = first.1.images.keys().map(|&k| (k, TwistedPoly::zero(&twist))).collect();
        for (c, d) in parts {
            if d.domain() != first.1.domain() {
                return Err(Error::InvalidDerivation("combined derivations have different domains".into()));
            }
            for (k, v) in images.iter_mut() {
                *v = &*v + &d.images[k].scale(c);
            }
        }
        Ok(Self { twist, images })
    }

    /// True iff `δ(u_k*) = δ(u_k)*` on every domain generator, which makes
    /// `δ` a `*`-derivation.
    pub fn is_star(&self) -> bool {
        self.images.iter().all(|(&k, dk)| {
            let u = TwistedPoly::generator(&self.twist, k);
            let lhs = -&(&(&u.star() * dk) * &u.star());
            lhs == dk.star()
        })
    }

    fn gen_power(&self, k: usize, m: i64) -> Result<TwistedPoly> {
        let u = TwistedPoly::generator(&self.twist, k);
        let (w, dw) = if m > 0 {
            (u.clone(), self.image(k)?.clone())
        } else {
            let ui = u.star();
            (ui.clone(), -&(&(&ui * self.image(k)?) * &ui))
        };
        let p = m.unsigned_abs() as i64;
        let mut acc = TwistedPoly::zero(&self.twist);
        for i in 0..p {
            let left = w.pow(i).expect("nonnegative power");
            let right = w.pow(p - 1 - i).expect("nonnegative power");
            acc = &acc + &(&(&left * &dw) * &right);
        }
        Ok(acc)
    }

    pub fn apply_matrix(&self, y: &PolyMatrix) -> Result<PolyMatrix> {
        y.try_map(|e| self.apply(e))
    }
}

impl DerivationOp for Derivation {
    fn apply(&self, x: &TwistedPoly) -> Result<TwistedPoly> {
        let n = self.twist.n();
        let mut out = TwistedPoly::zero(&self.twist);
        for (a, c) in x.terms() {
            for k in 0..n {
                if a[k] == 0 {
                    continue;
                }
                let mut pre = vec![0; n];
                pre[..k].copy_from_slice(&a[..k]);
                let mut post = vec![0; n];
                post[k + 1..].copy_from_slice(&a[k + 1..]);
                let term = &(&TwistedPoly::unit_monomial(&self.twist, &pre) * &self.gen_power(k, a[k])?)
                    * &TwistedPoly::unit_monomial(&self.twist, &post);
                out = &out + &term.scale(c);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images.iter().map(|(k, v)| format!("u{} -> {v}", k + 1)).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

pub fn make_derivation(twist: &Arc<TwistMatrix>, images: BTreeMap<usize, TwistedPoly>) -> Result<Derivation> {
    Derivation::new(twist, images)
}

/// `[a, b] = a∘b − b∘a`.
pub struct Commutator<'a> {
    a: &'a dyn DerivationOp,
    b: &'a dyn DerivationOp,
}

impl DerivationOp for Commutator<'_> {
    fn apply(&self, x: &TwistedPoly) -> Result<TwistedPoly> {
        Ok(&self.a.apply(&self.b.apply(x)?)? - &self.b.apply(&self.a.apply(x)?)?)
    }
}

pub fn bracket<'a>(a: &'a dyn DerivationOp, b: &'a dyn DerivationOp) -> Commutator<'a> {
    Commutator { a, b }
}

fn h_kron(h: &PolyMatrix, d: usize) -> Result<PolyMatrix> {
    h.kron(&PolyMatrix::identity(h.twist(), d))
}

/// Checks, exactly on `[-radius, radius]^d` and base monomials of degree at
/// most `degree`:
/// `δγ_σ(b) = γ_σδ(b) + H(σ)γ_σ(b) + γ_σ(b)H(σ)*`,
/// `δ(ω(σ,π)) = H(σ)ω + γ_σ(H(π))ω + ωH(σ+π)*` and `H(0) = 0`.
pub fn verify_lift_conditions(fs: &FactorSystem, delta: &Derivation, h: &Family, radius: i64, degree: i64) -> Verification {
    let action = fs.action();
    let chars = action.chars(radius);
    let basis = action.base_monomials(degree);
    let cache = match GammaCache::new(fs, chars) {
        Ok(c) => c,
        Err(e) => return evaluation_failure("lift conditions", e),
    };
    let zero = vec![0; action.d()];
    let normalized = match h.at(&zero) {
        Ok(h0) if h0.is_zero() => CheckReport::pass("H(0) = 0", 1),
        Ok(h0) => CheckReport::fail("H(0) = 0", 1, Counterexample::new("H(0) = 0", vec![], h0, "0")),
        Err(e) => CheckReport::fail("H(0) = 0", 1, Counterexample::new("evaluation", vec![], e, "a value")),
    };

    let gamma_eq = sweep("gamma equation", &chars.chars(), |sigma| {
        let mut t_ = Tally::default();
        let hs = h.at(sigma)?;
        let hsa = hs.adjoint();
        for b in &basis {
            let bm = PolyMatrix::scalar(b.clone());
            let g = cache.apply(sigma, &bm)?;
            let lhs = delta.apply_matrix(&g)?;
            let rhs = cache.apply(sigma, &delta.apply_matrix(&bm)?)?.add(&hs.mul(&g)?)?.add(&g.mul(&hsa)?)?;
            t_.check(
                "delta(gamma(b)) = gamma(delta(b)) + H gamma(b) + gamma(b) H*",
                || vec![("sigma", char_string(sigma)), ("b", b.to_string())],
                &lhs,
                &rhs,
            );
        }
        t_.done()
    });

    let omega_eq = sweep("omega equation", &chars.pairs(), |(sigma, pi)| {
        let mut t_ = Tally::default();
        let w = fs.omega(sigma, pi)?;
        let lhs = delta.apply_matrix(&w)?;
        let dpi = cache.get(pi)?.dim();
        let t1 = h_kron(&h.at(sigma)?, dpi)?.mul(&w)?;
        let t2 = cache.apply(sigma, &h.at(pi)?)?.mul(&w)?;
        let t3 = w.mul(&h.at(&char_add(sigma, pi))?.adjoint())?;
        t_.check(
            "delta(omega) = H(sigma) omega + gamma_sigma(H(pi)) omega + omega H(sigma+pi)*",
            || vec![("sigma", char_string(sigma)), ("pi", char_string(pi))],
            &lhs,
            &t1.add(&t2)?.add(&t3)?,
        );
        t_.done()
    });

    Verification::new("lift conditions", vec![normalized, gamma_eq, omega_eq])
}

/// `δ̂(Tr(y s(σ))) = Tr(δ(y)s(σ) + y H(σ) s(σ))`.
#[derive(Clone, Debug)]
pub struct LiftedDerivation {
    action: TorusAction,
    s: IsometryFamily,
    delta: Derivation,
    h: Family,
}

impl LiftedDerivation {
    /// Checks the lift conditions on the given range first.
    pub fn new(fs: &FactorSystem, delta: &Derivation, h: &Family, radius: i64, degree: i64) -> Result<Self> {
        let report = verify_lift_conditions(fs, delta, h, radius, degree);
        if !report.passed {
            let why = report.first_failure().map(|c| c.describe()).unwrap_or_default();
            return Err(Error::Precondition(format!("lift conditions fail: {why}")));
        }
        Self::unchecked(fs, delta, h)
    }

    /// Builds the operator without checking the lift conditions, for
    /// callers that verify separately.
    pub fn unchecked(fs: &FactorSystem, delta: &Derivation, h: &Family) -> Result<Self> {
        let s = fs
            .isometries()
            .ok_or_else(|| Error::Unsupported("lifting needs a factor system built from isometries".into()))?
            .clone();
        Ok(Self { action: fs.action().clone(), s, delta: delta.clone(), h: h.clone() })
    }

    pub fn base(&self) -> &Derivation {
        &self.delta
    }

    pub fn family(&self) -> &Family {
        &self.h
    }
}

impl DerivationOp for LiftedDerivation {
    fn apply(&self, x: &TwistedPoly) -> Result<TwistedPoly> {
        let mut out = TwistedPoly::zero(self.action.twist());
        for (sigma, xs) in grade(&self.action, x).components() {
            let y = coefficient(&self.s, sigma, xs)?;
            let s = self.s.s(sigma)?;
            let dy = self.delta.apply(&y)?;
            let yh = &y * &self.h.poly_at(sigma)?;
            out = &out + &(&(&dy + &yh) * &s);
        }
        Ok(out)
    }
}

pub fn lift_derivation(fs: &FactorSystem, delta: &Derivation, h: &Family, x: &TwistedPoly, radius: i64, degree: i64) -> Result<TwistedPoly> {
    LiftedDerivation::new(fs, delta, h, radius, degree)?.apply(x)
}

/// Leibniz on `pairs`; star compatibility, degree preservation and
/// restriction to `δ` on `singles`.
pub fn verify_lifted_derivation(lift: &LiftedDerivation, singles: &[TwistedPoly], pairs: &[(TwistedPoly, TwistedPoly)]) -> Verification {
    let action = &lift.action;
    let leibniz = sweep("Leibniz", pairs, |(x, y)| {
        let mut t_ = Tally::default();
        let lhs = lift.apply(&(x * y))?;
        let rhs = &(&lift.apply(x)? * y) + &(x * &lift.apply(y)?);
        t_.check("D(xy) = D(x)y + xD(y)", || vec![("x", x.to_string()), ("y", y.to_string())], &lhs, &rhs);
        t_.done()
    });
    let single = sweep("star, equivariance, restriction", singles, |x| {
        let mut t_ = Tally::default();
        let at = || vec![("x", x.to_string())];
        let dx = lift.apply(x)?;
        t_.check("D(x*) = D(x)*", at, &lift.apply(&x.star())?, &dx.star());
        for (sigma, xs) in grade(action, x).components() {
            t_.check("D preserves degree", at, &check_equivariance(action, &lift.apply(xs)?, sigma), &true);
        }
        if is_in_base(action, x) {
            t_.check("D restricts to delta", at, &dx, &lift.delta.apply(x)?);
        }
        t_.done()
    });
    Verification::new("lifted derivation", vec![leibniz, single])
}

/// Membership in the gauge Lie algebra: the lift conditions for `δ = 0`.
pub fn gauge_report(fs: &FactorSystem, h: &Family, radius: i64, degree: i64) -> Verification {
    let zero = Derivation::zero(fs.twist(), &fs.action().fixed_coords());
    let mut v = verify_lift_conditions(fs, &zero, h, radius, degree);
    v.name = "gauge element".into();
    v
}

pub fn is_gauge_element(fs: &FactorSystem, h: &Family, radius: i64, degree: i64) -> bool {
    gauge_report(fs, h, radius, degree).passed
}

/// Skewness `H(σ)* = −H(σ)` and `H(σ+π) = H(σ) + γ_σ(H(π))` for scalar-`ω`
/// cleft systems. Fails with a precondition error when some `ω(σ,π)` in
/// range is not a scalar.
pub fn crossed_hom_check(fs: &FactorSystem, h: &Family, radius: i64) -> Result<bool> {
    let chars = fs.action().chars(radius);
    let cache = GammaCache::new(fs, chars)?;
    for (sigma, pi) in chars.pairs() {
        let w = fs.omega(&sigma, &pi)?;
        if w.as_poly().and_then(TwistedPoly::as_scalar).is_none() {
            return Err(Error::Precondition(format!("omega({},{}) = {w} is not a scalar", char_string(&sigma), char_string(&pi))));
        }
    }
    for sigma in chars.chars() {
        let hs = h.at(&sigma)?;
        if hs.adjoint() != hs.neg() {
            return Ok(false);
        }
    }
    for (sigma, pi) in chars.pairs() {
        let lhs = h.at(&char_add(&sigma, &pi))?;
        let rhs = h.at(&sigma)?.add(&cache.apply(&sigma, &h.at(&pi)?)?)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One basis element of a connection: the base derivation `δ` on `B₀`, the
/// derivation actually lifted (normally `δ` itself) and its family `H`.
#[derive(Clone, Debug)]
pub struct SectionEntry {
    pub name: String,
    pub base: Derivation,
    pub lifted: Derivation,
    pub h: Family,
}

/// A linear section `χ` of the Atiyah sequence on a finite basis.
#[derive(Clone, Debug)]
pub struct ConnectionSection {
    pub entries: Vec<SectionEntry>,
}

impl ConnectionSection {
    pub fn chi(&self, fs: &FactorSystem, i: usize) -> Result<LiftedDerivation> {
        let e = &self.entries[i];
        LiftedDerivation::unchecked(fs, &e.lifted, &e.h)
    }

    /// `χ(Σ c_i δ_i)` and `Σ c_i δ_i` for rational weights `c`.
    pub fn combination(&self, fs: &FactorSystem, c: &[PhaseCoeff]) -> Result<(Derivation, LiftedDerivation)> {
        if c.len() != self.entries.len() {
            return Err(Error::Shape(format!("{} weights for {} basis elements", c.len(), self.entries.len())));
        }
        let base = Derivation::combination(&c.iter().cloned().zip(self.entries.iter().map(|e| &e.base)).collect::<Vec<_>>())?;
        let lifted = Derivation::combination(&c.iter().cloned().zip(self.entries.iter().map(|e| &e.lifted)).collect::<Vec<_>>())?;
        let t = fs.twist().clone();
        let fams: Vec<(PhaseCoeff, Family)> = c.iter().cloned().zip(self.entries.iter().map(|e| e.h.clone())).collect();
        let h = Family::from_fn("combination", move |s| {
            let mut acc: Option<PolyMatrix> = None;
            for (ci, f) in &fams {
                let v = f.at(s)?.scale(ci);
                acc = Some(match acc {
                    None => v,
                    Some(a) => a.add(&v)?,
                });
            }
            Ok(acc.unwrap_or_else(|| PolyMatrix::scalar(TwistedPoly::zero(&t))))
        });
        Ok((base, LiftedDerivation::unchecked(fs, &lifted, &h)?))
    }
}

/// Checks that `χ` is a section of the Atiyah sequence on its basis: every
/// basis lift satisfies the lift conditions and restricts to its base
/// derivation, every supplied kernel family is a gauge element, `χ` is
/// linear on the rational `weights`, and `[χ(δ_i), χ(δ_j)] = 0` whenever
/// `[δ_i, δ_j]` vanishes on `B₀`. Samples are elements of `A₀` to test on.
pub fn atiyah_check(
    fs: &FactorSystem,
    chi: &ConnectionSection,
    kernel: &[Family],
    weights: &[Vec<PhaseCoeff>],
    samples: &[TwistedPoly],
    radius: i64,
    degree: i64,
) -> Verification {
    let action = fs.action();
    let t = fs.twist().clone();
    let base_gens: Vec<TwistedPoly> = action.fixed_coords().iter().map(|&k| TwistedPoly::generator(&t, k)).collect();
    let all_gens: Vec<TwistedPoly> =
        (0..t.n()).flat_map(|k| [TwistedPoly::generator(&t, k), TwistedPoly::generator(&t, k).star()]).collect();

    let lift_conditions: Vec<CheckReport> = chi
        .entries
        .iter()
        .map(|e| {
            let v = verify_lift_conditions(fs, &e.lifted, &e.h, radius, degree);
            let mut r = CheckReport::combine(format!("lift conditions for {}", e.name), &v.checks);
            r.passed = v.passed;
            r
        })
        .collect();
    let lift_ok = CheckReport::combine("lift conditions", &lift_conditions);

    let restriction = sweep("restriction", &chi.entries.iter().enumerate().collect::<Vec<_>>(), |(i, e)| {
        let mut t_ = Tally::default();
        let l = chi.chi(fs, *i)?;
        for b in base_gens.iter().chain(samples.iter().filter(|x| is_in_base(action, x))) {
            t_.check("chi(delta) restricts to delta", || vec![("basis", e.name.clone()), ("b", b.to_string())], &l.apply(b)?, &e.base.apply(b)?);
        }
        t_.done()
    });

    let kernel_ok = {
        let parts: Vec<CheckReport> = kernel
            .iter()
            .map(|h| {
                let v = gauge_report(fs, h, radius, degree);
                let mut r = CheckReport::combine(format!("kernel element {}", h.label()), &v.checks);
                r.passed = v.passed;
                r
            })
            .collect();
        if parts.is_empty() {
            CheckReport::pass("kernel", 0)
        } else {
            CheckReport::combine("kernel", &parts)
        }
    };

    let linearity = sweep("linearity", weights, |c| {
        let mut t_ = Tally::default();
        let (_, combo) = chi.combination(fs, c)?;
        let lifts = (0..chi.entries.len()).map(|i| chi.chi(fs, i)).collect::<Result<Vec<_>>>()?;
        for x in all_gens.iter().chain(samples) {
            let mut rhs = TwistedPoly::zero(&t);
            for (ci, l) in c.iter().zip(&lifts) {
                rhs = &rhs + &l.apply(x)?.scale(ci);
            }
            let label = c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ");
            t_.check("chi(sum c_i delta_i) = sum c_i chi(delta_i)", || vec![("weights", label), ("x", x.to_string())], &combo.apply(x)?, &rhs);
        }
        t_.done()
    });

    let m = chi.entries.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let brackets = sweep("bracket section", &pairs, |&(i, j)| {
        let mut t_ = Tally::default();
        let (bi, bj) = (&chi.entries[i].base, &chi.entries[j].base);
        let base_bracket = bracket(bi, bj);
        let vanishes = base_gens.iter().try_fold(true, |ok, g| Ok::<_, Error>(ok && base_bracket.apply(g)?.is_zero()))?;
        if !vanishes {
            return t_.done();
        }
        let (li, lj) = (chi.chi(fs, i)?, chi.chi(fs, j)?);
        let lifted = bracket(&li, &lj);
        for x in all_gens.iter().chain(samples) {
            t_.check(
                "[chi(delta_i), chi(delta_j)] = chi([delta_i, delta_j]) = 0",
                || vec![("i", chi.entries[i].name.clone()), ("j", chi.entries[j].name.clone()), ("x", x.to_string())],
                &lifted.apply(x)?,
                &TwistedPoly::zero(&t),
            );
        }
        t_.done()
    });

    Verification::new("Atiyah section", vec![lift_ok, restriction, kernel_ok, linearity, brackets])
}
