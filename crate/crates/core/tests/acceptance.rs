//! Acceptance suite: one line per criterion, non-zero exit on any failure.
//!
//! Symbolic checks use exact equality. Numeric checks use `NUMERIC_TOL`.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::Rng;

use nctorus::algebra::{NumVec, PhaseCoeff, PolyMatrix, TwistMatrix, TwistedPoly};
use nctorus::cohomology::{extract_cocycle, lift_pipeline, solve_coboundary, verify_cocycle, verify_lifted_automorphism, CoboundarySolution, TwoCocycle};
use nctorus::corpus::Corpus;
use nctorus::derivations::{
    atiyah_check, crossed_hom_check, is_gauge_element, verify_lift_conditions, verify_lifted_derivation, ConnectionSection, Derivation,
    DerivationOp, LiftedDerivation, SectionEntry,
};
use nctorus::dynamics::{q3_action, TorusAction};
use nctorus::factor_system::{verify_axioms, FactorSystem, Family, IsometryFamily};
use nctorus::geometry::{split_frame, AssociatedModule, CurvatureMethod};
use nctorus::report::Verification;

const NUMERIC_TOL: f64 = 1e-9;
const EXAMPLE_BUDGET: Duration = Duration::from_secs(5);
const SUITE_BUDGET: Duration = Duration::from_secs(60);

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn passed(v: &Verification) -> Result<usize, String> {
    if v.passed {
        Ok(v.total_checked())
    } else {
        let cx = v.first_failure().map(|c| c.describe()).unwrap_or_else(|| "no counterexample recorded".into());
        Err(format!("{}: {cx}", v.name))
    }
}

fn q3() -> FactorSystem {
    let a = q3_action("1/4", "-1/3", "-1/6").unwrap();
    FactorSystem::from_cleft(IsometryFamily::standard(&a)).unwrap()
}

fn pow(c: &PhaseCoeff, k: i64) -> PhaseCoeff {
    let base = if k < 0 { c.inv().unwrap() } else { c.clone() };
    (0..k.abs()).fold(PhaseCoeff::one(), |acc, _| acc.mul(&base))
}

fn theta_f64(t: &TwistMatrix, k: usize, l: usize) -> f64 {
    t.theta(k, l).to_f64().unwrap()
}

/// Slot angles read straight off θ, without the engine's numeric helpers.
fn angles(t: &TwistMatrix) -> Vec<f64> {
    (0..t.num_slots())
        .map(|s| {
            let (j, i) = t.slot_pair(s);
            theta_f64(t, j, i)
        })
        .collect()
}

fn example_reproduction() -> Outcome {
    let start = Instant::now();
    let fs = q3();
    let t = fs.twist().clone();
    let (u1, u2) = (TwistedPoly::generator(&t, 0), TwistedPoly::generator(&t, 1));
    // λ_{3,1} = q13^{-1}, λ_{3,2} = q23^{-1}
    let l31 = PhaseCoeff::unit(t.slot(0, 2), -1);
    let l32 = PhaseCoeff::unit(t.slot(1, 2), -1);
    let mut checked = 0;
    for k in -4..=4 {
        let g = fs.gamma(&[k]).s()?;
        ensure!(g.apply_poly(&u1).map_err(|e| e.to_string())? == u1.scale(&pow(&l31, k)), "gamma_{k}(u1) differs");
        ensure!(g.apply_poly(&u2).map_err(|e| e.to_string())? == u2.scale(&pow(&l32, k)), "gamma_{k}(u2) differs");
        for l in -4..=4 {
            let w = fs.omega(&[k], &[l]).map_err(|e| e.to_string())?;
            ensure!(w.is_identity(), "omega({k},{l}) = {w}");
            checked += 1;
        }
        checked += 2;
    }
    // numeric meaning of the formal units: λ_{3,1} = exp(2πi θ_{3,1})
    let ang = t.slot_angles();
    for (c, (k, l)) in [(&l31, (2, 0)), (&l32, (2, 1))] {
        let expect = Complex64::from_polar(1.0, std::f64::consts::TAU * theta_f64(&t, k, l));
        ensure!((c.evaluate(&ang) - expect).norm() < NUMERIC_TOL, "lambda_{}{} evaluates wrongly", k + 1, l + 1);
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < EXAMPLE_BUDGET, "took {elapsed:?}");
    Ok(format!("{checked} exact identities on [-4,4], {:.2}s", elapsed.as_secs_f64()))
}

trait Str<T> {
    fn s(self) -> Result<T, String>;
}

impl<T> Str<T> for nctorus::Result<T> {
    fn s(self) -> Result<T, String> {
        self.map_err(|e| e.to_string())
    }
}

fn random_systems(count: usize, seed: u64) -> Vec<FactorSystem> {
    let mut c = Corpus::new(seed);
    (0..count)
        .map(|i| {
            let (n, d) = [(3, 1), (4, 1), (3, 2), (2, 1)][i % 4];
            let a = c.action(n, d);
            c.cleft_system(&a).unwrap()
        })
        .collect()
}

fn factor_system_axioms() -> Outcome {
    let mut checked = passed(&verify_axioms(&q3(), 3, 2))?;
    let mut c = Corpus::new(2002);
    let mut detected = 0;
    for (i, fs) in random_systems(20, 2000).into_iter().enumerate() {
        checked += passed(&verify_axioms(&fs, 3, 2)).map_err(|e| format!("system {i}: {e}"))?;
        let d = fs.action().d();
        let sigma: Vec<i64> = (0..d).map(|_| c.rng().gen_range(-3..=3)).collect();
        let pi: Vec<i64> = (0..d).map(|_| c.rng().gen_range(-3..=3)).collect();
        let i_scalar = PolyMatrix::scalar(TwistedPoly::scalar(fs.twist(), PhaseCoeff::i()));
        let corrupted = if i % 2 == 0 {
            let w = fs.omega(&sigma, &pi).s()?;
            fs.clone().with_omega_override(sigma, pi, w.mul(&i_scalar).s()?)
        } else {
            let fixed = fs.action().fixed_coords();
            let k = fixed[c.rng().gen_range(0..fixed.len())];
            let g = fs.gamma(&sigma).s()?.image(k).s()?.clone();
            fs.clone().with_gamma_override(sigma, k, g.mul(&i_scalar).s()?)
        };
        let v = verify_axioms(&corrupted, 3, 2);
        ensure!(!v.passed && v.first_failure().is_some(), "corruption {i} went unnoticed");
        detected += 1;
    }
    Ok(format!("q3 + 20 random systems exact at range 3 degree 2 ({checked} checks), {detected}/20 corruptions caught"))
}

fn lift_configs() -> Vec<nctorus::corpus::LiftConfig> {
    (0..10).map(|i| Corpus::new(3000 + i).lift_config(if i % 3 == 2 { 4 } else { 3 }, 12).unwrap()).collect()
}

fn cocycle_laws() -> Outcome {
    let mut checked = 0;
    let mut nontrivial = 0;
    for (i, cfg) in lift_configs().iter().enumerate() {
        let u = extract_cocycle(&cfg.fs, &cfg.beta, &cfg.beta_inv, &cfg.v, 4).s()?;
        nontrivial += usize::from(!u.is_trivial());
        checked += passed(&verify_cocycle(&u, 2)).map_err(|e| format!("config {i}: {e}"))?;
    }
    ensure!(nontrivial > 0, "every extracted cocycle was trivial");
    Ok(format!("10 extracted cocycles central, unitary, closed on [-2,2]^3 ({checked} checks, {nontrivial} non-trivial)"))
}

fn samples(t: &Arc<TwistMatrix>, seed: u64, count: usize) -> (Vec<TwistedPoly>, Vec<(TwistedPoly, TwistedPoly)>) {
    let mut c = Corpus::new(seed);
    let mut singles: Vec<TwistedPoly> = (0..t.n()).map(|k| TwistedPoly::generator(t, k)).collect();
    singles.extend((0..count).map(|_| c.poly(t, 3, 2)));
    let pairs = (0..count).map(|_| (c.poly(t, 3, 2), c.poly(t, 3, 2))).collect();
    (singles, pairs)
}

fn lifting_completeness() -> Outcome {
    let mut checked = 0;
    for (i, cfg) in lift_configs().iter().enumerate() {
        let u = extract_cocycle(&cfg.fs, &cfg.beta, &cfg.beta_inv, &cfg.v, 4).s()?;
        ensure!(matches!(solve_coboundary(&u).s()?, CoboundarySolution::Cochain(_)), "config {i}: no cochain found");
        let out = lift_pipeline(&cfg.fs, &cfg.beta, &cfg.beta_inv, &cfg.v, 2, 1).s()?;
        let lift = out.lift.ok_or(format!("config {i}: no lift"))?;
        let (singles, pairs) = samples(cfg.fs.twist(), 3100 + i as u64, 20);
        // base elements exercise the restriction check
        let mut c = Corpus::new(3200 + i as u64);
        let base: Vec<TwistedPoly> = (0..10).map(|_| c.base_poly(cfg.fs.action(), 3, 2)).collect();
        let singles: Vec<TwistedPoly> = singles.into_iter().chain(base).collect();
        checked += passed(&verify_lifted_automorphism(&lift, &singles, &pairs)).map_err(|e| format!("config {i}: {e}"))?;
    }
    Ok(format!("10 circle configurations solved and lifted ({checked} checks)"))
}

fn obstruction_detection() -> Outcome {
    let t = Arc::new(TwistMatrix::from_upper_strs(3, &["1/4", "-1/3", "-1/6"]).unwrap());
    let q = PhaseCoeff::unit(t.slot(0, 1), 1);
    let u = TwoCocycle::bilinear(&t, vec![0, 1], 4, vec![vec![0, 0], vec![1, 0]], q).s()?;
    let checked = passed(&verify_cocycle(&u, 2))?;
    // oracle: coboundaries of trivial-action cochains are symmetric
    let a = u.value(&[1, 0], &[0, 1]).s()?;
    let b = u.value(&[0, 1], &[1, 0]).s()?;
    ensure!(!(a * &b.star()).is_one(), "q^(bc) looks symmetric at (1,0),(0,1)");
    match solve_coboundary(&u).s()? {
        CoboundarySolution::Obstruction(o) if o.certified => Ok(format!("certified at sigma={:?} pi={:?}; cocycle identity holds ({checked} checks)", o.sigma, o.pi)),
        CoboundarySolution::Obstruction(o) => Err(format!("obstruction not certified: {}", o.reason)),
        CoboundarySolution::Cochain(_) => Err("solver claimed a coboundary".into()),
    }
}

fn derivation_lifting() -> Outcome {
    let fs = q3();
    let t = fs.twist().clone();
    let base = [0, 1];
    let u1 = TwistedPoly::generator(&t, 0);
    let b = &u1 - &u1.star();
    let fs2 = fs.clone();
    let bb = b.clone();
    let inner_h = Family::from_fn("b - gamma(b)", move |s| Ok(PolyMatrix::scalar(&bb - &fs2.gamma(s)?.apply_poly(&bb)?)));
    let gauge = Family::linear(&t, vec![PhaseCoeff::two_pi_i()]);
    let cases = [
        ("delta1, H=0", Derivation::coordinate(&t, 0, &base), Family::zero(&t)),
        ("delta2, H=0", Derivation::coordinate(&t, 1, &base), Family::zero(&t)),
        ("0, H(k)=2 pi i k", Derivation::zero(&t, &base), gauge),
        ("ad(u1-u1*), H=b-gamma(b)", Derivation::inner(&t, &b, &base), inner_h),
    ];
    let (mut singles, pairs) = samples(&t, 6000, 200);
    let mut c = Corpus::new(6001);
    singles.extend((0..20).map(|_| c.base_poly(fs.action(), 3, 2)));
    let mut checked = 0;
    let mut lifts = Vec::new();
    for (name, d, h) in &cases {
        checked += passed(&verify_lift_conditions(&fs, d, h, 3, 2)).map_err(|e| format!("{name}: {e}"))?;
        let lift = LiftedDerivation::new(&fs, d, h, 3, 2).s()?;
        checked += passed(&verify_lifted_derivation(&lift, &singles, &pairs)).map_err(|e| format!("{name}: {e}"))?;
        lifts.push(lift);
    }
    let u3 = TwistedPoly::generator(&t, 2);
    ensure!(lifts[2].apply(&u3).s()? == u3.scale(&PhaseCoeff::two_pi_i()), "gauge lift does not give delta3(u3) = 2 pi i u3");
    Ok(format!("4 pairs lift, 200-case corpus, delta3 reproduced ({checked} checks)"))
}

fn atiyah_split() -> Outcome {
    let fs = q3();
    let t = fs.twist().clone();
    let entries = (0..2)
        .map(|k| SectionEntry {
            name: format!("delta{}", k + 1),
            base: Derivation::coordinate(&t, k, &[0, 1]),
            lifted: Derivation::coordinate(&t, k, &[0, 1]),
            h: Family::zero(&t),
        })
        .collect();
    let chi = ConnectionSection { entries };
    let mut c = Corpus::new(7000);
    let weights: Vec<Vec<PhaseCoeff>> = (0..6)
        .map(|_| (0..2).map(|_| PhaseCoeff::from_int(c.rng().gen_range(-5..=5))).collect())
        .chain([vec![PhaseCoeff::i(), PhaseCoeff::two_pi_i()]])
        .collect();
    let mut samples: Vec<TwistedPoly> = (0..20).map(|_| c.poly(&t, 3, 2)).collect();
    samples.extend((0..10).map(|_| c.base_poly(fs.action(), 3, 2)));
    let kernel = [Family::linear(&t, vec![PhaseCoeff::two_pi_i()]), Family::linear(&t, vec![PhaseCoeff::i()])];
    let v = atiyah_check(&fs, &chi, &kernel, &weights, &samples, 3, 2);
    let checked = passed(&v)?;
    ensure!(v.checks.iter().all(|r| r.checked > 0), "a section check ran on no cases");
    Ok(format!("restriction, kernel, linearity, bracket section on delta1, delta2 ({checked} checks)"))
}

fn gauge_crossed_hom() -> Outcome {
    let fs = q3();
    let t = fs.twist().clone();
    let mut c = Corpus::new(8000);
    let mut agree = 0;
    for i in 0..100 {
        let valid = i < 50;
        let h = if valid { c.valid_scalar_h(&t, 1) } else { c.invalid_scalar_h(&t, 1, 3) };
        let gauge = is_gauge_element(&fs, &h, 3, 1);
        let crossed = crossed_hom_check(&fs, &h, 3).s()?;
        ensure!(gauge == crossed, "family {i} ({}): gauge {gauge}, crossed hom {crossed}", h.label());
        ensure!(gauge == valid, "family {i} ({}) classified as {gauge}, built as {valid}", h.label());
        agree += 1;
    }
    Ok(format!("{agree}/100 families agree (50 valid, 50 invalid)"))
}

fn module_cases(m: &AssociatedModule, action: &TorusAction, c: &mut Corpus, count: usize) -> Vec<(TwistedPoly, TwistedPoly, TwistedPoly)> {
    let w = m.weight();
    (0..count).map(|_| (c.graded_poly(action, &w, 3, 2), c.graded_poly(action, &w, 3, 2), c.base_poly(action, 2, 2))).collect()
}

fn geometry() -> Outcome {
    let fs = q3();
    let s = fs.isometries().unwrap().clone();
    let action = s.action().clone();
    let t = action.twist().clone();
    let u1 = TwistedPoly::generator(&t, 0);
    let u2 = TwistedPoly::generator(&t, 1);
    let derivs = [
        Derivation::coordinate(&t, 0, &[0, 1]),
        Derivation::coordinate(&t, 1, &[0, 1]),
        Derivation::inner(&t, &(&u1 - &u1.star()), &[0, 1]),
        Derivation::inner(&t, &u2, &[0, 1]),
    ];
    let mut c = Corpus::new(9000);
    let mut checked = 0;
    let mut cases_run = 0;
    let mut modules: Vec<(AssociatedModule, bool)> = (-3..=3).map(|k| (AssociatedModule::new(&s, &[k]).unwrap(), true)).collect();
    for k in [-2, 1, 2] {
        let b1 = c.base_unitary(&action, 2);
        let b2 = c.base_unitary(&action, 2);
        modules.push((split_frame(&s, &[k], &b1, &b2).s()?, false));
    }
    for (m, cleft) in &modules {
        let cases = module_cases(m, &action, &mut c, 20);
        let xs: Vec<TwistedPoly> = cases.iter().map(|(x, _, _)| x.clone()).collect();
        let fr = m.frame_report(&xs);
        ensure!(fr.passed, "frame: {:?}", fr.counterexample.map(|c| c.describe()));
        checked += fr.checked;
        for d in &derivs {
            let v = m.connection_report(d, &cases);
            for r in &v.checks {
                if d.is_star() || r.name == "Leibniz" {
                    ensure!(r.passed, "{} on module {:?}: {:?}", r.name, m.sigma(), r.counterexample.as_ref().map(|c| c.describe()));
                    checked += r.checked;
                }
            }
        }
        cases_run += cases.len();
        for d1 in &derivs {
            for d2 in &derivs {
                for x in xs.iter().take(5) {
                    let a = m.curvature(d1, d2, x, CurvatureMethod::Commutator).s()?;
                    let b = m.curvature(d1, d2, x, CurvatureMethod::Formula).s()?;
                    ensure!(a.value == b.value, "curvature methods differ on module {:?} at {x}", m.sigma());
                    if *cleft {
                        ensure!(a.value.is_zero(), "curvature {} on cleft module {:?} at {x}", a.value, m.sigma());
                    }
                    checked += 2;
                }
            }
        }
    }
    ensure!(cases_run >= 200, "only {cases_run} connection cases");
    Ok(format!("{} modules, {cases_run} connection cases, curvature sweep ({checked} checks)", modules.len()))
}

/// Numeric product from the normal-ordering rule
/// `u^a u^b = exp(2πi Σ_{j<k} θ_{k,j} a_k b_j) u^{a+b}`.
fn oracle_product(t: &TwistMatrix, x: &BTreeMap<Vec<i64>, Complex64>, y: &BTreeMap<Vec<i64>, Complex64>) -> BTreeMap<Vec<i64>, Complex64> {
    let n = t.n();
    let mut out = BTreeMap::new();
    for (a, ca) in x {
        for (b, cb) in y {
            let mut angle = 0.0;
            for k in 0..n {
                for j in 0..k {
                    angle += theta_f64(t, k, j) * (a[k] * b[j]) as f64;
                }
            }
            let phase = Complex64::from_polar(1.0, std::f64::consts::TAU * angle);
            let e: Vec<i64> = a.iter().zip(b).map(|(p, q)| p + q).collect();
            *out.entry(e).or_insert(Complex64::new(0.0, 0.0)) += ca * cb * phase;
        }
    }
    out
}

fn numeric(x: &TwistedPoly, ang: &[f64]) -> BTreeMap<Vec<i64>, Complex64> {
    x.terms().map(|(a, c)| (a.clone(), c.evaluate(ang))).collect()
}

fn distance(a: &BTreeMap<Vec<i64>, Complex64>, b: &BTreeMap<Vec<i64>, Complex64>) -> f64 {
    let zero = Complex64::new(0.0, 0.0);
    a.keys().chain(b.keys()).map(|k| (a.get(k).unwrap_or(&zero) - b.get(k).unwrap_or(&zero)).norm()).fold(0.0, f64::max)
}

fn engine_soundness() -> Outcome {
    let mut c = Corpus::new(10_000);
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let t = c.twist(2 + i % 3);
        let ang = angles(&t);
        let (x, y, z) = (c.poly(&t, 4, 3), c.poly(&t, 4, 3), c.poly(&t, 4, 3));
        let xy = &x * &y;
        ensure!(&xy * &z == &x * &(&y * &z), "associativity fails for triple {i}");
        ensure!(xy.star() == &y.star() * &x.star(), "star anti-multiplicativity fails for triple {i}");
        for k in 0..t.n() {
            let u = TwistedPoly::generator(&t, k);
            ensure!((&u * &u.star()).is_one() && (&u.star() * &u).is_one(), "u{} not unitary", k + 1);
        }
        // exact product against the normal-ordering oracle
        worst = worst.max(distance(&numeric(&xy, &ang), &oracle_product(&t, &numeric(&x, &ang), &numeric(&y, &ang))));
        // regular representation: (xy)·v = x·(y·v)
        let v: NumVec = [(vec![0; t.n()], Complex64::new(1.0, 0.0)), (c.poly(&t, 1, 2).terms().next().unwrap().0.clone(), Complex64::new(0.5, -0.25))]
            .into_iter()
            .collect();
        worst = worst.max(distance(&xy.regular_action(&ang, &v), &x.regular_action(&ang, &y.regular_action(&ang, &v))));
        ensure!(worst < NUMERIC_TOL, "numeric consistency off by {worst:e} at triple {i}");
    }
    Ok(format!("1000 triples exact; numeric consistency max error {worst:.1e} (tol {NUMERIC_TOL:e})"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("worked example", example_reproduction),
        ("factor-system axioms", factor_system_axioms),
        ("cocycle laws", cocycle_laws),
        ("circle lifting", lifting_completeness),
        ("obstruction detection", obstruction_detection),
        ("derivation lifting", derivation_lifting),
        ("Atiyah split", atiyah_split),
        ("gauge = crossed hom", gauge_crossed_hom),
        ("geometry", geometry),
        ("engine soundness", engine_soundness),
    ];
    let start = Instant::now();
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let res = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or("panic".into()))
        });
        let dt = t0.elapsed().as_secs_f64();
        match res {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg} [{dt:.2}s]", i + 1),
            Err(msg) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {msg} [{dt:.2}s]", i + 1);
            }
        }
    }
    let total = start.elapsed();
    let in_budget = total < SUITE_BUDGET;
    println!("suite {} in {:.2}s (budget {}s)", if in_budget { "finished" } else { "OVER BUDGET" }, total.as_secs_f64(), SUITE_BUDGET.as_secs());
    if failures > 0 || !in_budget {
        std::process::exit(1);
    }
}
