//! Commands behind the `nctorus` binary. Each command turns a JSON config
//! into a [`Report`] and an exit code: 0 when every check passes, 1 when a
//! mathematical check fails, 2 on bad input.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::algebra::{PhaseCoeff, TwistedPoly};
use crate::cohomology::{lift_pipeline, solve_coboundary, verify_cocycle, verify_lifted_automorphism, CoboundarySolution};
use crate::config::{parse_config, SystemConfig};
use crate::corpus::Corpus;
use crate::derivations::{atiyah_check, verify_lift_conditions, verify_lifted_derivation, ConnectionSection, Derivation, DerivationOp, LiftedDerivation, SectionEntry};
use crate::dynamics::{char_string, q3_action, TorusAction};
use crate::error::{Error, Result};
use crate::factor_system::{frohlich, verify_axioms, FactorSystem, Family, IsometryFamily};
use crate::geometry::{AssociatedModule, CurvatureMethod};
use crate::report::{CheckReport, Counterexample, Tally, Verification};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    CheckFactorSystem,
    Lift,
    LiftDerivation,
    Curvature,
    DemoQ3Torus { theta: [String; 3] },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckFactorSystem => "check-factor-system",
            Command::Lift => "lift",
            Command::LiftDerivation => "lift-derivation",
            Command::Curvature => "curvature",
            Command::DemoQ3Torus { .. } => "demo q3torus",
        }
    }

    pub fn needs_config(&self) -> bool {
        !matches!(self, Command::DemoQ3Torus { .. })
    }
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub range: Option<i64>,
    pub degree: Option<i64>,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub passed: bool,
    pub checked: usize,
    pub counterexample: Option<Counterexample>,
    pub error: Option<String>,
    pub verifications: Vec<Verification>,
    pub details: Map<String, Value>,
}

impl Report {
    fn new(command: &str) -> Self {
        Self { command: command.into(), passed: true, checked: 0, counterexample: None, error: None, verifications: Vec::new(), details: Map::new() }
    }

    fn push(&mut self, v: Verification) {
        self.passed &= v.passed;
        self.checked += v.total_checked();
        if self.counterexample.is_none() {
            self.counterexample = v.first_failure().cloned();
        }
        self.verifications.push(v);
    }

    fn fail(&mut self, cx: Counterexample) {
        self.passed = false;
        if self.counterexample.is_none() {
            self.counterexample = Some(cx);
        }
    }

    fn detail(&mut self, key: &str, v: impl Into<Value>) {
        self.details.insert(key.into(), v.into());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}: {}", self.command, if self.passed { "PASS" } else { "FAIL" });
        if let Some(e) = &self.error {
            let _ = writeln!(s, "error: {e}");
        }
        for v in &self.verifications {
            let _ = writeln!(s, "  {}: {}", v.name, if v.passed { "pass" } else { "FAIL" });
            for c in &v.checks {
                let _ = writeln!(s, "    {}: {} ({} checked)", c.name, if c.passed { "pass" } else { "FAIL" }, c.checked);
            }
        }
        for (k, v) in &self.details {
            match v {
                Value::Array(items) if items.iter().all(Value::is_string) => {
                    let _ = writeln!(s, "{k}:");
                    for it in items {
                        let _ = writeln!(s, "  {}", it.as_str().unwrap_or_default());
                    }
                }
                Value::String(x) => {
                    let _ = writeln!(s, "{k}: {x}");
                }
                other => {
                    let _ = writeln!(s, "{k}: {other}");
                }
            }
        }
        if let Some(cx) = &self.counterexample {
            let _ = writeln!(s, "counterexample: {}", cx.describe());
        }
        let _ = writeln!(s, "checked: {}", self.checked);
        s
    }
}

pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
}

/// Input errors map to 2, everything else that aborts a command counts as
/// a failed check.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Precondition(_) | Error::NotEquivariant(_) | Error::EscapesFixedPoint(_) => 1,
        _ => 2,
    }
}

pub fn run(cmd: &Command, config: Option<&str>, opts: &Options) -> Outcome {
    let mut report = Report::new(cmd.name());
    let result = match cmd {
        Command::DemoQ3Torus { theta } => demo_q3torus(theta, opts, &mut report),
        _ => match config {
            None => Err(Error::Parse(format!("{} needs --config", cmd.name()))),
            Some(text) => parse_config(text).and_then(|c| match cmd {
                Command::CheckFactorSystem => check_factor_system(&c, opts, &mut report),
                Command::Lift => lift(&c, opts, &mut report),
                Command::LiftDerivation => lift_derivation(&c, opts, &mut report),
                Command::Curvature => curvature(&c, opts, &mut report),
                Command::DemoQ3Torus { .. } => unreachable!("handled above"),
            }),
        },
    };
    match result {
        Ok(()) => {
            let exit_code = if report.passed { 0 } else { 1 };
            Outcome { report, exit_code }
        }
        Err(e) => {
            report.passed = false;
            report.error = Some(e.to_string());
            Outcome { exit_code: exit_code_for(&e), report }
        }
    }
}

fn range(c: &SystemConfig, o: &Options, default: i64) -> i64 {
    o.range.or(c.range).unwrap_or(default)
}

fn degree(c: &SystemConfig, o: &Options) -> i64 {
    o.degree.or(c.gen_degree).unwrap_or(2)
}

fn check_factor_system(c: &SystemConfig, o: &Options, report: &mut Report) -> Result<()> {
    let fs = c.factor_system()?;
    let (r, deg) = (range(c, o, 3), degree(c, o));
    report.detail("range", r);
    report.detail("degree", deg);
    report.push(verify_axioms(&fs, r, deg));
    Ok(())
}

fn sample_elements(t: &std::sync::Arc<crate::algebra::TwistMatrix>, seed: u64, count: usize) -> (Vec<TwistedPoly>, Vec<(TwistedPoly, TwistedPoly)>) {
    let mut corpus = Corpus::new(seed);
    let mut singles: Vec<TwistedPoly> = (0..t.n()).flat_map(|k| [TwistedPoly::generator(t, k), TwistedPoly::generator(t, k).star()]).collect();
    singles.extend((0..count).map(|_| corpus.poly(t, 3, 2)));
    let pairs = (0..count).map(|_| (corpus.poly(t, 3, 2), corpus.poly(t, 3, 2))).collect();
    (singles, pairs)
}

fn generator_images(t: &std::sync::Arc<crate::algebra::TwistMatrix>, f: impl Fn(&TwistedPoly) -> Result<TwistedPoly>) -> Result<Vec<Value>> {
    (0..t.n())
        .map(|k| {
            let u = TwistedPoly::generator(t, k);
            Ok(Value::String(format!("u{} -> {}", k + 1, f(&u)?)))
        })
        .collect()
}

fn lift(c: &SystemConfig, o: &Options, report: &mut Report) -> Result<()> {
    let r = range(c, o, 2);
    let deg = degree(c, o);
    report.detail("range", r);
    if let Some(u) = c.synthetic_cocycle(2 * r)? {
        report.push(verify_cocycle(&u, r));
        if !report.passed {
            return Ok(());
        }
        match solve_coboundary(&u)? {
            CoboundarySolution::Cochain(_) => report.detail("solution", "coboundary"),
            CoboundarySolution::Obstruction(ob) => {
                report.detail("obstruction", serde_json::to_value(&ob).expect("obstructions serialize"));
                report.fail(Counterexample::new(
                    "u is a coboundary",
                    vec![("sigma", char_string(&ob.sigma)), ("pi", char_string(&ob.pi))],
                    &ob.residual,
                    "1",
                ));
            }
        }
        return Ok(());
    }
    let (beta, beta_inv) = c.automorphism()?.ok_or_else(|| Error::Parse("lift needs an automorphism or a synthetic_cocycle".into()))?;
    let fs = c.factor_system()?;
    let v = c.witness()?;
    let out = lift_pipeline(&fs, &beta, &beta_inv, &v, r, deg)?;
    report.detail("cocycle_trivial", out.cocycle.is_trivial());
    let sample: Vec<Value> = fs
        .action()
        .chars(1)
        .pairs()
        .into_iter()
        .map(|(s, p)| Ok(Value::String(format!("u({}, {}) = {}", char_string(&s), char_string(&p), out.cocycle.value(&s, &p)?))))
        .collect::<Result<_>>()?;
    report.detail("cocycle", sample);
    report.push(out.cocycle_report.clone());
    match (&out.solution, &out.lift) {
        (CoboundarySolution::Obstruction(ob), _) => {
            report.detail("obstruction", serde_json::to_value(ob).expect("obstructions serialize"));
            report.fail(Counterexample::new("u is a coboundary", vec![("sigma", char_string(&ob.sigma)), ("pi", char_string(&ob.pi))], &ob.residual, "1"));
        }
        (CoboundarySolution::Cochain(_), Some(l)) => {
            let t = fs.twist();
            report.detail("images", generator_images(t, |u| l.apply(u))?);
            let (singles, pairs) = sample_elements(t, o.seed, 20);
            report.push(verify_lifted_automorphism(l, &singles, &pairs));
        }
        (CoboundarySolution::Cochain(_), None) => unreachable!("a solved pipeline builds its lift"),
    }
    Ok(())
}

fn lift_derivation(c: &SystemConfig, o: &Options, report: &mut Report) -> Result<()> {
    let fs = c.factor_system()?;
    let action = fs.action().clone();
    let (r, deg) = (range(c, o, 3), degree(c, o));
    let delta = c.derivation()?.unwrap_or_else(|| Derivation::zero(action.twist(), &action.fixed_coords()));
    let h = c.h_family()?;
    report.detail("range", r);
    report.detail("derivation", delta.to_string());
    let v = verify_lift_conditions(&fs, &delta, &h, r, deg);
    let ok = v.passed;
    report.push(v);
    if ok {
        let l = LiftedDerivation::unchecked(&fs, &delta, &h)?;
        let t = action.twist();
        report.detail("images", generator_images(t, |u| l.apply(u))?);
        let (singles, pairs) = sample_elements(t, o.seed, 20);
        report.push(verify_lifted_derivation(&l, &singles, &pairs));
    }
    Ok(())
}

fn default_derivations(action: &TorusAction) -> Vec<(String, Derivation)> {
    let t = action.twist();
    let fixed = action.fixed_coords();
    let mut out: Vec<(String, Derivation)> = fixed.iter().map(|&k| (format!("delta{}", k + 1), Derivation::coordinate(t, k, &fixed))).collect();
    if let Some(&k) = fixed.first() {
        out.push((format!("ad(u{})", k + 1), Derivation::inner(t, &TwistedPoly::generator(t, k), &fixed)));
    }
    out
}

/// Curvature by both methods on every pair of derivations and every sample,
/// plus frame, Leibniz and (for `*`-derivations) metric checks.
fn curvature_sweep(m: &AssociatedModule, derivs: &[(String, Derivation)], samples: &[TwistedPoly], cases: &[(TwistedPoly, TwistedPoly, TwistedPoly)]) -> Verification {
    let pairs: Vec<(usize, usize)> = (0..derivs.len()).flat_map(|i| (0..derivs.len()).map(move |j| (i, j))).collect();
    let sig = char_string(m.sigma());
    let curv = crate::report::sweep("curvature", &pairs, |&(i, j)| {
        let mut t_ = Tally::default();
        let zero = TwistedPoly::zero(m.action().twist());
        for x in samples {
            let at = || vec![("sigma", sig.clone()), ("delta1", derivs[i].0.clone()), ("delta2", derivs[j].0.clone()), ("x", x.to_string())];
            let a = m.curvature(&derivs[i].1, &derivs[j].1, x, CurvatureMethod::Commutator)?;
            let b = m.curvature(&derivs[i].1, &derivs[j].1, x, CurvatureMethod::Formula)?;
            t_.check("commutator = formula", at, &a.value, &b.value);
            t_.check("R = 0 for cleft frames", at, &a.value, &zero);
        }
        t_.done()
    });
    let mut checks = vec![m.frame_report(samples), curv];
    for (name, d) in derivs {
        let v = m.connection_report(d, cases);
        let keep: Vec<CheckReport> = v.checks.into_iter().filter(|c| d.is_star() || c.name == "Leibniz").map(|mut c| {
            c.name = format!("{} for {name}", c.name);
            c
        }).collect();
        checks.extend(keep);
    }
    Verification::new(format!("module {sig}"), checks)
}

fn module_samples(m: &AssociatedModule, corpus: &mut Corpus, count: usize) -> (Vec<TwistedPoly>, Vec<(TwistedPoly, TwistedPoly, TwistedPoly)>) {
    let a = m.action();
    let w = m.weight();
    let mut samples = m.frame().to_vec();
    samples.extend((0..count).map(|_| corpus.graded_poly(a, &w, 3, 2)));
    let cases = (0..count).map(|_| (corpus.graded_poly(a, &w, 3, 2), corpus.graded_poly(a, &w, 3, 2), corpus.base_poly(a, 2, 2))).collect();
    (samples, cases)
}

fn curvature(c: &SystemConfig, o: &Options, report: &mut Report) -> Result<()> {
    let fs = c.factor_system()?;
    let action = fs.action().clone();
    let s = fs.isometries().expect("configs build cleft systems").clone();
    let sigma = c.sigma.clone().unwrap_or_else(|| vec![1; action.d()]);
    let m = AssociatedModule::new(&s, &sigma)?;
    let derivs = c.named_derivations()?.unwrap_or_else(|| default_derivations(&action));
    let mut corpus = Corpus::new(o.seed);
    let (samples, cases) = module_samples(&m, &mut corpus, 10);
    report.detail("sigma", char_string(&sigma));
    report.detail("frame", m.frame().iter().map(|f| Value::String(f.to_string())).collect::<Vec<_>>());
    report.detail("derivations", derivs.iter().map(|(n, d)| Value::String(format!("{n}: {d}"))).collect::<Vec<_>>());
    report.push(curvature_sweep(&m, &derivs, &samples, &cases));
    Ok(())
}

fn demo_q3torus(theta: &[String; 3], o: &Options, report: &mut Report) -> Result<()> {
    let action = q3_action(&theta[0], &theta[1], &theta[2])?;
    let t = action.twist().clone();
    let s = IsometryFamily::standard(&action);
    let fs = FactorSystem::from_cleft(s.clone())?;
    let r = o.range.unwrap_or(4);
    let deg = o.degree.unwrap_or(2);
    report.detail("theta", format!("theta12 = {}, theta13 = {}, theta23 = {}", theta[0], theta[1], theta[2]));
    let angles = t.slot_angles();
    let phases: Vec<Value> = (0..t.num_slots())
        .map(|k| {
            let z = PhaseCoeff::unit(k, 1).evaluate(&angles);
            Value::String(format!("{} = {:.6} {:+.6}i", t.slot_name(k), z.re, z.im))
        })
        .collect();
    report.detail("phase units", phases);

    let u1 = TwistedPoly::generator(&t, 0);
    let u2 = TwistedPoly::generator(&t, 1);
    let (l31, l32) = (t.lambda(2, 0), t.lambda(2, 1));
    let ks: Vec<i64> = (-r..=r).collect();
    let mut rows = Vec::new();
    let mut t_ = Tally::default();
    for &k in &ks {
        let g = fs.gamma(&[k])?;
        let (g1, g2) = (g.apply_poly(&u1)?, g.apply_poly(&u2)?);
        let e1 = u1.scale(&pow(&l31, k));
        let e2 = u2.scale(&pow(&l32, k));
        t_.check("gamma_k(u1) = lambda31^k u1", || vec![("k", k.to_string())], &g1, &e1);
        t_.check("gamma_k(u2) = lambda32^k u2", || vec![("k", k.to_string())], &g2, &e2);
        let d1 = frohlich(&s, &[k], &u1)?;
        t_.check("Delta_k = gamma_{-k} on B", || vec![("k", k.to_string())], &d1, &fs.gamma(&[-k])?.apply_poly(&u1)?);
        rows.push(Value::String(format!("k = {k:>2}: gamma_k(u1) = {g1}, gamma_k(u2) = {g2}, Delta_k(u1) = {d1}")));
        for &l in &ks {
            let w = fs.omega(&[k], &[l])?;
            t_.check("omega(k,l) = 1", || vec![("k", k.to_string()), ("l", l.to_string())], &w.is_identity(), &true);
        }
    }
    let (checked, first) = t_.done()?;
    let table = match first {
        None => CheckReport::pass("gamma and omega table", checked),
        Some(cx) => CheckReport::fail("gamma and omega table", checked, cx),
    };
    report.detail("gamma table", rows);
    report.detail("omega", format!("omega(k,l) = 1 for all k,l in [{}, {}]", -r, r));
    report.push(Verification::new("factor system of the gauge action", vec![table]));
    report.push(verify_axioms(&fs, r.min(3), deg));

    let fixed = action.fixed_coords();
    let entries = fixed
        .iter()
        .map(|&k| SectionEntry {
            name: format!("delta{}", k + 1),
            base: Derivation::coordinate(&t, k, &fixed),
            lifted: Derivation::coordinate(&t, k, &fixed),
            h: Family::zero(&t),
        })
        .collect();
    let chi = ConnectionSection { entries };
    let weights = vec![
        vec![PhaseCoeff::from_int(1), PhaseCoeff::from_int(1)],
        vec![PhaseCoeff::from_int(2), PhaseCoeff::from_int(-3)],
        vec![PhaseCoeff::from_gauss(crate::algebra::GaussRational::from_fracs(1, 2, 0, 1)), PhaseCoeff::from_int(5)],
    ];
    let mut corpus = Corpus::new(o.seed);
    let samples: Vec<TwistedPoly> = (0..10).map(|_| corpus.poly(&t, 3, 2)).collect();
    let gauge = Family::linear(&t, vec![PhaseCoeff::two_pi_i()]);
    report.push(atiyah_check(&fs, &chi, &[gauge], &weights, &samples, r.min(3), deg));

    let derivs = default_derivations(&action);
    for k in -2..=2 {
        let m = AssociatedModule::new(&s, &[k])?;
        let (samples, cases) = module_samples(&m, &mut corpus, 6);
        report.push(curvature_sweep(&m, &derivs, &samples, &cases));
    }
    report.detail("curvature", "R(delta_i, delta_j, x) = 0 on every module with |sigma| <= 2");
    Ok(())
}

fn pow(c: &PhaseCoeff, k: i64) -> PhaseCoeff {
    let base = if k >= 0 { c.clone() } else { c.inv().expect("phase units are invertible") };
    (0..k.unsigned_abs()).fold(PhaseCoeff::one(), |acc, _| acc.mul(&base))
}

/// Parses `"a,b,c"` into three rational strings.
pub fn parse_theta(s: &str) -> Result<[String; 3]> {
    let parts: Vec<String> = s.split(',').map(|p| p.trim().to_string()).collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("expected three comma-separated rationals, got {s:?}")));
    }
    for p in &parts {
        crate::algebra::parse_rational(p)?;
    }
    Ok([parts[0].clone(), parts[1].clone(), parts[2].clone()])
}

pub fn default_theta() -> [String; 3] {
    ["1/4".into(), "-1/3".into(), "-1/6".into()]
}
