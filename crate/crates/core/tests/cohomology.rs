use std::collections::BTreeMap;
use std::sync::Arc;

use nctorus::algebra::{GaussRational, PhaseCoeff, PolyMatrix, TwistMatrix, TwistedPoly};
use nctorus::cohomology::{extract_cocycle, lift_pipeline, solve_coboundary, verify_cocycle, verify_lifted_automorphism, CoboundarySolution, TwoCocycle};
use nctorus::corpus::Corpus;
use nctorus::dynamics::q3_action;
use nctorus::factor_system::{FactorSystem, Family, IsometryFamily, Morphism};
use nctorus::Error;

fn q3() -> FactorSystem {
    let a = q3_action("1/4", "-1/3", "-1/6").unwrap();
    FactorSystem::from_cleft(IsometryFamily::standard(&a)).unwrap()
}

fn samples(fs: &FactorSystem, seed: u64, count: usize) -> (Vec<TwistedPoly>, Vec<(TwistedPoly, TwistedPoly)>) {
    let mut c = Corpus::new(seed);
    let t = fs.twist().clone();
    let mut singles: Vec<TwistedPoly> = (0..t.n()).map(|k| TwistedPoly::generator(&t, k)).collect();
    singles.extend((0..count).map(|_| c.poly(&t, 3, 2)));
    let pairs = (0..count).map(|_| (c.poly(&t, 3, 2), c.poly(&t, 3, 2))).collect();
    (singles, pairs)
}

#[test]
fn diagonal_automorphism_has_trivial_cocycle() {
    let fs = q3();
    let t = fs.twist().clone();
    let w = BTreeMap::from([
        (0, PhaseCoeff::from_gauss(GaussRational::from_fracs(3, 5, 4, 5))),
        (1, PhaseCoeff::from_gauss(GaussRational::from_ints(0, 1))),
    ]);
    let winv = w.iter().map(|(&k, c)| (k, c.conj())).collect();
    let beta = Morphism::diagonal(&t, w).unwrap();
    let beta_inv = Morphism::diagonal(&t, winv).unwrap();
    let u = extract_cocycle(&fs, &beta, &beta_inv, &Family::one(&t), 4).unwrap();
    assert!(u.is_trivial());
    assert!(verify_cocycle(&u, 2).passed);

    let out = lift_pipeline(&fs, &beta, &beta_inv, &Family::one(&t), 2, 1).unwrap();
    let lift = out.lift.expect("a lift");
    let (singles, pairs) = samples(&fs, 3, 20);
    let v = verify_lifted_automorphism(&lift, &singles, &pairs);
    assert!(v.passed, "{:?}", v.first_failure());
    // τ_w fixes u3 because its graded component is s(1) with coefficient 1
    assert_eq!(lift.apply(&TwistedPoly::generator(&t, 2)).unwrap(), TwistedPoly::generator(&t, 2));
}

#[test]
fn inner_automorphism_has_trivial_cocycle() {
    let fs = q3();
    let t = fs.twist().clone();
    let u1 = TwistedPoly::generator(&t, 0);
    let beta = Morphism::inner(&t, &[0, 1], &u1).unwrap();
    let beta_inv = Morphism::inner(&t, &[0, 1], &u1.star()).unwrap();
    let fs2 = fs.clone();
    let u1c = u1.clone();
    let v = Family::from_fn("u1 gamma(u1*)", move |s| Ok(PolyMatrix::scalar(&u1c * &fs2.gamma(s)?.apply_poly(&u1c.star())?)));
    let u = extract_cocycle(&fs, &beta, &beta_inv, &v, 4).unwrap();
    assert!(u.is_trivial());
    let out = lift_pipeline(&fs, &beta, &beta_inv, &v, 2, 1).unwrap();
    let lift = out.lift.expect("a lift");
    // the lift of Ad[u1] is Ad[u1] on all of A
    let x = TwistedPoly::unit_monomial(&t, &[1, -2, 3]);
    assert_eq!(lift.apply(&x).unwrap(), &(&u1 * &x) * &u1.star());
}

#[test]
fn bad_witness_is_rejected() {
    let fs = q3();
    let t = fs.twist().clone();
    let u1 = TwistedPoly::generator(&t, 0);
    let beta = Morphism::inner(&t, &[0, 1], &u1).unwrap();
    let beta_inv = Morphism::inner(&t, &[0, 1], &u1.star()).unwrap();
    let v = Family::constant("u2", PolyMatrix::scalar(TwistedPoly::generator(&t, 1)));
    assert!(matches!(extract_cocycle(&fs, &beta, &beta_inv, &v, 2), Err(Error::Precondition(_))));
}

#[test]
fn random_circle_configurations_lift() {
    let mut nontrivial = 0;
    for seed in 0..6 {
        let mut c = Corpus::new(100 + seed);
        let cfg = c.lift_config(3, 12).unwrap();
        let u = extract_cocycle(&cfg.fs, &cfg.beta, &cfg.beta_inv, &cfg.v, 4).unwrap();
        assert!(verify_cocycle(&u, 2).passed, "seed {seed}");
        nontrivial += usize::from(!u.is_trivial());
        assert!(matches!(solve_coboundary(&u).unwrap(), CoboundarySolution::Cochain(_)), "seed {seed}");
        let out = lift_pipeline(&cfg.fs, &cfg.beta, &cfg.beta_inv, &cfg.v, 2, 1).unwrap();
        let lift = out.lift.expect("circle actions always lift");
        let (singles, pairs) = samples(&cfg.fs, seed, 10);
        let v = verify_lifted_automorphism(&lift, &singles, &pairs);
        assert!(v.passed, "seed {seed}: {:?}", v.first_failure());
    }
    assert!(nontrivial >= 5, "only {nontrivial} configurations had a non-trivial cocycle");
}

#[test]
fn witnesses_differing_by_scalars_give_cohomologous_cocycles() {
    let mut c = Corpus::new(7);
    let cfg = c.lift_config(3, 8).unwrap();
    let t = cfg.fs.twist().clone();
    let table: BTreeMap<Vec<i64>, PolyMatrix> = (-8..=8)
        .map(|k| (vec![k], PolyMatrix::scalar(TwistedPoly::scalar(&t, PhaseCoeff::from_gauss(c.unimodular())))))
        .collect();
    let v2 = cfg.v.times(&Family::table("scalars", table, None));
    let u1 = extract_cocycle(&cfg.fs, &cfg.beta, &cfg.beta_inv, &cfg.v, 4).unwrap();
    let u2 = extract_cocycle(&cfg.fs, &cfg.beta, &cfg.beta_inv, &v2, 4).unwrap();
    let r = u2.ratio(&u1).unwrap();
    assert!(!r.is_trivial());
    assert!(verify_cocycle(&r, 2).passed);
    assert!(matches!(solve_coboundary(&r).unwrap(), CoboundarySolution::Cochain(_)));
}

#[test]
fn antisymmetric_bilinear_cocycle_is_obstructed() {
    let t = Arc::new(TwistMatrix::from_upper_strs(3, &["1/4", "-1/3", "-1/6"]).unwrap());
    let q = PhaseCoeff::unit(0, 1);
    let u = TwoCocycle::bilinear(&t, vec![0, 1], 4, vec![vec![0, 0], vec![1, 0]], q).unwrap();
    assert!(verify_cocycle(&u, 2).passed);
    match solve_coboundary(&u).unwrap() {
        CoboundarySolution::Obstruction(o) => assert!(o.certified, "{o}"),
        CoboundarySolution::Cochain(c) => panic!("solver over-claimed: {c:?}"),
    }
    // the symmetric form q^{ac} is a coboundary
    let sym = TwoCocycle::bilinear(&t, vec![0, 1], 4, vec![vec![1, 0], vec![0, 0]], PhaseCoeff::unit(0, 1)).unwrap();
    assert!(matches!(solve_coboundary(&sym).unwrap(), CoboundarySolution::Cochain(_)));
}

#[test]
fn non_cocycle_input_is_refused() {
    let t = Arc::new(TwistMatrix::from_upper_strs(2, &["1/3"]).unwrap());
    let chars = nctorus::dynamics::CharBox::new(1, 4);
    let u = TwoCocycle::from_fn(&t, vec![0, 1], chars, nctorus::cohomology::FrohlichAction::Trivial, |s, p| {
        let e = s[0] * s[0] * p[0];
        Ok(TwistedPoly::scalar(&t, PhaseCoeff::unit(0, e)))
    })
    .unwrap();
    assert!(!verify_cocycle(&u, 2).passed);
    assert!(matches!(solve_coboundary(&u), Err(Error::Precondition(_))));
}
