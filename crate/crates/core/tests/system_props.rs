use proptest::prelude::*;

use nctorus::algebra::{PhaseCoeff, PolyMatrix, TwistedPoly};
use nctorus::cohomology::{extract_cocycle, verify_cocycle};
use nctorus::corpus::Corpus;
use nctorus::derivations::Derivation;
use nctorus::factor_system::verify_axioms;
use nctorus::geometry::{AssociatedModule, CurvatureMethod};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_cleft_systems_satisfy_the_axioms(seed in any::<u64>(), n in 2usize..=4) {
        let mut c = Corpus::new(seed);
        let a = c.action(n, 1);
        let fs = c.cleft_system(&a).unwrap();
        let v = verify_axioms(&fs, 2, 1);
        prop_assert!(v.passed, "{:?}", v.first_failure());
    }

    #[test]
    fn scaled_omega_entries_are_caught(seed in any::<u64>(), s in -2i64..=2, p in -2i64..=2) {
        let mut c = Corpus::new(seed);
        let a = c.action(3, 1);
        let fs = c.cleft_system(&a).unwrap();
        let w = fs.omega(&[s], &[p]).unwrap();
        let bad = w.mul(&PolyMatrix::scalar(TwistedPoly::scalar(fs.twist(), PhaseCoeff::from_int(-1)))).unwrap();
        let v = verify_axioms(&fs.with_omega_override(vec![s], vec![p], bad), 2, 1);
        prop_assert!(!v.passed);
        prop_assert!(v.first_failure().is_some());
    }

    #[test]
    fn extracted_cocycles_are_cocycles(seed in any::<u64>()) {
        let mut c = Corpus::new(seed);
        let cfg = c.lift_config(3, 6).unwrap();
        let u = extract_cocycle(&cfg.fs, &cfg.beta, &cfg.beta_inv, &cfg.v, 2).unwrap();
        let v = verify_cocycle(&u, 1);
        prop_assert!(v.passed, "{:?}", v.first_failure());
    }

    #[test]
    fn frames_reproduce_and_curvature_is_antisymmetric(seed in any::<u64>(), k in -3i64..=3) {
        let mut c = Corpus::new(seed);
        let a = c.action(3, 1);
        let fs = c.cleft_system(&a).unwrap();
        let m = AssociatedModule::new(fs.isometries().unwrap(), &[k]).unwrap();
        let x = c.graded_poly(&a, &[-k], 3, 2);
        prop_assert_eq!(m.reproduce(&x), x.clone());
        let t = a.twist().clone();
        let fixed = a.fixed_coords();
        let d1 = Derivation::coordinate(&t, fixed[0], &fixed);
        let d2 = Derivation::inner(&t, &c.base_poly(&a, 2, 2), &fixed);
        let r12 = m.curvature(&d1, &d2, &x, CurvatureMethod::Commutator).unwrap().value;
        let r21 = m.curvature(&d2, &d1, &x, CurvatureMethod::Formula).unwrap().value;
        prop_assert_eq!(&r12, &-&r21);
        prop_assert!(r12.is_zero());
    }
}
