use proptest::prelude::*;
use stcmc_core::barriers::{auto_certificate, certificate, discriminant, test_function, Branch};

fn check(n: usize, c_r: f64, c_chi: f64, d_c: f64) -> Result<(), TestCaseError> {
    let rep = discriminant(n, c_r, c_chi, d_c).unwrap();
    prop_assume!(rep.hypothesis_ok);
    let interval = (0.0, 5.0);
    let cert = auto_certificate(&rep, interval);
    // no window covers the interval: nothing to certify
    prop_assume!(cert.is_ok());
    let cert = cert.unwrap();
    let chk = test_function(&cert, interval, 100).unwrap();
    prop_assert!(chk.positive, "mu not positive for {n} {c_r} {c_chi} {d_c}");
    prop_assert!(chk.slope_sign_ok);
    prop_assert!(chk.max_residual < 1e-8, "residual {}", chk.max_residual);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn small_branch_mu(n in 2usize..7, c_r in 0.0..1.0f64, c_chi in 0.0..0.3f64, d_c in 0.0..0.5f64) {
        prop_assert_eq!(discriminant(n, c_r, c_chi, d_c).unwrap().branch, Branch::Small);
        check(n, c_r, c_chi, d_c)?;
    }

    #[test]
    fn large_branch_mu(n in 7usize..13, c_r in 0.0..0.15f64, c_chi in 0.0..0.05f64, d_c in 0.0..0.1f64) {
        prop_assert_eq!(discriminant(n, c_r, c_chi, d_c).unwrap().branch, Branch::Large);
        check(n, c_r, c_chi, d_c)?;
    }

    #[test]
    fn d_delta_decreases_in_delta(n in 2usize..13, c_r in 0.0..1.0f64, k in 2u32..10) {
        let rep = discriminant(n, c_r, 0.0, 0.0).unwrap();
        let d1 = 2f64.powi(-(k as i32));
        let d2 = d1 / 2.0;
        let a = certificate(&rep, (0.0, 0.1), d1, 0.1);
        let b = certificate(&rep, (0.0, 0.1), d2, 0.1);
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert!(a.d_delta < b.d_delta, "{} !< {}", a.d_delta, b.d_delta);
        }
    }
}
