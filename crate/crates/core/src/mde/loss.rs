/// Asymmetric squared error: underestimates (`d_hat < d`) cost `c1`,
/// overestimates cost `c2`.
pub fn asymmetric_loss(d: f64, d_hat: f64, c1: f64, c2: f64) -> f64 {
    let under = (d - d_hat).max(0.0);
    let over = (d_hat - d).max(0.0);
    c1 * under * under + c2 * over * over
}

/// Derivative of [`asymmetric_loss`] with respect to `d_hat`.
pub fn asymmetric_loss_grad(d: f64, d_hat: f64, c1: f64, c2: f64) -> f64 {
    -2.0 * c1 * (d - d_hat).max(0.0) + 2.0 * c2 * (d_hat - d).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(asymmetric_loss(1.0, 1.0, 3.0, 1.0), 0.0);
        assert_eq!(asymmetric_loss(1.0, 0.0, 3.0, 1.0), 3.0);
        assert_eq!(asymmetric_loss(0.0, 1.0, 3.0, 1.0), 1.0);
    }

    #[test]
    fn gradient_continuous_at_zero_error() {
        assert_eq!(asymmetric_loss_grad(2.0, 2.0, 3.0, 1.0), 0.0);
        assert!(asymmetric_loss_grad(2.0, 2.0 - 1e-9, 3.0, 1.0).abs() < 1e-7);
        assert!(asymmetric_loss_grad(2.0, 2.0 + 1e-9, 3.0, 1.0).abs() < 1e-7);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn gradient_matches_central_differences(d in 0.0f64..40.0, d_hat in -10.0f64..40.0) {
            prop_assume!((d - d_hat).abs() > 1e-3);
            let h = 1e-5;
            let fd = (asymmetric_loss(d, d_hat + h, 3.0, 1.0) - asymmetric_loss(d, d_hat - h, 3.0, 1.0)) / (2.0 * h);
            let g = asymmetric_loss_grad(d, d_hat, 3.0, 1.0);
            prop_assert!((fd - g).abs() <= 1e-4 * g.abs().max(1e-8), "fd {} vs {}", fd, g);
        }

        #[test]
        fn non_negative_and_zero_only_on_match(d in -50.0f64..50.0, e in -50.0f64..50.0) {
            let l = asymmetric_loss(d, d + e, 3.0, 1.0);
            prop_assert!(l >= 0.0);
            if e != 0.0 { prop_assert!(l > 0.0); }
        }

        #[test]
        fn under_over_ratio(d in 0.0f64..30.0, delta in 0.01f64..10.0) {
            let under = asymmetric_loss(d, d - delta, 3.0, 1.0);
            let over = asymmetric_loss(d, d + delta, 3.0, 1.0);
            prop_assert!((under / over - 3.0).abs() < 1e-12);
        }
    }
}
