mod common;

use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eq_2_17_symmetry(l in 0.2f64..4.0, m in 0.2f64..4.0) {
        common::eq_2_17_symmetry(l, m)?;
    }

    #[test]
    fn eq_2_10_identity_chain(l in 0.0f64..5.0) {
        common::eq_2_10_chain(l)?;
    }

    #[test]
    fn eq_2_4_reduces_to_eq_2_2(a in 0.0f64..4.0, b in 0.0f64..4.0) {
        common::eq_2_4_reduction(a, b)?;
    }
}
