mod common;

use common::{any_expr, point, smooth_expr};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_parse_round_trip(e in any_expr(), b in point()) {
        common::round_trip(&e, &b)?;
    }

    #[test]
    fn simplify_preserves_value(e in any_expr(), b in point()) {
        common::simplify_preserves(&e, &b)?;
    }

    #[test]
    fn diff_agrees_with_finite_difference(e in smooth_expr(), b in point(), var in prop::sample::select(vec!["x", "y"])) {
        common::diff_vs_fd(&e, &b, var)?;
    }
}
