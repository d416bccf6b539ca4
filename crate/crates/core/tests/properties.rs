mod common;

use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn supportivity_gives_exact_zeros(seed in any::<u64>()) {
        common::supportivity(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn far_changes_to_the_form_do_not_matter(seed in any::<u64>()) {
        common::locality(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn wedge_is_bilinear(seed in any::<u64>()) {
        common::bilinearity(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn stokes_on_bent_cells(seed in any::<u64>()) {
        common::stokes(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn boundary_of_boundary_cancels(seed in any::<u64>()) {
        common::boundary_squared(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn evaluation_is_deterministic(seed in any::<u64>()) {
        common::determinism(seed).map_err(TestCaseError::fail)?;
    }
}
