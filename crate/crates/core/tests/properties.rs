mod common;

use proptest::prelude::*;

fn run(check: common::Check) -> Result<(), TestCaseError> {
    check.map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn pfaffian_equivariance(seed in any::<u64>()) {
        run(common::pfaffian_equivariance(seed))?;
    }

    #[test]
    fn moment_map_equivariance_and_scaling(seed in any::<u64>()) {
        run(common::moment_equivariance(seed))?;
    }

    #[test]
    fn quartic_invariants_under_sl3(seed in any::<u64>()) {
        run(common::sl3_invariance(seed))?;
    }

    #[test]
    fn mobius_action_laws(seed in any::<u64>()) {
        run(common::mobius_laws(seed))?;
    }

    #[test]
    fn flow_objective_decreases(seed in any::<u64>()) {
        run(common::flow_monotone(seed))?;
    }

    #[test]
    fn hankel_psd_on_positive_quartics(seed in any::<u64>()) {
        run(common::hankel_psd(seed))?;
    }
}
