use proptest::prelude::*;
use treeflow::gen::{random_two_separable, rng};
use treeflow::oracles::{brute_force_lconvex, OracleBudget};
use treeflow::rational::Ext;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn descent_reaches_the_global_minimum(seed in any::<u64>()) {
        let omega = random_two_separable(&mut rng(seed), 6, 3, true);
        let Ok((_, best)) = brute_force_lconvex(&omega, &OracleBudget::default()) else {
            return Ok(());
        };
        let start = (0..omega.tree.len())
            .map(|v| vec![v; omega.n])
            .find(|x| omega.eval(x).unwrap().is_finite());
        prop_assume!(start.is_some());
        let (x, trace) = omega.steepest_descent(&start.unwrap()).unwrap();
        prop_assert_eq!(omega.eval(&x).unwrap(), Ext::Finite(best));
        prop_assert!(trace.values.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn evenized_objectives_are_lconvex(seed in any::<u64>()) {
        let omega = random_two_separable(&mut rng(seed), 7, 3, false);
        prop_assert!(omega.evenize().check_lconvex().is_ok());
    }
}
