#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;

use snblock::reductions::{
    brute_force_best_ordering, brute_force_min_path, reduce_pathtsp_to_2ordering, scale_2_to_w, verify_equivalence,
    OrderingInstance, PathTspInstance, Theorem, VerifyOptions,
};
use snblock::Error;

fn unit_triangle(k: i64) -> PathTspInstance {
    PathTspInstance::new(vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]], k).unwrap()
}

#[test]
fn triangle_threshold() {
    // every path has weight 2 and every list 2-score 4
    let inst = unit_triangle(2);
    let target = reduce_pathtsp_to_2ordering(&inst).unwrap();
    let (best, _) = brute_force_best_ordering(&target).unwrap();
    assert_eq!(best, 4);
    assert_eq!(target.k, 4);
    assert!(best >= target.k);
    // one more and the target would wrongly say no
    assert!(best < target.k + 1);
    let target = reduce_pathtsp_to_2ordering(&unit_triangle(1)).unwrap();
    assert!(best < target.k);
}

#[test]
fn metric_reduction_counts_boundaries() {
    let mut o = VerifyOptions::new(Theorem::Metric, 40);
    o.max_m = 6;
    let rep = verify_equivalence(&o).unwrap();
    assert!(rep.passed(), "{rep}");
    assert!(rep.boundary_excluded >= 40);
}

#[test]
fn mutated_thresholds_are_caught() {
    let mut o = VerifyOptions::new(Theorem::PathTsp, 30);
    o.k_offset = 1;
    let rep = verify_equivalence(&o).unwrap();
    assert!(!rep.passed());
    let c = rep.counterexample.unwrap();
    assert!(c.source && !c.target);
    o.k_offset = -1;
    assert!(!verify_equivalence(&o).unwrap().passed());
}

#[test]
fn scaling_with_larger_window() {
    let mut o = VerifyOptions::new(Theorem::Scaling, 10);
    o.max_m = 2;
    o.w = 5;
    assert!(verify_equivalence(&o).unwrap().passed());
    o.w = 2;
    assert!(matches!(verify_equivalence(&o), Err(Error::Contract(_))));
    o.w = 4;
    o.max_m = 3;
    assert!(matches!(verify_equivalence(&o), Err(Error::Capacity { .. })));
}

#[test]
fn report_is_key_value() {
    let rep = verify_equivalence(&VerifyOptions::new(Theorem::PathTsp, 5)).unwrap();
    let text = rep.to_string();
    assert!(text.contains("result = PASS"));
    assert!(text.lines().all(|l| l.contains(" = ")));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn stacked_aligned_witness_reaches_threshold(
        w in prop::collection::vec(0i64..6, 3),
        k in 0i64..12,
    ) {
        let f = vec![vec![0, w[0], w[1]], vec![w[0], 0, w[2]], vec![w[1], w[2], 0]];
        let src = OrderingInstance::new(f, k, 2).unwrap();
        let (best, witness) = brute_force_best_ordering(&src).unwrap();
        let scaled = scale_2_to_w(&src, 3).unwrap();
        prop_assert_eq!(scaled.instance.len(), 6);
        prop_assert_eq!(scaled.instance.k, scaled.t1 + scaled.t2);
        if best >= k {
            let list = scaled.stacked_aligned(&witness);
            prop_assert!(scaled.instance.w_score(&list) >= scaled.instance.k);
        }
    }

    #[test]
    fn path_reduction_is_exact(
        raw in prop::collection::vec(0i64..10, 10),
        k in 0i64..30,
    ) {
        let m = 5;
        let mut wts = vec![vec![0; m]; m];
        let mut it = raw.iter();
        for i in 0..m {
            for j in (i + 1)..m {
                let x = *it.next().unwrap();
                wts[i][j] = x;
                wts[j][i] = x;
            }
        }
        let inst = PathTspInstance::new(wts, k).unwrap();
        let (path, _) = brute_force_min_path(&inst).unwrap();
        let target = reduce_pathtsp_to_2ordering(&inst).unwrap();
        let (best, _) = brute_force_best_ordering(&target).unwrap();
        prop_assert_eq!(best, inst.total_weight() * (m as i64 - 1) - path);
        prop_assert_eq!(path <= k, best >= target.k);
    }
}
