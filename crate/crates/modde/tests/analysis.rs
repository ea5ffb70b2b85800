use modde::analysis::{
    analyze_cell, best_bchm_counts, bonferroni_reject, compute_ecdf, compute_ranks, friedman_test,
    hochberg_posthoc, hochberg_reject, CellKey, RankTable,
};
use modde_core::runner::RunLog;
use modde_core::{BchmKind, CrossoverKind, MutationStrategy};
use proptest::prelude::*;

fn log(bchm: BchmKind, function: &str, run: u64, final_best: f64) -> RunLog {
    RunLog {
        config_id: format!("rand_1__bin__{bchm}"),
        mutation: MutationStrategy::Rand1,
        crossover: CrossoverKind::Binomial,
        bchm,
        function: function.into(),
        n: 2,
        run_index: run,
        seed: run,
        instance_seed: 0,
        trajectory: vec![(1, final_best)],
        final_best,
        f_opt: Some(0.0),
        evals_used: 1,
        generations: 0,
        pors_numerator: run,
        pors_denominator: 10,
        wall_time_secs: None,
    }
}

fn names(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("t{i}")).collect()
}

fn blocks(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("b{i}")).collect()
}

#[test]
fn two_methods_a_better_everywhere() {
    let logs: Vec<RunLog> = ["sphere", "linear-slope"]
        .iter()
        .flat_map(|f| {
            (0..3).flat_map(move |r| {
                [log(BchmKind::Projection, f, r, 1.0 + r as f64), log(BchmKind::Wrapping, f, r, 10.0 + r as f64)]
            })
        })
        .collect();
    let t = compute_ranks(&logs).unwrap();
    assert_eq!(t.treatments, vec!["projection", "wrapping"]);
    assert_eq!(t.mean_ranks, vec![1.0, 2.0]);
    assert_eq!(t.best_set, vec![0]);
}

#[test]
fn identical_medians_tie_everywhere() {
    let logs: Vec<RunLog> = ["sphere", "linear-slope"]
        .iter()
        .flat_map(|f| BchmKind::ALL.map(|b| log(b, f, 0, 3.0)))
        .collect();
    let mut t = compute_ranks(&logs).unwrap();
    assert!(t.mean_ranks.iter().all(|&r| r == 7.0));
    assert_eq!(t.best_set.len(), 13);
    for row in &t.block_ranks {
        assert_eq!(row.iter().sum::<f64>(), 13.0 * 14.0 / 2.0);
    }
    let marking = t.mark(0.05).unwrap();
    assert_eq!(marking.friedman.statistic, 0.0);
    assert!((marking.friedman.p_value - 1.0).abs() < 1e-12);
    assert!(t.worse_set.is_empty());
}

#[test]
fn latin_square() {
    let values = vec![vec![1.0, 2.0, 3.0], vec![3.0, 1.0, 2.0], vec![2.0, 3.0, 1.0]];
    let t = RankTable::from_values(names(3), blocks(3), &values).unwrap();
    assert_eq!(t.mean_ranks, vec![2.0, 2.0, 2.0]);
    assert_eq!(friedman_test(&t).unwrap().statistic, 0.0);
}

#[test]
fn friedman_unanimous() {
    let t = RankTable::from_values(names(3), blocks(4), &vec![vec![1.0, 2.0, 3.0]; 4]).unwrap();
    let f = friedman_test(&t).unwrap();
    assert_eq!(f.statistic, 8.0);
    // chi-square with 2 degrees of freedom: sf(x) = exp(-x/2).
    assert!((f.p_value - (-4.0f64).exp()).abs() < 1e-12);
}

#[test]
fn hochberg_two_treatments() {
    let mut t = RankTable::from_values(names(2), blocks(20), &vec![vec![1.0, 2.0]; 20]).unwrap();
    let post = hochberg_posthoc(&t, 0.05).unwrap();
    let c = post.comparisons[0];
    assert!((c.z - 1.0 / 0.05f64.sqrt()).abs() < 1e-12);
    assert!((c.p_value - 7.744e-6).abs() < 1e-8, "{}", c.p_value);
    assert!(c.rejected);
    t.mark(0.05).unwrap();
    assert_eq!(t.worse_set, vec![1]);
    t.mark(0.0).unwrap();
    assert!(t.worse_set.is_empty());
}

#[test]
fn posthoc_needs_friedman_rejection() {
    // Small, noisy difference: Friedman does not reject.
    let values = vec![vec![1.0, 2.0, 3.0], vec![2.0, 1.0, 3.0], vec![3.0, 1.0, 2.0]];
    let mut t = RankTable::from_values(names(3), blocks(3), &values).unwrap();
    let m = t.mark(0.05).unwrap();
    assert!(m.friedman.p_value > 0.05);
    assert!(t.worse_set.is_empty());
}

#[test]
fn degenerate_inputs() {
    assert!(RankTable::from_values(names(1), blocks(3), &vec![vec![1.0]; 3]).is_err());
    assert!(RankTable::from_values(names(2), blocks(1), &[vec![1.0, 2.0]]).is_err());
}

#[test]
fn gap_names_coordinate() {
    let logs = vec![
        log(BchmKind::Projection, "sphere", 0, 1.0),
        log(BchmKind::Wrapping, "sphere", 0, 2.0),
        log(BchmKind::Projection, "linear-slope", 0, 1.0),
    ];
    let err = compute_ranks(&logs).unwrap_err().to_string();
    assert!(err.contains("wrapping") && err.contains("linear-slope"), "{err}");
}

#[test]
fn unequal_run_counts_rejected() {
    let logs = vec![
        log(BchmKind::Projection, "sphere", 0, 1.0),
        log(BchmKind::Projection, "sphere", 1, 1.0),
        log(BchmKind::Wrapping, "sphere", 0, 2.0),
        log(BchmKind::Projection, "linear-slope", 0, 1.0),
        log(BchmKind::Wrapping, "linear-slope", 0, 1.0),
    ];
    assert!(compute_ranks(&logs).unwrap_err().to_string().contains("unequal"));
}

#[test]
fn counts_with_ties() {
    let key = CellKey { mutation: MutationStrategy::Rand1, crossover: CrossoverKind::Binomial, group: 1 };
    let unique = vec![
        log(BchmKind::Projection, "sphere", 0, 1.0),
        log(BchmKind::Wrapping, "sphere", 0, 2.0),
        log(BchmKind::Projection, "linear-slope", 0, 1.0),
        log(BchmKind::Wrapping, "linear-slope", 0, 2.0),
    ];
    let tied = vec![
        log(BchmKind::Projection, "sphere", 0, 1.0),
        log(BchmKind::Wrapping, "sphere", 0, 1.0),
        log(BchmKind::Projection, "linear-slope", 0, 1.0),
        log(BchmKind::Wrapping, "linear-slope", 0, 1.0),
    ];
    let a = analyze_cell(key, &unique, 0.05).unwrap();
    let counts = best_bchm_counts(std::slice::from_ref(&a));
    assert_eq!(counts.get("projection", 1), 1);
    assert_eq!(counts.get("wrapping", 1), 0);
    let b = analyze_cell(key, &tied, 0.05).unwrap();
    let counts = best_bchm_counts(&[b]);
    assert_eq!(counts.get("projection", 1) + counts.get("wrapping", 1), 2);
    assert_eq!(counts.total("wrapping"), 1);
    assert_eq!(a.mean_pors, vec![Some(0.0), Some(0.0)]);
}

#[test]
fn ecdf_cases() {
    let mut one = log(BchmKind::Projection, "sphere", 0, 0.5);
    one.trajectory = vec![(3, 40.0), (6, 0.5)];
    one.evals_used = 8;
    let curve = compute_ecdf(&[one.clone()]).unwrap();
    assert_eq!(curve, vec![(1.5, 0.0), (3.0, 0.2), (4.0, 0.2)]);

    let mut below = log(BchmKind::Projection, "sphere", 0, -1e-9);
    below.trajectory = vec![(1, -1e-9)];
    assert!(compute_ecdf(&[below.clone()]).unwrap().iter().all(|p| p.1 == 1.0));

    let mut none = log(BchmKind::Projection, "sphere", 1, 1e6);
    none.trajectory = vec![(1, 1e6)];
    assert_eq!(compute_ecdf(&[below, none.clone()]).unwrap().last().unwrap().1, 0.5);

    none.f_opt = None;
    assert!(compute_ecdf(&[none]).is_err());
}

#[test]
fn hochberg_examples() {
    assert_eq!(hochberg_reject(&[0.01, 0.04, 0.045], 0.05), vec![true, true, true]);
    assert_eq!(bonferroni_reject(&[0.01, 0.04, 0.045], 0.05), vec![true, false, false]);
}

proptest! {
    #[test]
    fn ranks_invariant_under_monotone_maps(values in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 4), 3..6)) {
        let t = RankTable::from_values(names(4), blocks(values.len()), &values).unwrap();
        let mapped: Vec<Vec<f64>> = values.iter().map(|r| r.iter().map(|v| (v / 100.0).exp() * 3.0 + 1.0).collect()).collect();
        let u = RankTable::from_values(names(4), blocks(values.len()), &mapped).unwrap();
        prop_assert_eq!(&t.block_ranks, &u.block_ranks);
        for row in &t.block_ranks {
            prop_assert!((row.iter().sum::<f64>() - 10.0).abs() < 1e-12);
        }
    }

    #[test]
    fn friedman_invariant_under_relabeling(
        values in prop::collection::vec(prop::collection::vec(0u8..5, 5), 2..8),
        shift in 0usize..5,
    ) {
        let values: Vec<Vec<f64>> = values.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
        let permuted: Vec<Vec<f64>> = values.iter().map(|r| (0..5).map(|j| r[(j + shift) % 5]).collect()).collect();
        let a = friedman_test(&RankTable::from_values(names(5), blocks(values.len()), &values).unwrap()).unwrap();
        let b = friedman_test(&RankTable::from_values(names(5), blocks(values.len()), &permuted).unwrap()).unwrap();
        prop_assert!((a.statistic - b.statistic).abs() < 1e-9);
    }

    #[test]
    fn hochberg_dominates_bonferroni(p in prop::collection::vec(0.0f64..0.2, 1..13), alpha in 0.0f64..0.1) {
        let h = hochberg_reject(&p, alpha);
        let b = bonferroni_reject(&p, alpha);
        for (hi, bi) in h.iter().zip(&b) {
            prop_assert!(!bi || *hi);
        }
    }

    #[test]
    fn best_and_worse_disjoint(values in prop::collection::vec(prop::collection::vec(0u8..4, 6), 8..20)) {
        let values: Vec<Vec<f64>> = values.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
        let mut t = RankTable::from_values(names(6), blocks(values.len()), &values).unwrap();
        t.mark(0.05).unwrap();
        prop_assert!(!t.best_set.is_empty());
        prop_assert!(t.worse_set.iter().all(|w| !t.best_set.contains(w)));
    }
}
