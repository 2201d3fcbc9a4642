//! Sampling checks: simulated rounds against exact theory.

use pairguess::certify::{
    certify_coherence, certify_quantumness, empirical_matrix, witness_value, CoherenceVerdict,
    QuantumnessVerdict,
};
use pairguess::certify::report_from_counts;
use pairguess::classical::{balanced_partition_optimum, brute_force_optimum};
use pairguess::game::{average_success, success_matrix, GameSpec, Strategy};
use pairguess::quantum::{polygon, tetrad, trine};
use pairguess::sim::{empirical_average, simulate};
use pairguess::RoundRecord;

const N: u64 = 100_000;

fn run(strategy: &Strategy, d: usize, rounds: u64, seed: u64) -> Vec<RoundRecord> {
    let spec = GameSpec::canonical(d).unwrap();
    simulate(strategy, &spec, rounds, seed).unwrap().iter().collect()
}

fn exact(strategy: &Strategy, d: usize) -> f64 {
    let spec = GameSpec::canonical(d).unwrap();
    average_success(&success_matrix(strategy, &spec).unwrap(), &spec)
}

fn classical_opt(d: usize) -> Strategy {
    Strategy::classical(brute_force_optimum(d, 2).unwrap().encoding, 2).unwrap()
}

fn binomial_se(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

#[test]
fn empirical_average_converges_to_exact() {
    let mut cases = vec![
        (Strategy::quantum(trine(), 0.0).unwrap(), 3),
        (Strategy::quantum(tetrad(), 0.0).unwrap(), 4),
        (Strategy::quantum(polygon(5).unwrap(), 0.0).unwrap(), 5),
        (Strategy::quantum(polygon(6).unwrap(), 0.0).unwrap(), 6),
    ];
    for d in 3..=5 {
        cases.push((classical_opt(d), d));
    }
    for (k, (st, d)) in cases.iter().enumerate() {
        let recs = run(st, *d, N, 100 + k as u64);
        let emp = empirical_average(&recs).unwrap();
        let p = exact(st, *d);
        assert!(
            (emp - p).abs() <= 4.0 * binomial_se(p, N),
            "case {k} (d = {d}): empirical {emp} vs exact {p}"
        );
    }
}

#[test]
fn named_band_examples() {
    let trine_avg = empirical_average(&run(&Strategy::quantum(trine(), 0.0).unwrap(), 3, N, 1)).unwrap();
    assert!((trine_avg - 0.933_012_7).abs() < 0.006);
    let classical = empirical_average(&run(&classical_opt(3), 3, N, 2)).unwrap();
    assert!((classical - 5.0 / 6.0).abs() < 0.006);
    let tetrad_avg = empirical_average(&run(&Strategy::quantum(tetrad(), 0.0).unwrap(), 4, N, 3)).unwrap();
    assert!((tetrad_avg - 0.908_248_3).abs() < 0.006);
    let noisy = empirical_average(&run(&Strategy::quantum(tetrad(), 0.3).unwrap(), 4, N, 4)).unwrap();
    let target = 0.5 + 0.7 / 6f64.sqrt();
    assert!((noisy - target).abs() <= 4.0 * binomial_se(target, N), "{noisy}");
}

#[test]
fn input_histogram_matches_design() {
    for d in [3, 4, 6] {
        let spec = GameSpec::canonical(d).unwrap();
        let recs = run(&Strategy::quantum(polygon(d).unwrap(), 0.0).unwrap(), d, N, 11);
        let counts = empirical_matrix(&recs, d).unwrap();
        for (i, j, n, _) in counts.iter() {
            let p = spec.cell_probability(i, j);
            let sd = (N as f64 * p * (1.0 - p)).sqrt();
            assert!((n as f64 - N as f64 * p).abs() <= 4.0 * sd, "d={d} cell ({i},{j}) n={n}");
        }
    }
}

#[test]
fn noise_lowers_success() {
    let avgs: Vec<f64> = [0.0, 0.2, 0.5]
        .iter()
        .map(|&l| empirical_average(&run(&Strategy::quantum(trine(), l).unwrap(), 3, N, 21)).unwrap())
        .collect();
    for w in avgs.windows(2) {
        let gap = w[0] - w[1];
        assert!(gap > 4.0 * 2f64.sqrt() * binomial_se(0.8, N), "{avgs:?}");
    }
}

#[test]
fn trine_cells_near_exact() {
    let recs = run(&Strategy::quantum(trine(), 0.0).unwrap(), 3, N, 5);
    let counts = empirical_matrix(&recs, 3).unwrap();
    for (i, j, n, s) in counts.iter() {
        let f = s as f64 / n as f64;
        assert!((f - 0.933_012_7).abs() < 0.01, "cell ({i},{j}) freq {f}");
    }
}

#[test]
fn classical_cells_near_exact() {
    let recs = run(&classical_opt(3), 3, N, 6);
    let counts = empirical_matrix(&recs, 3).unwrap();
    for (i, j, n, s) in counts.iter() {
        let f = s as f64 / n as f64;
        let target = if j == 1 { 0.5 } else { 1.0 };
        assert!((f - target).abs() < 0.02, "cell ({i},{j}) freq {f}");
    }
}

#[test]
fn certification_examples() {
    let trine_recs = run(&Strategy::quantum(trine(), 0.0).unwrap(), 3, N, 31);
    let r = certify_quantumness(&trine_recs, 3, 0.01).unwrap();
    assert_eq!(r.quantumness_verdict, QuantumnessVerdict::Quantum);
    assert!((r.confidence_radius - 0.005_147).abs() < 1e-5);
    assert_eq!(certify_coherence(&trine_recs, 3, 0.01).unwrap(), CoherenceVerdict::Coherent);

    let classical = run(&classical_opt(3), 3, N, 32);
    let r = certify_quantumness(&classical, 3, 0.01).unwrap();
    assert_eq!(r.quantumness_verdict, QuantumnessVerdict::NotCertified);
    assert_eq!(r.coherence_verdict, CoherenceVerdict::NotCertified);

    let noisy = run(&Strategy::quantum(trine(), 0.8).unwrap(), 3, N, 33);
    let r = certify_quantumness(&noisy, 3, 0.01).unwrap();
    assert!((r.witness_value - 0.5866).abs() < 0.01);
    assert_eq!(r.quantumness_verdict, QuantumnessVerdict::NotCertified);
}

#[test]
fn exact_frequencies_reproduce_theory() {
    // Counts whose frequencies round the exact cells to 1e-6.
    const PER_CELL: u64 = 1_000_000;
    for (st, d) in [
        (Strategy::quantum(trine(), 0.0).unwrap(), 3),
        (classical_opt(3), 3),
        (Strategy::quantum(tetrad(), 0.0).unwrap(), 4),
    ] {
        let spec = GameSpec::canonical(d).unwrap();
        let m = success_matrix(&st, &spec).unwrap();
        let mut counts = pairguess::CellCounts::new(d).unwrap();
        for (i, j, p) in m.iter() {
            let other = spec.partner(i, j).unwrap();
            let hit = RoundRecord { round: 0, x: i, j, guess: i };
            let miss = RoundRecord { guess: other, ..hit };
            let hits = (p * PER_CELL as f64).round() as u64;
            for k in 0..PER_CELL {
                let rec = if k < hits { hit } else { miss };
                counts.add(&rec, String::new).unwrap();
            }
        }
        let exact_avg = average_success(&m, &spec);
        let w = witness_value(&counts, &spec).unwrap();
        assert!((w - exact_avg).abs() < 1e-6, "d={d}: {w}");
        let bound = balanced_partition_optimum(d, 2).unwrap();
        let verdict = report_from_counts(&counts, 0.01).unwrap().quantumness_verdict;
        assert_eq!(verdict == QuantumnessVerdict::Quantum, exact_avg > bound + 1e-9, "d={d}");
    }
}

#[test]
fn counts_equivariant_under_relabeling() {
    // Swap values 1 and 2 in d = 3; S_2 = {1,3} and S_3 = {2,3} trade places.
    let recs = run(&Strategy::quantum(trine(), 0.1).unwrap(), 3, 5_000, 41);
    let swap = |v: usize| match v {
        1 => 2,
        2 => 1,
        v => v,
    };
    let swap_set = |j: usize| match j {
        2 => 3,
        3 => 2,
        j => j,
    };
    let relabeled: Vec<_> = recs
        .iter()
        .map(|r| RoundRecord { x: swap(r.x), j: swap_set(r.j), guess: swap(r.guess), ..*r })
        .collect();
    let a = empirical_matrix(&recs, 3).unwrap();
    let b = empirical_matrix(&relabeled, 3).unwrap();
    for (i, j, n, s) in a.iter() {
        assert_eq!(b.get(swap(i), swap_set(j)), Some((n, s)));
    }
}
