//! Episode-level behaviour of the intervention protocols.

use hanoi_help::experiment::{
    child_rng, evaluate, random_baseline, run_episode, run_experiment, run_experiment_with_workers,
    train, ExperimentConfig,
};
use hanoi_help::expert_policy::{compute_distances, value_iteration};
use hanoi_help::hanoi_env::{all_moves, HanoiState};
use hanoi_help::interventions::{InterventionPolicy, THRESHOLD_SWEEP};
use hanoi_help::{AgentParams, QTable};

fn optimal_table() -> QTable {
    let oracle = value_iteration(0.8, 1e-12);
    let mut q = QTable::new();
    for &m in all_moves() {
        q.set(m.from, m.to, oracle.get(m)).unwrap();
    }
    q
}

fn cfg(policy: InterventionPolicy) -> ExperimentConfig {
    ExperimentConfig {
        master_seed: 7,
        ..ExperimentConfig::with_policy(policy)
    }
}

#[test]
fn untrained_solo_play_takes_order_hundred_moves() {
    let c = cfg(InterventionPolicy::NoHelp);
    let mut rng = child_rng(7, 0, 0);
    let n = 1000;
    let total: usize = (0..n)
        .map(|_| run_episode(&mut QTable::new(), &c, false, &mut rng))
        .inspect(|log| assert!(!log.truncated))
        .map(|log| log.total_moves)
        .sum();
    let mean = total as f64 / n as f64;
    assert!((30.0..=300.0).contains(&mean), "mean {mean}");
}

#[test]
fn converged_greedy_play_is_optimal() {
    let c = ExperimentConfig {
        eval_epsilon_active: false,
        ..cfg(InterventionPolicy::NoHelp)
    };
    let mut q = optimal_table();
    let log = run_episode(&mut q, &c, false, &mut child_rng(7, 0, 1));
    assert_eq!(log.total_moves, 7);
    assert_eq!(log.expert_moves, 0);
}

#[test]
fn solo_training_finds_the_seven_move_path() {
    let c = cfg(InterventionPolicy::NoHelp);
    let optimal = (0..100)
        .filter(|&r| {
            let t = train(&c, 1000, &mut child_rng(7, 1000, r));
            t.table.greedy_path_len(HanoiState::START, 100) == Some(7)
        })
        .count();
    assert!(optimal >= 95, "{optimal}/100");
}

#[test]
fn solo_training_values_stay_bounded_and_below_optimum() {
    let c = cfg(InterventionPolicy::NoHelp);
    let oracle = value_iteration(0.8, 1e-12);
    let mut q = QTable::new();
    let mut rng = child_rng(7, 0, 2);
    for _ in 0..500 {
        run_episode(&mut q, &c, true, &mut rng);
        for (from, to, v) in q.iter() {
            assert!((0.0..=100.0).contains(&v));
            assert!(v <= oracle.q(from, to).unwrap() + 1e-12);
        }
    }
}

#[test]
fn untrained_evaluation_levels() {
    let solo = cfg(InterventionPolicy::NoHelp);
    let helped = cfg(InterventionPolicy::Canonical { period: 2 });
    let q = QTable::new();
    let mean_over = |c: &ExperimentConfig| {
        (0..200)
            .map(|r| evaluate(&q, c, &mut child_rng(7, 0, r)).moves)
            .sum::<f64>()
            / 200.0
    };
    let alone = mean_over(&solo);
    let with_expert = mean_over(&helped);
    assert!((30.0..=300.0).contains(&alone), "{alone}");
    assert!((5.0..=30.0).contains(&with_expert), "{with_expert}");
}

/// Expert moves a converged agent still requests along the optimal path:
/// states at distance d carry best value 100 * 0.8^(d-1).
fn ladder_count(threshold: f64) -> usize {
    (1..=7)
        .filter(|&d| 100.0 * 0.8f64.powi(d - 1) < threshold)
        .count()
}

#[test]
fn converged_agent_asks_only_below_its_value_ladder() {
    let q = optimal_table();
    for threshold in THRESHOLD_SWEEP.into_iter().chain([0.0, 26.3, 100.0]) {
        let c = ExperimentConfig {
            eval_epsilon_active: false,
            ..cfg(InterventionPolicy::AskForHelp { threshold })
        };
        let e = evaluate(&q, &c, &mut child_rng(7, 0, 3));
        assert_eq!(e.moves, 7.0);
        assert_eq!(
            e.expert_moves,
            ladder_count(threshold) as f64,
            "threshold {threshold}"
        );
    }
    assert_eq!(ladder_count(10.0), 0);
    assert_eq!(ladder_count(26.0), 0);
    assert_eq!(ladder_count(50.0), 3);
    assert_eq!(ladder_count(80.0), 5);
}

#[test]
fn zero_table_with_any_positive_threshold_is_expert_play() {
    for threshold in [0.5, 10.0, 50.0, 100.0] {
        let c = cfg(InterventionPolicy::AskForHelp { threshold });
        let mut rng = child_rng(7, 0, 4);
        for _ in 0..50 {
            let log = run_episode(&mut QTable::new(), &c, false, &mut rng);
            assert!(log.total_moves <= 7);
            assert_eq!(log.expert_moves, log.total_moves);
        }
    }
}

#[test]
fn expert_path_matches_distances() {
    let d = compute_distances();
    let c = cfg(InterventionPolicy::AskForHelp { threshold: 50.0 });
    let log = run_episode(&mut QTable::new(), &c, false, &mut child_rng(7, 0, 5));
    for step in &log.moves {
        assert_eq!(d.get(step.successor) + 1, d.get(step.state));
    }
}

#[test]
fn random_baselines() {
    let alone = random_baseline(false, 100, 3);
    let helped = random_baseline(true, 100, 3);
    assert!(
        (30.0..=300.0).contains(&alone.mean_moves),
        "{}",
        alone.mean_moves
    );
    assert_eq!(helped.truncated_episodes, 0);
    assert_eq!(alone.truncated_episodes, 0);
    // one-sided 95% comparison of two means
    let se = (alone.stddev_moves.powi(2) / 100.0 + helped.stddev_moves.powi(2) / 100.0).sqrt();
    assert!(alone.mean_moves - helped.mean_moves > 1.645 * se);
    assert_eq!(random_baseline(true, 100, 3), helped);
}

#[test]
fn canonical_expert_share_is_bounded_by_period() {
    for period in [2, 3, 4] {
        let c = ExperimentConfig {
            episode_grid: vec![0, 10, 100],
            repetitions: 20,
            ..cfg(InterventionPolicy::Canonical { period })
        };
        for p in run_experiment(&c).unwrap() {
            assert!(p.mean_expert_moves * period as f64 <= p.mean_moves + 1e-9);
            assert!(p.mean_moves >= 7.0);
        }
    }
}

#[test]
fn results_are_independent_of_worker_count() {
    let c = ExperimentConfig {
        episode_grid: vec![1, 30, 300],
        repetitions: 16,
        agent: AgentParams::default(),
        ..cfg(InterventionPolicy::Canonical { period: 2 })
    };
    let one = run_experiment_with_workers(&c, 1).unwrap();
    let three = run_experiment_with_workers(&c, 3).unwrap();
    let many = run_experiment_with_workers(&c, 8).unwrap();
    assert_eq!(one, three);
    assert_eq!(one, many);
}
