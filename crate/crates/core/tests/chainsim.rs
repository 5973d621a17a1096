use rydrep::analytics::{self, p_k};
use rydrep::chainsim::{
    all_outcomes, run_end_to_end, run_phase, run_swapping, swap_oracle, BellLabel, Moments, SimMode,
};
use rydrep::linkprotocol::coded_success_probability;
use rydrep::rng::trial_rng;
use rydrep::{ChainParams, NoiseParams, Schedule};

fn with_p0(n_nodes: usize, p0: f64) -> ChainParams {
    ChainParams {
        n_nodes,
        p0_override: Some(p0),
        ..ChainParams::default()
    }
}

#[test]
fn exhaustive_swap_oracle() {
    for n in 3..=5 {
        let outcomes = all_outcomes(n);
        assert_eq!(outcomes.len(), 1 << (2 * (n - 2)));
        let mut total = 0.0;
        for o in &outcomes {
            let r = swap_oracle(n, o).unwrap();
            assert!(r.fidelity >= 1.0 - 1e-12, "N={n} {o:?}");
            assert_eq!(r.label, BellLabel::from_pauli(r.correction), "N={n} {o:?}");
            // uniform measurement bits
            assert!((r.probability - 0.25f64.powi((n - 2) as i32)).abs() < 1e-12);
            total += r.probability;
        }
        assert!((total - 1.0).abs() < 1e-12);
    }
}

#[test]
fn round_counts_follow_max_of_geometrics() {
    let trials = 100_000u64;
    for &k in &[2usize, 5] {
        for &p0 in &[0.1, 0.3] {
            let params = with_p0(2 * k, p0);
            let mut counts = vec![0u64; 400];
            for t in 0..trials {
                let r = run_phase(k, &params, SimMode::Fast, &mut trial_rng(31, t)).unwrap();
                counts[(r.rounds as usize).min(399)] += 1;
            }
            for (n, &c) in counts.iter().enumerate().skip(1).take(60) {
                let prob = p_k(n as u64, k, p0);
                let expected = trials as f64 * prob;
                let sigma = (expected * (1.0 - prob)).sqrt().max(1.0);
                assert!(
                    (c as f64 - expected).abs() <= 4.0 * sigma,
                    "K={k} p0={p0} n={n}: {c} vs {expected:.1}"
                );
            }
        }
    }
}

#[test]
fn swap_success_matches_p1() {
    let trials = 1_000_000u64;
    for &n in &[3usize, 10] {
        let params = ChainParams {
            n_nodes: n,
            ..ChainParams::default()
        };
        let mut rng = trial_rng(32, n as u64);
        let ok = (0..trials)
            .filter(|_| run_swapping(&params, &mut rng).unwrap().swap_ok)
            .count() as f64;
        let p = analytics::p1(n, &params.noise).unwrap();
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        assert!((ok - trials as f64 * p).abs() <= 3.0 * sigma, "N={n}: {ok} vs {p}");
    }
    let ten = analytics::p1(10, &NoiseParams::default()).unwrap();
    assert!((ten - 0.713).abs() < 0.001, "{ten}");
}

#[test]
fn trivial_swaps() {
    let mut rng = trial_rng(33, 0);
    let two = ChainParams {
        n_nodes: 2,
        ..ChainParams::default()
    };
    let perfect = ChainParams {
        noise: NoiseParams::perfect(),
        ..ChainParams::default()
    };
    for _ in 0..1000 {
        let r = run_swapping(&two, &mut rng).unwrap();
        assert!(r.swap_ok && r.outcomes.is_empty());
        let r = run_swapping(&perfect, &mut rng).unwrap();
        assert!(r.swap_ok);
        assert_eq!(r.outcomes.len(), 8);
    }
}

#[test]
fn mean_time_matches_closed_form() {
    for &n in &[4usize, 8, 16] {
        for &p0 in &[0.1, 0.3] {
            let params = with_p0(n, p0);
            let run = run_end_to_end(&params, SimMode::Fast, 20_000, 34).unwrap();
            let formula = analytics::total_time(&params).unwrap();
            let ratio = run.summary.total_time.mean / formula;
            assert!((ratio - 1.0).abs() < 0.03, "N={n} p0={p0}: ratio {ratio}");
        }
    }
}

#[test]
fn default_chain_takes_about_a_third_of_a_second() {
    let run = run_end_to_end(&ChainParams::default(), SimMode::Fast, 20_000, 35).unwrap();
    let t = run.summary.total_time.mean;
    assert!((t / 0.32 - 1.0).abs() < 0.05, "{t}");
}

#[test]
fn records_respect_the_time_floor() {
    let params = with_p0(6, 0.2);
    let run = run_end_to_end(&params, SimMode::Fast, 2_000, 36).unwrap();
    let slot = params.noise.segment_time();
    for r in &run.records {
        assert!(r.swap_ok && r.protocol_repeats >= 1);
        assert!(r.total_time >= r.rounds() as f64 * slot * (1.0 - 1e-12));
        assert!(r.rounds_phase1 >= r.protocol_repeats && r.rounds_phase2 >= r.protocol_repeats);
    }
}

#[test]
fn time_is_monotone_in_p0_and_eta_ion() {
    let mean_and_err = |params: &ChainParams, seed: u64| {
        let run = run_end_to_end(params, SimMode::Fast, 4_000, seed).unwrap();
        let m: Moments = run.summary.total_time;
        (m.mean, m.std_error(4_000))
    };
    for &eta in &[0.9, 0.95, 0.99] {
        let mut last: Option<(f64, f64)> = None;
        for &p0 in &[0.05, 0.1, 0.2, 0.4] {
            let mut params = with_p0(8, p0);
            params.noise.eta_ion = eta;
            let cur = mean_and_err(&params, 37);
            if let Some(prev) = last {
                assert!(cur.0 <= prev.0 + 3.0 * (cur.1 + prev.1), "eta={eta} p0={p0}");
            }
            last = Some(cur);
        }
    }
    for &p0 in &[0.1, 0.3] {
        let mut last: Option<(f64, f64)> = None;
        for &eta in &[0.8, 0.9, 0.95, 0.99, 1.0] {
            let mut params = with_p0(8, p0);
            params.noise.eta_ion = eta;
            let cur = mean_and_err(&params, 38);
            if let Some(prev) = last {
                assert!(cur.0 <= prev.0 + 3.0 * (cur.1 + prev.1), "p0={p0} eta={eta}");
            }
            last = Some(cur);
        }
    }
}

#[test]
fn fast_and_faithful_agree() {
    // a short link keeps faithful mode cheap
    let noise = NoiseParams {
        l0_km: 10.0,
        ..NoiseParams::default()
    };
    let faithful = ChainParams {
        n_nodes: 4,
        noise,
        ..ChainParams::default()
    };
    let fast = ChainParams {
        p0_override: Some(coded_success_probability(&noise).unwrap()),
        ..faithful
    };
    let trials = 3_000;
    let a = run_end_to_end(&faithful, SimMode::Faithful, trials, 39).unwrap().summary;
    let b = run_end_to_end(&fast, SimMode::Fast, trials, 40).unwrap().summary;
    let err = a.rounds.std_error(trials) + b.rounds.std_error(trials);
    assert!((a.rounds.mean - b.rounds.mean).abs() <= 3.0 * err, "{} vs {}", a.rounds.mean, b.rounds.mean);
    let err = a.protocol_repeats.std_error(trials) + b.protocol_repeats.std_error(trials);
    assert!((a.protocol_repeats.mean - b.protocol_repeats.mean).abs() <= 3.0 * err);
}

#[test]
fn physical_schedule_uses_every_link_once() {
    let params = ChainParams {
        n_nodes: 7,
        schedule: Schedule::Physical,
        p0_override: Some(1.0),
        noise: NoiseParams::perfect(),
        ..ChainParams::default()
    };
    assert_eq!(params.phase_link_counts(), (3, 3));
    let run = run_end_to_end(&params, SimMode::Fast, 10, 41).unwrap();
    for r in &run.records {
        assert_eq!((r.rounds_phase1, r.rounds_phase2), (1, 1));
        assert!((r.total_time - 2.0 * params.noise.segment_time()).abs() < 1e-15);
    }
}

#[test]
fn runs_are_reproducible() {
    let params = with_p0(6, 0.2);
    let a = run_end_to_end(&params, SimMode::Fast, 500, 42).unwrap();
    let b = run_end_to_end(&params, SimMode::Fast, 500, 42).unwrap();
    let c = run_end_to_end(&params, SimMode::Fast, 500, 43).unwrap();
    assert_eq!(a.records, b.records);
    assert_ne!(a.records, c.records);
}
