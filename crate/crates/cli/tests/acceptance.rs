//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rydrep::analytics::{self, fig_a2_series, p_k, s_k};
use rydrep::chainsim::{all_outcomes, run_end_to_end, run_swapping, swap_oracle, BellLabel, SimMode};
use rydrep::linkprotocol::{
    coded_success_probability, expected_generation_states, generation_trace, run_link_trials, verdict, Verdict,
};
use rydrep::rng::trial_rng;
use rydrep::statevec::{new_link_state, overlap};
use rydrep::{ChainParams, NoiseParams};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn closed_form() -> Outcome {
    let budget = analytics::p0(&NoiseParams::default()).unwrap();
    let ok = within(budget.eta_t, 0.01057, 0.0005)
        && within(budget.p_no_decay, 0.9885, 0.0005)
        && within(budget.p_ion4, 0.9606, 0.0005)
        && within(budget.p0, 0.0100, 0.0005);
    outcome(
        ok,
        format!(
            "eta_t={:.5} decay={:.4} eta_ion^4={:.4} P0={:.5}",
            budget.eta_t, budget.p_no_decay, budget.p_ion4, budget.p0
        ),
    )
}

fn swap_probability() -> Outcome {
    let p1 = analytics::p1(10, &NoiseParams::default()).unwrap();
    outcome(within(p1, 0.713, 0.005), format!("P1(10)={p1:.4}"))
}

fn round_count() -> Outcome {
    let s = analytics::n_bar(0.01, 10).unwrap();
    outcome(within(s.n_bar, 455.0, 1.0), format!("n_bar={:.2} (tail bound {:.1e})", s.n_bar, s.tail_bound))
}

fn timing() -> Outcome {
    let t = analytics::total_time(&ChainParams::default()).unwrap();
    let direct = analytics::direct_time(1000.0, 22.0, 1e10).unwrap();
    outcome(
        within(t, 0.32, 0.01) && within(direct / 5.5e9, 1.0, 0.1),
        format!("T={t:.4} s, direct={direct:.3e} s"),
    )
}

fn generation_replay() -> Outcome {
    let trace = generation_trace(&new_link_state(), &NoiseParams::perfect(), &mut trial_rng(0, 0)).unwrap();
    let worst = trace
        .iter()
        .zip(expected_generation_states())
        .skip(1)
        .map(|(got, want)| overlap(got, &want))
        .fold(1.0f64, f64::min);
    outcome(
        trace.len() == 13 && worst >= 1.0 - 1e-12,
        format!("{} states, worst overlap 1-{:.1e}", trace.len() - 1, 1.0 - worst),
    )
}

fn truth_table() -> Outcome {
    let mut wrong = 0;
    for case in 0..16u8 {
        let [ra, rb, oa, ob] = [case & 8 != 0, case & 4 != 0, case & 2 != 0, case & 1 != 0];
        let expected = match (ra || rb, oa && ob) {
            (true, _) => Verdict::RetryA,
            (false, true) => Verdict::AcceptB1,
            (false, false) => Verdict::RetryB2,
        };
        wrong += usize::from(verdict(ra, rb, oa, ob) != expected);
    }
    outcome(wrong == 0, format!("16 cases, {wrong} wrong"))
}

fn swap_oracle_cases() -> Outcome {
    let mut cases = 0;
    let mut worst = 1.0f64;
    let mut bad = 0;
    for n in 3..=5 {
        for o in all_outcomes(n) {
            cases += 1;
            match swap_oracle(n, &o) {
                Ok(r) => {
                    worst = worst.min(r.fidelity);
                    bad += usize::from(r.label != BellLabel::from_pauli(r.correction));
                }
                Err(_) => bad += 1,
            }
        }
    }
    outcome(
        cases == 4 + 16 + 64 && bad == 0 && worst >= 1.0 - 1e-12,
        format!("{cases} cases, {bad} failed, worst fidelity 1-{:.1e}", 1.0 - worst),
    )
}

fn monte_carlo() -> Outcome {
    // (a) faithful link attempts
    let noise = NoiseParams::default();
    let n = 1_000_000;
    let records = run_link_trials(&noise, n, 8).unwrap();
    let successes = records.iter().filter(|r| r.success()).count() as f64;
    let coded = coded_success_probability(&noise).unwrap();
    let p0 = analytics::p0(&noise).unwrap().p0;
    let rate = successes / n as f64;
    let z_link = (rate - coded) / (coded * (1.0 - coded) / n as f64).sqrt();
    let a = z_link.abs() <= 3.0 && (rate / p0 - 1.0).abs() <= 0.1;

    // (b) fast chain rounds at P0 = 0.01
    let params = ChainParams {
        p0_override: Some(0.01),
        ..ChainParams::default()
    };
    let run = run_end_to_end(&params, SimMode::Fast, 100_000, 9).unwrap().summary;
    let n_bar = analytics::n_bar(0.01, 10).unwrap().n_bar;
    let z_rounds = (run.rounds_per_repeat - n_bar) / run.rounds_per_repeat_error;
    let b = z_rounds.abs() <= 3.0;

    // (c) swapping at N = 10
    let chain = ChainParams::default();
    let p1 = analytics::p1(10, &chain.noise).unwrap();
    let mut rng = trial_rng(10, 0);
    let m = 1_000_000;
    let ok = (0..m).filter(|_| run_swapping(&chain, &mut rng).unwrap().swap_ok).count() as f64;
    let z_swap = (ok / m as f64 - p1) / (p1 * (1.0 - p1) / m as f64).sqrt();
    let c = z_swap.abs() <= 3.0;

    outcome(
        a && b && c,
        format!(
            "(a) rate={rate:.5} coded={coded:.5} z={z_link:.2} vs P0 {:+.1}% (b) rounds={:.2} n_bar={n_bar:.2} z={z_rounds:.2} (c) P1 z={z_swap:.2}",
            100.0 * (rate / p0 - 1.0),
            run.rounds_per_repeat
        ),
    )
}

fn exact_max_of_geometrics(k: usize, p: &BigRational, n_max: usize) -> Vec<BigRational> {
    let zero = || BigRational::from_integer(BigInt::from(0));
    let one = BigRational::from_integer(BigInt::from(1));
    let q = &one - p;
    let mut g = vec![zero(); n_max + 1];
    let mut qm = one;
    for slot in g.iter_mut().skip(1) {
        *slot = p * &qm;
        qm = &qm * &q;
    }
    let mut h = g.clone();
    for _ in 1..k {
        let mut next = vec![zero(); n_max + 1];
        for a in 1..=n_max {
            for b in 1..=n_max {
                let n = a.max(b);
                next[n] = &next[n] + &h[a] * &g[b];
            }
        }
        h = next;
    }
    h
}

fn round_count_identities() -> Outcome {
    let mut worst_norm = 0.0f64;
    for p in [0.01, 0.1, 0.3] {
        for k in 1..=64 {
            let mut total = 0.0;
            let mut n = 0;
            while 1.0 - s_k(n, k, p) > 1e-17 {
                n += 1;
                total += p_k(n, k, p);
            }
            worst_norm = worst_norm.max((total - 1.0).abs());
        }
    }
    let mut worst_rec = 0.0f64;
    for p in [0.01f64, 0.1, 0.3] {
        for k in 2..=64 {
            for n in 1..=500u64 {
                let q = |m: u64| (1.0 - p).powf(m as f64);
                let rhs = p_k(n, k - 1, p) * (1.0 - q(n)) + s_k(n - 1, k - 1, p) * p * q(n - 1);
                worst_rec = worst_rec.max((p_k(n, k, p) - rhs).abs());
            }
        }
    }
    let tol = BigRational::from_float(1e-14).unwrap();
    let mut brute_ok = true;
    // exact decimal P0; the f64 rounding of P0 moves p_K by far less than the tolerance
    for (num, den) in [(3, 10), (1, 10)] {
        let p = num as f64 / den as f64;
        let pr = BigRational::new(BigInt::from(num), BigInt::from(den));
        for k in 1..=4 {
            for (n, e) in exact_max_of_geometrics(k, &pr, 50).iter().enumerate().skip(1) {
                let got = BigRational::from_float(p_k(n as u64, k, p)).unwrap();
                let d = if &got > e { &got - e } else { e - &got };
                brute_ok &= d <= tol;
            }
        }
    }
    let nodes: Vec<usize> = (4..=64).step_by(2).collect();
    let bound_ok = [0.1, 0.2, 0.3]
        .iter()
        .all(|&p| fig_a2_series(p, &nodes).unwrap().iter().all(|(_, nb, m2)| nb >= m2));
    outcome(
        worst_norm <= 1e-12 && worst_rec <= 1e-12 && brute_ok && bound_ok,
        format!(
            "normalization {worst_norm:.1e}, recurrence {worst_rec:.1e}, brute force K<=4 n<=50 {}, n_bar>=2n_max {}",
            if brute_ok { "exact" } else { "MISMATCH" },
            if bound_ok { "holds" } else { "VIOLATED" }
        ),
    )
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("rydrep-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let run = |name: &str, threads: &str| {
        let out = dir.join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_rydrep"))
            .args(["simulate", "--trials", "20000", "--p0", "0.05", "--seed", "11", "--threads", threads])
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap()
            .status;
        assert!(status.success());
        std::fs::read(&out).unwrap()
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "1");
    let c = run("c.csv", "4");
    let _ = std::fs::remove_dir_all(&dir);
    outcome(a == b && a == c, format!("{} bytes, repeat identical {}, 1 vs 4 threads identical {}", a.len(), a == b, a == c))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        ("closed-form link budget", closed_form, Duration::from_secs(1)),
        ("swap success P1(10)", swap_probability, Duration::from_secs(1)),
        ("round count n_bar", round_count, Duration::from_secs(1)),
        ("protocol and direct time", timing, Duration::from_secs(1)),
        ("generation replay", generation_replay, Duration::from_secs(1)),
        ("diagnosis truth table", truth_table, Duration::from_secs(1)),
        ("swap oracle N=3,4,5", swap_oracle_cases, Duration::from_secs(30)),
        ("Monte Carlo vs closed form", monte_carlo, Duration::from_secs(600)),
        ("round-count identities", round_count_identities, Duration::from_secs(10)),
        ("determinism", determinism, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let took = start.elapsed();
        let ok = o.ok && took <= *limit;
        failed += usize::from(!ok);
        println!(
            "{} {:>2} {name}: {} [{:.2} s, limit {} s]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            took.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
