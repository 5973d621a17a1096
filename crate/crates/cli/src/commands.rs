use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rydrep::analytics::{self, fig3_series, fig_a1_series, fig_a2_series};
use rydrep::chainsim::{
    all_outcomes, run_end_to_end, swap_gate_matrix, swap_gate_matrix_with, swap_oracle_with_gate, BellLabel,
    SimMode, P_LR_DIAGONAL,
};
use rydrep::linkprotocol::{
    coded_success_probability, expected_generation_states, generation_target, generation_trace, run_diagnosis,
    run_link_trials, verdict, FailureCause, LinkTrialRecord, Verdict,
};
use rydrep::record::{fmt_float, to_csv};
use rydrep::rng::trial_rng;
use rydrep::statevec::{new_link_state, overlap};
use rydrep::NoiseParams;
use toml::{Table, Value};

use crate::config::{summary_document, Level, RunConfig};
use crate::error::CliError;

/// Node count of the time-versus-distance curves.
pub const FIG3_NODES: usize = 16;
/// Chain length grid of the time-versus-distance curves, km.
pub const FIG3_LENGTHS_KM: (u32, u32, u32) = (50, 2000, 50);
/// K of the round-count distribution plot.
pub const FIG_A1_K: usize = 1000;
pub const FIG_P0S: [f64; 3] = [0.1, 0.2, 0.3];

const STEP_NAMES: [&str; 13] = [
    "initial", "step i", "step ii", "step iii", "step iv", "step v", "step vi", "step vii", "step viii", "step ix",
    "step x", "step xi", "step xii",
];

fn io<T>(path: &Path, r: std::io::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::io(path, e))
}

fn out_io<T>(r: std::io::Result<T>) -> Result<T, CliError> {
    io(Path::new("<stdout>"), r)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    io(path, std::fs::write(path, text))
}

fn float(t: &mut Table, key: &str, v: f64) {
    t.insert(key.into(), Value::Float(v));
}

fn int(t: &mut Table, key: &str, v: u64) {
    t.insert(key.into(), Value::Integer(v as i64));
}

/// (observed − expected) / standard error.
fn z_score(observed: f64, expected: f64, std_error: f64) -> f64 {
    if std_error > 0.0 {
        (observed - expected) / std_error
    } else if observed == expected {
        0.0
    } else {
        f64::INFINITY.copysign(observed - expected)
    }
}

fn binomial_z(successes: usize, trials: usize, p: f64) -> f64 {
    let n = trials as f64;
    z_score(successes as f64 / n, p, (p * (1.0 - p) / n).sqrt())
}

pub fn analytics(config: &RunConfig, out: Option<&Path>, w: &mut dyn Write) -> Result<(), CliError> {
    let params = config.chain_params()?;
    let budget = analytics::p0(&params.noise)?;
    let p0 = analytics::chain_p0(&params)?;
    let rounds = analytics::n_bar(p0, params.n_nodes)?;
    let mut r = Table::new();
    float(&mut r, "eta_t", budget.eta_t);
    float(&mut r, "decay_factor", budget.p_no_decay);
    float(&mut r, "eta_ion4", budget.p_ion4);
    int(&mut r, "n_r", budget.n_r.into());
    float(&mut r, "p0_budget", budget.p0);
    float(&mut r, "p0", p0);
    float(&mut r, "p1", analytics::p1(params.n_nodes, &params.noise)?);
    float(&mut r, "n_bar", rounds.n_bar);
    float(&mut r, "n_max", rounds.n_max);
    float(&mut r, "n_bar_tail_bound", rounds.tail_bound);
    float(&mut r, "segment_time_s", params.noise.segment_time());
    float(&mut r, "total_time_s", analytics::total_time(&params)?);
    let l_att = params.noise.l_att_km;
    float(&mut r, "total_length_km", params.total_length_km());
    float(&mut r, "direct_time_s", analytics::direct_time(params.total_length_km(), l_att, params.chi_r)?);
    // N·L₀, the rounded length the 5.5e9 s comparison refers to
    let rounded = params.n_nodes as f64 * params.noise.l0_km;
    float(&mut r, "direct_time_n_l0_s", analytics::direct_time(rounded, l_att, params.chi_r)?);
    if let Some(path) = out {
        let mut csv = String::from("quantity,value\n");
        for (k, v) in &r {
            let v = match v {
                Value::Float(x) => fmt_float(*x),
                other => other.to_string(),
            };
            csv.push_str(&format!("{k},{v}\n"));
        }
        write_file(path, &csv)?;
    }
    out_io(w.write_all(summary_document(config, r).as_bytes()))
}

/// One named pass/fail line.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// All noiseless checks. Transmission and noise settings of the config play
/// no part: the replay runs with perfect parameters.
pub fn verification_checks(flip_plr_sign: bool) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    let perfect = NoiseParams::perfect();
    let trace = generation_trace(&new_link_state(), &perfect, &mut trial_rng(0, 0))?;
    for ((name, got), want) in STEP_NAMES.iter().zip(&trace).zip(expected_generation_states()) {
        let f = overlap(got, &want);
        checks.push(Check::new(format!("generation {name}"), f >= 1.0 - 1e-12, format!("overlap {f:.15}")));
    }
    let (after, result) = run_diagnosis(&generation_target(), &perfect, &mut trial_rng(0, 1))?;
    let f = overlap(&after, &generation_target());
    checks.push(Check::new(
        "diagnosis of the generated link",
        result.verdict == Verdict::AcceptB1 && f >= 1.0 - 1e-12,
        format!("verdict {}, overlap {f:.15}", result.verdict.name()),
    ));
    for case in 0..16u8 {
        let bits = [case & 8 != 0, case & 4 != 0, case & 2 != 0, case & 1 != 0];
        let expected = if bits[0] || bits[1] {
            Verdict::RetryA
        } else if bits[2] && bits[3] {
            Verdict::AcceptB1
        } else {
            Verdict::RetryB2
        };
        let got = verdict(bits[0], bits[1], bits[2], bits[3]);
        checks.push(Check::new(
            format!("verdict rA=({},{}) 1A=({},{})", bits[0] as u8, bits[1] as u8, bits[2] as u8, bits[3] as u8),
            got == expected,
            format!("got {}, expected {}", got.name(), expected.name()),
        ));
    }
    let gate = if flip_plr_sign {
        let mut d = P_LR_DIAGONAL;
        d[3] = -d[3];
        swap_gate_matrix_with(d)
    } else {
        swap_gate_matrix()
    };
    for n in [3usize, 4] {
        for outcomes in all_outcomes(n) {
            let name = format!("swap N={n} outcomes {outcomes:?}");
            match swap_oracle_with_gate(n, &outcomes, &gate) {
                Ok(r) => checks.push(Check::new(
                    name,
                    r.label == BellLabel::from_pauli(r.correction),
                    format!("label {}, correction {}, fidelity {:.15}", r.label, r.correction, r.fidelity),
                )),
                Err(e) => checks.push(Check::new(name, false, e.to_string())),
            }
        }
    }
    Ok(checks)
}

pub fn verify(flip_plr_sign: bool, w: &mut dyn Write) -> Result<(), CliError> {
    let checks = verification_checks(flip_plr_sign)?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    for c in &checks {
        if c.passed {
            out_io(writeln!(w, "PASS {}", c.name))?;
        } else {
            out_io(writeln!(w, "FAIL {}: {}", c.name, c.detail))?;
        }
    }
    out_io(writeln!(w, "{} checks, {} failed", checks.len(), failed))?;
    if failed > 0 {
        return Err(CliError::Verification { failed });
    }
    Ok(())
}

fn summary_path(csv: &Path) -> PathBuf {
    csv.with_extension("summary.toml")
}

pub fn simulate(
    config: &RunConfig,
    out: Option<&Path>,
    threads: Option<usize>,
    w: &mut dyn Write,
) -> Result<(), CliError> {
    config.validate()?;
    // fail on an unwritable path before spending time on the run
    let csv_file = match out {
        Some(path) => Some((path, io(path, File::create(path))?)),
        None => None,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?;
    let (csv, results) = pool.install(|| match config.level()? {
        Level::Link => simulate_link(config),
        Level::Chain => simulate_chain(config),
    })?;
    let summary = summary_document(config, results);
    if let Some((path, file)) = csv_file {
        let mut f = BufWriter::new(file);
        io(path, f.write_all(csv.as_bytes()).and_then(|_| f.flush()))?;
        write_file(&summary_path(path), &summary)?;
    }
    out_io(w.write_all(summary.as_bytes()))
}

fn simulate_link(config: &RunConfig) -> Result<(String, Table), CliError> {
    let noise = config.noise();
    let records = run_link_trials(&noise, config.trials, config.seed)?;
    let n = records.len();
    let successes = records.iter().filter(|r| r.success()).count();
    let coded = coded_success_probability(&noise)?;
    let budget = analytics::p0(&noise)?.p0;
    let rate = successes as f64 / n as f64;
    let count = |c: FailureCause| records.iter().filter(|r| r.failure_cause == Some(c)).count() as u64;
    let mut r = Table::new();
    int(&mut r, "trials", n as u64);
    int(&mut r, "successes", successes as u64);
    float(&mut r, "success_rate", rate);
    float(&mut r, "coded_success_probability", coded);
    float(&mut r, "z_vs_coded", binomial_z(successes, n, coded));
    float(&mut r, "analytic_p0", budget);
    float(&mut r, "relative_to_analytic_p0", rate / budget - 1.0);
    for c in [FailureCause::Fiber, FailureCause::Decay, FailureCause::DiagnosisB2, FailureCause::FalseAccept] {
        int(&mut r, &format!("failures_{}", c.name()), count(c));
    }
    float(&mut r, "mean_elapsed_s", records.iter().map(|x| x.elapsed).sum::<f64>() / n as f64);
    Ok((to_csv::<LinkTrialRecord>(&records), r))
}

fn simulate_chain(config: &RunConfig) -> Result<(String, Table), CliError> {
    let params = config.chain_params()?;
    let mode: SimMode = config.mode()?;
    let run = run_end_to_end(&params, mode, config.trials, config.seed)?;
    let s = run.summary;
    let n = s.trials;
    let p0 = match mode {
        SimMode::Fast => analytics::chain_p0(&params)?,
        SimMode::Faithful => coded_success_probability(&params.noise)?,
    };
    let n_bar = analytics::n_bar(p0, params.n_nodes)?.n_bar;
    let p1 = analytics::p1(params.n_nodes, &params.noise)?;
    let formula_time = params.noise.segment_time() * n_bar / p1;
    let mut r = Table::new();
    int(&mut r, "trials", n as u64);
    float(&mut r, "link_p0", p0);
    float(&mut r, "mean_rounds_phase1", s.rounds_phase1.mean);
    float(&mut r, "mean_rounds_phase2", s.rounds_phase2.mean);
    float(&mut r, "mean_rounds", s.rounds.mean);
    float(&mut r, "rounds_per_repeat", s.rounds_per_repeat);
    float(&mut r, "rounds_per_repeat_std_error", s.rounds_per_repeat_error);
    float(&mut r, "n_bar", n_bar);
    float(&mut r, "z_rounds_per_repeat", z_score(s.rounds_per_repeat, n_bar, s.rounds_per_repeat_error));
    float(&mut r, "mean_protocol_repeats", s.protocol_repeats.mean);
    float(&mut r, "expected_protocol_repeats", 1.0 / p1);
    float(
        &mut r,
        "z_protocol_repeats",
        z_score(s.protocol_repeats.mean, 1.0 / p1, ((1.0 - p1) / (p1 * p1 * n as f64)).sqrt()),
    );
    float(&mut r, "mean_total_time_s", s.total_time.mean);
    float(&mut r, "total_time_std_error_s", s.total_time.std_error(n));
    float(&mut r, "formula_total_time_s", formula_time);
    float(&mut r, "time_ratio", s.total_time.mean / formula_time);
    Ok((to_csv(&run.records), r))
}

/// Writes fig3.csv, fig_a1.csv and fig_a2.csv into `dir`.
pub fn figures(config: &RunConfig, dir: &Path, w: &mut dyn Write) -> Result<(), CliError> {
    let params = config.chain_params()?;
    io(dir, std::fs::create_dir_all(dir))?;
    let (start, stop, step) = FIG3_LENGTHS_KM;
    let grid: Vec<f64> = (start..=stop).step_by(step as usize).map(f64::from).collect();
    let fig3 = fig3_series(FIG3_NODES, &grid, &params)?;
    let mut csv = String::from("l_km,log10_direct_time_s,log10_protocol_time_s\n");
    for ((l, direct), (_, protocol)) in fig3.direct.iter().zip(&fig3.protocol) {
        csv.push_str(&format!("{},{},{}\n", fmt_float(*l), fmt_float(*direct), fmt_float(*protocol)));
    }
    let mut written = vec![("fig3.csv", csv)];

    let mut csv = String::from("p0,n,p_k\n");
    for p0 in FIG_P0S {
        for (n, p) in fig_a1_series(FIG_A1_K, p0) {
            csv.push_str(&format!("{},{n},{}\n", fmt_float(p0), fmt_float(p)));
        }
    }
    written.push(("fig_a1.csv", csv));

    let nodes: Vec<usize> = (2..=100).step_by(2).collect();
    let mut csv = String::from("p0,n_nodes,n_bar,twice_n_max\n");
    for p0 in FIG_P0S {
        for (n, n_bar, twice_max) in fig_a2_series(p0, &nodes)? {
            csv.push_str(&format!("{},{n},{},{}\n", fmt_float(p0), fmt_float(n_bar), fmt_float(twice_max)));
        }
    }
    written.push(("fig_a2.csv", csv));

    for (name, csv) in written {
        let path = dir.join(name);
        write_file(&path, &csv)?;
        out_io(writeln!(w, "wrote {} ({} rows)", path.display(), csv.lines().count() - 1))?;
    }
    Ok(())
}
