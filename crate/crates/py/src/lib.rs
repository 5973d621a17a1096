//! Python bindings. The extension module is called `rydrep`.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use rydrep::chainsim::{self, SimMode};
use rydrep::linkprotocol::{self, LinkTrialRecord};
use rydrep::record::to_csv;
use rydrep::rng::trial_rng;
use rydrep::statevec::{self, Status};
use rydrep::{analytics, Schedule};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Physical parameters of one link.
#[pyclass(module = "rydrep", from_py_object)]
#[derive(Clone)]
pub struct NoiseParams {
    inner: rydrep::NoiseParams,
}

#[pymethods]
impl NoiseParams {
    #[new]
    #[pyo3(signature = (gamma=None, omega=None, eta_ion=None, l0_km=None, l_att_km=None, c=None, pulse_duration=None))]
    fn new(
        gamma: Option<f64>,
        omega: Option<f64>,
        eta_ion: Option<f64>,
        l0_km: Option<f64>,
        l_att_km: Option<f64>,
        c: Option<f64>,
        pulse_duration: Option<f64>,
    ) -> PyResult<Self> {
        let d = rydrep::NoiseParams::default();
        let inner = rydrep::NoiseParams {
            gamma: gamma.unwrap_or(d.gamma),
            omega: omega.unwrap_or(d.omega),
            eta_ion: eta_ion.unwrap_or(d.eta_ion),
            l0_km: l0_km.unwrap_or(d.l0_km),
            l_att_km: l_att_km.unwrap_or(d.l_att_km),
            c: c.unwrap_or(d.c),
            pulse_duration: pulse_duration.unwrap_or(d.pulse_duration),
            ..d
        };
        inner.validate().map_err(err)?;
        Ok(NoiseParams { inner })
    }

    /// No decay, no fiber loss, perfect detection.
    #[staticmethod]
    fn perfect() -> Self {
        NoiseParams {
            inner: rydrep::NoiseParams::perfect(),
        }
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.inner.omega
    }

    #[getter]
    fn eta_ion(&self) -> f64 {
        self.inner.eta_ion
    }

    #[getter]
    fn l0_km(&self) -> f64 {
        self.inner.l0_km
    }

    #[getter]
    fn l_att_km(&self) -> f64 {
        self.inner.l_att_km
    }

    #[getter]
    fn c(&self) -> f64 {
        self.inner.c
    }

    #[getter]
    fn omega_over_delta_dd(&self) -> f64 {
        self.inner.omega_over_delta_dd
    }

    #[getter]
    fn pulse_duration(&self) -> f64 {
        self.inner.pulse_duration
    }

    fn transmission(&self) -> f64 {
        self.inner.transmission()
    }

    fn loss_per_pulse(&self) -> f64 {
        self.inner.loss_per_pulse()
    }

    fn segment_time(&self) -> f64 {
        self.inner.segment_time()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

/// Parameters of an N-node chain.
#[pyclass(module = "rydrep", from_py_object)]
#[derive(Clone)]
pub struct ChainParams {
    inner: rydrep::ChainParams,
}

#[pymethods]
impl ChainParams {
    #[new]
    #[pyo3(signature = (n_nodes=10, noise=None, chi_r=1.0e10, p0=None, schedule="symmetric"))]
    fn new(n_nodes: usize, noise: Option<NoiseParams>, chi_r: f64, p0: Option<f64>, schedule: &str) -> PyResult<Self> {
        let inner = rydrep::ChainParams {
            n_nodes,
            noise: noise.map_or_else(rydrep::NoiseParams::default, |n| n.inner),
            chi_r,
            p0_override: p0,
            schedule: schedule.parse::<Schedule>().map_err(PyValueError::new_err)?,
        };
        inner.validate().map_err(err)?;
        Ok(ChainParams { inner })
    }

    #[getter]
    fn n_nodes(&self) -> usize {
        self.inner.n_nodes
    }

    #[getter]
    fn noise(&self) -> NoiseParams {
        NoiseParams { inner: self.inner.noise }
    }

    fn phase_link_counts(&self) -> (usize, usize) {
        self.inner.phase_link_counts()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

/// State vector of one link.
#[pyclass(module = "rydrep", from_py_object)]
#[derive(Clone)]
pub struct LinkState {
    inner: statevec::LinkState,
}

#[pymethods]
impl LinkState {
    /// Both ensembles in the reservoir, cavities empty.
    #[staticmethod]
    fn initial() -> Self {
        LinkState {
            inner: statevec::new_link_state(),
        }
    }

    /// (|0_R>|0_L> + |1_R>|1_L>)/sqrt(2).
    #[staticmethod]
    fn target() -> Self {
        LinkState {
            inner: linkprotocol::generation_target(),
        }
    }

    /// Parses the `label,re,im` dump format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(LinkState {
            inner: statevec::LinkState::parse_dump(text).map_err(err)?,
        })
    }

    fn amplitudes(&self) -> Vec<(String, Complex64)> {
        self.inner.iter().map(|(l, a)| (l.to_string(), *a)).collect()
    }

    fn norm_sqr(&self) -> f64 {
        self.inner.norm_sqr()
    }

    /// "live", "lost:<side>:<cause>" or "reset".
    fn status(&self) -> String {
        match self.inner.status() {
            Status::Live => "live".into(),
            Status::Lost { side, cause } => format!("lost:{side:?}:{cause:?}").to_lowercase(),
            Status::Reset => "reset".into(),
        }
    }

    /// |<other|self>|^2.
    fn overlap(&self, other: &LinkState) -> f64 {
        statevec::overlap(&self.inner, &other.inner)
    }

    fn dump(&self) -> String {
        self.inner.dump()
    }

    fn __len__(&self) -> usize {
        self.inner.support_len()
    }
}

#[pyfunction]
fn eta_t(l0_km: f64, l_att_km: f64) -> PyResult<f64> {
    analytics::eta_t(l0_km, l_att_km).map_err(err)
}

/// Link budget as a dict: eta_t, p_no_decay, p_ion4, p0, n_r.
#[pyfunction]
fn p0<'py>(py: Python<'py>, noise: &NoiseParams) -> PyResult<Bound<'py, PyDict>> {
    let b = analytics::p0(&noise.inner).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("eta_t", b.eta_t)?;
    d.set_item("p_no_decay", b.p_no_decay)?;
    d.set_item("p_ion4", b.p_ion4)?;
    d.set_item("p0", b.p0)?;
    d.set_item("n_r", b.n_r)?;
    Ok(d)
}

#[pyfunction]
fn p1(n_nodes: usize, noise: &NoiseParams) -> PyResult<f64> {
    analytics::p1(n_nodes, &noise.inner).map_err(err)
}

#[pyfunction]
fn p_k(n: u64, k: usize, p0: f64) -> f64 {
    analytics::p_k(n, k, p0)
}

#[pyfunction]
fn s_k(n: u64, k: usize, p0: f64) -> f64 {
    analytics::s_k(n, k, p0)
}

/// Expected rounds over both phases; returns (n_bar, n_max, tail_bound).
#[pyfunction]
fn n_bar(p0: f64, n_nodes: usize) -> PyResult<(f64, f64, f64)> {
    let s = analytics::n_bar(p0, n_nodes).map_err(err)?;
    Ok((s.n_bar, s.n_max, s.tail_bound))
}

#[pyfunction]
fn total_time(params: &ChainParams) -> PyResult<f64> {
    analytics::total_time(&params.inner).map_err(err)
}

#[pyfunction]
fn direct_time(l_total_km: f64, l_att_km: f64, chi_r: f64) -> PyResult<f64> {
    analytics::direct_time(l_total_km, l_att_km, chi_r).map_err(err)
}

/// Generation steps i to xii on `state`, trajectory drawn from stream (seed, trial).
#[pyfunction]
#[pyo3(signature = (state, noise, seed=0, trial=0))]
fn run_generation_sequence(state: &LinkState, noise: &NoiseParams, seed: u64, trial: u64) -> PyResult<LinkState> {
    let out = linkprotocol::run_generation_sequence(&state.inner, &noise.inner, &mut trial_rng(seed, trial))
        .map_err(err)?;
    Ok(LinkState { inner: out })
}

/// One full attempt; returns a dict with success, verdict, failure_cause,
/// elapsed and the final state.
#[pyfunction]
#[pyo3(signature = (noise, seed=0, trial=0))]
fn attempt_link<'py>(py: Python<'py>, noise: &NoiseParams, seed: u64, trial: u64) -> PyResult<Bound<'py, PyDict>> {
    let o = linkprotocol::attempt_link(&noise.inner, &mut trial_rng(seed, trial)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("success", o.success)?;
    d.set_item("verdict", o.verdict.name())?;
    d.set_item("failure_cause", o.failure_cause.map(|c| c.name()))?;
    d.set_item("elapsed", o.elapsed)?;
    d.set_item("state", LinkState { inner: o.state })?;
    Ok(d)
}

/// `trials` attempts as CSV (round,verdict,failure_cause,elapsed_s).
#[pyfunction]
fn run_link_trials(py: Python<'_>, noise: &NoiseParams, trials: usize, seed: u64) -> PyResult<String> {
    let noise = noise.inner;
    let records = py
        .detach(|| linkprotocol::run_link_trials(&noise, trials, seed))
        .map_err(err)?;
    Ok(to_csv::<LinkTrialRecord>(&records))
}

#[pyfunction]
fn coded_success_probability(noise: &NoiseParams) -> PyResult<f64> {
    linkprotocol::coded_success_probability(&noise.inner).map_err(err)
}

/// The 4x4 swap gate, row-major, basis |00>, |01>, |10>, |11>.
#[pyfunction]
fn swap_gate_matrix() -> Vec<Vec<Complex64>> {
    chainsim::swap_gate_matrix().iter().map(|r| r.to_vec()).collect()
}

/// Brute-force swap for 3..=6 nodes; returns (bell_label, correction, fidelity, probability).
#[pyfunction]
fn swap_oracle(n_nodes: usize, outcomes: Vec<(u8, u8)>) -> PyResult<(String, String, f64, f64)> {
    let r = chainsim::swap_oracle(n_nodes, &outcomes).map_err(err)?;
    Ok((r.label.to_string(), r.correction.to_string(), r.fidelity, r.probability))
}

/// End-to-end chain runs; returns a dict of summary means and the trial CSV.
#[pyfunction]
#[pyo3(signature = (params, trials, seed=42, mode="fast"))]
fn run_end_to_end<'py>(
    py: Python<'py>,
    params: &ChainParams,
    trials: usize,
    seed: u64,
    mode: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let mode: SimMode = mode.parse().map_err(PyValueError::new_err)?;
    let p = params.inner;
    let run = py.detach(|| chainsim::run_end_to_end(&p, mode, trials, seed)).map_err(err)?;
    let s = run.summary;
    let d = PyDict::new(py);
    d.set_item("trials", s.trials)?;
    d.set_item("mean_total_time", s.total_time.mean)?;
    d.set_item("var_total_time", s.total_time.variance)?;
    d.set_item("mean_rounds", s.rounds.mean)?;
    d.set_item("rounds_per_repeat", s.rounds_per_repeat)?;
    d.set_item("rounds_per_repeat_error", s.rounds_per_repeat_error)?;
    d.set_item("mean_protocol_repeats", s.protocol_repeats.mean)?;
    d.set_item("csv", to_csv(&run.records))?;
    Ok(d)
}

#[pymodule]
#[pyo3(name = "rydrep")]
fn rydrep_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<NoiseParams>()?;
    m.add_class::<ChainParams>()?;
    m.add_class::<LinkState>()?;
    m.add_function(wrap_pyfunction!(eta_t, m)?)?;
    m.add_function(wrap_pyfunction!(p0, m)?)?;
    m.add_function(wrap_pyfunction!(p1, m)?)?;
    m.add_function(wrap_pyfunction!(p_k, m)?)?;
    m.add_function(wrap_pyfunction!(s_k, m)?)?;
    m.add_function(wrap_pyfunction!(n_bar, m)?)?;
    m.add_function(wrap_pyfunction!(total_time, m)?)?;
    m.add_function(wrap_pyfunction!(direct_time, m)?)?;
    m.add_function(wrap_pyfunction!(run_generation_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(attempt_link, m)?)?;
    m.add_function(wrap_pyfunction!(run_link_trials, m)?)?;
    m.add_function(wrap_pyfunction!(coded_success_probability, m)?)?;
    m.add_function(wrap_pyfunction!(swap_gate_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(swap_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(run_end_to_end, m)?)?;
    Ok(())
}
