"""Smoke test for the rydrep extension module.

Build it first, either with `maturin develop -m crates/py/Cargo.toml` or with
`cargo build --release -p rydrep-py`; in the second case the shared library is
picked up from target/ and loaded under the name `rydrep`.
"""

import importlib.util
import math
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load():
    try:
        import rydrep

        return rydrep
    except ImportError:
        pass
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "librydrep_py.so"
        if lib.exists():
            tmp = Path(tempfile.mkdtemp()) / "rydrep.so"
            shutil.copy(lib, tmp)
            spec = importlib.util.spec_from_file_location("rydrep", tmp)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            return module
    sys.exit("rydrep extension not built; run `cargo build --release -p rydrep-py`")


def main():
    rr = load()

    noise = rr.NoiseParams()
    budget = rr.p0(noise)
    assert abs(budget["eta_t"] - 0.01062) < 1e-4, budget
    assert abs(budget["p0"] - 0.0100) < 5e-4, budget
    assert abs(rr.p1(10, noise) - 0.713) < 0.005
    n_bar, n_max, tail = rr.n_bar(0.01, 10)
    assert abs(n_bar - 455) < 1 and n_bar >= 2 * n_max and tail < 1e-9
    assert abs(rr.total_time(rr.ChainParams()) - 0.32) < 0.01
    assert abs(rr.direct_time(1000, 22, 1e10) / 5.5e9 - 1) < 0.1
    assert abs(sum(rr.p_k(n, 3, 0.3) for n in range(1, 200)) - 1) < 1e-12

    perfect = rr.NoiseParams.perfect()
    state = rr.run_generation_sequence(rr.LinkState.initial(), perfect)
    assert state.status() == "live"
    assert state.overlap(rr.LinkState.target()) > 1 - 1e-12
    assert rr.LinkState.parse(state.dump()).overlap(state) > 1 - 1e-12

    out = rr.attempt_link(perfect, seed=1)
    assert out["success"] and out["verdict"] == "accept_B1", out

    csv = rr.run_link_trials(rr.NoiseParams(l0_km=10.0), 2000, 3)
    lines = csv.splitlines()
    assert lines[0] == "round,verdict,failure_cause,elapsed_s" and len(lines) == 2001

    gate = rr.swap_gate_matrix()
    assert abs(sum(abs(x) ** 2 for row in gate for x in row) - 4) < 1e-12
    label, correction, fidelity, prob = rr.swap_oracle(3, [(1, 1)])
    assert (label, correction) == ("Psi-", "ZX") and fidelity > 1 - 1e-12
    assert math.isclose(prob, 0.25)

    run = rr.run_end_to_end(rr.ChainParams(n_nodes=6, p0=0.2), 2000, seed=5)
    again = rr.run_end_to_end(rr.ChainParams(n_nodes=6, p0=0.2), 2000, seed=5)
    assert run["csv"] == again["csv"]
    assert run["mean_protocol_repeats"] >= 1

    try:
        rr.NoiseParams(eta_ion=2.0)
    except ValueError:
        pass
    else:
        raise AssertionError("eta_ion = 2 accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
