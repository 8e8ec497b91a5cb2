"""Smoke test for the pyqbath extension.

Build and install first:
    pip install maturin
    pip install --no-build-isolation -e crates/py
"""

import json
import math

import pyqbath as q


def main():
    fmo = q.ExcitonSystem.fmo()
    bath = q.BathSpec.fmo_default()
    assert fmo.n_sites == 7

    traj = q.simulate(fmo, bath, 200.0, method="redfield")
    pops = traj.populations()
    assert all(abs(sum(p) - 1.0) < 1e-9 for p in pops)
    trace_err, herm_err, _ = traj.invariants()
    assert trace_err < 1e-9 and herm_err < 1e-9

    times, purity = traj.metric("purity")
    assert len(times) == len(traj) and purity[0] > 0.999
    etr_abs, etr_norm = traj.etr()
    assert 0.0 <= etr_norm <= 1.0 and etr_abs >= 0.0

    assert abs(q.electrophilicity(-4.30, 1.10) - 8.40) < 0.01
    assert q.classify_b_index(58).startswith("moderately")

    pce, etr, feasible = q.evaluate_design(1.0, [(550.0, 200.0, 1.0)])
    assert not feasible and 0.0 < pce < 0.25

    front = json.loads(q.optimize(population=8, generations=2, seed=1))
    assert front["members"]

    pce_loss, etr_loss, _ = q.annual("default")
    assert math.isfinite(pce_loss) and math.isfinite(etr_loss)

    report = json.loads(q.validate([5, 6], quick=True))
    assert report["all_pass"]

    reports = json.loads(q.reactivity())
    assert reports and reports[0]["b_index"] > 0

    try:
        q.simulate(fmo, bath, 10.0, method="nonsense")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown method accepted")

    print(f"pyqbath {q.__version__}: smoke test passed "
          f"(ETR {etr_norm:.4f}, annual PCE loss {pce_loss:.3f}%)")


if __name__ == "__main__":
    main()
