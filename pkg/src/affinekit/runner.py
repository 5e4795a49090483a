"""Run orchestration: integrate a scenario and export its artifacts.

Artifacts written to the output directory:

* ``trajectory.csv``  columns: t, then per body K: x{K}[i], phi{K}[i][j],
  p{K}[i], pi{K}[a][i], then E, Sigma[a][b], SigmaHat[a][b], detphi_{K}
* ``charges.csv``     t, E, p[i], Sigma[a][b], SigmaHat[a][b], J[a][b], then
  per body: S{K}[a][b], V{K}[a][b], detphi_{K}, q{K}[a]
* ``summary.json``    final charges, relative drifts, determinism hash

Numbers are written in 17-significant-digit scientific notation and the JSON
is key-sorted, so identical (scenario, seed) pairs produce byte-identical
artifacts.  Wall time is printed by the CLI, never written into them.
"""

from __future__ import annotations

import hashlib
import json
import os

import numpy as np

from .dynamics import Trajectory, integrate
from .scenario import Scenario


def _fmt(value: float) -> str:
    return f"{value:.17e}"


def _mat_labels(prefix: str, n: int):
    return [f"{prefix}[{i}][{j}]" for i in range(n) for j in range(n)]


def trajectory_header(n: int, N: int) -> list:
    cols = ["t"]
    for K in range(1, N + 1):
        cols += [f"x{K}[{i}]" for i in range(n)]
        cols += _mat_labels(f"phi{K}", n)
        cols += [f"p{K}[{i}]" for i in range(n)]
        cols += _mat_labels(f"pi{K}", n)
    cols += ["E"]
    cols += _mat_labels("Sigma", n)
    cols += _mat_labels("SigmaHat", n)
    cols += [f"detphi_{K}" for K in range(1, N + 1)]
    return cols


def charges_header(n: int, N: int) -> list:
    cols = ["t", "E"]
    cols += [f"p[{i}]" for i in range(n)]
    cols += _mat_labels("Sigma", n)
    cols += _mat_labels("SigmaHat", n)
    cols += _mat_labels("J", n)
    for K in range(1, N + 1):
        cols += _mat_labels(f"S{K}", n)
        cols += _mat_labels(f"V{K}", n)
        cols += [f"detphi_{K}"]
        cols += [f"q{K}[{a}]" for a in range(n)]
    return cols


def write_trajectory_csv(path, traj: Trajectory) -> None:
    state0 = traj.states[0]
    n, N = state0.n, state0.N
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(trajectory_header(n, N)) + "\n")
        for t, state, charge in zip(traj.times, traj.states, traj.charges):
            row = [t]
            for K in range(N):
                row += list(state.config.x[K])
                row += list(state.config.phi[K].ravel())
                row += list(state.mom.p[K])
                row += list(state.mom.pi[K].ravel())
            row.append(charge.energy)
            row += list(charge.sigma_total.ravel())
            row += list(charge.sigma_hat_total.ravel())
            row += list(charge.det_phi)
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_charges_csv(path, traj: Trajectory) -> None:
    state0 = traj.states[0]
    n, N = state0.n, state0.N
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(charges_header(n, N)) + "\n")
        for t, charge in zip(traj.times, traj.charges):
            row = [t, charge.energy]
            row += list(charge.p_total)
            row += list(charge.sigma_total.ravel())
            row += list(charge.sigma_hat_total.ravel())
            row += list(charge.j_total.ravel())
            for K in range(N):
                row += list(charge.spin[K].ravel())
                row += list(charge.vorticity[K].ravel())
                row.append(charge.det_phi[K])
                row += list(charge.q_log[K])
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def relative_drift(series: np.ndarray) -> float:
    """Max deviation from the initial value in max-norm, relative to the
    initial max-norm (absolute when the initial value is zero)."""
    series = np.asarray(series, dtype=float).reshape(len(series), -1)
    dev = float(np.max(np.abs(series - series[0])))
    scale = float(np.max(np.abs(series[0])))
    return dev / scale if scale > 0 else dev


def charge_drifts(traj: Trajectory) -> dict:
    picks = {
        "energy": lambda c: np.atleast_1d(c.energy),
        "p_total": lambda c: c.p_total,
        "sigma_total": lambda c: c.sigma_total,
        "sigma_hat_total": lambda c: c.sigma_hat_total,
        "j_total": lambda c: c.j_total,
        "spin_total": lambda c: c.spin.sum(axis=0),
        "vorticity_total": lambda c: c.vorticity.sum(axis=0),
    }
    return {name: relative_drift(traj.charge_series(pick))
            for name, pick in picks.items()}


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def run(scenario: Scenario, out_dir) -> dict:
    """Integrate the scenario and write its artifacts; returns the summary."""
    os.makedirs(out_dir, exist_ok=True)
    state0 = scenario.initial_state()
    traj = integrate(scenario.model, scenario.params, scenario.potential, state0,
                     dt=scenario.dt, T=scenario.T, method=scenario.method)

    traj_path = os.path.join(out_dir, "trajectory.csv")
    charges_path = os.path.join(out_dir, "charges.csv")
    summary_path = os.path.join(out_dir, "summary.json")
    write_trajectory_csv(traj_path, traj)
    write_charges_csv(charges_path, traj)

    final = traj.charges[-1]
    summary = {
        "name": scenario.name,
        "schema_version": scenario.schema_version,
        "n": scenario.n,
        "N": scenario.N,
        "model": {"translational": scenario.model.translational,
                  "internal": scenario.model.internal},
        "integrator": {"method": scenario.method, "dt": scenario.dt, "T": scenario.T},
        "seed": scenario.seed,
        "steps": len(traj.times) - 1,
        "final_time": traj.times[-1],
        "aborted": traj.aborted,
        "abort_reason": traj.abort_reason,
        "initial_energy": traj.charges[0].energy,
        "final_energy": final.energy,
        "final_charges": {
            "p_total": list(final.p_total),
            "sigma_total": final.sigma_total.tolist(),
            "sigma_hat_total": final.sigma_hat_total.tolist(),
            "j_total": final.j_total.tolist(),
        },
        "drifts": charge_drifts(traj),
        "artifacts": ["trajectory.csv", "charges.csv"],
        "determinism_hash": "sha256:" + _sha256(traj_path),
        "exit_code": 2 if traj.aborted else 0,
    }
    with open(summary_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary
