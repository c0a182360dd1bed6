"""Experiment drivers: fluctuation and convergence studies with CSV output.

The fluctuation study minimizes an objective at several cardinalities,
measures each output's excess over the best value ever recorded for that
cardinality (a JSON ledger persists those), and compares the symmetric
difference to the best lattice-ball translate against the bound
N * (alpha^(1/2) + N^(-1/(2d)) * P_N^(1/2)).

The convergence study computes truncation-corrected scaled capacities of
lattice balls and fits the error decay rate against the continuum value.
"""
from __future__ import annotations

import datetime
import json
import math
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from .capacity import p_capacity
from .continuum import ContinuumBallData, ball_volume, r_alpha
from .lattice import lattice_ball, min_sym_diff_to_ball, scaled_perimeter
from .optimize import Objective, minimize

__all__ = [
    "ExperimentRecord",
    "ConvergenceRecord",
    "Ledger",
    "run_fluctuation",
    "run_convergence",
    "write_fluctuation_csv",
    "write_convergence_csv",
    "FLUCTUATION_COLUMNS",
    "CONVERGENCE_COLUMNS",
]

FLUCTUATION_COLUMNS = ["N", "d", "param", "alphaN", "PN", "rN", "symDiff",
                       "boundValue", "ratio", "seed"]
CONVERGENCE_COLUMNS = ["k", "N", "discreteValue", "continuumTarget", "error",
                       "fittedExponent"]


@dataclass
class ExperimentRecord:
    """One fluctuation-study row."""

    N: int
    d: int
    param: float
    alphaN: float
    PN: float
    rN: float
    symDiff: int
    boundValue: float
    ratio: float
    seed: int


@dataclass
class ConvergenceRecord:
    """One convergence-study row."""

    k: float
    N: int
    discreteValue: float
    continuumTarget: float
    error: float
    fittedExponent: float


class Ledger:
    """Best-known objective values keyed by (d, parameter, N), JSON-backed.

    Updates keep the minimum ever seen, so excess values computed against
    the ledger can only shrink as more runs accumulate.
    """

    def __init__(self, path=None):
        self.path = Path(path) if path is not None else None
        self.data: dict[str, float] = {}
        if self.path is not None and self.path.exists():
            self.data = json.loads(self.path.read_text())

    @staticmethod
    def key(d: int, param: float, N: int) -> str:
        return f"d={d}|param={param!r}|N={N}"

    def best(self, d: int, param: float, N: int) -> float | None:
        return self.data.get(self.key(d, param, N))

    def update(self, d: int, param: float, N: int, value: float) -> float:
        k = self.key(d, param, N)
        old = self.data.get(k)
        if old is None or value < old:
            self.data[k] = value
        return self.data[k]

    def save(self):
        if self.path is not None:
            self.path.write_text(json.dumps(self.data, indent=2, sort_keys=True))


def _objective_param(objective: Objective) -> float:
    return float(objective.R) if objective.kind == "relative" else float(objective.p)


def run_fluctuation(N_list, objective: Objective = None, d: int = 3,
                    restarts: int = 1, seed: int = 0,
                    ledger: Ledger | None = None,
                    truncation_factor: float = 3.0,
                    max_sweeps: int = 6,
                    exchange_batch: int = 30) -> list[ExperimentRecord]:
    """Minimize at each N, then measure ball-likeness against the bound.

    The absolute-capacity objective gets a truncation radius fixed per N
    at truncation_factor times the volume radius, so values of different
    sets at the same N are comparable.
    """
    if list(N_list) != sorted(N_list):
        raise ValueError("N list must be nondecreasing")
    if objective is None:
        objective = Objective(kind="p_cap", p=2.0)
    if ledger is None:
        ledger = Ledger()
    param = _objective_param(objective)
    records = []
    for N in N_list:
        rN = r_alpha(float(N), d)
        obj = objective
        if objective.kind == "p_cap" and objective.truncation is None:
            obj = Objective(kind="p_cap", p=objective.p,
                            truncation=max(truncation_factor * rN, rN + 3.0),
                            max_sweeps=objective.max_sweeps)
        best_state = None
        for rep in range(restarts):
            state = minimize(N, obj, d=d, seed=seed + rep,
                             max_sweeps=max_sweeps,
                             exchange_batch=exchange_batch)
            if best_state is None or state.best_value < best_state.best_value:
                best_state = state
        X = best_state.best_set
        value = best_state.best_value
        m_best = ledger.update(d, param, N, value)
        alpha = max(value - m_best, 0.0)
        PN = scaled_perimeter(X)
        _, sym = min_sym_diff_to_ball(X, rN)
        bound = N * (math.sqrt(alpha) + N ** (-1.0 / (2 * d)) * math.sqrt(PN))
        records.append(ExperimentRecord(
            N=N, d=d, param=param, alphaN=alpha, PN=PN, rN=rN,
            symDiff=sym, boundValue=bound,
            ratio=sym / bound if bound > 0 else float("inf"),
            seed=seed,
        ))
    ledger.save()
    return records


def run_convergence(p: float, d: int, k_list,
                    truncation_factor: float = 4.0,
                    max_sweeps: int = 400) -> list[ConvergenceRecord]:
    """Scaled capacities of lattice balls against the continuum limit.

    For each radius k the lattice ball is solved on a domain truncated at
    truncation_factor times the effective radius, the exact radial
    correction removes the leading truncation bias, and the error decay
    exponent is fitted by least squares in log-log coordinates.
    """
    ks = list(k_list)
    if any(k < 2 for k in ks):
        raise ValueError("k values must be >= 2")
    target = ContinuumBallData.make(d, p).scaled_target
    rows = []
    for k in ks:
        X = lattice_ball(k, (0,) * d)
        N = len(X)
        r_eff = (N / ball_volume(d)) ** (1.0 / d)
        res = p_capacity(X, p, truncation=truncation_factor * r_eff,
                         max_sweeps=max_sweeps)
        value = res.corrected_value if res.corrected_value is not None else res.value
        rows.append((k, N, value))
    logN = np.log([N for _, N, _ in rows])
    logE = np.log([abs(v - target) for _, _, v in rows])
    slope = float(np.polyfit(logN, logE, 1)[0])
    return [ConvergenceRecord(k=float(k), N=N, discreteValue=v,
                              continuumTarget=target,
                              error=abs(v - target), fittedExponent=slope)
            for k, N, v in rows]


def _format_cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path, columns, dicts):
    lines = ["# generated " + datetime.datetime.now(datetime.timezone.utc).isoformat()]
    lines.append(",".join(columns))
    for row in dicts:
        lines.append(",".join(_format_cell(row[c]) for c in columns))
    Path(path).write_text("\n".join(lines) + "\n")


def write_fluctuation_csv(records, path):
    _write_csv(path, FLUCTUATION_COLUMNS, [asdict(r) for r in records])
    finite = [r.ratio for r in records if math.isfinite(r.ratio)]
    if finite:
        with Path(path).open("a") as fh:
            fh.write(f"# maxRatio={max(finite)!r}\n")


def write_convergence_csv(records, path):
    _write_csv(path, CONVERGENCE_COLUMNS, [asdict(r) for r in records])
