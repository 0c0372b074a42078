"""Experiments A-C: single-section sweep, noisy zero-input response, autocorrelation.

Every quantum result is checked against :mod:`qmodchaos.ring`; a disagreement
raises :class:`OracleMismatch` instead of being written out.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import defaults as D
from .qarith import build_qmod_section
from .qsim import SPARSE, Circuit, NoiseModel, apply, measure_all, prepare_basis, read_register
from .ring import (
    FilterConfig,
    TimeSeries,
    autocorrelation,
    detect_period,
    mod_add,
    mod_mul,
    next_state,
    zero_input_response,
)


class OracleMismatch(RuntimeError):
    """A quantum circuit disagreed with the classical modular arithmetic."""


def qmod_output(
    circuit: Circuit,
    w: int,
    x_in: int,
    delay: int,
    backend: str = SPARSE,
) -> int:
    """Run one section on basis inputs and read the output register noiselessly."""
    layout = circuit.layout
    state = apply(circuit, prepare_basis(circuit.width, {"w": w, "x_in": x_in, "delay": delay}, layout, backend))
    return read_register(state.basis_index(), layout, "product")


@dataclass(frozen=True)
class ExpARow:
    delay: int
    x_out: int
    oracle: int

    @property
    def match(self) -> bool:
        return self.x_out == self.oracle


def experiment_a(
    w: int = D.EXP_A_W,
    x_in: int = D.EXP_A_X_IN,
    n: int = D.N_BITS,
    backend: str = SPARSE,
) -> list[ExpARow]:
    """Sweep the delay register of one section over every residue."""
    circuit = build_qmod_section(n)
    m = 1 << n
    rows = []
    for d in range(m):
        row = ExpARow(d, qmod_output(circuit, w, x_in, d, backend), mod_add(x_in, mod_mul(w, d, m), m))
        if not row.match:
            raise OracleMismatch(f"delay {d}: circuit gave {row.x_out}, oracle {row.oracle}")
        rows.append(row)
    return rows


@dataclass(frozen=True)
class RunRecord:
    config: FilterConfig
    n: int
    seed: int
    p_flip: float
    samples_ideal: TimeSeries
    samples_noisy: TimeSeries
    rmse: float
    feedback: bool = False

    def __post_init__(self) -> None:
        if len(self.samples_ideal) != len(self.samples_noisy):
            raise ValueError("ideal and noisy series differ in length")


def rmse(ideal: Sequence[int], noisy: Sequence[int]) -> float:
    a = np.asarray(ideal, dtype=float)
    b = np.asarray(noisy, dtype=float)
    return float(np.sqrt(np.mean((b - a) ** 2)))


def experiment_b(
    p_flip: float = 0.0,
    seed: int = D.BASE_SEED,
    *,
    samples: int = D.EXP_B_SAMPLES,
    w: int = D.EXP_B_W[0],
    ic: int = D.EXP_B_IC[0],
    n: int = D.N_BITS,
    feedback: bool = False,
    backend: str = SPARSE,
    circuit: Circuit | None = None,
) -> RunRecord:
    """Zero-input response of a first-order oscillator, one QMOD run per sample.

    Each step prepares w, the zero input and the delay, runs the section,
    measures every qubit through the bit-flip channel and resets. The recorded
    sample is the product register of the noisy readout. With ``feedback`` the
    noisy value is also the next delay; otherwise the next delay is the value
    the circuit actually produced, so read-out errors do not accumulate.
    """
    cfg = FilterConfig.create(1 << n, (w,), (ic,))
    circuit = circuit or build_qmod_section(n)
    layout = circuit.layout
    noise = NoiseModel(p_flip, seed)
    rng = noise.generator()
    ideal = zero_input_response(cfg, samples)
    noisy = []
    delay = ic
    for k in range(samples):
        state = prepare_basis(
            circuit.width, {"w": w, "x_in": D.EXP_B_INPUT, "delay": delay}, layout, backend
        )
        m = measure_all(apply(circuit, state), noise, rng)
        observed = read_register(m.bits, layout, "product")
        produced = read_register(m.raw, layout, "product")
        expected = mod_add(D.EXP_B_INPUT, mod_mul(w, delay, cfg.modulus), cfg.modulus)
        if produced != expected:
            raise OracleMismatch(f"sample {k + 1}: circuit gave {produced}, oracle {expected}")
        noisy.append(observed)
        delay = observed if feedback else produced
    noisy_ts = TimeSeries.of(noisy, cfg.modulus)
    return RunRecord(cfg, n, seed, p_flip, ideal, noisy_ts, rmse(ideal, noisy), feedback)


@dataclass
class SweepResult:
    p_values: tuple[float, ...]
    mean_rmse: tuple[float, ...]
    std_rmse: tuple[float, ...]
    records: list[RunRecord] = field(default_factory=list, repr=False)

    def rows(self):
        return list(zip(self.p_values, self.mean_rmse, self.std_rmse))

    def linear_fit(self) -> tuple[float, float, float]:
        """(slope, intercept, R^2) of least squares mean_rmse ~ p."""
        p = np.asarray(self.p_values)
        y = np.asarray(self.mean_rmse)
        slope, intercept = np.polyfit(p, y, 1)
        resid = y - (slope * p + intercept)
        total = np.sum((y - y.mean()) ** 2)
        r2 = 1.0 - np.sum(resid**2) / total if total > 0 else 1.0
        return float(slope), float(intercept), float(r2)


def rmse_sweep(
    p_values: Sequence[float] = D.EXP_B_P_GRID,
    runs_per_p: int = D.EXP_B_RUNS,
    base_seed: int = D.BASE_SEED,
    **kwargs,
) -> SweepResult:
    """Mean RMSE per noise level over seeds base_seed + 0 .. base_seed + runs - 1."""
    if runs_per_p < 1:
        raise ValueError(f"runs_per_p must be >= 1, got {runs_per_p}")
    n = kwargs.get("n", D.N_BITS)
    kwargs.setdefault("circuit", build_qmod_section(n))
    means, stds, records = [], [], []
    for p in p_values:
        runs = [experiment_b(p, base_seed + r, **kwargs) for r in range(runs_per_p)]
        values = [rec.rmse for rec in runs]
        means.append(float(np.mean(values)))
        stds.append(float(np.std(values)))
        records += runs
    return SweepResult(tuple(p_values), tuple(means), tuple(stds), records)


def scan_periods(w: Sequence[int], modulus: int) -> dict[tuple[int, ...], int]:
    """Eventual period of every initial condition, via one pass over the state graph."""
    cfg = FilterConfig.create(modulus, w)
    period: dict[tuple[int, ...], int] = {}
    for start in itertools.product(range(modulus), repeat=cfg.order):
        if start in period:
            continue
        path: dict[tuple[int, ...], int] = {}
        s = start
        while s not in period and s not in path:
            path[s] = len(path)
            s = next_state(cfg, s)
        p = period[s] if s in period else len(path) - path[s]
        for t in path:
            period[t] = p
    return period


@dataclass
class ExpCResult:
    config: FilterConfig
    series: TimeSeries
    period: int | None
    acf: np.ndarray
    matching_ics: int = 0
    best_period: int | None = None
    spot_checks: list[tuple[int, int, int]] = field(default_factory=list)
    target_period: int = D.EXP_C_PERIOD

    @property
    def reproduced(self) -> bool:
        return self.period == self.target_period

    @property
    def max_offpeak(self) -> float:
        return float(np.max(np.abs(self.acf[1:]))) if len(self.acf) > 1 else 0.0


def quantum_sample(circuit: Circuit, w: Sequence[int], history: Sequence[int], u: int = 0) -> int:
    """One sample of an order-N filter, section by section with readout and reset.

    ``history[i - 1]`` is x[k - i]; section i adds w_i * x[k - i] to the
    running value, which starts at the input u.
    """
    value = u
    for wi, d in zip(w, history):
        value = qmod_output(circuit, wi, value, d)
    return value


def experiment_c(
    ic_scan: bool = True,
    *,
    w: Sequence[int] = D.EXP_C_W,
    n: int = D.N_BITS,
    ic: Sequence[int] = D.EXP_C_IC,
    target_period: int = D.EXP_C_PERIOD,
    spot_checks: int = D.EXP_C_SPOT_CHECKS,
) -> ExpCResult:
    """Zero-input response of the fourth-order oscillator and its autocorrelation.

    With ``ic_scan`` the initial conditions are scanned lexicographically
    (all-zero excluded) and the first reaching ``target_period`` is used.
    The autocorrelation covers exactly one period.
    """
    m = 1 << n
    matching = 0
    best = None
    if ic_scan:
        periods = scan_periods(w, m)
        hits = [s for s in sorted(periods) if any(s) and periods[s] == target_period]
        matching = len(hits)
        best = max(p for s, p in periods.items() if any(s))
        if hits:
            ic = hits[0]
        else:
            ic = max((s for s in sorted(periods) if any(s)), key=lambda s: periods[s])
    cfg = FilterConfig.create(m, w, ic)
    # longer than the state space, so the orbit must close inside the probe
    probe = zero_input_response(cfg, m**cfg.order + cfg.order)
    period = detect_period(probe, cfg.order)
    series = TimeSeries.of(probe.samples[: period or len(probe)], cfg.modulus)
    acf = autocorrelation(series, len(series) - 1)

    circuit = build_qmod_section(n)
    hist = list(cfg.initial_conditions)
    checks = []
    stride = max(1, len(series) // max(spot_checks, 1))
    wanted = set(range(0, len(series), stride)[:spot_checks])
    for k, xk in enumerate(series.samples):
        if k in wanted:
            q = quantum_sample(circuit, cfg.coefficients, hist)
            checks.append((k, xk, q))
            if q != xk:
                raise OracleMismatch(f"sample {k}: circuit gave {q}, oracle {xk}")
        hist = [xk] + hist[:-1]
        if len(checks) == spot_checks:
            break
    return ExpCResult(cfg, series, period, acf, matching, best, checks, target_period)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def table_rows(obj) -> tuple[list[str], list[list]]:
    if isinstance(obj, RunRecord):
        return ["k", "ideal", "noisy"], [
            [k + 1, a, b] for k, (a, b) in enumerate(zip(obj.samples_ideal, obj.samples_noisy))
        ]
    if isinstance(obj, SweepResult):
        return ["p", "mean_rmse", "std_rmse"], [list(r) for r in obj.rows()]
    if isinstance(obj, ExpCResult):
        return ["k", "x"], [[k, x] for k, x in enumerate(obj.series.samples)]
    if isinstance(obj, TimeSeries):
        return ["k", "x"], [[k, x] for k, x in enumerate(obj.samples)]
    if isinstance(obj, np.ndarray):
        return ["lag", "r"], [[lag, r] for lag, r in enumerate(obj)]
    rows = list(obj)
    if rows and isinstance(rows[0], ExpARow):
        return ["delay", "x_out", "oracle", "match"], [[r.delay, r.x_out, r.oracle, r.match] for r in rows]
    raise TypeError(f"don't know how to tabulate {type(obj).__name__}")


def to_csv(obj) -> str:
    header, rows = table_rows(obj)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def emit_csv(obj, path: str | Path) -> Path:
    """Write ``obj`` as CSV with a header row; identical inputs give identical bytes."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(to_csv(obj))
    return path


def acf_within_bound(result: ExpCResult, bound: float = D.EXP_C_ACF_BOUND) -> bool:
    return result.acf[0] == 1.0 and result.max_offpeak < bound and not math.isnan(result.max_offpeak)
