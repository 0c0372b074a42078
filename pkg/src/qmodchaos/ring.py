"""Classical modular arithmetic: the reference oracle for every quantum circuit.

Holds the modular IIR encoder, its FIR inverse, the zero-input oscillator and
the sequence analysis used to study its output (period, autocorrelation).
Initial conditions are stored newest first: ``initial_conditions[i - 1]`` is
``x[-i]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

MAX_MODULUS = 2**32


@dataclass(frozen=True)
class Modulus:
    value: int

    def __post_init__(self) -> None:
        if isinstance(self.value, bool) or not isinstance(self.value, (int, np.integer)):
            raise TypeError(f"modulus must be an integer, got {self.value!r}")
        object.__setattr__(self, "value", int(self.value))
        if not 2 <= self.value <= MAX_MODULUS:
            raise ValueError(f"modulus must lie in [2, 2**32], got {self.value}")

    @property
    def is_power_of_two(self) -> bool:
        return self.value & (self.value - 1) == 0

    @property
    def bits(self) -> int:
        """Register width n for M = 2**n."""
        if not self.is_power_of_two:
            raise ValueError(f"modulus {self.value} is not a power of two")
        return self.value.bit_length() - 1

    def check(self, a: int, what: str = "residue") -> int:
        if isinstance(a, bool) or not isinstance(a, (int, np.integer)):
            raise TypeError(f"{what} must be an integer, got {a!r}")
        a = int(a)
        if not 0 <= a < self.value:
            raise ValueError(f"{what} {a} outside [0, {self.value - 1}]")
        return a

    def __int__(self) -> int:
        return self.value


def as_modulus(m: Modulus | int) -> Modulus:
    return m if isinstance(m, Modulus) else Modulus(m)


@dataclass(frozen=True)
class FilterConfig:
    """Order-N modular IIR filter; the coefficients are the encryption key."""

    modulus: Modulus
    coefficients: tuple[int, ...]
    initial_conditions: tuple[int, ...]

    def __post_init__(self) -> None:
        m = as_modulus(self.modulus)
        object.__setattr__(self, "modulus", m)
        w = tuple(m.check(c, "coefficient") for c in self.coefficients)
        ic = tuple(m.check(c, "initial condition") for c in self.initial_conditions)
        if not w:
            raise ValueError("filter order must be at least 1")
        if len(w) != len(ic):
            raise ValueError(
                f"{len(w)} coefficients but {len(ic)} initial conditions"
            )
        object.__setattr__(self, "coefficients", w)
        object.__setattr__(self, "initial_conditions", ic)

    @classmethod
    def create(
        cls,
        modulus: Modulus | int,
        coefficients: Iterable[int],
        initial_conditions: Iterable[int] | None = None,
    ) -> "FilterConfig":
        w = tuple(coefficients)
        ic = tuple(initial_conditions) if initial_conditions is not None else (0,) * len(w)
        return cls(as_modulus(modulus), w, ic)

    @property
    def order(self) -> int:
        return len(self.coefficients)

    def with_initial_conditions(self, ic: Iterable[int]) -> "FilterConfig":
        return FilterConfig(self.modulus, self.coefficients, tuple(ic))

    def to_text(self) -> str:
        return (
            f"order={self.order}\n"
            f"modulus={self.modulus.value}\n"
            f"w={','.join(map(str, self.coefficients))}\n"
            f"ic={','.join(map(str, self.initial_conditions))}\n"
        )

    @classmethod
    def from_text(cls, text: str) -> "FilterConfig":
        fields: dict[str, str] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
            fields[key.strip()] = value.strip()
        missing = {"order", "modulus", "w"} - fields.keys()
        if missing:
            raise ValueError(f"missing keys: {', '.join(sorted(missing))}")
        w = _int_list(fields["w"])
        ic = _int_list(fields["ic"]) if fields.get("ic") else [0] * len(w)
        cfg = cls.create(int(fields["modulus"]), w, ic)
        if cfg.order != int(fields["order"]):
            raise ValueError(f"order={fields['order']} but {cfg.order} coefficients given")
        return cfg

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path: str | Path) -> "FilterConfig":
        return cls.from_text(Path(path).read_text())


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


@dataclass(frozen=True)
class TimeSeries:
    samples: tuple[int, ...]
    modulus: Modulus

    def __post_init__(self) -> None:
        m = as_modulus(self.modulus)
        object.__setattr__(self, "modulus", m)
        object.__setattr__(self, "samples", tuple(m.check(s, "sample") for s in self.samples))

    @classmethod
    def of(cls, samples: Iterable[int], modulus: Modulus | int) -> "TimeSeries":
        return cls(tuple(samples), as_modulus(modulus))

    def __len__(self) -> int:
        return len(self.samples)

    def __getitem__(self, k):
        return self.samples[k]

    def __iter__(self):
        return iter(self.samples)

    def to_array(self) -> np.ndarray:
        return np.asarray(self.samples, dtype=np.int64)

    def to_csv(self) -> str:
        body = "".join(f"{s}\n" for s in self.samples)
        return f"# modulus={self.modulus.value}\n{body}"

    @classmethod
    def from_csv(cls, text: str, modulus: Modulus | int | None = None) -> "TimeSeries":
        found = None
        samples = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                if key.strip() == "modulus":
                    found = int(value)
                continue
            try:
                samples.append(int(line))
            except ValueError:
                raise ValueError(f"line {lineno}: not an integer sample: {raw!r}") from None
        if found is None and modulus is None:
            raise ValueError("no '# modulus=M' header and no modulus given")
        if found is not None and modulus is not None and found != int(modulus):
            raise ValueError(f"header modulus {found} does not match expected {int(modulus)}")
        return cls.of(samples, found if found is not None else modulus)


@dataclass(frozen=True)
class SignedRange:
    """Signed dynamic range mapped onto the legitimate range [0, M-1]."""

    modulus: Modulus

    @property
    def lo(self) -> int:
        m = self.modulus.value
        return -(m - 1) // 2 if m % 2 else -m // 2

    @property
    def hi(self) -> int:
        m = self.modulus.value
        return (m - 1) // 2 if m % 2 else m // 2 - 1

    def __contains__(self, s: int) -> bool:
        return self.lo <= s <= self.hi


def mod_add(a: int, b: int, m: Modulus | int) -> int:
    m = as_modulus(m)
    return (m.check(a) + m.check(b)) % m.value


def mod_mul(a: int, b: int, m: Modulus | int) -> int:
    m = as_modulus(m)
    return (m.check(a) * m.check(b)) % m.value


def to_signed(a: int, m: Modulus | int) -> int:
    m = as_modulus(m)
    a = m.check(a)
    return a - m.value if a > SignedRange(m).hi else a


def from_signed(s: int, m: Modulus | int) -> int:
    m = as_modulus(m)
    rng = SignedRange(m)
    if s not in rng:
        raise ValueError(f"{s} outside dynamic range [{rng.lo}, {rng.hi}]")
    return s % m.value


def _check_same_modulus(cfg: FilterConfig, series: TimeSeries) -> None:
    if series.modulus != cfg.modulus:
        raise ValueError(
            f"series modulus {series.modulus.value} != filter modulus {cfg.modulus.value}"
        )


def _run_iir(cfg: FilterConfig, inputs: Iterable[int]) -> list[int]:
    m = cfg.modulus.value
    w = cfg.coefficients
    hist = list(cfg.initial_conditions)  # hist[i - 1] == x[k - i]
    out = []
    for u in inputs:
        x = (u + sum(wi * xi for wi, xi in zip(w, hist))) % m
        hist.insert(0, x)
        hist.pop()
        out.append(x)
    return out


def encode(cfg: FilterConfig, u: TimeSeries) -> TimeSeries:
    """IIR encoder: x[k] = <u[k] + sum_i w_i x[k-i]>_M."""
    _check_same_modulus(cfg, u)
    return TimeSeries.of(_run_iir(cfg, u.samples), cfg.modulus)


def decode(cfg: FilterConfig, x: TimeSeries) -> TimeSeries:
    """FIR inverse of :func:`encode`, fed by the received samples themselves."""
    _check_same_modulus(cfg, x)
    m = cfg.modulus.value
    w = cfg.coefficients
    hist = list(cfg.initial_conditions)
    out = []
    for xk in x.samples:
        out.append((xk - sum(wi * xi for wi, xi in zip(w, hist))) % m)
        hist.insert(0, xk)
        hist.pop()
    return TimeSeries.of(out, cfg.modulus)


def zero_input_response(cfg: FilterConfig, length: int) -> TimeSeries:
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    return TimeSeries.of(_run_iir(cfg, [0] * length), cfg.modulus)


def next_state(cfg: FilterConfig, state: Sequence[int]) -> tuple[int, ...]:
    """One zero-input step on the delay-line state (x[k-1], ..., x[k-N])."""
    x = sum(wi * si for wi, si in zip(cfg.coefficients, state)) % cfg.modulus.value
    return (x,) + tuple(state[:-1])


def orbit_period(cfg: FilterConfig) -> tuple[int, int]:
    """Floyd cycle detection on the N-tuple state; returns (tail length, period)."""
    start = cfg.initial_conditions
    slow = next_state(cfg, start)
    fast = next_state(cfg, slow)
    while slow != fast:
        slow = next_state(cfg, slow)
        fast = next_state(cfg, next_state(cfg, fast))
    tail = 0
    slow = start
    while slow != fast:
        slow = next_state(cfg, slow)
        fast = next_state(cfg, fast)
        tail += 1
    period = 1
    fast = next_state(cfg, slow)
    while slow != fast:
        fast = next_state(cfg, fast)
        period += 1
    return tail, period


def detect_period(x: TimeSeries | Sequence[int], order: int = 1) -> int | None:
    """Eventual period of a series produced by an order-``order`` recurrence.

    Windows of ``order`` consecutive samples act as the recurrence state, so a
    repeated scalar value alone never ends the search. Returns None when no
    state repeats inside the series.
    """
    samples = tuple(x.samples if isinstance(x, TimeSeries) else x)
    if not samples:
        raise ValueError("empty series")
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    seen: dict[tuple[int, ...], int] = {}
    for j in range(len(samples) - order + 1):
        state = samples[j : j + order]
        if state in seen:
            return j - seen[state]
        seen[state] = j
    return None


def autocorrelation(x: TimeSeries | Sequence[float], max_lag: int) -> np.ndarray:
    """Biased, mean-removed, normalized autocorrelation for lags 0..max_lag."""
    data = np.asarray(x.samples if isinstance(x, TimeSeries) else x, dtype=float)
    if max_lag < 0 or data.size <= max_lag:
        raise ValueError(f"need len(x) > max_lag, got {data.size} and {max_lag}")
    centered = data - data.mean()
    denom = float(np.dot(centered, centered))
    if denom == 0.0:
        raise ValueError("autocorrelation of a constant series is undefined")
    n = data.size
    r = np.array(
        [np.dot(centered[: n - lag], centered[lag:]) / denom for lag in range(max_lag + 1)]
    )
    r[0] = 1.0
    return r
