"""Exact simulation of classical-reversible quantum circuits.

Gates are X, SWAP and multi-controlled X. Each maps computational basis
states to basis states, so simulation is a permutation of amplitudes: the
sparse backend moves (index, amplitude) pairs, the dense backend permutes a
full amplitude vector. Qubit 0 is the least significant bit everywhere and
registers are little-endian.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

X = "X"
SWAP = "SWAP"
MCX = "MCX"

MAX_WIDTH = 64
DENSE_MAX_WIDTH = 24
# "auto" picks dense only for small, well-filled states
AUTO_DENSE_MAX_WIDTH = 16
NORM_TOL = 1e-10


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        object.__setattr__(self, "controls", tuple(sorted(int(q) for q in self.controls)))
        if self.kind == X:
            if self.controls or len(self.targets) != 1:
                raise ValueError("X takes one target and no controls")
        elif self.kind == SWAP:
            if self.controls or len(self.targets) != 2 or self.targets[0] == self.targets[1]:
                raise ValueError("SWAP takes two distinct targets and no controls")
        elif self.kind == MCX:
            if len(self.targets) != 1:
                raise ValueError("MCX takes exactly one target")
            if len(set(self.controls)) != len(self.controls):
                raise ValueError(f"repeated control in {self.controls}")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if set(self.targets) & set(self.controls):
            raise ValueError(f"controls {self.controls} overlap targets {self.targets}")
        if min(self.qubits) < 0:
            raise ValueError("negative qubit index")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets

    def __str__(self) -> str:
        if self.kind == MCX:
            return f"MCX({list(self.controls)} -> {self.targets[0]})"
        return f"{self.kind}{self.targets}"


def x(q: int) -> Gate:
    return Gate(X, (q,))


def swap(a: int, b: int) -> Gate:
    return Gate(SWAP, (a, b))


def mcx(controls: Iterable[int], target: int) -> Gate:
    controls = tuple(controls)
    return Gate(MCX, (target,), controls) if controls else x(target)


def cx(control: int, target: int) -> Gate:
    return mcx((control,), target)


def ccx(c0: int, c1: int, target: int) -> Gate:
    return mcx((c0, c1), target)


Layout = Mapping[str, Sequence[int]]


def _check_layout(width: int, layout: Layout) -> dict[str, tuple[int, ...]]:
    checked: dict[str, tuple[int, ...]] = {}
    used: dict[int, str] = {}
    for name, qubits in layout.items():
        qubits = tuple(int(q) for q in qubits)
        for q in qubits:
            if not 0 <= q < width:
                raise ValueError(f"register {name!r}: qubit {q} outside width {width}")
            if q in used:
                raise ValueError(f"registers {used[q]!r} and {name!r} share qubit {q}")
            used[q] = name
        checked[name] = qubits
    return checked


@dataclass(frozen=True, eq=False)
class Circuit:
    """Ordered gate list over ``width`` qubits with a named register map."""

    width: int
    gates: tuple[Gate, ...] = ()
    layout: Mapping[str, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not 1 <= self.width <= MAX_WIDTH:
            raise ValueError(f"width {self.width} outside [1, {MAX_WIDTH}]")
        gates = tuple(self.gates)
        for g in gates:
            if max(g.qubits) >= self.width:
                raise ValueError(f"{g} touches a qubit outside width {self.width}")
        object.__setattr__(self, "gates", gates)
        object.__setattr__(self, "layout", _check_layout(self.width, self.layout))
        object.__setattr__(self, "_perm", None)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return (self.width, self.gates, dict(self.layout)) == (
            other.width,
            other.gates,
            dict(other.layout),
        )

    def __hash__(self) -> int:
        return hash((self.width, self.gates))

    def __len__(self) -> int:
        return len(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.width != self.width:
            raise ValueError(f"cannot compose widths {self.width} and {other.width}")
        return Circuit(self.width, self.gates + other.gates, self.layout)

    def with_gates(self, gates: Iterable[Gate]) -> "Circuit":
        return Circuit(self.width, tuple(gates), self.layout)

    def register(self, name: str) -> tuple[int, ...]:
        try:
            return self.layout[name]
        except KeyError:
            raise KeyError(f"unknown register {name!r}; have {sorted(self.layout)}") from None

    def permutation(self) -> np.ndarray:
        """Image of every basis index under the circuit (cached)."""
        if self._perm is None:
            if self.width > DENSE_MAX_WIDTH:
                raise ValueError(f"width {self.width} too large for a dense permutation")
            idx = np.arange(1 << self.width, dtype=np.int64)
            for op in _compile(self.gates):
                idx = _apply_op_vec(op, idx)
            idx.setflags(write=False)
            object.__setattr__(self, "_perm", idx)
        return self._perm

    def layout_text(self) -> str:
        return "".join(
            f"{name}: {','.join(map(str, qs))}\n" for name, qs in self.layout.items()
        )


def inverse(circuit: Circuit) -> Circuit:
    """Every gate in the set is self-inverse, so reversing the list inverts."""
    return circuit.with_gates(reversed(circuit.gates))


# compiled form: ("x", cmask, tbit) or ("s", bit_a, bit_b)
def _compile(gates: Iterable[Gate]) -> list[tuple[str, int, int]]:
    ops = []
    for g in gates:
        if g.kind == SWAP:
            ops.append(("s", g.targets[0], g.targets[1]))
        else:
            cmask = sum(1 << c for c in g.controls)
            ops.append(("x", cmask, 1 << g.targets[0]))
    return ops


def _apply_op_int(ops: list[tuple[str, int, int]], i: int) -> int:
    for kind, a, b in ops:
        if kind == "x":
            if i & a == a:
                i ^= b
        elif ((i >> a) ^ (i >> b)) & 1:
            i ^= (1 << a) | (1 << b)
    return i


def _apply_op_vec(op: tuple[str, int, int], idx: np.ndarray) -> np.ndarray:
    kind, a, b = op
    if kind == "x":
        return idx ^ (((idx & a) == a).astype(np.int64) * b)
    diff = ((idx >> a) ^ (idx >> b)) & 1
    return idx ^ (diff * ((1 << a) | (1 << b)))


def apply_to_index(circuit: Circuit, index: int) -> int:
    """Classical image of one basis state."""
    return _apply_op_int(_compile(circuit.gates), index)


SPARSE = "sparse"
DENSE = "dense"
AUTO = "auto"
BACKENDS = (SPARSE, DENSE, AUTO)


class QuantumState:
    """Exact state on ``width`` qubits.

    ``sparse`` stores only nonzero amplitudes in a dict keyed by basis index;
    ``dense`` stores a complex vector of length 2**width.
    """

    __slots__ = ("width", "backend", "_data")

    def __init__(self, width: int, data, backend: str = SPARSE):
        if backend not in (SPARSE, DENSE):
            raise ValueError(f"backend must be 'sparse' or 'dense', got {backend!r}")
        if not 1 <= width <= MAX_WIDTH:
            raise ValueError(f"width {width} outside [1, {MAX_WIDTH}]")
        self.width = width
        self.backend = backend
        if backend == SPARSE:
            self._data = {int(k): complex(v) for k, v in dict(data).items() if v != 0}
            if any(not 0 <= k < (1 << width) for k in self._data):
                raise ValueError("basis index outside state width")
        else:
            if width > DENSE_MAX_WIDTH:
                raise ValueError(f"dense backend limited to {DENSE_MAX_WIDTH} qubits")
            arr = np.asarray(data, dtype=np.complex128)
            if arr.shape != (1 << width,):
                raise ValueError(f"dense data must have shape ({1 << width},)")
            self._data = arr
        if abs(self.norm() - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: norm {self.norm()}")

    @classmethod
    def basis(cls, width: int, index: int, backend: str = SPARSE) -> "QuantumState":
        if backend == DENSE:
            vec = np.zeros(1 << width, dtype=np.complex128)
            vec[index] = 1.0
            return cls(width, vec, DENSE)
        return cls(width, {index: 1.0}, SPARSE)

    def amplitudes(self) -> dict[int, complex]:
        """Nonzero amplitudes keyed by basis index, in ascending index order."""
        if self.backend == SPARSE:
            return dict(sorted(self._data.items()))
        nz = np.flatnonzero(self._data)
        return {int(i): complex(self._data[i]) for i in nz}

    def vector(self) -> np.ndarray:
        if self.backend == DENSE:
            return self._data.copy()
        vec = np.zeros(1 << self.width, dtype=np.complex128)
        for i, a in self._data.items():
            vec[i] = a
        return vec

    def to(self, backend: str) -> "QuantumState":
        if backend == self.backend:
            return self
        if backend == DENSE:
            return QuantumState(self.width, self.vector(), DENSE)
        return QuantumState(self.width, self.amplitudes(), SPARSE)

    def norm(self) -> float:
        if self.backend == SPARSE:
            return math.fsum(abs(a) ** 2 for a in self._data.values())
        return float(np.sum(np.abs(self._data) ** 2))

    def num_nonzero(self) -> int:
        if self.backend == SPARSE:
            return len(self._data)
        return int(np.count_nonzero(self._data))

    def is_basis_state(self) -> bool:
        return self.num_nonzero() == 1

    def basis_index(self) -> int:
        if not self.is_basis_state():
            raise ValueError("state is a superposition")
        return next(iter(self.amplitudes()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QuantumState):
            return NotImplemented
        return self.width == other.width and self.amplitudes() == other.amplitudes()

    def __repr__(self) -> str:
        return f"QuantumState(width={self.width}, backend={self.backend!r}, nnz={self.num_nonzero()})"


def _encode(width: int, layout: Layout, assignments: Mapping[str, int]) -> int:
    index = 0
    for name, value in assignments.items():
        if name not in layout:
            raise KeyError(f"unknown register {name!r}; have {sorted(layout)}")
        qubits = layout[name]
        if isinstance(value, bool) or not 0 <= int(value) < (1 << len(qubits)):
            raise ValueError(f"value {value} does not fit {len(qubits)}-qubit register {name!r}")
        for bit, q in enumerate(qubits):
            if q >= width:
                raise ValueError(f"register {name!r} exceeds width {width}")
            if (int(value) >> bit) & 1:
                index |= 1 << q
    return index


def prepare_basis(
    width: int,
    assignments: Mapping[str, int],
    layout: Layout,
    backend: str = SPARSE,
) -> QuantumState:
    """Basis state with each assigned register holding its value; others |0>."""
    layout = _check_layout(width, layout)
    return QuantumState.basis(width, _encode(width, layout, assignments), _resolve(backend, width))


def prepare_uniform(
    width: int,
    layout: Layout,
    superposed: str,
    assignments: Mapping[str, int] | None = None,
    backend: str = SPARSE,
) -> QuantumState:
    """Equal superposition over every value of register ``superposed``."""
    layout = _check_layout(width, layout)
    assignments = dict(assignments or {})
    if superposed in assignments:
        raise ValueError(f"register {superposed!r} is both assigned and superposed")
    base = _encode(width, layout, assignments)
    qubits = layout[superposed]
    amp = 1.0 / math.sqrt(1 << len(qubits))
    data = {}
    for v in range(1 << len(qubits)):
        index = base
        for bit, q in enumerate(qubits):
            if (v >> bit) & 1:
                index |= 1 << q
        data[index] = amp
    state = QuantumState(width, data, SPARSE)
    return state.to(_resolve(backend, width, len(data)))


def _resolve(backend: str, width: int, nonzero: int = 1) -> str:
    if backend not in BACKENDS:
        raise ValueError(f"backend must be one of {BACKENDS}, got {backend!r}")
    if backend == AUTO:
        dense = width <= AUTO_DENSE_MAX_WIDTH and 8 * nonzero >= (1 << width)
        return DENSE if dense else SPARSE
    return backend


def apply(circuit: Circuit, state: QuantumState) -> QuantumState:
    """Run ``circuit`` on ``state``; the result uses the state's backend."""
    if state.width != circuit.width:
        raise ValueError(f"state width {state.width} != circuit width {circuit.width}")
    if state.backend == DENSE:
        perm = circuit.permutation()
        out = np.zeros_like(state._data)
        out[perm] = state._data
        return QuantumState(state.width, out, DENSE)
    ops = _compile(circuit.gates)
    return QuantumState(
        state.width,
        {_apply_op_int(ops, i): a for i, a in state._data.items()},
        SPARSE,
    )


@dataclass(frozen=True)
class NoiseModel:
    """Independent bit flips on every measured qubit."""

    p_flip: float = 0.0
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_flip <= 1.0:
            raise ValueError(f"p_flip must lie in [0, 1], got {self.p_flip}")
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be non-negative")

    def generator(self) -> np.random.Generator:
        # PCG64 is fixed across platforms, so seeded runs are bit-reproducible.
        return np.random.Generator(np.random.PCG64(self.rng_seed))


NOISELESS = NoiseModel(0.0, 0)


@dataclass(frozen=True)
class Measurement:
    """``bits`` is the recorded outcome after bit flips, ``raw`` the one sampled."""

    width: int
    raw: int
    bits: int
    probability: float

    @property
    def bitstring(self) -> str:
        """Bits in qubit order, qubit 0 first."""
        return "".join(str((self.bits >> q) & 1) for q in range(self.width))

    @property
    def flipped(self) -> int:
        return self.raw ^ self.bits


def measure_all(
    state: QuantumState,
    noise: NoiseModel = NOISELESS,
    rng: np.random.Generator | None = None,
) -> Measurement:
    """Sample a basis state by Born probabilities, then flip each bit w.p. p_flip.

    Pass ``rng`` to draw successive measurements from one stream; otherwise a
    fresh generator is seeded from ``noise.rng_seed``.
    """
    if rng is None:
        rng = noise.generator()
    amps = state.amplitudes()
    indices = list(amps)
    probs = np.array([abs(a) ** 2 for a in amps.values()])
    cdf = np.cumsum(probs)
    pick = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    pick = min(pick, len(indices) - 1)
    raw = indices[pick]
    flips = rng.random(state.width) < noise.p_flip
    mask = sum(1 << q for q in np.flatnonzero(flips))
    return Measurement(state.width, raw, raw ^ mask, float(probs[pick]))


def read_register(bits: int | Sequence[int] | Measurement, layout: Layout, name: str) -> int:
    """Little-endian value of register ``name`` in a measured bit pattern.

    ``bits`` is a basis index, a :class:`Measurement`, or a sequence of bits in
    qubit order (qubit 0 first).
    """
    if name not in layout:
        raise KeyError(f"unknown register {name!r}; have {sorted(layout)}")
    if isinstance(bits, Measurement):
        bits = bits.bits
    if not isinstance(bits, (int, np.integer)):
        seq = list(bits)
        if any(b not in (0, 1) for b in seq):
            raise ValueError("bit sequence must contain only 0 and 1")
        bits = sum(b << q for q, b in enumerate(seq))
    return sum(((int(bits) >> q) & 1) << k for k, q in enumerate(layout[name]))


def to_qasm(circuit: Circuit) -> str:
    """OpenQASM 2.0 text for the x/cx/ccx/swap subset.

    MCX gates with three or more controls have no qelib1 equivalent and are
    written as ``// mcx k`` annotations listing their qubits.
    """
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";']
    for name, qs in circuit.layout.items():
        lines.append(f"// register {name}: {','.join(map(str, qs))}")
    lines.append(f"qreg q[{circuit.width}];")
    for g in circuit.gates:
        qs = ", ".join(f"q[{q}]" for q in g.qubits)
        if g.kind == X:
            lines.append(f"x {qs};")
        elif g.kind == SWAP:
            lines.append(f"swap {qs};")
        elif len(g.controls) == 1:
            lines.append(f"cx {qs};")
        elif len(g.controls) == 2:
            lines.append(f"ccx {qs};")
        else:
            lines.append(f"// mcx {len(g.controls)} {qs};")
    return "\n".join(lines) + "\n"
