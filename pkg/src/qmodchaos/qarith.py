"""Reversible modular arithmetic circuits over M = 2**n and their resource counts.

All builders take explicit qubit index lists (least significant first) and
return a :class:`~qmodchaos.qsim.Circuit`. Reduction mod 2**n is free: carries
out of the top bit are simply never computed.
"""
from __future__ import annotations

from collections import Counter
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .qsim import MAX_WIDTH, MCX, Circuit, Gate, mcx, swap


def _check_disjoint(**registers: Sequence[int]) -> None:
    seen: dict[int, str] = {}
    for name, qubits in registers.items():
        for q in qubits:
            if q in seen:
                raise ValueError(f"registers {seen[q]!r} and {name!r} overlap on qubit {q}")
            seen[q] = name


def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError(f"register width n must be >= 1, got {n}")


def _check_len(name: str, qubits: Sequence[int], size: int) -> None:
    if len(qubits) != size:
        raise ValueError(f"register {name!r} needs {size} qubits, got {len(qubits)}")


def qadd_gates(src: Sequence[int], dst: Sequence[int], controls: Iterable[int] = ()) -> list[Gate]:
    """dst += src (mod 2**n), optionally conditioned on extra control qubits.

    For each source bit j, dst is incremented by 2**j under control of src[j]:
    a descending cascade where dst[t] flips when src[j] and dst[j..t-1] are all
    set, so each carry is read before it is overwritten.
    """
    extra = tuple(controls)
    n = len(dst)
    gates = []
    for j in range(n):
        for t in range(n - 1, j - 1, -1):
            gates.append(mcx(extra + (src[j],) + tuple(dst[j:t]), dst[t]))
    return gates


def qleft_gates(reg: Sequence[int], ancilla: int) -> list[Gate]:
    """Swap cascade: reg <- 2*reg mod 2**n, ancilla <- old MSB (ancilla starts |0>)."""
    chain = [ancilla, *reg[::-1]]
    return [swap(a, b) for a, b in zip(chain, chain[1:])]


def qmul_gates(
    a: Sequence[int],
    b: Sequence[int],
    product: Sequence[int],
    ancillas: Sequence[int],
) -> list[Gate]:
    """product += a*b (mod 2**n) with b and the shift ancillas restored."""
    n = len(a)
    gates: list[Gate] = []
    shifts: list[Gate] = []
    for i in range(n):
        gates += qadd_gates(b, product, controls=(a[i],))
        if i < n - 1:
            step = qleft_gates(b, ancillas[i])
            gates += step
            shifts += step
    gates += reversed(shifts)
    return gates


def _circuit(width: int, gates: list[Gate], layout: dict[str, Sequence[int]]) -> Circuit:
    if width > MAX_WIDTH:
        raise ValueError(f"circuit needs {width} qubits, simulator limit is {MAX_WIDTH}")
    return Circuit(width, tuple(gates), layout)


def _width(*registers: Sequence[int]) -> int:
    return 1 + max(q for reg in registers for q in reg)


def build_qadd(
    n: int,
    src: Sequence[int] | None = None,
    dst: Sequence[int] | None = None,
    width: int | None = None,
) -> Circuit:
    """|a>|b> -> |a>|(a + b) mod 2**n>. Default layout: a = 0..n-1, b = n..2n-1."""
    _check_n(n)
    src = tuple(range(n)) if src is None else tuple(src)
    dst = tuple(range(n, 2 * n)) if dst is None else tuple(dst)
    _check_len("src", src, n)
    _check_len("dst", dst, n)
    _check_disjoint(src=src, dst=dst)
    return _circuit(width or _width(src, dst), qadd_gates(src, dst), {"a": src, "b": dst})


def build_qleft(
    n: int,
    reg: Sequence[int] | None = None,
    ancilla: int | None = None,
    width: int | None = None,
) -> Circuit:
    """|b>|0> -> |2b mod 2**n>|msb(b)>. Default layout: reg = 0..n-1, ancilla = n."""
    _check_n(n)
    reg = tuple(range(n)) if reg is None else tuple(reg)
    ancilla = n if ancilla is None else ancilla
    _check_len("reg", reg, n)
    _check_disjoint(reg=reg, ancilla=(ancilla,))
    return _circuit(
        width or _width(reg, (ancilla,)),
        qleft_gates(reg, ancilla),
        {"reg": reg, "ancilla": (ancilla,)},
    )


def build_qmul(
    n: int,
    a: Sequence[int] | None = None,
    b: Sequence[int] | None = None,
    product: Sequence[int] | None = None,
    ancillas: Sequence[int] | None = None,
    width: int | None = None,
) -> Circuit:
    """|a>|b>|0>|0> -> |a>|b>|a*b mod 2**n>|0>.

    Default layout: a, b, product in consecutive n-qubit blocks, then n-1
    shift ancillas.
    """
    _check_n(n)
    a = tuple(range(n)) if a is None else tuple(a)
    b = tuple(range(n, 2 * n)) if b is None else tuple(b)
    product = tuple(range(2 * n, 3 * n)) if product is None else tuple(product)
    ancillas = tuple(range(3 * n, 4 * n - 1)) if ancillas is None else tuple(ancillas)
    for name, reg in (("a", a), ("b", b), ("product", product)):
        _check_len(name, reg, n)
    _check_len("ancillas", ancillas, n - 1)
    _check_disjoint(a=a, b=b, product=product, ancillas=ancillas)
    layout = {"a": a, "b": b, "product": product, "ancillas": ancillas}
    return _circuit(
        width or _width(a, b, product, ancillas or (0,)),
        qmul_gates(a, b, product, ancillas),
        layout,
    )


@dataclass(frozen=True)
class QmodLayout:
    """Register map of one filter section: 5n - 1 qubits."""

    n: int
    w: tuple[int, ...]
    x_in: tuple[int, ...]
    delay: tuple[int, ...]
    product: tuple[int, ...]
    shift_ancillas: tuple[int, ...]

    def __post_init__(self) -> None:
        _check_n(self.n)
        for name in ("w", "x_in", "delay", "product"):
            _check_len(name, getattr(self, name), self.n)
        _check_len("shift_ancillas", self.shift_ancillas, self.n - 1)
        _check_disjoint(**self.registers())

    @classmethod
    def standard(cls, n: int) -> "QmodLayout":
        _check_n(n)
        block = lambda k: tuple(range(k * n, (k + 1) * n))  # noqa: E731
        return cls(n, block(0), block(1), block(2), block(3), tuple(range(4 * n, 5 * n - 1)))

    def registers(self) -> dict[str, tuple[int, ...]]:
        return {
            "w": self.w,
            "x_in": self.x_in,
            "delay": self.delay,
            "product": self.product,
            "shift_ancillas": self.shift_ancillas,
        }

    @property
    def width(self) -> int:
        return 1 + max(q for reg in self.registers().values() for q in reg)


def qmod_gates(layout: QmodLayout) -> list[Gate]:
    return qmul_gates(layout.w, layout.delay, layout.product, layout.shift_ancillas) + qadd_gates(
        layout.x_in, layout.product
    )


@lru_cache(maxsize=32)
def build_qmod_section(n: int, layout: QmodLayout | None = None) -> Circuit:
    """One filter section: product <- (x_in + w*delay) mod 2**n, inputs kept."""
    layout = QmodLayout.standard(n) if layout is None else layout
    if layout.n != n:
        raise ValueError(f"layout is for n={layout.n}, not n={n}")
    return _circuit(layout.width, qmod_gates(layout), layout.registers())


def unrolled_width(n: int, sections: int) -> int:
    _check_n(n)
    if sections < 1:
        raise ValueError(f"need at least one section, got {sections}")
    return 5 * n - 1 + 3 * n * (sections - 1)


def build_unrolled(n: int, sections: int, max_width: int = MAX_WIDTH) -> Circuit:
    """Cascade of ``sections`` QMOD sections computing one output sample.

    Section i reads w{i} and delay d{i} and adds into x{i}, seeded from the
    previous section's output x{i-1}; x0 is the input sample. The n-1 shift
    ancillas are shared, as every section returns them to |0>.
    """
    width = unrolled_width(n, sections)
    if width > max_width:
        raise ValueError(f"{sections} sections at n={n} need {width} qubits > limit {max_width}")
    base = QmodLayout.standard(n)
    layout: dict[str, tuple[int, ...]] = {
        "x0": base.x_in,
        "shift_ancillas": base.shift_ancillas,
        "w1": base.w,
        "d1": base.delay,
        "x1": base.product,
    }
    gates = qmod_gates(base)
    nxt = 5 * n - 1
    for i in range(2, sections + 1):
        w, d, out = (tuple(range(nxt + k * n, nxt + (k + 1) * n)) for k in range(3))
        nxt += 3 * n
        sec = QmodLayout(n, w, layout[f"x{i - 1}"], d, out, base.shift_ancillas)
        gates += qmod_gates(sec)
        layout.update({f"w{i}": w, f"d{i}": d, f"x{i}": out})
    return _circuit(width, gates, layout)


def qubit_count(k: int, n: int) -> int:
    """Qubit budget for k samples as stated for the pipelined oscillator."""
    _check_n(n)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return 5 * n - 1 if k == 1 else 5 * n - 1 + 3 * n * k


@dataclass(frozen=True)
class GateStats:
    gate_count_by_kind: dict[str, int] = field(default_factory=dict)
    mcx_count_by_arity: dict[int, int] = field(default_factory=dict)
    depth: int = 0
    qubit_count: int = 0

    @property
    def total(self) -> int:
        return sum(self.gate_count_by_kind.values())

    @property
    def mcx_count(self) -> int:
        return self.gate_count_by_kind.get(MCX, 0)

    def to_text(self) -> str:
        lines = [f"qubits: {self.qubit_count}", f"gates: {self.total}", f"depth: {self.depth}"]
        for kind in sorted(self.gate_count_by_kind):
            lines.append(f"  {kind}: {self.gate_count_by_kind[kind]}")
        for arity in sorted(self.mcx_count_by_arity):
            lines.append(f"  MCX with {arity} controls: {self.mcx_count_by_arity[arity]}")
        return "\n".join(lines) + "\n"


def depth(gates: Iterable[Gate]) -> int:
    """ASAP layering with every gate, any arity, taking one time step."""
    level: dict[int, int] = {}
    best = 0
    for g in gates:
        layer = 1 + max((level.get(q, 0) for q in g.qubits), default=0)
        for q in g.qubits:
            level[q] = layer
        best = max(best, layer)
    return best


def stats(circuit: Circuit) -> GateStats:
    """Exact gate counts and depth; ``qubit_count`` is the allocated width."""
    kinds = Counter(g.kind for g in circuit.gates)
    arities = Counter(len(g.controls) for g in circuit.gates if g.kind == MCX)
    return GateStats(
        dict(sorted(kinds.items())),
        dict(sorted(arities.items())),
        depth(circuit.gates),
        circuit.width,
    )
