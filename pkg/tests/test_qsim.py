import math

import numpy as np
import pytest

from qmodchaos.qsim import (
    DENSE,
    MCX,
    SPARSE,
    SWAP,
    Circuit,
    Gate,
    NoiseModel,
    QuantumState,
    apply,
    apply_to_index,
    ccx,
    cx,
    inverse,
    mcx,
    measure_all,
    prepare_basis,
    prepare_uniform,
    read_register,
    swap,
    to_qasm,
    x,
)

REG4 = {"x": (0, 1, 2, 3)}


def random_circuit(rng, width, size):
    gates = []
    for _ in range(size):
        kind = rng.integers(3)
        qs = [int(q) for q in rng.permutation(width)]
        if kind == 0:
            gates.append(x(qs[0]))
        elif kind == 1:
            gates.append(swap(qs[0], qs[1]))
        else:
            k = int(rng.integers(1, width))
            gates.append(mcx(qs[1 : k + 1], qs[0]))
    return Circuit(width, tuple(gates))


class TestGate:
    def test_overlap_rejected(self):
        with pytest.raises(ValueError):
            Gate(MCX, (1,), (1, 2))

    def test_swap_needs_two_targets(self):
        with pytest.raises(ValueError):
            Gate(SWAP, (1, 1))

    def test_mcx_without_controls_is_x(self):
        assert mcx((), 3) == x(3)

    def test_circuit_bounds(self):
        with pytest.raises(ValueError):
            Circuit(3, (cx(0, 3),))

    def test_layout_must_be_disjoint(self):
        with pytest.raises(ValueError):
            Circuit(4, (), {"a": (0, 1), "b": (1, 2)})


@pytest.mark.parametrize("backend", [SPARSE, DENSE])
class TestApply:
    def run(self, gate, width, value, backend):
        state = QuantumState.basis(width, value, backend)
        return apply(Circuit(width, (gate,)), state).basis_index()

    def test_x(self, backend):
        assert self.run(x(0), 4, 0, backend) == 1

    def test_swap(self, backend):
        assert self.run(swap(0, 1), 4, 2, backend) == 1

    def test_toffoli(self, backend):
        assert self.run(ccx(0, 1, 2), 4, 3, backend) == 7
        assert self.run(ccx(0, 1, 2), 4, 1, backend) == 1

    def test_toffoli_truth_table(self, backend):
        for v in range(8):
            a, b, c = v & 1, (v >> 1) & 1, (v >> 2) & 1
            expected = a | b << 1 | (c ^ (a & b)) << 2
            assert self.run(ccx(0, 1, 2), 3, v, backend) == expected

    def test_width_mismatch(self, backend):
        with pytest.raises(ValueError):
            apply(Circuit(3), QuantumState.basis(4, 0, backend))

    def test_norm_preserved(self, backend):
        rng = np.random.default_rng(1)
        c = random_circuit(rng, 6, 20)
        s = prepare_uniform(6, {"a": (0, 2, 4), "b": (1, 3)}, "a", {"b": 2}, backend=backend)
        out = apply(c, s)
        assert sorted(out.amplitudes().values(), key=abs) == sorted(s.amplitudes().values(), key=abs)
        assert out.norm() == pytest.approx(1.0, abs=1e-10)


def test_inverse_examples():
    c = Circuit(3, (x(0), cx(0, 1), swap(1, 2)))
    assert inverse(inverse(c)) == c
    assert inverse(Circuit(3)) == Circuit(3)
    assert inverse(c).gates == (swap(1, 2), cx(0, 1), x(0))


def test_inverse_roundtrip_random():
    rng = np.random.default_rng(11)
    for _ in range(20):
        c = random_circuit(rng, 6, 10)
        both = c + inverse(c)
        for v in rng.integers(0, 64, 100):
            assert apply_to_index(both, int(v)) == v
            s = QuantumState.basis(6, int(v))
            assert apply(inverse(c), apply(c, s)) == s


def test_backends_agree_on_random_circuits():
    rng = np.random.default_rng(5)
    for _ in range(20):
        c = random_circuit(rng, 8, 30)
        s = prepare_uniform(8, {"a": (1, 4, 6), "b": (0, 7)}, "a", {"b": 1})
        assert apply(c, s).amplitudes() == apply(c, s.to(DENSE)).amplitudes()


class TestPrepare:
    def test_basis_little_endian(self):
        s = prepare_basis(4, {"x": 13}, REG4)
        assert s.basis_index() == 13
        assert [(13 >> q) & 1 for q in range(4)] == [1, 0, 1, 1]

    def test_coefficient_register(self):
        assert prepare_basis(4, {"x": 3}, REG4).basis_index() == 0b0011

    def test_unassigned_is_zero(self):
        assert prepare_basis(8, {}, {"a": range(4), "b": range(4, 8)}).basis_index() == 0

    def test_scattered_register(self):
        s = prepare_basis(6, {"r": 5}, {"r": (1, 3, 5)})
        assert s.basis_index() == (1 << 1) | (1 << 5)

    def test_value_too_large(self):
        with pytest.raises(ValueError):
            prepare_basis(4, {"x": 16}, REG4)

    def test_unknown_register(self):
        with pytest.raises(KeyError):
            prepare_basis(4, {"y": 1}, REG4)

    def test_uniform(self):
        s = prepare_uniform(4, REG4, "x")
        amps = s.amplitudes()
        assert len(amps) == 16
        assert all(a == 0.25 for a in amps.values())
        assert s.norm() == pytest.approx(1.0)

    def test_uniform_keeps_fixed_register(self):
        layout = {"d": (0, 1, 2, 3), "w": (4, 5, 6, 7)}
        s = prepare_uniform(8, layout, "d", {"w": 3})
        assert {read_register(i, layout, "w") for i in s.amplitudes()} == {3}
        assert {read_register(i, layout, "d") for i in s.amplitudes()} == set(range(16))

    def test_dense_and_sparse_same_state(self):
        a = prepare_uniform(5, {"r": (0, 2)}, "r", backend=SPARSE)
        b = prepare_uniform(5, {"r": (0, 2)}, "r", backend=DENSE)
        assert a == b
        assert b.backend == DENSE and len(b.vector()) == 32


class TestState:
    def test_unnormalized_rejected(self):
        with pytest.raises(ValueError):
            QuantumState(2, {0: 1.0, 1: 1.0})

    def test_sparse_stores_nonzero_only(self):
        s = QuantumState(2, {0: 1.0, 3: 0.0})
        assert s.num_nonzero() == 1

    def test_conversion_roundtrip(self):
        s = prepare_uniform(4, {"r": (1, 3)}, "r")
        assert s.to(DENSE).to(SPARSE) == s


class TestMeasure:
    def test_noiseless_basis(self):
        s = QuantumState.basis(4, 13)
        m = measure_all(s, NoiseModel(0.0, 3))
        assert (m.bits, m.raw, m.probability) == (13, 13, 1.0)
        assert m.bitstring == "1011"

    def test_all_flip(self):
        m = measure_all(QuantumState.basis(4, 0), NoiseModel(1.0, 0))
        assert m.bits == 0b1111

    def test_flip_frequency(self):
        # 10^5 trials x 4 bits at p=0.02: sd of the frequency is about 2.2e-4
        rng = NoiseModel(0.02, 99).generator()
        s = QuantumState.basis(4, 6)
        counts = np.zeros(4)
        trials = 100_000
        for _ in range(trials):
            flipped = measure_all(s, NoiseModel(0.02), rng).flipped
            counts += [(flipped >> q) & 1 for q in range(4)]
        assert np.all(np.abs(counts / trials - 0.02) < 0.005)

    def test_born_sampling(self):
        layout = {"r": (0, 1)}
        s = prepare_uniform(2, layout, "r")
        rng = NoiseModel(0.0, 4).generator()
        outcomes = [measure_all(s, rng=rng).bits for _ in range(4000)]
        freq = np.bincount(outcomes, minlength=4) / 4000
        assert np.all(np.abs(freq - 0.25) < 0.03)

    def test_seed_determinism(self):
        s = prepare_uniform(6, {"r": range(6)}, "r")
        assert measure_all(s, NoiseModel(0.1, 42)) == measure_all(s, NoiseModel(0.1, 42))
        ra, rb = NoiseModel(0.1, 7).generator(), NoiseModel(0.1, 7).generator()
        assert [measure_all(s, NoiseModel(0.1), ra) for _ in range(50)] == [
            measure_all(s, NoiseModel(0.1), rb) for _ in range(50)
        ]

    def test_backends_sample_identically(self):
        s = prepare_uniform(5, {"r": (0, 2, 4)}, "r")
        for seed in range(10):
            assert measure_all(s, NoiseModel(0.05, seed)) == measure_all(s.to(DENSE), NoiseModel(0.05, seed))

    def test_invalid_probability(self):
        with pytest.raises(ValueError):
            NoiseModel(1.5)


class TestReadRegister:
    def test_bit_sequence_lsb_first(self):
        assert read_register((1, 0, 1, 1), REG4, "x") == 13
        assert read_register((1, 1, 0, 0), REG4, "x") == 3

    def test_integer(self):
        assert read_register(0b1101, REG4, "x") == 13
        assert read_register(0, REG4, "x") == 0

    def test_offset_register(self):
        layout = {"lo": (0, 1), "hi": (2, 3)}
        assert read_register(0b1001, layout, "hi") == 2

    def test_unknown(self):
        with pytest.raises(KeyError):
            read_register(0, REG4, "nope")


def test_qasm_subset():
    c = Circuit(5, (x(0), cx(0, 1), ccx(0, 1, 2), swap(3, 4), mcx((0, 1, 2), 3)), {"a": (0, 1)})
    text = to_qasm(c)
    assert text.splitlines() == [
        "OPENQASM 2.0;",
        'include "qelib1.inc";',
        "// register a: 0,1",
        "qreg q[5];",
        "x q[0];",
        "cx q[0], q[1];",
        "ccx q[0], q[1], q[2];",
        "swap q[3], q[4];",
        "// mcx 3 q[0], q[1], q[2], q[3];",
    ]


def test_dense_permutation_is_cached():
    c = Circuit(4, (x(1),))
    assert c.permutation() is c.permutation()
    assert list(c.permutation()) == [i ^ 2 for i in range(16)]


def test_uniform_amplitude_magnitude():
    s = prepare_uniform(6, {"r": range(3)}, "r")
    assert all(abs(a) == 1 / math.sqrt(8) for a in s.amplitudes().values())
