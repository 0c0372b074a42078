"""Exit criteria; each test times itself against its runtime budget."""
import itertools
import time

import numpy as np
import pytest

from qmodchaos import defaults as D
from qmodchaos.experiments import experiment_a, experiment_b, experiment_c, rmse_sweep
from qmodchaos.qarith import (
    build_qadd,
    build_qleft,
    build_qmod_section,
    build_qmul,
    build_unrolled,
    qubit_count,
    stats,
)
from qmodchaos.qsim import DENSE, SPARSE, QuantumState, apply, inverse, prepare_basis, prepare_uniform, read_register
from qmodchaos.ring import FilterConfig, TimeSeries, decode, encode, mod_add, mod_mul, zero_input_response

pytestmark = pytest.mark.acceptance


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def registers(circuit, index):
    return {name: read_register(index, circuit.layout, name) for name in circuit.layout}


def test_1_exhaustive_qmod_oracle(criterion):
    cases = 0
    with Timer() as t:
        for n in (2, 3):
            m = 1 << n
            c = build_qmod_section(n)
            for w, x_in, d in itertools.product(range(m), repeat=3):
                inputs = {"w": w, "x_in": x_in, "delay": d}
                out = apply(c, prepare_basis(c.width, inputs, c.layout, SPARSE)).basis_index()
                oracle = mod_add(x_in, mod_mul(w, d, m), m)
                assert registers(c, out) == dict(inputs, product=oracle, shift_ancillas=0)
                cases += 1
    criterion(1, f"exhaustive QMOD oracle equivalence, n=2,3 ({cases} triples)", t.seconds)
    assert cases == 64 + 512
    assert t.seconds < 30


def test_2_experiment_a(criterion):
    with Timer() as t:
        rows = experiment_a()
    criterion(2, "experiment A: 16 delays match <13 + 3d>_16", t.seconds)
    assert [r.x_out for r in rows] == [mod_add(13, mod_mul(3, d, 16), 16) for d in range(16)]
    assert t.seconds < 10


def test_3_experiment_b_noiseless(criterion):
    with Timer() as t:
        rec = experiment_b(0.0)
    criterion(3, "experiment B at p=0 is bit-identical to the classical recurrence", t.seconds)
    cfg = FilterConfig.create(16, (3,), (13,))
    assert rec.samples_noisy == zero_input_response(cfg, 50)
    assert rec.samples_noisy.samples == (7, 5, 15, 13) * 12 + (7, 5)
    assert rec.rmse == 0.0
    assert t.seconds < 60


def test_4_noise_trend(criterion):
    with Timer() as t:
        sweep = rmse_sweep(D.EXP_B_P_GRID, 10, D.BASE_SEED)
    _, _, r2 = sweep.linear_fit()
    criterion(4, f"RMSE trend over p in 0..0.16, 10 runs: monotone, linear R^2={r2:.3f} >= 0.9", t.seconds)
    means = np.array(sweep.mean_rmse)
    assert sweep.p_values == pytest.approx([0.02 * i for i in range(9)])
    assert means[0] == 0.0
    assert np.all(means[1:] > 0)
    assert np.all(np.diff(means) >= 0)
    assert r2 >= 0.9
    assert t.seconds < 300


def test_5_experiment_c(criterion):
    with Timer() as t:
        res = experiment_c(True)
    criterion(
        5,
        f"experiment C: period {res.period} found ({res.matching_ics} ICs), max|r|={res.max_offpeak:.3f} < 0.35",
        t.seconds,
    )
    assert res.period == 120
    assert any(res.config.initial_conditions)
    assert res.acf[0] == 1.0
    assert len(res.acf) == 120
    assert res.max_offpeak < 0.35
    assert t.seconds < 30


def test_6_resource_formulas(criterion):
    with Timer() as t:
        for k in range(1, 101):
            for n in range(1, 17):
                assert qubit_count(k, n) == (5 * n - 1 if k == 1 else 5 * n - 1 + 3 * n * k)
        for n in range(1, 11):
            assert stats(build_qadd(n)).mcx_count == n * (n + 1) // 2
        ns = range(2, 9)
        qadd = [stats(build_qadd(n)).depth / n**2 for n in ns]
        qmod = [stats(build_qmod_section(n)).depth / n**3 for n in ns]
    criterion(6, "qubit count formula, QADD MCX count, depth Theta(n^2) / Theta(n^3)", t.seconds)
    for normalized in (qadd, qmod):
        ratios = [b / a for a, b in zip(normalized, normalized[1:])]
        assert all(0.5 <= r <= 2 for r in ratios), ratios
    assert t.seconds < 10


def test_7_backends_and_reversibility(criterion):
    rng = np.random.default_rng(2024)
    with Timer() as t:
        for i in range(200):
            n = (2, 3, 4)[i % 3]
            c = build_qmod_section(n)
            w, x_in, d = (int(v) for v in rng.integers(0, 1 << n, 3))
            if i % 10 == 0:
                state = prepare_uniform(c.width, c.layout, "delay", {"w": w, "x_in": x_in})
            else:
                state = prepare_basis(c.width, {"w": w, "x_in": x_in, "delay": d}, c.layout)
            sparse = apply(c, state)
            dense = apply(c, state.to(DENSE))
            assert sparse.amplitudes() == dense.amplitudes()
            assert np.array_equal(sparse.vector(), dense.vector())
        builders = [build_qadd(4), build_qleft(4), build_qmul(4), build_qmod_section(4), build_unrolled(4, 2)]
        for c in builders:
            inv = inverse(c)
            for v in rng.integers(0, 1 << c.width, 100).tolist():
                s = QuantumState.basis(c.width, v)
                assert apply(inv, apply(c, s)) == s
    criterion(7, "dense == sparse on 200 QMOD runs; circuit then inverse is identity", t.seconds)
    assert t.seconds < 60


def test_8_codec_roundtrip(criterion):
    rng = np.random.default_rng(8)
    with Timer() as t:
        for _ in range(1000):
            m = int(rng.choice([16, 17, 256]))
            order = int(rng.integers(1, 5))
            cfg = FilterConfig.create(m, rng.integers(0, m, order).tolist(), rng.integers(0, m, order).tolist())
            u = TimeSeries.of(rng.integers(0, m, 100).tolist(), m)
            assert decode(cfg, encode(cfg, u)) == u
    criterion(8, "decode(encode(u)) == u for 1000 random series and keys", t.seconds)
    assert t.seconds < 10


def test_9_superposition(criterion):
    with Timer() as t:
        checked = 0
        for n in (2, 3, 4):
            c = build_qmod_section(n)
            w, x_in = (3, 13) if n == 4 else (1, 2)
            out = apply(c, prepare_uniform(c.width, c.layout, "delay", {"w": w, "x_in": x_in}, SPARSE))
            amps = out.amplitudes()
            assert len(amps) == 1 << n
            assert set(amps.values()) == {complex(1 / np.sqrt(1 << n))}
            for index in amps:
                regs = registers(c, index)
                assert regs["product"] == (x_in + w * regs["delay"]) % (1 << n)
                assert (regs["w"], regs["x_in"], regs["shift_ancillas"]) == (w, x_in, 0)
                checked += 1
    criterion(9, f"uniform delay through QMOD: {checked} equal-magnitude components obey the relation", t.seconds)
    assert t.seconds < 10
