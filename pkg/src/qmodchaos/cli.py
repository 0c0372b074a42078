"""Command-line entry point.

Exit codes: 0 success, 1 oracle or validation failure, 2 usage error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import itertools
import os
import sys
import time
from pathlib import Path

from . import defaults as D
from .experiments import (
    OracleMismatch,
    emit_csv,
    experiment_a,
    experiment_b,
    experiment_c,
    rmse_sweep,
)
from .qarith import (
    build_qadd,
    build_qleft,
    build_qmod_section,
    build_qmul,
    build_unrolled,
    qubit_count,
    stats,
)
from .qsim import BACKENDS, DENSE, SPARSE, apply, prepare_basis, read_register, to_qasm
from .ring import FilterConfig, TimeSeries, decode, encode

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
MAX_N = 12


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _probability(text: str) -> float:
    p = float(text)
    if not 0.0 <= p <= 1.0:
        raise argparse.ArgumentTypeError(f"probability must lie in [0, 1], got {p}")
    return p


def _default_seed() -> int:
    env = os.environ.get(D.SEED_ENV)
    if env is None:
        return D.BASE_SEED
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{D.SEED_ENV}={env!r} is not an integer") from None


def _bits(args) -> int:
    n = args.n
    if args.modulus is not None:
        m = args.modulus
        if m < 2 or m & (m - 1):
            raise UsageError(f"quantum circuits need a power-of-two modulus, got {m}")
        if n is not None and 1 << n != m:
            raise UsageError(f"--n {n} and --modulus {m} disagree")
        n = m.bit_length() - 1
    n = D.N_BITS if n is None else n
    if not 1 <= n <= MAX_N:
        raise UsageError(f"--n must lie in [1, {MAX_N}], got {n}")
    return n


def cmd_exp(args) -> int:
    out = Path(args.out_dir)
    n = _bits(args)
    seed = args.seed if args.seed is not None else _default_seed()
    if args.order is not None and args.w is not None and len(args.w) != args.order:
        raise UsageError(f"--order {args.order} but {len(args.w)} coefficients")

    if args.name == "a":
        w = args.w[0] if args.w else D.EXP_A_W
        x_in = args.ic[0] if args.ic else D.EXP_A_X_IN
        rows = experiment_a(w, x_in, n, backend=args.backend)
        emit_csv(rows, out / "expA.csv")
        print(f"expA: {sum(r.match for r in rows)}/{len(rows)} outputs match the oracle")
        return EXIT_OK

    if args.name == "b":
        w = args.w[0] if args.w else D.EXP_B_W[0]
        ic = args.ic[0] if args.ic else D.EXP_B_IC[0]
        kw = dict(w=w, ic=ic, n=n, backend=args.backend, feedback=args.feedback)
        record = experiment_b(args.p, seed, **kw)
        emit_csv(record, out / "expB.csv")
        print(f"expB: p={args.p} seed={seed} rmse={record.rmse:.6g}")
        sweep = rmse_sweep(D.EXP_B_P_GRID, args.runs, seed, **kw)
        emit_csv(sweep, out / "rmse.csv")
        _, _, r2 = sweep.linear_fit()
        print(f"rmse sweep: {len(sweep.p_values)} noise levels x {args.runs} runs, linear R^2={r2:.4f}")
        return EXIT_OK

    w = tuple(args.w) if args.w else D.EXP_C_W
    ic = tuple(args.ic) if args.ic else D.EXP_C_IC
    result = experiment_c(args.scan_ic, w=w, n=n, ic=ic)
    emit_csv(result, out / "expC.csv")
    emit_csv(result.acf, out / "expC_acf.csv")
    print(
        f"expC: ic={','.join(map(str, result.config.initial_conditions))} "
        f"period={result.period} max|r|={result.max_offpeak:.4f} "
        f"quantum spot checks={len(result.spot_checks)}"
    )
    if args.scan_ic:
        if not result.reproduced:
            print(f"no initial condition reaches period {D.EXP_C_PERIOD}; best {result.best_period}", file=sys.stderr)
            return EXIT_FAIL
        print(f"{result.matching_ics} initial conditions reach period {D.EXP_C_PERIOD}")
    return EXIT_OK


def _read(path: str) -> str:
    return sys.stdin.read() if path == "-" else Path(path).read_text()


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_codec(args) -> int:
    cfg = FilterConfig.from_text(_read(args.config))
    try:
        series = TimeSeries.from_csv(_read(args.input), cfg.modulus.value)
    except ValueError as exc:
        print(f"input does not match config: {exc}", file=sys.stderr)
        return EXIT_FAIL
    result = encode(cfg, series) if args.direction == "encode" else decode(cfg, series)
    _write(args.output, result.to_csv())
    return EXIT_OK


def _build(kind: str, n: int, sections: int):
    if kind == "qadd":
        return build_qadd(n)
    if kind == "qleft":
        return build_qleft(n)
    if kind == "qmul":
        return build_qmul(n)
    if kind == "qmod":
        return build_qmod_section(n)
    return build_unrolled(n, sections)


def cmd_circuit(args) -> int:
    n = _bits(args)
    if args.sections < 1:
        raise UsageError("--sections must be >= 1")
    try:
        circuit = _build(args.kind, n, args.sections)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not (args.stats or args.qasm):
        args.stats = True
    if args.stats:
        sys.stdout.write(stats(circuit).to_text())
        if args.kind == "qmod":
            print(f"qubit_count(k=1): {qubit_count(1, n)}")
        elif args.kind == "unrolled":
            print(f"qubit_count(k={args.sections}): {qubit_count(args.sections, n)}")
        sys.stdout.write("registers:\n" + "".join("  " + line + "\n" for line in circuit.layout_text().splitlines()))
    if args.qasm:
        sys.stdout.write(to_qasm(circuit))
    return EXIT_OK


def selftest(inject_fault: bool = False, verbose: bool = True) -> list[str]:
    """Exhaustive QMOD oracle check at n = 2, 3 plus a dense/sparse cross-check."""
    failures = []
    for n in (2, 3):
        circuit = build_qmod_section(n)
        if inject_fault:
            circuit = circuit.with_gates(circuit.gates[:-1])
        m = 1 << n
        for w, x_in, d in itertools.product(range(m), repeat=3):
            inputs = {"w": w, "x_in": x_in, "delay": d}
            out = apply(circuit, prepare_basis(circuit.width, inputs, circuit.layout, SPARSE))
            idx = out.basis_index()
            got = {k: read_register(idx, circuit.layout, k) for k in circuit.layout}
            want = dict(inputs, product=(x_in + w * d) % m, shift_ancillas=0)
            if got != want:
                failures.append(f"n={n} w={w} x_in={x_in} d={d}: got {got}")
            dense = apply(circuit, prepare_basis(circuit.width, inputs, circuit.layout, DENSE))
            if dense != out:
                failures.append(f"n={n} w={w} x_in={x_in} d={d}: backends disagree")
    return failures


def cmd_selftest(args) -> int:
    start = time.perf_counter()
    failures = selftest(args.inject_fault)
    elapsed = time.perf_counter() - start
    for f in failures[:20]:
        print("FAIL", f, file=sys.stderr)
    status = "ok" if not failures else f"{len(failures)} failures"
    print(f"selftest: {status} ({elapsed:.2f} s)")
    return EXIT_OK if not failures else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmodchaos", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--n", type=int, help=f"bits per register (default {D.N_BITS})")
        p.add_argument("--modulus", type=int, help="modulus, must equal 2**n")

    exp = sub.add_parser("exp", help="run experiment a, b or c")
    exp.add_argument("name", choices=["a", "b", "c"])
    common(exp)
    exp.add_argument("--order", type=int)
    exp.add_argument("--w", type=_int_list, help="coefficients, comma separated")
    exp.add_argument("--ic", type=_int_list, help="initial conditions x[-1],x[-2],...")
    exp.add_argument("--p", type=_probability, default=0.0, help="bit-flip probability")
    exp.add_argument("--seed", type=int, help=f"rng seed (fallback ${D.SEED_ENV})")
    exp.add_argument("--runs", type=int, default=D.EXP_B_RUNS)
    exp.add_argument("--backend", choices=BACKENDS, default="auto")
    exp.add_argument("--out-dir", default=".")
    exp.add_argument("--scan-ic", action="store_true")
    exp.add_argument("--feedback", action="store_true", help="feed noisy readouts back as delays")
    exp.set_defaults(func=cmd_exp)

    codec = sub.add_parser("codec", help="encode or decode a series")
    codec.add_argument("direction", choices=["encode", "decode"])
    codec.add_argument("config")
    codec.add_argument("input", help="CSV input, '-' for stdin")
    codec.add_argument("output", help="CSV output, '-' for stdout")
    codec.set_defaults(func=cmd_codec)

    circ = sub.add_parser("circuit", help="build a circuit and print stats or QASM")
    circ.add_argument("kind", choices=["qadd", "qleft", "qmul", "qmod", "unrolled"])
    common(circ)
    circ.add_argument("--sections", type=int, default=1)
    circ.add_argument("--qasm", action="store_true")
    circ.add_argument("--stats", action="store_true")
    circ.set_defaults(func=cmd_circuit)

    st = sub.add_parser("selftest", help="exhaustive oracle check at n = 2, 3")
    st.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    st.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qmodchaos: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OracleMismatch as exc:
        print(f"qmodchaos: oracle mismatch: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"qmodchaos: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"qmodchaos: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
