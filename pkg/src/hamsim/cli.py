"""Batch command-line driver: ``hamsim <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import fileio
from .errors import ConvergenceError, HamsimError
from .linalg import Tolerances
from .phases import ScalarModel, solve_phases, theta_grid, verify_phases
from .pipeline import bench_chem, bench_compare, bench_fig2, load_source, simulate, verify
from .planner import plan_queries
from .qsp import AXIS, GLOBAL_PHASE, PhaseSequence
from .qubitization import check_qubitized, hermitian_qubitize, iterate
from .encoding import signal_operator

SOURCES = ("pauli", "dense", "purified", "sparse")
USAGE_EXIT = 64  # 2 is reserved for capacity errors


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get("QSIM_SEED", 0))


def _tol(args) -> Tolerances:
    if getattr(args, "tol", None) is not None:
        return Tolerances(args.tol, args.tol, args.tol)
    return Tolerances.from_env()


def _model(args) -> ScalarModel:
    grid = theta_grid(args.theta_grid) if args.theta_grid else None
    return ScalarModel(grid, args.axis, args.global_phase)


def _source(args):
    picked = [(k, getattr(args, k)) for k in SOURCES + ("unitary",) if getattr(args, k, None)]
    if len(picked) != 1:
        print("exactly one of --pauli/--dense/--purified/--sparse is required", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)
    kind, path = picked[0]
    return load_source(kind, path, getattr(args, "ancilla_dim", None))


def _emit(lines, out):
    text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _add_source(p, unitary=False):
    g = p.add_argument_group("source")
    for k in SOURCES:
        g.add_argument(f"--{k}", metavar="FILE")
    if unitary:
        g.add_argument("--unitary", metavar="FILE", help="raw encoding unitary with |G> = |0>")
        g.add_argument("--ancilla-dim", type=int, default=2)


def _add_common(p):
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--axis", type=float, default=AXIS)
    p.add_argument("--global-phase", type=float, default=GLOBAL_PHASE)
    p.add_argument("--theta-grid", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out", default=None)


def cmd_encode(args):
    enc = _source(args)
    sig = signal_operator(enc)
    info = {
        "system_dim": enc.system_dim,
        "ancilla_dim": enc.ancilla_dim,
        "alpha": enc.alpha,
        **{k: v for k, v in enc.validate(_tol(args).unitarity_tol).items()},
        "hermitian_signal": bool(np.allclose(sig, sig.conj().T, atol=1e-10)),
    }
    if args.out:
        fileio.write_dense(args.out, enc.u)
    print(json.dumps(info, indent=2))
    return 0


def cmd_qubitize(args):
    enc = _source(args)
    q = hermitian_qubitize(enc, _tol(args))
    ok, r1, r2 = check_qubitized(q.enc, q.s_op)
    w = iterate(q)
    if args.out:
        fileio.write_dense(args.out, w)
    print(json.dumps({"extended": q.extended, "conditions_hold": ok, "residual_signal": r1,
                      "residual_square": r2, "iterate_dim": w.shape[0]}, indent=2))
    return 0


def cmd_plan(args):
    p = plan_queries(args.time, args.eps)
    rows = ["t,eps,N,q,truncation_error,upper_bound",
            f"{fileio.fmt(p.t)},{fileio.fmt(p.eps)},{p.N},{p.q},{fileio.fmt(p.truncation_error)},{fileio.fmt(p.upper_bound)}"]
    _emit(rows, args.out)
    return 0


def cmd_phases(args):
    model = _model(args)
    if args.phases:
        ph = fileio.read_phases(args.phases)
        err = verify_phases(PhaseSequence(ph, args.global_phase), args.time, model)
        print(f"N,t,max_error\n{ph.size},{fileio.fmt(args.time)},{fileio.fmt(err)}")
        return 0 if args.eps is None or err <= args.eps else 1
    rep = solve_phases(args.time, args.eps, N=args.N, seed=_seed(args), model=model, restarts=args.restarts)
    if args.out:
        fileio.write_phases(args.out, rep.phases.phases)
    print(rep.CSV_HEADER)
    print(rep.csv_row())
    if not rep.converged:
        print(f"phase solver did not reach eps={args.eps:g}", file=sys.stderr)
        return ConvergenceError.exit_code
    return 0


def cmd_simulate(args):
    enc = _source(args)
    phases = None
    if args.phases:
        phases = PhaseSequence(fileio.read_phases(args.phases), args.global_phase)
    rep = simulate(enc, args.time, args.eps, phases=phases, seed=_seed(args), model=_model(args),
                   axis=args.axis, global_phase=args.global_phase, restarts=args.restarts)
    d = rep.as_dict()
    lines = [",".join(d), ",".join(fileio.fmt(v) if isinstance(v, float) else str(v) for v in d.values())]
    _emit(lines, args.out)
    print(f"wall_time {rep.wall_time:.3f}s", file=sys.stderr)
    return 0 if rep.distance_to_exact <= args.eps else 1


def cmd_verify(args):
    res = verify(_source(args), _tol(args))
    text = json.dumps({"passed": all(r["passed"] for r in res), "checks": res}, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0 if all(r["passed"] for r in res) else 1


def cmd_bench(args):
    if args.bench == "fig2":
        _emit(bench_fig2(), args.out)
    elif args.bench == "compare":
        ts = args.times or list(np.logspace(0, 4, 17))
        _emit(bench_compare(args.eps, ts), args.out)
    elif args.bench == "chem":
        path = args.pauli or resources.files("hamsim") / "data" / "synthetic_chem.pauli"
        _emit(bench_chem(fileio.read_pauli_blocks(path), args.eps), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="hamsim", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("encode", help="build and validate a block-encoding")
    _add_source(p)
    _add_common(p)
    p.set_defaults(fn=cmd_encode)

    p = sub.add_parser("qubitize", help="qubitize an encoding and report the conditions")
    _add_source(p)
    _add_common(p)
    p.set_defaults(fn=cmd_qubitize)

    p = sub.add_parser("plan", help="query count for time t and error eps")
    p.add_argument("--time", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_plan)

    p = sub.add_parser("phases", help="solve or verify QSP phases")
    p.add_argument("--time", type=float, required=True)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--phases", metavar="FILE", default=None)
    p.add_argument("--restarts", type=int, default=200)
    _add_common(p)
    p.set_defaults(fn=cmd_phases)

    p = sub.add_parser("simulate", help="end-to-end simulation against the exact exponential")
    _add_source(p)
    p.add_argument("--time", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--phases", metavar="FILE", default=None)
    p.add_argument("--restarts", type=int, default=200)
    _add_common(p)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("verify", help="run the property suite on an encoding")
    _add_source(p, unitary=True)
    _add_common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("bench", help="benchmark tables as CSV")
    bsub = p.add_subparsers(dest="bench", required=True, parser_class=_Parser)
    b = bsub.add_parser("fig2", help="truncation error and its bound versus t")
    b.add_argument("--out", default=None)
    b = bsub.add_parser("compare", help="QSP versus truncated-Taylor query counts")
    b.add_argument("--eps", type=float, default=1e-2)
    b.add_argument("--times", type=float, nargs="+", default=None)
    b.add_argument("--out", default=None)
    b = bsub.add_parser("chem", help="Trotter versus QSP cost per Pauli block")
    b.add_argument("--pauli", metavar="FILE", default=None)
    b.add_argument("--eps", type=float, default=1.6e-3)
    b.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "cmd", None) == "phases" and args.phases is None and args.eps is None:
        print("--eps is required when solving phases", file=sys.stderr)
        return USAGE_EXIT
    try:
        return args.fn(args)
    except HamsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
