"""``latcount`` command line.

Reports are flat ``key=value`` lines on standard output.  Exit status is 0
on success, 2 for unreadable or invalid input, 3 when a computation is
refused for exceeding the budget and 4 when ``--crosscheck`` disagrees.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import hypergraph as hg
from .counting import INFINITE, count_canonical, count_standard
from .errors import BudgetExceeded, LatcountError
from .instances import InstanceFile, ParseError, parse_instance, write_instance
from .linalg import rank, sparsity_stats
from .oracle import OracleUnbounded, auto_box, oracle_count, oracle_optcount
from .polyhedron import CanonicalSystem, is_bounded, standard_to_canonical, vertex_count_bound
from .solver import (FEASIBLE, feasible, feasible_standard, optimize, optimize_and_count,
                     optimize_and_count_standard, optimize_standard)

EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_MISMATCH = 0, 2, 3, 4

HYPER_PROBLEMS = {
    "stable-multiset": hg.STABLE_MULTISET,
    "vertex-multicover": hg.VERTEX_MULTICOVER,
    "set-multicover": hg.SET_MULTICOVER,
    "multimatching": hg.MULTIMATCHING,
    "dominating-multiset": "dominating",
}

__all__ = ["main", "run", "parse_instance", "write_instance"]


class InputError(LatcountError):
    pass


def _fmt(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, (tuple, list)):
        return ",".join(str(x) for x in v)
    return str(v)


class Report:
    def __init__(self):
        self.items: list[tuple[str, object]] = []

    def __setitem__(self, key: str, value) -> None:
        self.items.append((key, value))

    def text(self) -> str:
        return "".join(f"{k}={_fmt(v)}\n" for k, v in self.items)


def _parse_objective(s: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in s.replace(" ", "").split(",") if x != "")
    except ValueError:
        raise InputError(f"objective must be comma separated integers, got {s!r}") from None


def _canonical(inst: InstanceFile) -> CanonicalSystem:
    if inst.kind == "canonical":
        return inst.system
    if inst.kind == "standard":
        S = inst.system
        C = standard_to_canonical(S)
        if not S.consistent:
            C = C.with_rows([(0,) * S.n], [-1])
        return C
    raise InputError(f"command needs a canonical or standard instance, got {inst.kind}")


def _objective(inst: InstanceFile, flag: str | None) -> tuple[int, ...]:
    c = _parse_objective(flag) if flag is not None else inst.objective
    if c is None:
        raise InputError("no objective given (use --objective or an objective line)")
    if len(c) != inst.system.n:
        raise InputError(f"objective has {len(c)} entries for {inst.system.n} variables")
    return c


def _oracle_box(C: CanonicalSystem, rep: Report):
    try:
        return auto_box(C)
    except OracleUnbounded:
        rep["crosscheck"] = "skipped"
        return None


def _cmd_count(inst, args, rep: Report) -> int:
    if inst.kind == "standard":
        res = count_standard(inst.system, args.method)
    else:
        res = count_canonical(_canonical(inst), args.method)
    rep["count"] = res.count
    rep["vertices"] = res.vertex_count
    rep["dimension"] = res.dimension
    rep["delta"] = res.delta_used
    rep["sigma"] = res.sigma_max
    rep["chi"] = res.chi_max
    rep["direction"] = res.direction
    if args.crosscheck:
        C = _canonical(inst)
        box = _oracle_box(C, rep)
        if box is not None:
            o = oracle_count(C, box)
            rep["oracle_count"] = o
            ok = res.count == o
            rep["crosscheck"] = "pass" if ok else "fail"
            return EXIT_OK if ok else EXIT_MISMATCH
    return EXIT_OK


def _cmd_feasible(inst, args, rep: Report) -> int:
    if inst.kind == "standard":
        res = feasible_standard(inst.system, args.method)
    else:
        res = feasible(_canonical(inst), args.method)
    rep["status"] = res.status
    rep["witness"] = res.witness
    rep["oracle_calls"] = res.oracle_calls
    if args.crosscheck:
        C = _canonical(inst)
        box = _oracle_box(C, rep)
        if box is not None:
            o = oracle_count(C, box)
            rep["oracle_count"] = o
            ok = (res.status == FEASIBLE) == (o > 0)
            if res.witness is not None:
                ok = ok and C.contains(res.witness)
            rep["crosscheck"] = "pass" if ok else "fail"
            return EXIT_OK if ok else EXIT_MISMATCH
    return EXIT_OK


def _cmd_opt(inst, args, rep: Report, with_count: bool) -> int:
    c = _objective(inst, args.objective)
    if inst.kind == "standard":
        fn = optimize_and_count_standard if with_count else optimize_standard
        res = fn(inst.system, c, args.method)
    else:
        fn = optimize_and_count if with_count else optimize
        res = fn(_canonical(inst), c, args.method)
    rep["objective"] = c
    rep["status"] = res.status
    rep["optimum"] = res.optimum
    if with_count:
        rep["optima_count"] = res.optima_count
    rep["witness"] = res.witness
    rep["oracle_calls"] = res.oracle_calls
    if args.crosscheck:
        C = _canonical(inst)
        box = _oracle_box(C, rep)
        if box is not None:
            o = oracle_optcount(C, c, box)
            rep["oracle_status"] = o.status
            rep["oracle_optimum"] = o.optimum
            ok = res.status == o.status and res.optimum == o.optimum
            if with_count:
                rep["oracle_optima_count"] = o.count if o.status == FEASIBLE else None
                ok = ok and (res.optima_count == o.count or o.status != FEASIBLE)
            rep["crosscheck"] = "pass" if ok else "fail"
            return EXIT_OK if ok else EXIT_MISMATCH
    return EXIT_OK


def _with_default_bounds(H: hg.HypergraphInstance, mode: str) -> hg.HypergraphInstance:
    """Fill the bound side a problem needs with 1 when the file leaves it open."""
    lo_e, hi_e, lo_v, hi_v = H.edge_lower, H.edge_upper, H.vertex_lower, H.vertex_upper
    unset = lambda xs: all(x is None for x in xs)  # noqa: E731
    if mode == hg.STABLE_MULTISET and unset(lo_e + hi_e):
        hi_e = (1,) * H.edge_count
    elif mode == hg.VERTEX_MULTICOVER and unset(lo_e + hi_e):
        lo_e = (1,) * H.edge_count
    elif mode == hg.MULTIMATCHING and unset(lo_v + hi_v):
        hi_v = (1,) * H.vertex_count
    elif mode in (hg.SET_MULTICOVER, "dominating") and unset(lo_v + hi_v):
        lo_v = (1,) * H.vertex_count
    return hg.HypergraphInstance(H.vertex_count, H.edges, edge_lower=lo_e, edge_upper=hi_e,
                                 vertex_lower=lo_v, vertex_upper=hi_v, weights=H.weights,
                                 mult=H.mult)


def _cmd_hyper(inst, args, rep: Report) -> int:
    if inst.kind != "hypergraph":
        raise InputError("hyper commands need a hypergraph instance")
    mode = HYPER_PROBLEMS[args.problem]
    H = _with_default_bounds(inst.system, mode)
    rep["problem"] = args.problem
    if mode == "dominating":
        if any(len(e) != 2 for e in H.edges):
            raise InputError("dominating-multiset needs a simple graph (edges of size 2)")
        if len(set(H.edges)) != len(H.edges):
            raise InputError("dominating-multiset needs a simple graph (no repeated edges)")
        if any(x is not None for x in H.vertex_upper):
            raise InputError("dominating-multiset takes only lower vertex bounds")
        sets = hg.neighbourhood_hypergraph(H.vertex_count, H.edges, closed=not args.open)
        H = hg.HypergraphInstance(H.vertex_count, sets, vertex_lower=H.vertex_lower,
                                  weights=H.weights, mult=H.mult)
        mode = hg.SET_MULTICOVER
    try:
        if args.standard:
            res = hg.solve_standard(H, mode, args.method)
        else:
            res = hg.solve(H, mode, method=args.method)
    except hg.InconsistentBounds as exc:
        raise InputError(str(exc)) from None
    rep["status"] = res.status
    rep["optimum"] = res.optimum
    rep["optima_count"] = res.optima_count
    rep["witness"] = res.witness
    if args.crosscheck:
        if res.status == "UNBOUNDED":
            rep["crosscheck"] = "skipped"
            return EXIT_OK
        bf = hg.brute_force(H, mode)
        if bf is None:
            ok = res.status == "INFEASIBLE"
        else:
            rep["oracle_optimum"] = bf[0]
            rep["oracle_optima_count"] = bf[1]
            ok = (res.optimum, res.optima_count) == bf[:2]
        rep["crosscheck"] = "pass" if ok else "fail"
        return EXIT_OK if ok else EXIT_MISMATCH
    return EXIT_OK


def _stats_lines(A, rep: Report, prefix: str = "") -> None:
    st = sparsity_stats(A)
    for name in ("row_sparse", "col_sparse", "weak_row_sparse", "weak_col_sparse", "norm1",
                 "norm_inf", "max_norm", "gamma1", "gamma_inf", "totn", "delta_gcd"):
        rep[prefix + name] = getattr(st, name)
    rep[prefix + "delta_k"] = st.delta_k
    rep[prefix + "detlb"] = st.detlb


def _cmd_stats(inst, args, rep: Report) -> int:
    if inst.kind == "hypergraph":
        H = inst.system
        rep["vertices"] = H.vertex_count
        rep["edges"] = H.edge_count
        rep["d1"] = H.d1
        rep["d2"] = H.d2
        if H.edge_count:
            _stats_lines(H.incidence_matrix(), rep, "incidence_")
        return EXIT_OK
    S = inst.system
    rep["kind"] = inst.kind
    rep["rows"] = len(S.A)
    rep["n"] = S.n
    if S.A:
        rep["rank"] = rank(S.A)
        _stats_lines(S.A, rep)
    C = _canonical(inst)
    rep["bounded"] = is_bounded(C)
    if C.m and rank(C.A) == C.n:
        rep["vertex_count_bound"] = vertex_count_bound(C)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="latcount", description="Exact integer-point counting, "
                                "feasibility and optimisation over rational polyhedra.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, crosscheck=True):
        sp.add_argument("instance", help="instance file ('-' for standard input)")
        if crosscheck:
            sp.add_argument("--crosscheck", action="store_true",
                            help="compare against exhaustive enumeration")
        sp.add_argument("--method", choices=("sliding", "naive"), default="sliding",
                        help="level recurrence of the group dynamic program")

    common(sub.add_parser("count", help="number of integer points"))
    common(sub.add_parser("feasible", help="integer feasibility with a witness"))
    for name in ("optimize", "optcount"):
        sp = sub.add_parser(name, help="maximise an objective" + (
            " and count optimal points" if name == "optcount" else ""))
        common(sp)
        sp.add_argument("--objective", help="comma separated integers, e.g. 1,1")
    sp = sub.add_parser("hyper", help="hypergraph multi-packing/multi-cover problems")
    sp.add_argument("problem", choices=sorted(HYPER_PROBLEMS))
    common(sp)
    sp.add_argument("--standard", action="store_true",
                    help="solve edge-based problems through the slack standard form")
    sp.add_argument("--open", action="store_true",
                    help="dominating-multiset with open neighbourhoods")
    common(sub.add_parser("stats", help="sparsity and subdeterminant diagnostics"),
           crosscheck=False)
    return p


_COMMANDS = {
    "count": _cmd_count,
    "feasible": _cmd_feasible,
    "optimize": lambda i, a, r: _cmd_opt(i, a, r, False),
    "optcount": lambda i, a, r: _cmd_opt(i, a, r, True),
    "hyper": _cmd_hyper,
    "stats": _cmd_stats,
}


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if args.instance == "-":
            text = sys.stdin.read()
        else:
            with open(args.instance, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    rep = Report()
    try:
        inst = parse_instance(text)
        rep["command"] = args.command
        code = _COMMANDS[args.command](inst, args, rep)
    except (ParseError, InputError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"refused: {exc}", file=stderr)
        rep["status"] = "REFUSED"
        stdout.write(rep.text())
        return EXIT_BUDGET
    stdout.write(rep.text())
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
