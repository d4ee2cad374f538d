"""courant-kit command line.

Exit codes: 0 all checks pass, 1 some check fails, 2 a verdict is
inconclusive within the degree cap, 3 usage or model validation error.
"""

from __future__ import annotations

import argparse
import itertools
import os
import re
import sys
from fractions import Fraction

from . import __version__
from .bialgebra import (
    ad_invariance,
    compatibility_report,
    g_part,
    gstar_part,
    is_dirac_subalgebra,
    regularity_report,
    search_dirac_graphs,
)
from .courant import verify_courant_axioms
from .dirac import (
    InadmissibleError,
    admissible,
    astar_component_identity,
    check_foliation,
    dirac_from_quotient,
    hamiltonian_check,
    is_dirac,
    is_isotropic,
    reduced_bracket,
)
from .model import ModelError, Model, double_of, load_model
from .poly import MultiVector, ParseError, format_exterior, parse_poly, schouten
from .pullback import verify_pullback_theorem
from .report import FAIL, INCONCLUSIVE, PASS, Check, Report, Verdict

EXIT = {PASS: 0, FAIL: 1, INCONCLUSIVE: 2}
USAGE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _verdict_status(v: Verdict) -> str:
    if v:
        return PASS
    return INCONCLUSIVE if v.is_inconclusive else FAIL


class Run:
    """Body lines plus an overall status (worst of everything recorded)."""

    def __init__(self):
        self.lines: list[str] = []
        self.statuses: list[str] = []

    def say(self, line: str):
        self.lines.append(line)

    def report(self, rep: Report):
        self.lines.extend(rep.lines())
        self.statuses.append(rep.status())

    def verdict(self, v: Verdict, name: str):
        self.lines.append(v.render(name))
        self.statuses.append(_verdict_status(v))

    def check(self, c: Check):
        self.lines.append(c.line())
        self.statuses.append(c.status)

    @property
    def status(self) -> str:
        if FAIL in self.statuses:
            return FAIL
        if INCONCLUSIVE in self.statuses:
            return INCONCLUSIVE
        return PASS


# ---------------------------------------------------------------------------
# commands


def _candidate(m: Model, name: str, pool: dict | None = None):
    pool = m.candidates if pool is None else pool
    if name not in pool:
        known = ", ".join(sorted(pool)) or "none"
        raise UsageError(f"no candidate named {name!r} (known: {known})")
    return pool[name]


def cmd_verify_axioms(m: Model, args, run: Run):
    if m.double is None:
        raise UsageError("verify-axioms needs a chart")
    run.report(verify_courant_axioms(m.double))


def cmd_check_dirac(m: Model, args, run: Run):
    L = _candidate(m, args.name)
    pt = L.generic_point()
    run.say(f"CANDIDATE {L}")
    run.say("POINT " + ",".join(str(x) for x in pt))
    run.say(f"RANK {L.at(pt).dim} of {L.double.rank}")
    run.say(is_isotropic(L).render("ISOTROPIC"))
    if args.name in m.graph_bivectors:
        pi1 = m.graph_bivectors[args.name]
        sq = schouten(pi1, pi1) if isinstance(pi1, MultiVector) else L.double.b.A.schouten(pi1, pi1)
        run.say(f"SCHOUTEN [pi1,pi1] = {format_exterior(sq)}")
    run.verdict(is_dirac(L, args.degree_cap), "DIRAC")


def _poly_arg(m: Model, text: str):
    try:
        return parse_poly(text, m.chart)
    except (ParseError, ValueError) as exc:
        raise UsageError(f"cannot parse function {text!r}: {exc}") from None


def cmd_reduce(m: Model, args, run: Run):
    L = _candidate(m, args.name)
    f, g = _poly_arg(m, args.f), _poly_arg(m, args.g)
    cap = _cap(m, args)
    for h in (f, g):
        v = admissible(L, h, cap)
        run.verdict(v, f"ADMISSIBLE {h}")
        if not v:
            return
    run.say(f"BRACKET {{{f}, {g}}} = {reduced_bracket(L, f, g, cap)}")
    run.check(Report().record("ASTAR_IDENTITY", f"{f},{g}", astar_component_identity(L, f, g, cap)))


def _cap(m: Model, args) -> int:
    return args.degree_cap if args.degree_cap is not None else m.degree_cap


def cmd_from_quotient(m: Model, args, run: Run):
    q = m.require("quotient", "quotient")
    cap = _cap(m, args)
    L = dirac_from_quotient(q, m.pi, cap)
    if m.point is not None:
        L.point = list(m.point)
    run.say(f"CANDIDATE {L}")
    v = is_dirac(L, args.degree_cap)
    run.verdict(v, "DIRAC")
    if not v:
        return
    run.verdict(check_foliation(L, q.J, cap), "FOLIATION")
    rep = Report()
    ups = [q.J.pullback(u) for u in q.J.target.coords()]
    names = q.J.target.names
    for a, b in itertools.combinations(range(len(ups)), 2):
        got = reduced_bracket(L, ups[a], ups[b], cap)
        rep.record("ROUNDTRIP", f"{names[a]},{names[b]}", got - q.J.pullback(q.table[a][b]))
        rep.record("ASTAR_IDENTITY", f"{names[a]},{names[b]}", astar_component_identity(L, ups[a], ups[b], cap))
    run.report(rep)


def cmd_pullback(m: Model, args, run: Run):
    s = m.require("surjection", "surjection")
    L = _candidate(m, args.name, m.target_candidates)
    run.report(verify_pullback_theorem(s, L, args.degree_cap))


def cmd_check_hamiltonian(m: Model, args, run: Run):
    if args.name not in m.hamiltonians:
        raise UsageError(f"no hamiltonian block named {args.name!r}")
    omega = m.hamiltonians[args.name]
    v = hamiltonian_check(m.bialgebroid, omega, args.degree_cap)
    run.say(f"FORM {format_exterior(omega)}")
    run.say(f"RESIDUAL {format_exterior(v.details['residual'])}")
    run.verdict(v, "HAMILTONIAN")
    graph = v.details["graph"]
    run.say(graph.render("GRAPH DIRAC"))
    if graph.is_inconclusive:
        run.check(Check("AGREEMENT", args.name, INCONCLUSIVE, graph.label()))
    else:
        same = bool(graph) == bool(v)
        run.check(Check("AGREEMENT", args.name, PASS if same else FAIL, "" if same else "graph test disagrees"))


def cmd_bialgebra_verify(m: Model, args, run: Run):
    run.report(compatibility_report(m.require("bialgebra", "bialgebra")))


def _bialgebra_candidate(m: Model, d, name: str):
    if name == "g":
        return g_part(d)
    if name == "g*":
        return gstar_part(d)
    if name not in m.bialgebra_candidates:
        raise UsageError(f"no bialgebra candidate named {name!r}")
    return m.bialgebra_candidates[name]


def cmd_bialgebra_check(m: Model, args, run: Run):
    d = double_of(m)
    L = _bialgebra_candidate(m, d, args.name)
    run.say(f"CANDIDATE {L}")
    v = is_dirac_subalgebra(d, L)
    run.verdict(v, "DIRAC_SUBALGEBRA")
    if not v:
        return
    reg = regularity_report(d, L)
    run.report(reg.report)
    run.verdict(ad_invariance(d, L), "AD_INVARIANT")


def cmd_bialgebra_search(m: Model, args, run: Run):
    d = double_of(m)
    try:
        grid = [Fraction(x) for x in args.grid.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad grid {args.grid!r}") from None
    if not grid:
        raise UsageError("empty grid")
    try:
        found = search_dirac_graphs(d, grid)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    run.say(f"GRID {','.join(str(x) for x in sorted(set(grid)))}")
    run.say(f"FOUND {len(found)}")
    for c in found:
        run.say(f"CANDIDATE {c}")
        run.verdict(is_dirac_subalgebra(d, c), f"RECHECK {c.label}")


HANDLERS = {
    "verify-axioms": cmd_verify_axioms,
    "check-dirac": cmd_check_dirac,
    "reduce": cmd_reduce,
    "from-quotient": cmd_from_quotient,
    "pullback": cmd_pullback,
    "check-hamiltonian": cmd_check_hamiltonian,
    "bialgebra-verify": cmd_bialgebra_verify,
    "bialgebra-check": cmd_bialgebra_check,
    "bialgebra-search": cmd_bialgebra_search,
}


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="courant-kit", description="Exact checks for Courant algebroids and Dirac structures.")
    p.add_argument("--version", action="version", version=f"courant-kit {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--model", required=True, help="JSON model file")
        sp.add_argument("--degree-cap", type=int, default=None, help="degree cap for polynomial solves")
        sp.add_argument("--point", default=None, help="generic base point p1,...,pn")
        sp.add_argument("--out", default=None, help="also write the report here")
        return sp

    common(sub.add_parser("verify-axioms"))
    common(sub.add_parser("check-dirac")).add_argument("name")
    sp = common(sub.add_parser("reduce"))
    sp.add_argument("name")
    sp.add_argument("f")
    sp.add_argument("g")
    common(sub.add_parser("from-quotient"))
    common(sub.add_parser("pullback")).add_argument("name")
    common(sub.add_parser("check-hamiltonian")).add_argument("name")
    common(sub.add_parser("bialgebra-verify"))
    common(sub.add_parser("bialgebra-check")).add_argument("name")
    common(sub.add_parser("bialgebra-search")).add_argument("grid")
    return p


def thread_count() -> int:
    """COURANT_KIT_THREADS caps parallelism; checks currently run sequentially."""
    raw = os.environ.get("COURANT_KIT_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"COURANT_KIT_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"COURANT_KIT_THREADS must be a positive integer, got {raw!r}")
    return n


def _echo(argv) -> str:
    out = []
    skip = False
    for a in argv:
        if skip:
            out.append(os.path.basename(a))
            skip = False
            continue
        out.append(a)
        skip = a == "--model"
    return " ".join(out)


def _apply_point(m: Model, text: str):
    try:
        pt = [Fraction(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"bad point {text!r}") from None
    if m.chart is None or len(pt) != m.chart.dim:
        raise UsageError("point does not match the chart dimension")
    m.point = pt
    for L in m.candidates.values():
        L.point = list(pt)


_GRID = re.compile(r"^-?\d+(/\d+)?(,-?\d+(/\d+)?)*$")


def _protect_grid(argv: list) -> list:
    """Let ``bialgebra-search -1,0,1`` through argparse, which would read -1,0,1 as an option."""
    if not argv or argv[0] != "bialgebra-search" or "--" in argv:
        return argv
    grids = [a for a in argv[1:] if a.startswith("-") and _GRID.match(a)]
    if not grids:
        return argv
    rest = [a for a in argv if a not in grids]
    return rest + ["--"] + grids


def execute(argv) -> tuple[int, str]:
    """Run a command; returns (exit code, full report text)."""
    argv = list(argv)
    header = [f"courant-kit {__version__}", "command: " + _echo(argv), "---"]
    try:
        args = build_parser().parse_args(_protect_grid(argv))
        thread_count()
        if args.degree_cap is not None and args.degree_cap < 0:
            raise UsageError("--degree-cap must be non-negative")
        m = load_model(args.model)
        if args.point is not None:
            _apply_point(m, args.point)
        run = Run()
        HANDLERS[args.command](m, args, run)
    except UsageError as exc:
        return USAGE, "\n".join(header + [f"USAGE ERROR {exc}", "RESULT: ERROR"]) + "\n"
    except ModelError as exc:
        return USAGE, "\n".join(header + [f"MODEL ERROR {exc}", "RESULT: ERROR"]) + "\n"
    except OSError as exc:
        return USAGE, "\n".join(header + [f"IO ERROR {exc.strerror}: {exc.filename}", "RESULT: ERROR"]) + "\n"
    except InadmissibleError as exc:
        run.say(f"INADMISSIBLE {exc}")
        run.statuses.append(INCONCLUSIVE)
    except ValueError as exc:
        return USAGE, "\n".join(header + [f"ERROR {exc}", "RESULT: ERROR"]) + "\n"
    body = run.lines + [f"RESULT: {run.status}"]
    text = "\n".join(header + body) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT[run.status], text


def report_body(text: str) -> str:
    """The comparable section of a report: everything after the header."""
    return text.split("---\n", 1)[1]


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    if argv and argv[0] in ("-h", "--help", "--version"):
        try:
            build_parser().parse_args(argv)
        except SystemExit as exc:
            return int(exc.code or 0)
    code, text = execute(argv)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
