"""Command-line front end: one subcommand per experiment, CSV or JSON out.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import re
import sys

import numpy as np

from . import circle, cocycle, crossratio, edelstein, euclid, funcspace, isometry, tables
from .circle import ConvergenceError, Rotation, SineShear

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3


# -- diffeo expression grammar ------------------------------------------------


class SpecError(ValueError):
    def __init__(self, message, text, pos):
        super().__init__(f"{message} at position {pos} in {text!r}")
        self.pos = pos


_NUMBER = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?")
_INTEGER = re.compile(r"[+-]?\d+")


class _SpecParser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def fail(self, message):
        raise SpecError(message, self.text, self.pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def expect(self, token):
        self.skip()
        if not self.text.startswith(token, self.pos):
            self.fail(f"expected {token!r}")
        self.pos += len(token)

    def match(self, pattern, what):
        self.skip()
        m = pattern.match(self.text, self.pos)
        if not m:
            self.fail(f"expected {what}")
        self.pos = m.end()
        return m.group(0)

    def word(self):
        self.skip()
        m = re.compile(r"[a-z]+").match(self.text, self.pos)
        if not m:
            self.fail("expected rot, shear, inv, pow, comp or conj")
        self.pos = m.end()
        return m.group(0), m.start()

    def expr(self):
        name, start = self.word()
        if name == "rot":
            self.expect(":")
            return Rotation(float(self.match(_NUMBER, "a number")))
        if name == "shear":
            self.expect(":")
            eps = float(self.match(_NUMBER, "a number"))
            self.expect(":")
            q = int(self.match(_INTEGER, "an integer"))
            try:
                return SineShear(eps, q)
            except ValueError as exc:
                raise SpecError(str(exc), self.text, start) from None
        if name in ("inv", "pow", "comp", "conj"):
            self.expect("(")
            first = self.expr()
            if name == "inv":
                self.expect(")")
                return circle.inverse(first)
            self.expect(",")
            if name == "pow":
                m = int(self.match(_INTEGER, "an integer"))
                self.expect(")")
                return circle.power(first, m)
            second = self.expr()
            self.expect(")")
            return circle.compose(first, second) if name == "comp" else circle.conj(first, second)
        self.pos = start
        self.fail(f"unknown constructor {name!r}")

    def parse(self):
        out = self.expr()
        self.skip()
        if self.pos != len(self.text):
            self.fail("trailing input")
        return out


def parse_diffeo_spec(text: str) -> circle.Diffeo:
    """Parse ``rot:<rho> | shear:<eps>:<q> | inv(S) | pow(S,m) | comp(S,S) | conj(H,G)``.

    ``comp(a, b)`` is ``a o b`` and ``conj(h, g)`` is ``h o g o h^-1``.
    """
    return _SpecParser(text).parse()


def parse_space(text: str) -> funcspace.SpaceTag:
    t = text.strip().lower()
    if t == "c0":
        return funcspace.C0
    if t == "l1":
        return funcspace.L1
    if t == "l2":
        return funcspace.L2PAIR
    if t.startswith("lp:"):
        return funcspace.lp_pair(float(t[3:]))
    raise ValueError(f"unknown space {text!r}; use c0, l1, l2 or lp:<p>")


def parse_range(text: str) -> list:
    """``a..b`` inclusive, or a comma list."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise ValueError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    return [int(t) for t in text.split(",") if t.strip()]


def parse_times(text: str, f: circle.Diffeo | None = None) -> list:
    """``fib:k`` (golden-mean denominators), ``cf`` or ``cf:k`` (denominators
    of the measured rotation number), or an explicit list/range."""
    if text.startswith("fib:"):
        return circle.fibonacci_denominators(int(text[4:]))
    if text == "cf" or text.startswith("cf:"):
        if f is None:
            raise ValueError("--times cf needs a diffeo")
        depth = int(text[3:]) if text.startswith("cf:") else 10
        rho = circle.rotation_number(f) % 1.0
        dens = continued_denominators(rho, depth)
        if not dens:
            raise ValueError(f"rotation number {rho} has no usable convergents")
        return dens
    return parse_range(text)


def continued_denominators(rho: float, depth: int) -> list:
    if not 0 < rho < 1:
        return []
    seen, out = set(), []
    for q in circle.continued_fraction(rho, depth).denominators:
        if q not in seen:
            seen.add(q)
            out.append(q)
    return out


# -- output -------------------------------------------------------------------


def _emit(args, columns, rows, summary):
    if args.format == "json":
        payload = {"config": _config(args), **summary, "rows": tables.rows_as_records(columns, rows)}
        text = tables.json_text(payload)
    else:
        text = tables.csv_text(columns, rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config(args):
    skip = {"func", "out", "format"}
    return {k: v for k, v in vars(args).items() if k not in skip}


# -- subcommands --------------------------------------------------------------


def cmd_rotnum(args):
    f = parse_diffeo_spec(args.diffeo)
    rho = circle.rotation_number(f, args.iter)
    _emit(args, ["rotation_number"], [(rho,)], {"rotation_number": rho})


def cmd_cf(args):
    if (args.rho is None) == (args.diffeo is None):
        raise ValueError("give exactly one of --rho or --diffeo")
    rho = args.rho if args.rho is not None else circle.rotation_number(parse_diffeo_spec(args.diffeo)) % 1.0
    cf = circle.continued_fraction(rho, args.depth)
    rows = [(n + 1, a, p, q) for n, (a, (p, q)) in enumerate(zip(cf.partial_quotients, cf.convergents))]
    _emit(args, ["n", "a", "p", "q"], rows, {"rho": rho})


def cmd_cocycle_check(args):
    kind = {
        "log": cocycle.LOG,
        "affine": cocycle.AFFINE,
        "projective": cocycle.CocycleKind("projective", args.p),
    }[args.kind]
    g1, g2 = parse_diffeo_spec(args.g1), parse_diffeo_spec(args.g2)
    res = cocycle.verify_chain_rule(kind, g1, g2, args.samples, args.seed)
    _emit(args, ["kind", "residual"], [(str(kind), res)], {"residual": res})


def _isometry_setup(args):
    tag = parse_space(args.space)
    f = parse_diffeo_spec(args.diffeo)
    v = funcspace.named_vector(tag, args.vector, args.n)
    return tag, f, v


def cmd_recur(args):
    tag, f, v = _isometry_setup(args)
    times = parse_times(args.times, f)
    rep = isometry.recurrence_scan(isometry.AffineIsometry(tag, f), v, times)
    _emit(args, ["time", "residual"], rep.rows(), {"min_residual": min(rep.residuals)})


def cmd_drift(args):
    tag, f, v = _isometry_setup(args)
    times = parse_range(args.times) if args.times else None
    rows = isometry.drift_estimate(isometry.AffineIsometry(tag, f), v, args.nmax, times)
    _emit(args, ["n", "norm_over_n"], rows, {"last": rows[-1][1]})


def cmd_fixedpoint(args):
    tag = parse_space(args.space)
    h = parse_diffeo_spec(args.h)
    f = circle.conj(h, Rotation(args.rho))
    fp = isometry.fixed_point_from_conjugacy(tag, h, args.n)
    I = isometry.AffineIsometry(tag, f)
    res = funcspace.norm(tag, I(fp) - fp)
    size = funcspace.norm(tag, fp)
    summary = {"residual": res, "norm": size, "N": fp.n}
    _emit(args, ["quantity", "value"], [("residual", res), ("norm", size)], summary)


def cmd_conjugacy(args):
    tag = parse_space(args.space)
    h = parse_diffeo_spec(args.h)
    f = circle.conj(h, Rotation(args.rho))
    fp = isometry.fixed_point_from_conjugacy(tag, h, args.n)
    H = isometry.conjugacy_from_fixed_point(tag, fp)
    y = np.random.default_rng(args.seed).random(args.points)
    d = isometry.conjugation_derivative(H, f, y)
    dev = float(np.max(np.abs(d - 1.0)))
    _emit(args, ["y", "derivative"], list(zip(y, d)), {"max_deviation": dev})


def cmd_euclid(args):
    rng = np.random.default_rng(args.seed)
    I = euclid.random_isometry(rng, args.dim, args.fixed_dim, zero_drift=args.zero_drift)
    v = rng.standard_normal(args.dim) * args.vnorm
    table = euclid.convergence_check(I, v, args.nmax)
    dec = euclid.decompose(I)
    res = euclid.fixed_point_or_axis(I)
    summary = {"drift": dec.drift, "bound_holds": table.holds}
    if isinstance(res, euclid.FixedPoint):
        summary["fixed_point_residual"] = res.residual
    _emit(args, ["n", "deviation", "bound"], table.rows(), summary)


def cmd_edelstein(args):
    E = edelstein.EdelsteinIsometry(args.dim)
    if args.seed is None:
        v = np.zeros(args.dim, dtype=complex)
    else:
        rng = np.random.default_rng(args.seed)
        v = (rng.standard_normal(args.dim) + 1j * rng.standard_normal(args.dim)) * args.vscale
    scan = edelstein.recurrence_scan(E, v, parse_range(args.scan))
    report = edelstein.fixed_point_analysis(E)
    summary = {"strictly_decreasing": scan.strictly_decreasing(), **report.summary()}
    rows = [(n, str(nf), r) for n, nf, r in scan.rows()]
    _emit(args, ["n", "n!", "residual"], rows, summary)


def cmd_crossratio_scan(args):
    f = parse_diffeo_spec(args.diffeo)
    d = crossratio.normalize_d(args.a, args.b, args.c)
    q = crossratio.Quadruple(args.a, args.b, args.c, d)
    times = list(range(args.step, args.nmax + 1, args.step))
    scan = crossratio.blowup_scan(f, q, times)
    rows = list(zip(scan.times, scan.values))
    _emit(args, ["n", "crossratio"], rows, {"d": d, "max_observed": scan.max_observed})


def cmd_blowup_demo(args):
    f, q = crossratio.rational_blowup_example(args.p, args.q, args.eps)
    times = list(range(args.q, args.nmax + 1, args.q))
    if not times:
        raise ValueError("--nmax must be at least q")
    scan = crossratio.blowup_scan(f, q, times)
    running, rows = 1.0, []
    for n, val, ok in zip(scan.times, scan.values, scan.resolved):
        if ok:
            running = max(running, val)
        rows.append((n, val, bool(ok), crossratio.implied_chi_lower_bound(running)))
    m = scan.max_observed
    summary = {
        "quadruple": list(q.points),
        "max_observed": m,
        "first_exceeding_1e3": scan.first_exceeding(1e3),
        "implied_chi_lower_bound": crossratio.implied_chi_lower_bound(m),
    }
    _emit(args, ["n", "crossratio", "resolved", "implied_chi_lower_bound"], rows, summary)


def cmd_commute(args):
    tag = parse_space(args.space)
    h = parse_diffeo_spec(args.h)
    rhos = [float(r) for r in args.rhos.split(",")]
    fam = isometry.commuting_family(h, rhos, tag)
    v = funcspace.named_vector(tag, args.vector, args.n)
    rows = []
    for i in range(len(fam)):
        for j in range(i + 1, len(fam)):
            a, b = fam[i], fam[j]
            comm = funcspace.norm(tag, a(b(v)) - b(a(v)))
            both = isometry.AffineIsometry(tag, circle.compose(a.f, b.f))
            action = funcspace.norm(tag, both(v) - b(a(v)))
            rows.append((i, j, comm, action))
    worst = max(r[2] for r in rows)
    _emit(args, ["i", "j", "commutator", "action_residual"], rows, {"max_commutator": worst})


# -- argument parsing ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="circle-isometries",
        description="Affine isometries induced by circle diffeomorphisms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--out", help="output file (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        return p

    def iso_flags(p):
        p.add_argument("--diffeo", required=True)
        p.add_argument("--space", default="c0")
        p.add_argument("--n", type=int, default=None, help="grid size (power of two)")
        p.add_argument("--vector", default="sin", choices=funcspace.VECTOR_NAMES)

    p = add("rotnum", cmd_rotnum, "rotation number of a diffeo")
    p.add_argument("--diffeo", required=True)
    p.add_argument("--iter", type=int, default=100_000)

    p = add("cf", cmd_cf, "continued-fraction convergents")
    p.add_argument("--rho", type=float)
    p.add_argument("--diffeo")
    p.add_argument("--depth", type=int, default=10)

    p = add("cocycle-check", cmd_cocycle_check, "chain-rule residual of a cocycle")
    p.add_argument("--kind", choices=("log", "affine", "projective"), default="log")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--g1", required=True)
    p.add_argument("--g2", required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)

    p = add("recur", cmd_recur, "recurrence residuals along a list of times")
    iso_flags(p)
    p.add_argument("--times", default="fib:10")

    p = add("drift", cmd_drift, "orbit growth ||I^n v|| / n")
    iso_flags(p)
    p.add_argument("--nmax", type=int, default=100)
    p.add_argument("--times", help="explicit times instead of 1..nmax")

    for name, func, help_ in (
        ("fixedpoint", cmd_fixedpoint, "fixed point built from a conjugacy"),
        ("conjugacy", cmd_conjugacy, "conjugacy recovered from a fixed point"),
    ):
        p = add(name, func, help_)
        p.add_argument("--h", required=True, help="conjugating diffeo")
        p.add_argument("--rho", type=float, default=(math.sqrt(5) - 1) / 2)
        p.add_argument("--space", default="c0")
        p.add_argument("--n", type=int, default=None)
        if name == "conjugacy":
            p.add_argument("--points", type=int, default=1000)
            p.add_argument("--seed", type=int, default=0)

    p = add("euclid", cmd_euclid, "drift bound for a random Euclidean isometry")
    p.add_argument("--dim", type=int, default=10)
    p.add_argument("--fixed-dim", type=int, default=0)
    p.add_argument("--zero-drift", action="store_true")
    p.add_argument("--nmax", type=int, default=200)
    p.add_argument("--vnorm", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)

    p = add("edelstein", cmd_edelstein, "recurrence along n! for the l2 rotation example")
    p.add_argument("--dim", type=int, default=50)
    p.add_argument("--scan", default="2..10")
    p.add_argument("--seed", type=int, default=None, help="random start vector (default zero)")
    p.add_argument("--vscale", type=float, default=0.01)

    p = add("crossratio-scan", cmd_crossratio_scan, "cross-ratios of iterated quadruples")
    p.add_argument("--diffeo", required=True)
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", type=float, default=0.25)
    p.add_argument("--c", type=float, default=0.5)
    p.add_argument("--nmax", type=int, default=300)
    p.add_argument("--step", type=int, default=1)

    p = add("blowup-demo", cmd_blowup_demo, "cross-ratio blowup for rational rotation number")
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--q", type=int, default=3)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--nmax", type=int, default=300)

    p = add("commute", cmd_commute, "commutators within a shared-conjugacy family")
    p.add_argument("--h", required=True)
    p.add_argument("--rhos", default="0.6180339887498949,0.41421356237309515")
    p.add_argument("--space", default="c0")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--vector", default="sin", choices=funcspace.VECTOR_NAMES)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
