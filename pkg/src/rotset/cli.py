"""Command-line entry point.

Every command prints its primary result (CSV or JSON) on stdout.  With
``--out DIR`` the same artifacts, any SVG figures and a ``manifest.json``
are also written to ``DIR``.  Exit status is 0 on success, 1 on a domain
error (a JSON error object goes to stderr and, with ``--out``, to
``error.json``) and 2 on a usage error.
"""

import argparse
import csv
import hashlib
import io
import json
import math
import platform
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import BadSpec, RotsetError

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


class InputError(RotsetError):
    """Unreadable or malformed input file."""


# ---------------------------------------------------------------- helpers

def _floats(text):
    try:
        return np.array([float(Fraction(x)) for x in str(text).split(",") if x.strip()])
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text):
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _load_json(path, what):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {what} file {path}: {exc.strerror}", "dispatch",
                         path=str(path)) from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} file {path} is not valid JSON: {exc.msg}", "dispatch",
                         path=str(path), line=exc.lineno) from None


def _system(args):
    from .sft import sft_from_json
    return sft_from_json(_load_json(args.system, "system"))


def _potential(args, sft):
    from .potential import parse_potential
    return parse_potential(_load_json(args.potential, "potential"), sft)


def _fmt(x):
    """Shortest round-trip float text; integers print without a decimal point."""
    x = float(x)
    if not math.isfinite(x):
        return repr(x)
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _csv(rows, header=None):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def _json(obj):
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


class Run:
    """Collects the artifacts of one command and writes them with a manifest."""

    def __init__(self, args, argv):
        self.args = args
        self.argv = argv
        self.files = {}

    def emit(self, name, text, stdout=True):
        if stdout:
            sys.stdout.write(text)
        self.files[name] = text

    def figure(self, name, fig):
        self.files[name] = fig.render()

    def finish(self):
        out = getattr(self.args, "out", None)
        if not out:
            return
        d = Path(out)
        d.mkdir(parents=True, exist_ok=True)
        hashes = {}
        for name, text in sorted(self.files.items()):
            (d / name).write_text(text)
            hashes[name] = hashlib.sha256(text.encode()).hexdigest()
        (d / "manifest.json").write_text(_json(self._manifest(hashes)))

    def _manifest(self, hashes):
        import networkx
        import scipy
        from . import __version__
        config = {k: v for k, v in vars(self.args).items() if k not in ("func", "out")}
        return {"command": self.args.command, "argv": self.argv, "config": config,
                "versions": {"rotset": __version__, "python": platform.python_version(),
                             "numpy": np.__version__, "scipy": scipy.__version__,
                             "networkx": networkx.__version__},
                "artifacts": hashes}


def _polytope_figure(vertices, extra=()):
    from .svg import Figure
    fig = Figure()
    fig.polygon(vertices, stroke="black", fill="#dde8f5")
    for kind, pts, colour in extra:
        if kind == "points":
            fig.points(pts, color=colour)
        elif kind == "curve":
            fig.polyline(pts, stroke=colour, closed=True)
    return fig


# ---------------------------------------------------------------- commands

def cmd_rotset(args, run):
    from .rotgeom import approximate_rotation_polytope, rotation_polytope
    sft = _system(args)
    p = _potential(args, sft)
    if args.approximate:
        poly = approximate_rotation_polytope(sft, p, n_directions=args.directions)
    else:
        poly = rotation_polytope(sft, p, max_cycles=args.max_cycles)
    run.emit("rotset.csv", _csv(poly.vertices.tolist()))
    summary = {"vertices": poly.vertices, "cycles": [list(c) for c in poly.cycles],
               "dim": poly.dim, "certified_gap": poly.certified_gap}
    run.emit("rotset.json", _json(summary), stdout=False)
    if poly.m == 2:
        run.figure("rotset.svg", _polytope_figure(poly.vertices))


def cmd_support(args, run):
    from .rotgeom import support
    from .sft import format_word
    sft = _system(args)
    p = _potential(args, sft)
    rows = []
    for u in args.u:
        q = support(sft, p, u)
        rows.append(list(u) + [q.value, format_word(q.witness, sft.d)])
    m = len(args.u[0])
    run.emit("support.csv", _csv(rows, [f"u{i + 1}" for i in range(m)] + ["value", "witness"]))


def cmd_pressure(args, run):
    from .thermo import ThermoSystem, grad_pressure
    sft = _system(args)
    sys_ = ThermoSystem(sft, _potential(args, sft))
    ev = sys_.pressure(args.T)
    run.emit("pressure.json", _json({"T": ev.T, "Q": ev.Q, "grad": grad_pressure(ev),
                                     "primitive": ev.primitive, "residual": ev.residual}))


def cmd_entropy(args, run):
    from .thermo import solve_rotation
    sft = _system(args)
    sol = solve_rotation(sft, _potential(args, sft), args.w, tol=args.tol)
    run.emit("entropy.json", _json(sol.to_dict()))


def _grid(args, m):
    if args.grid_file:
        data = np.loadtxt(args.grid_file, delimiter=",", ndmin=2)
        return [row for row in data]
    if m != 1:
        raise BadSpec("--grid start:stop:num is for scalar potentials; use --grid-file",
                      "entropy_profile")
    try:
        a, b, n = args.grid.split(":")
        return [np.array([x]) for x in np.linspace(float(a), float(b), int(n))]
    except ValueError:
        raise BadSpec(f"--grid expects start:stop:num, got {args.grid!r}",
                      "entropy_profile") from None


def cmd_profile(args, run):
    from .thermo import entropy_profile
    sft = _system(args)
    p = _potential(args, sft)
    m = p.as_table().m
    sols = entropy_profile(sft, p, _grid(args, m))
    header = [f"w{i + 1}" for i in range(m)] + ["H"] + [f"T{i + 1}" for i in range(m)] \
        + ["iterations"]
    rows = [list(s.w) + [s.H] + list(s.T) + [s.iterations] for s in sols]
    run.emit("profile.csv", _csv(rows, header))
    failures = [{"w": s.w, "error": s.error} for s in sols if not s.converged]
    if failures:
        run.emit("failures.json", _json(failures), stdout=False)


def cmd_levels(args, run):
    from .thermo import level_curve, system_for
    sft = _system(args)
    p = _potential(args, sft)
    rows, curves = [], []
    for R in args.R:
        C = level_curve(sft, p, R, args.samples)
        curves.append(C)
        rows += [[R] + list(c) for c in C]
    m = p.as_table().m
    run.emit("levels.csv", _csv(rows, ["R"] + [f"x{i + 1}" for i in range(m)]))
    if m == 2:
        poly = system_for(sft, p).polytope
        palette = ["#c0392b", "#d35400", "#27ae60", "#2980b9", "#8e44ad"]
        extra = [("curve", C, palette[i % len(palette)]) for i, C in enumerate(curves)]
        run.figure("levels.svg", _polytope_figure(poly.vertices, extra))


def cmd_perorbit(args, run):
    from . import perorbit
    sft = _system(args)
    p = _potential(args, sft)
    if args.action == "census":
        c = perorbit.census(sft, p, args.n, q=Fraction(args.q), mode=args.mode)
        rows = [list(cell) + [cnt] for cell, cnt in c.bins.items()]
        m = len(next(iter(c.bins))) if c.bins else 1
        rows = [[float(Fraction(v) * c.q) for v in r[:m]] + [r[m]] for r in rows]
        run.emit("census.csv", _csv(rows, [f"center{i + 1}" for i in range(m)] + ["count"]))
        run.emit("census.json", _json({"n": c.n, "total": c.total, "q": c.q, "mode": c.mode}),
                 stdout=False)
    elif args.action == "ball":
        fn = perorbit.count_in_ball if args.estimator == "per" else perorbit.count_words_in_ball
        b = fn(sft, p, args.w, args.r, args.n, mode=args.mode)
        run.emit("ball.json", _json({"n": args.n, "lower": b.lower, "upper": b.upper,
                                     "exact": b.exact, "mode": b.mode}))
    else:
        fn = perorbit.h_per if args.estimator == "per" else perorbit.h_word
        g = fn(sft, p, args.w, args.r, range(args.n_min, args.n + 1), mode=args.mode)
        run.emit("growth.csv", _csv([[n, c, s] for n, c, s in g.values],
                                    ["n", "count", "log_slope"]))
        run.emit("growth.json", _json({"estimate": g.estimate, "window": g.window,
                                       "residual": g.residual, "estimator": args.estimator}),
                 stdout=False)


def cmd_construct(args, run):
    from .construct2d import construct, export_stage, make_boundary
    from .rotgeom import rotation_polytope
    from .sft import full_shift
    doc = _load_json(args.boundary, "boundary")
    b = make_boundary(doc.get("boundary", doc))
    state, certs = construct(b, args.stages, max_word_length=args.max_word_length)
    run.emit("certificates.json", _json([c.to_dict() for c in certs]))
    stage1 = state.chain()[min(1, state.n)]
    table = export_stage(stage1)
    run.emit("stage1_potential.json", _json(table.to_json()), stdout=False)
    from .svg import Figure
    fig = Figure()
    theta = np.linspace(0, 1, 361)
    fig.polyline(np.array([b.point_at(t) for t in theta]), stroke="black")
    poly = rotation_polytope(full_shift(2), table)
    fig.polygon(poly.vertices, stroke="#2980b9", fill="#d6eaf8", opacity=0.6)
    fig.points(state.points(), color="#c0392b")
    fig.points(state.targets(), color="#27ae60", r=1.5)
    run.figure("construct.svg", fig)


def cmd_gallery(args, run):
    from .gallery import Example2Spec, build_example2, example2_entropy_suite
    from .thermo import level_curve
    spec = Example2Spec(d=args.d, alpha=args.alpha, K=args.K, rho=args.rho)
    report = example2_entropy_suite(spec, n_max=args.n_max)
    run.emit("example2_report.json", _json(report))
    run.emit("example2_potential.json", _json(spec.to_json()), stdout=False)
    sft, table, _ = build_example2(spec)
    extra = [("points", [spec.w0], "black")]
    palette = ["#c0392b", "#27ae60", "#2980b9"]
    for i, R in enumerate(args.R):
        extra.append(("curve", level_curve(sft, table, R, args.samples),
                      palette[i % len(palette)]))
    run.figure("example2.svg", _polytope_figure(spec.vertices, extra))


def cmd_verify(args, run):
    from .acceptance import run_all
    results = run_all(quick=args.quick, only=args.only, echo=print)
    run.emit("verify.json", _json([r.to_dict() for r in results]), stdout=False)
    n_pass = sum(r.passed for r in results)
    print(f"{n_pass}/{len(results)} criteria passed" + (" (quick)" if args.quick else ""))
    return EXIT_OK if n_pass == len(results) else EXIT_DOMAIN


# ---------------------------------------------------------------- parser

def build_parser():
    ap = argparse.ArgumentParser(prog="rotset",
                                 description="Rotation sets, entropy and periodic-orbit growth "
                                             "for potentials on subshifts of finite type.")
    sub = ap.add_subparsers(dest="command", required=True)
    ap.subcommands = {}

    def cmd(name, func, help, system=True):
        sp = sub.add_parser(name, help=help)
        if system:
            sp.add_argument("--system", required=True, help="system spec JSON")
            sp.add_argument("--potential", required=True, help="potential spec JSON")
        sp.add_argument("--out", help="write artifacts and manifest.json to this directory")
        sp.set_defaults(func=func)
        ap.subcommands[name] = sp
        return sp

    sp = cmd("rotset", cmd_rotset, "vertices of the rotation polytope")
    sp.add_argument("--approximate", action="store_true",
                    help="support-function sandwich instead of cycle enumeration")
    sp.add_argument("--directions", type=int, default=64)
    sp.add_argument("--max-cycles", type=int, default=1_000_000)

    sp = cmd("support", cmd_support, "support function with witness cycles")
    sp.add_argument("--u", type=_floats, action="append", required=True,
                    help="direction, e.g. 1,0 (repeatable)")

    sp = cmd("pressure", cmd_pressure, "pressure Q(T) and its gradient")
    sp.add_argument("--T", type=_floats, required=True)

    sp = cmd("entropy", cmd_entropy, "entropy H(w) by Newton's method")
    sp.add_argument("--w", type=_floats, required=True)
    sp.add_argument("--tol", type=float, default=1e-11)

    sp = cmd("profile", cmd_profile, "entropy over a grid of rotation vectors")
    sp.add_argument("--grid", default="0.01:0.99:99", help="start:stop:num (scalar potentials)")
    sp.add_argument("--grid-file", help="CSV of target vectors, one per row")

    sp = cmd("levels", cmd_levels, "level curves C_R of the equilibrium rotation vectors")
    sp.add_argument("--R", type=_floats, default=np.array([2.0, 5.0, 10.0, 20.0]))
    sp.add_argument("--samples", type=int, default=256)

    sp = cmd("perorbit", cmd_perorbit, "periodic-orbit census, ball counts and growth rates")
    sp.add_argument("action", choices=["census", "ball", "growth"])
    sp.add_argument("--n", type=int, required=True, help="period (largest period for growth)")
    sp.add_argument("--n-min", type=int, default=1)
    sp.add_argument("--w", type=_floats)
    sp.add_argument("--r", type=float)
    sp.add_argument("--q", default="1/4", help="census cell width")
    sp.add_argument("--mode", choices=["auto", "enumerate", "dp"], default="auto")
    sp.add_argument("--estimator", choices=["per", "word"], default="per")

    sp = cmd("construct", cmd_construct, "planar construction with stage certificates",
             system=False)
    sp.add_argument("--boundary", required=True, help="boundary JSON (circle or polyline)")
    sp.add_argument("--stages", type=int, default=3)
    sp.add_argument("--max-word-length", type=int, default=729)

    sp = cmd("gallery", cmd_gallery, "the polygon example and its entropy suite", system=False)
    sp.add_argument("name", choices=["example2"])
    sp.add_argument("--d", type=int, default=6)
    sp.add_argument("--K", type=int, default=7)
    sp.add_argument("--alpha", type=int, default=3)
    sp.add_argument("--rho", type=float, default=0.25)
    sp.add_argument("--n-max", type=int, default=20)
    sp.add_argument("--R", type=_floats, default=np.array([1.0, 3.0]))
    sp.add_argument("--samples", type=int, default=48)

    sp = cmd("verify", cmd_verify, "run the acceptance criteria", system=False)
    sp.add_argument("--quick", action="store_true", help="smaller samples; skips the gallery")
    sp.add_argument("--only", type=_ints, help="comma-separated criterion numbers")
    return ap


def _check_args(ap, args):
    if args.command == "perorbit" and args.action in ("ball", "growth"):
        if args.w is None or args.r is None:
            ap.subcommands["perorbit"].error(f"perorbit {args.action} needs --w and --r")


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    args = ap.parse_args(argv)
    _check_args(ap, args)
    run = Run(args, argv)
    try:
        code = args.func(args, run) or EXIT_OK
    except RotsetError as exc:
        err = exc.to_dict()
    except Exception as exc:  # never a bare traceback
        err = {"error": type(exc).__name__, "operation": args.command, "message": str(exc),
               "details": {}}
    else:
        run.finish()
        return code
    text = _json(err)
    sys.stderr.write(text)
    run.files = {"error.json": text}
    run.finish()
    return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
