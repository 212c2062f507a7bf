"""Command-line front end: one subcommand per experiment.

Exit status: 0 when every check passes, 2 when a check misses its
tolerance, 1 on usage errors.
"""
from __future__ import annotations

import argparse
import cmath
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import experiments as ex
from .domains import DomainError, parse_domain
from .io import csv_text, manifest, read_manifest, write_manifest
from .randomness import parse_seed

EXIT_OK, EXIT_USAGE, EXIT_TOLERANCE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fraction(text: str) -> float:
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number or fraction: {text!r}") from None
    return float(value)


def positive_fraction(text: str) -> float:
    v = fraction(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def fraction_list(text: str) -> list[float]:
    return [positive_fraction(t) for t in text.split(",") if t.strip()]


def point(text: str) -> complex:
    """``x+yj`` / ``0.5j`` complex literals, or polar ``r@theta`` with theta in degrees."""
    text = text.strip().replace("i", "j")
    try:
        if "@" in text:
            r, deg = text.split("@")
            z = cmath.rect(fraction(r), math.radians(fraction(deg)))
            # drop rounding residue, so 0.5@90 is exactly 0.5j
            return complex(0.0 if abs(z.real) < 1e-12 else z.real, 0.0 if abs(z.imag) < 1e-12 else z.imag)
        return complex(text)
    except (ValueError, argparse.ArgumentTypeError):
        raise argparse.ArgumentTypeError(f"not a point: {text!r}") from None


def point_list(text: str) -> list[complex]:
    return [point(t) for t in text.split(";" if ";" in text else ",") if t.strip()]


def count(text: str) -> int:
    try:
        value = int(float(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a count: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("count must be at least 1")
    return value


def seed_arg(text: str) -> int:
    try:
        return parse_seed(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def threshold(text: str) -> tuple[str, float]:
    key, sep, value = text.partition("=")
    if not sep or key not in ex.DEFAULT_THRESHOLDS:
        raise argparse.ArgumentTypeError(
            f"expected KEY=VALUE with KEY in {sorted(ex.DEFAULT_THRESHOLDS)}, got {text!r}")
    return key, float(value)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="critperc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, n_default):
        sp.add_argument("--n", type=count, default=n_default, help="number of samples")
        sp.add_argument("--seed", type=seed_arg, default=0, help="64-bit seed, decimal or 0x hex")
        sp.add_argument("--workers", type=int, default=None,
                        help="worker threads (default: $CRITPERC_WORKERS or CPU count); never changes results")
        sp.add_argument("--out", type=Path, default=None, help="CSV output path (default: stdout)")
        sp.add_argument("--manifest", type=Path, default=None, help="JSON manifest output path")
        sp.add_argument("--threshold", type=threshold, action="append", default=[],
                        help="override an acceptance threshold, KEY=VALUE")

    sp = sub.add_parser("one-arm", help="bulk one-arm eps sweep and slope fit")
    common(sp, 200_000)
    sp.add_argument("--mesh", type=positive_fraction, default=positive_fraction("1/512"))
    sp.add_argument("--eps", type=fraction_list, default=fraction_list("1/16,1/8,1/4,1/2"))
    sp.add_argument("--normalize", action="store_true", help="also estimate pi_a (radius 1)")

    sp = sub.add_parser("boundary-arm", help="boundary one-arm eps sweep and slope fit")
    common(sp, 200_000)
    sp.add_argument("--mesh", type=positive_fraction, default=positive_fraction("1/512"))
    sp.add_argument("--eps", type=fraction_list, default=fraction_list("1/16,1/8,1/4,1/2"))
    sp.add_argument("--normalize", action="store_true")

    sp = sub.add_parser("anchored", help="anchored cluster density profile")
    common(sp, 1_000_000)
    sp.add_argument("--mesh", type=positive_fraction, default=positive_fraction("1/128"))
    sp.add_argument("--points", type=point_list, default=point_list("0.5@90;0.5@30;0.25@90"))
    sp.add_argument("--box-factor", type=positive_fraction, default=ex.DEFAULT_BOX_FACTOR)

    sp = sub.add_parser("gasket", help="gasket density profile in a domain")
    common(sp, 200_000)
    sp.add_argument("--mesh", type=positive_fraction, default=positive_fraction("1/128"))
    sp.add_argument("--domain", default="disk:0,0,1")
    sp.add_argument("--points", type=point_list, default=point_list("0.9;0"))
    sp.add_argument("--method", choices=("sweep", "points"), default="sweep")

    sp = sub.add_parser("images", help="method-of-images product and symmetry check")
    common(sp, 1_000_000)
    sp.add_argument("--mesh", type=positive_fraction, default=positive_fraction("1/64"))
    sp.add_argument("--z", type=point, default=1j)
    sp.add_argument("--box-factor", type=positive_fraction, default=ex.DEFAULT_BOX_FACTOR)

    sp = sub.add_parser("multipoint", help="bulk-boundary scale covariance")
    common(sp, 400_000)
    sp.add_argument("--mesh", type=positive_fraction, default=positive_fraction("1/128"))
    sp.add_argument("--bulk", type=point_list, default=point_list("0.25j"))
    sp.add_argument("--boundary", type=lambda t: [fraction(x) for x in t.split(",")], default=[-0.125, 0.125])
    sp.add_argument("--scale", type=positive_fraction, default=2.0)
    sp.add_argument("--box-factor", type=positive_fraction, default=ex.DEFAULT_BOX_FACTOR)

    sp = sub.add_parser("oracle", help="exhaustive small-patch enumeration vs Monte Carlo")
    common(sp, 1_000_000)
    sp.add_argument("--event", default="all",
                    choices=("all", "one-arm", "boundary-arm", "anchored", "multipoint", "gasket"))
    sp.add_argument("--patch", default=None, help="patch shape filter, e.g. 4x4")

    sp = sub.add_parser("selftest", help="audit per-sample invariants")
    common(sp, 10_000)
    sp.add_argument("--mesh", type=positive_fraction, default=positive_fraction("1/16"))

    sp = sub.add_parser("replay", help="re-run the configuration recorded in a manifest")
    sp.add_argument("source", type=Path)
    sp.add_argument("--out", type=Path, default=None)
    sp.add_argument("--manifest", type=Path, default=None)
    sp.add_argument("--workers", type=int, default=None)
    return p


def _oracle(args):
    from .oracle import check_patch, standard_patches

    rows, checks = [], []
    for patch in standard_patches():
        kind = patch.spec.kind.replace("_", "-")
        if args.event != "all" and kind != args.event:
            continue
        if args.patch and args.patch not in patch.name:
            continue
        r = check_patch(patch, args.n, args.seed, args.workers)
        rows.append({"experiment": "oracle", "label": r.patch, "mesh": patch.spec.mesh, "n": r.n,
                     "p_hat": r.p_hat, "target": r.exact, "ratio": r.z})
        checks.append(ex.Check(f"oracle {r.patch}", r.p_hat, r.exact, 3.0, r.z, r.passed))
    if not rows:
        raise UsageError(f"no oracle patch matches --event {args.event} --patch {args.patch}")
    return rows, checks, [{"kind": "oracle", "patches": [r["label"] for r in rows]}]


def _selftest(args):
    from .invariants import audit

    lines = audit(args.n, args.seed, args.mesh, args.workers)
    rows = [{"experiment": "selftest", "label": ln.name, "n": ln.samples, "successes": ln.violations}
            for ln in lines]
    checks = [ex.Check(ln.name, ln.violations, 0, 0, 0.0, ln.passed) for ln in lines]
    return rows, checks, [{"kind": "selftest", "mesh": args.mesh}]


def execute(args):
    """Run one subcommand; returns ``(rows, checks, event descriptions)``."""
    th = dict(ex.DEFAULT_THRESHOLDS)
    th.update(dict(getattr(args, "threshold", [])))
    cmd = args.command
    if cmd in ("one-arm", "boundary-arm"):
        kind = "one_arm" if cmd == "one-arm" else "boundary_arm"
        r = ex.arm_sweep(kind, args.eps, args.mesh, args.n, args.seed, normalize=args.normalize,
                         workers=args.workers)
        events = [{"kind": kind, "mesh": args.mesh, "eps": list(r.eps)}]
    elif cmd == "anchored":
        if any(z.imag <= 0 for z in args.points):
            raise UsageError("--points: anchored points need a positive imaginary part")
        r = ex.anchored_profile(args.points, args.mesh, args.n, args.seed, args.box_factor, args.workers)
        events = [{"kind": "anchored", "mesh": args.mesh, "points": [[z.real, z.imag] for z in r.points],
                   "box_factor": args.box_factor}]
    elif cmd == "gasket":
        try:
            dom = parse_domain(args.domain)
            r = ex.gasket_profile(dom, args.points, args.mesh, args.n, args.seed, args.workers, args.method)
        except DomainError as exc:
            raise UsageError(f"--domain/--points: {exc}") from None
        events = [{"kind": "gasket", "mesh": args.mesh, "domain": dom.spec(),
                   "points": [[z.real, z.imag] for z in r.points], "method": args.method}]
    elif cmd == "images":
        if args.z.imag <= 0:
            raise UsageError("--z: needs a positive imaginary part")
        r = ex.images_check(args.z, args.mesh, args.n, args.seed, args.box_factor, args.workers)
        events = [{"kind": "images", "mesh": args.mesh, "z": [args.z.real, args.z.imag],
                   "box_factor": args.box_factor}]
    elif cmd == "multipoint":
        if any(z.imag <= 0 for z in args.bulk):
            raise UsageError("--bulk: points need a positive imaginary part")
        r = ex.multipoint_covariance(args.bulk, args.boundary, args.scale, args.mesh, args.n, args.seed,
                                     args.box_factor, args.workers)
        events = [{"kind": "multipoint", "mesh": args.mesh, "bulk": [[z.real, z.imag] for z in args.bulk],
                   "boundary": args.boundary, "scale": args.scale, "box_factor": args.box_factor}]
    elif cmd == "oracle":
        return _oracle(args)
    elif cmd == "selftest":
        return _selftest(args)
    else:
        raise UsageError(f"unknown command {cmd}")
    return r.rows(), r.checks(th), events


def _config(args) -> dict:
    out = {}
    for k, v in vars(args).items():
        if k in ("out", "manifest", "workers"):
            continue
        if isinstance(v, complex):
            v = [v.real, v.imag]
        elif isinstance(v, list) and v and isinstance(v[0], complex):
            v = [[z.real, z.imag] for z in v]
        out[k] = v
    return out


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.command == "replay":
        try:
            recorded = read_manifest(args.source)["argv"]
        except (OSError, KeyError, ValueError) as exc:
            print(f"critperc: error: cannot read manifest {args.source}: {exc}", file=sys.stderr)
            return EXIT_USAGE
        extra = []
        if args.out is not None:
            extra += ["--out", str(args.out)]
        if args.manifest is not None:
            extra += ["--manifest", str(args.manifest)]
        if args.workers is not None:
            extra += ["--workers", str(args.workers)]
        return main(recorded + extra)

    t0 = time.perf_counter()
    try:
        rows, checks, events = execute(args)
    except UsageError as exc:
        print(f"critperc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    wall = time.perf_counter() - t0

    text = csv_text(rows)
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)
    for c in checks:
        print(c.line(), file=sys.stderr)
    if args.manifest is not None:
        recorded = _strip_outputs(argv)
        data = manifest(args.command, recorded, args.seed, _config(args), events, wall, checks,
                        {"csv": str(args.out) if args.out else None})
        write_manifest(data, args.manifest)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_TOLERANCE


def _strip_outputs(argv: list[str]) -> list[str]:
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
            continue
        if a in ("--out", "--manifest", "--workers"):
            skip = True
            continue
        if a.startswith(("--out=", "--manifest=", "--workers=")):
            continue
        out.append(a)
    return out


if __name__ == "__main__":
    sys.exit(main())
