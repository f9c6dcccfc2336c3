"""Command-line surface: measure ingestion, experiments, CSV/JSON reports.

Commands: simulate, rate, spectrum, jsr, certify, example-boundary, suite.
Measure files are JSON: {"dim": d, "atoms": [{"label", "weight", "matrix"}]}.
Reports are written atomically (temp file + rename) into the output
directory; every JSON report embeds the config echo, seed, package version
and wall-clock.  Exit codes: 0 success, 1 error, 2 refuted suite check.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time

import numpy as np

from . import __version__, benchmarks
from .errors import LdpLabError, ParseError, ValidationError
from .proximal import is_schottky, theta_certify
from .rate import RateGrid, exact_rate, mc_rate
from .spectrum import iterate_spectrum, jsr_bounds, subradius_bounds
from .suite import run_suite
from .walk import kappa_samples, make_measure

WEIGHT_RENORM_TOL = 1e-9


def load_measure(path):
    """Parse and validate a measure JSON file.

    Weights are renormalized only when their sum is within 1e-9 of one;
    anything further off is rejected as a validation error.
    """
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ParseError(f"{path}: top level must be an object")
    for key in ("dim", "atoms"):
        if key not in raw:
            raise ParseError(f"{path}: missing field {key!r}")
    entries = []
    total = 0.0
    for i, atom in enumerate(raw["atoms"]):
        for key in ("label", "weight", "matrix"):
            if key not in atom:
                raise ParseError(f"{path}: atom {i}: missing field {key!r}")
        total += float(atom["weight"])
        entries.append((atom["label"], np.asarray(atom["matrix"], dtype=float), float(atom["weight"])))
    if abs(total - 1.0) > WEIGHT_RENORM_TOL:
        raise ValidationError(f"weights sum to {total!r}, not 1")
    entries = [(lbl, m, w / total) for lbl, m, w in entries]
    return make_measure(int(raw["dim"]), entries)


def write_measure(measure, path):
    payload = {
        "dim": measure.dim,
        "atoms": [
            {"label": a.label, "weight": a.weight, "matrix": np.asarray(a.matrix).tolist()}
            for a in measure.atoms
        ],
    }
    _atomic_write(path, json.dumps(payload, indent=2) + "\n")


def _atomic_write(path, text):
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_csv(path, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _atomic_write(path, buf.getvalue())


class _Runner:
    """Shared plumbing: output directory, config echo, report emission."""

    def __init__(self, args):
        self.args = args
        self.out = os.environ.get("LDPLAB_OUT") or args.out
        os.makedirs(self.out, exist_ok=True)
        self.started = time.time()
        self.outputs = []

    def path(self, name):
        self.outputs.append(name)
        return os.path.join(self.out, name)

    def finish(self, command, payload):
        report = {
            "command": command,
            "config": {
                k: v for k, v in sorted(vars(self.args).items()) if k != "func"
            },
            "seed": getattr(self.args, "seed", None),
            "version": __version__,
            "wallClockSeconds": round(time.time() - self.started, 3),
            "outputs": list(self.outputs),
        }
        report.update(payload)
        name = f"{command.replace('-', '_')}_report.json"
        _atomic_write(os.path.join(self.out, name), json.dumps(report, indent=2) + "\n")
        return report


def _parse_grid(spec, mode, delta=None):
    try:
        lo, hi, pitch = (float(x) for x in spec.split(":"))
    except ValueError as exc:
        raise ParseError(f"grid spec must be MIN:MAX:PITCH, got {spec!r}") from exc
    if not lo < hi:
        raise ValidationError("grid needs MIN < MAX")
    if mode != "top":
        raise ValidationError("chamber grids are not constructible from MIN:MAX:PITCH")
    return RateGrid.top(lo, hi, pitch, delta)


def _rate_rows(est):
    rows = []
    for i in range(est.grid.points.shape[0]):
        point = est.grid.points[i]
        coords = [point] if est.grid.mode == "top" else list(point)
        flag = ""
        if est.infinite is not None and est.infinite[i]:
            flag = "unreachable"
        elif est.zero_hits is not None and est.zero_hits[i]:
            flag = "zero-hits-lower-bound"
        elif est.boundary_warn is not None and est.boundary_warn[i]:
            flag = "dual-boundary"
        ci = "" if est.ci_half is None or not np.isfinite(est.ci_half[i]) else repr(float(est.ci_half[i]))
        value = "inf" if not np.isfinite(est.values[i]) else repr(float(est.values[i]))
        rows.append([*(repr(float(c)) for c in coords), value, ci, flag])
    return rows


def cmd_simulate(args):
    runner = _Runner(args)
    measure = load_measure(args.measure)
    samples = kappa_samples(measure, args.n, args.samples, args.seed, args.workers)
    header = ["stream"] + [f"kappa{i + 1}" for i in range(measure.dim)]
    rows = [[s, *(repr(float(v)) for v in samples[s])] for s in range(samples.shape[0])]
    _write_csv(runner.path("simulate.csv"), header, rows)
    runner.finish("simulate", {"sampleCount": int(samples.shape[0]), "n": args.n})
    return 0


def cmd_rate(args):
    runner = _Runner(args)
    measure = load_measure(args.measure)
    grid = _parse_grid(args.grid, args.mode)
    if args.samples:
        est = mc_rate(measure, args.n, args.samples, grid, args.seed, args.workers)
    else:
        est = exact_rate(measure, args.n, grid)
    header = ["point", "value", "ciHalfWidth", "flag"]
    _write_csv(runner.path("rate.csv"), header, _rate_rows(est))
    runner.finish("rate", {"method": est.method, "n": args.n})
    return 0


def cmd_spectrum(args):
    runner = _Runner(args)
    measure = load_measure(args.measure)
    mode = "chamber" if args.mode == "chamber" else "top"
    approx = iterate_spectrum([a.matrix for a in measure.atoms], args.nmax, mode=mode)
    header = ["depth", "hull", "hausdorffToPrevious"]
    rows = [
        [lvl.n, json.dumps(np.asarray(lvl.hull).tolist()), repr(lvl.hausdorff_to_previous)]
        for lvl in approx.levels
    ]
    _write_csv(runner.path("spectrum.csv"), header, rows)
    deepest = approx.deepest
    runner.finish(
        "spectrum",
        {
            "mode": mode,
            "deepestDepth": deepest.n,
            "deepestHull": np.asarray(deepest.hull).tolist(),
            "deepestHausdorffToPrevious": deepest.hausdorff_to_previous,
        },
    )
    return 0


def cmd_jsr(args):
    runner = _Runner(args)
    measure = load_measure(args.measure)
    mats = [a.matrix for a in measure.atoms]
    jb = jsr_bounds(mats, args.depth)
    sb = subradius_bounds(mats, args.depth)
    runner.finish(
        "jsr",
        {
            "depth": args.depth,
            "lower": jb.lower,
            "upper": jb.upper,
            "visited": jb.visited,
            "lowerByDepth": jb.lower_by_depth,
            "upperByDepth": jb.upper_by_depth,
            "subLower": sb.sub_lower,
            "subUpper": sb.sub_upper,
            "subExhaustiveDepth": sb.exhaustive_depth,
        },
    )
    return 0


def _certificate_json(cert):
    return {
        "verdict": cert.verdict,
        "gap": cert.gap,
        "r": cert.r,
        "epsilon": cert.epsilon,
        "lipschitzOnBasin": cert.lipschitz_on_basin,
        "sampleCount": cert.sample_count,
        "attractor": None if cert.attractor is None else cert.attractor.tolist(),
        "repellerNormal": None
        if cert.repeller_normal is None
        else cert.repeller_normal.tolist(),
    }


def cmd_certify(args):
    runner = _Runner(args)
    measure = load_measure(args.measure)
    theta = tuple(int(t) for t in args.theta.split(","))
    members = {}
    for atom in measure.atoms:
        tc = theta_certify(atom.matrix, theta, args.r, args.eps, args.samples, args.seed)
        members[atom.label] = {
            "verdict": tc.verdict,
            "perIndex": {str(i): _certificate_json(c) for i, c in tc.per_index.items()},
        }
    family = is_schottky(
        [a.matrix for a in measure.atoms], theta, args.r, args.eps, args.samples, args.seed
    )
    runner.finish(
        "certify",
        {
            "members": members,
            "schottky": {
                "verdict": family.verdict,
                "minCrossGap": family.min_cross_gap,
                "r": family.r,
                "epsilon": family.epsilon,
                "theta": list(family.theta),
            },
        },
    )
    return 0


def cmd_example_boundary(args):
    runner = _Runner(args)
    measure = benchmarks.boundary_measure(args.k)
    mats = [a.matrix for a in measure.atoms]
    budget = sum(len(mats) ** i for i in range(1, args.nmax + 1))
    approx = iterate_spectrum(mats, args.nmax, budget=budget)
    right = float(approx.deepest.hull[-1])
    grid = RateGrid.top(0.0, 4.0, 0.1)
    if len(mats) ** args.n <= 2_000_000:
        est = exact_rate(measure, args.n, grid)
    else:
        est = mc_rate(measure, args.n, max(args.samples, 1000), grid, args.seed, args.workers)
    header = ["point", "value", "ciHalfWidth", "flag"]
    _write_csv(runner.path("example_boundary_rate.csv"), header, _rate_rows(est))
    interior = grid.nearest(3.0)
    runner.finish(
        "example-boundary",
        {
            "K": args.k,
            "truncatedEndpoint": 4.0 - 1.0 / args.k,
            "spectrumRightEndpoint": right,
            "rateMethod": est.method,
            "interiorRateAt3": None
            if not np.isfinite(est.values[interior])
            else float(est.values[interior]),
            "minAtomWeightBound": float(-np.log(min(a.weight for a in measure.atoms))),
        },
    )
    return 0


def cmd_suite(args):
    runner = _Runner(args)
    results = run_suite()
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.details}")
    runner.finish(
        "suite",
        {
            "results": [
                {"name": r.name, "passed": r.passed, "details": r.details}
                for r in results
            ],
            "allPassed": all(r.passed for r in results),
        },
    )
    return 0 if all(r.passed for r in results) else 2


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ldplab",
        description="Random matrix product experiments: rate functions, "
        "proximality certificates, joint spectra.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed_required=False):
        p.add_argument("--seed", type=int, required=seed_required, default=None if seed_required else 0)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--out", default=".")

    p = sub.add_parser("simulate", help="sample kappa(Y_n)/n vectors")
    p.add_argument("--measure", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("rate", help="rate function estimate on a grid")
    p.add_argument("--measure", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=0, help="0 = exact enumeration")
    p.add_argument("--grid", required=True, metavar="MIN:MAX:PITCH")
    p.add_argument("--mode", choices=("top", "chamber"), default="top")
    common(p)
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("spectrum", help="joint spectrum approximation")
    p.add_argument("--measure", required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--mode", choices=("top", "chamber"), default="top")
    common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("jsr", help="joint spectral radius and subradius brackets")
    p.add_argument("--measure", required=True)
    p.add_argument("--depth", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_jsr)

    p = sub.add_parser("certify", help="proximality and Schottky certificates")
    p.add_argument("--measure", required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--theta", default="1")
    p.add_argument("--samples", type=int, default=1000)
    common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("example-boundary", help="truncated boundary-explosion family")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, default=9)
    p.add_argument("--nmax", type=int, default=9)
    p.add_argument("--samples", type=int, default=100_000)
    common(p)
    p.set_defaults(func=cmd_example_boundary)

    p = sub.add_parser("suite", help="run the shipped verification suite")
    common(p, seed_required=True)
    p.set_defaults(func=cmd_suite)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LdpLabError as exc:
        out = os.environ.get("LDPLAB_OUT") or getattr(args, "out", ".")
        try:
            os.makedirs(out, exist_ok=True)
            _atomic_write(
                os.path.join(out, "error.json"),
                json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n",
            )
        except OSError:
            pass
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
