"""Command-line entry point.

`ellsec verify` runs the whole pipeline for one n and exits 0 iff every
stage's identity checks held exactly.  Each stage is also a standalone
subcommand operating on persisted JSON artifacts, e.g.

    ellsec curve-sample --n 5 --seed 7 --out work/curve.json
    ellsec ideal --curve work/curve.json --out work/ideal.json
    ellsec sigma --phi work/phi.json --out work/inverse.json

Artifacts embed the full run configuration, so a stage rerun on the same
inputs is byte-identical.
"""

from __future__ import annotations

import argparse
import sys

from .cremona import KleinTensor
from .field import DEFAULT_PRIME
from .interpolate import VanishingSpace
from .pipeline import (
    ConfigError,
    PipelineConfig,
    PipelineError,
    PipelineRun,
    read_artifact,
    run_pipeline,
    stage_curve_sample,
    stage_payload,
    write_artifact,
    _STAGE_BODIES,
)
from .poly import MultiPoly, PolyMap
from .skewsolve import SkewPolyMatrix


def _add_config_flags(sp, with_out_dir=False):
    sp.add_argument("--n", type=int, default=5, help="degree of the embedded curve (>= 5)")
    sp.add_argument("--prime", type=int, default=DEFAULT_PRIME, help="field modulus (odd prime < 2^62)")
    sp.add_argument("--a", type=int, default=1, help="curve coefficient a")
    sp.add_argument("--b", type=int, default=2, help="curve coefficient b")
    sp.add_argument("--seed", type=int, default=1, help="master seed for all samplers")
    sp.add_argument("--margin", type=int, default=25, help="extra samples per interpolation batch")
    sp.add_argument("--trials", type=int, default=25, help="pair-kernel comparison trials")
    if with_out_dir:
        sp.add_argument("--out", default=None, help="directory for artifacts and report.json")
        sp.add_argument("--stage", default=None, help="stop after this stage")


def _config_from_args(args) -> PipelineConfig:
    return PipelineConfig(
        n=args.n,
        prime=args.prime,
        a=args.a,
        b=args.b,
        seed=args.seed,
        margin=args.margin,
        trials=args.trials,
    )


def _run_from_artifact(data) -> PipelineRun:
    cfg = PipelineConfig.from_json_dict(data["config"])
    return PipelineRun(cfg)


def _load_ideal(run, path):
    data = read_artifact(path, "ellsec/ideal/v1")
    run.ideal_space = VanishingSpace.from_json_dict(data["space"], run.field)
    run.ideal_map = PolyMap.from_json_dict(data["map"], run.field)
    return data


def _load_secant_eq(run, path):
    data = read_artifact(path, "ellsec/secant-eq/v1")
    eqs = [MultiPoly.from_json_dict(d, run.field) for d in data["equations"]]
    run.secant_eq = eqs[0] if run.config.n % 2 else tuple(eqs)
    return data


def _load_phi(run, path):
    data = read_artifact(path, "ellsec/phi/v1")
    run.phi = SkewPolyMatrix.from_json_dict(data["matrix"], run.field)
    run.klein = KleinTensor.from_skew_matrix(run.phi)
    return data


def _load_map(path, schema, field):
    data = read_artifact(path, schema)
    return PolyMap.from_json_dict(data["map"], field), data


def _emit(run, stage, out):
    body = _STAGE_BODIES[stage]
    body(run)
    write_artifact(out, stage_payload(run, stage))
    print(f"{stage}: wrote {out}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ellsec",
        description="Exact mod-p pipeline for secant varieties of elliptic normal "
        "curves, their quadratic Poisson matrices, and the attached Cremona maps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("verify", help="run every stage and check every identity")
    _add_config_flags(sp, with_out_dir=True)

    sp = sub.add_parser("curve-sample", help="validate config, check nondegeneracy, write curve.json")
    _add_config_flags(sp)
    sp.add_argument("--out", required=True)

    for name, inputs in (
        ("ideal", ["curve"]),
        ("secant-eq", ["curve"]),
        ("klein", ["ideal"]),
        ("pfaffians", ["phi", "ideal"]),
        ("sigma", ["phi"]),
        ("cremona-check", ["forward", "inverse", "secant-eq"]),
        ("omega", ["secant-eq"]),
        ("poisson-check", ["omega", "secant-eq"]),
        ("szego-check", ["omega"]),
    ):
        sp = sub.add_parser(name, help=f"standalone {name} stage")
        for inp in inputs:
            sp.add_argument(f"--{inp}", required=True, help=f"path to the {inp} artifact")
        sp.add_argument("--out", required=True)

    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except (ConfigError, PipelineError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "verify":
        cfg = _config_from_args(args)
        report = run_pipeline(cfg, outdir=args.out, through_stage=args.stage)
        for s in report.stages:
            print(f"{s.status:4} {s.name:14} {s.seconds:8.2f}s  {s.details}")
        print(f"overall: {'PASS' if report.passed else 'FAIL'}  dims={report.dims}")
        return 0 if report.passed else 1

    if cmd == "curve-sample":
        cfg = _config_from_args(args)
        run = PipelineRun(cfg)
        details = stage_curve_sample(run)
        write_artifact(args.out, stage_payload(run, "curve-sample"))
        print(f"curve-sample: {details}; wrote {args.out}")
        return 0

    if cmd in ("ideal", "secant-eq"):
        data = read_artifact(args.curve, "ellsec/curve/v1")
        run = _run_from_artifact(data)
        _emit(run, cmd, args.out)
        return 0

    if cmd == "klein":
        run = _run_from_artifact(read_artifact(args.ideal, "ellsec/ideal/v1"))
        _load_ideal(run, args.ideal)
        _emit(run, "klein", args.out)
        return 0

    if cmd == "pfaffians":
        run = _run_from_artifact(read_artifact(args.phi, "ellsec/phi/v1"))
        _load_phi(run, args.phi)
        _load_ideal(run, args.ideal)
        _emit(run, "pfaffians", args.out)
        return 0

    if cmd == "sigma":
        run = _run_from_artifact(read_artifact(args.phi, "ellsec/phi/v1"))
        _load_phi(run, args.phi)
        _emit(run, "sigma", args.out)
        return 0

    if cmd == "cremona-check":
        data = read_artifact(args.forward, "ellsec/forward/v1")
        run = _run_from_artifact(data)
        run.forward, _ = _load_map(args.forward, "ellsec/forward/v1", run.field)
        run.inverse, _ = _load_map(args.inverse, "ellsec/inverse/v1", run.field)
        _load_secant_eq(run, args.secant_eq)
        _emit(run, "cremona-check", args.out)
        return 0

    if cmd == "omega":
        data = read_artifact(args.secant_eq, "ellsec/secant-eq/v1")
        run = _run_from_artifact(data)
        _load_secant_eq(run, args.secant_eq)
        _emit(run, "omega", args.out)
        return 0

    if cmd == "poisson-check":
        data = read_artifact(args.omega, "ellsec/omega/v1")
        run = _run_from_artifact(data)
        run.omega = SkewPolyMatrix.from_json_dict(data["matrix"], run.field)
        _load_secant_eq(run, args.secant_eq)
        _emit(run, "poisson-check", args.out)
        return 0

    if cmd == "szego-check":
        data = read_artifact(args.omega, "ellsec/omega/v1")
        run = _run_from_artifact(data)
        run.omega = SkewPolyMatrix.from_json_dict(data["matrix"], run.field)
        _emit(run, "szego-check", args.out)
        return 0

    raise ConfigError(f"unknown command {cmd}")


if __name__ == "__main__":
    sys.exit(main())
