"""End-to-end pipeline: configuration, stages, artifacts, run report.

A run is a fixed stage sequence determined by the parity of n.  Odd n:

    curve-sample -> ideal -> secant-eq -> klein -> pfaffians -> sigma
    -> cremona-check -> omega -> poisson-check -> szego-check -> rank-profile

Even n skips the Cremona stages (ideal through cremona-check and
rank-profile).  Every stage draws its randomness from a stream derived
from (seed, stage name), so stages rerun standalone byte-identically.
The pipeline halts at the first failing stage; downstream results would
be meaningless, and the report carries the diagnostics plus a reseed
hint instead.
"""

from __future__ import annotations

import hashlib
import json
import random
import time
from dataclasses import dataclass, field as dc_field

from . import modmat
from .cremona import (
    KleinTensor,
    composition_check,
    forward_map,
    pointwise_identity_probe,
    rank_profile,
    sigma,
)
from .curve import Curve, embed_point, make_sampler
from .field import DEFAULT_PRIME, PrimeField, is_prime
from .interpolate import secant_ci_pair, secant_hypersurface, secant_ideal_generators
from .pfaffian import sub_pfaffians
from .poisson import QuadraticBracket, caslem_engine_identity, poisson_report
from .poly import euler_integrate
from .skewsolve import SyzygyProblem, skew_syzygy, verify_complex
from .szego import compare_brackets

ODD_STAGES = (
    "curve-sample",
    "ideal",
    "secant-eq",
    "klein",
    "pfaffians",
    "sigma",
    "cremona-check",
    "omega",
    "poisson-check",
    "szego-check",
    "rank-profile",
)
EVEN_STAGES = ("curve-sample", "secant-eq", "omega", "poisson-check", "szego-check")


class PipelineError(Exception):
    def __init__(self, stage, message):
        self.stage = stage
        super().__init__(f"stage '{stage}': {message}")


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    n: int = 5
    prime: int = DEFAULT_PRIME
    a: int = 1
    b: int = 2
    seed: int = 1
    margin: int = 25
    trials: int = 25

    def validate(self):
        if self.n < 5:
            raise ConfigError(f"n must be >= 5, got {self.n}")
        if not is_prime(self.prime):
            raise ConfigError(f"{self.prime} is not prime")
        if self.margin < 1:
            raise ConfigError("margin must be >= 1")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        field = PrimeField(self.prime)
        curve = Curve(field, self.a, self.b)  # discriminant checked here
        return field, curve

    def to_json_dict(self):
        return {
            "n": self.n,
            "prime": str(self.prime),
            "a": str(self.a),
            "b": str(self.b),
            "seed": self.seed,
            "margin": self.margin,
            "trials": self.trials,
        }

    @classmethod
    def from_json_dict(cls, data):
        return cls(
            n=int(data["n"]),
            prime=int(data["prime"]),
            a=int(data["a"]),
            b=int(data["b"]),
            seed=int(data["seed"]),
            margin=int(data["margin"]),
            trials=int(data["trials"]),
        )

    def config_hash(self):
        blob = json.dumps(self.to_json_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    def stage_rng(self, stage: str) -> random.Random:
        tag = hashlib.sha256(f"{self.seed}:{stage}".encode()).digest()
        return random.Random(int.from_bytes(tag[:8], "big"))


@dataclass
class StageResult:
    name: str
    status: str
    seconds: float
    details: dict = dc_field(default_factory=dict)

    def to_json_dict(self):
        return {
            "name": self.name,
            "status": self.status,
            "seconds": round(self.seconds, 3),
            "details": self.details,
        }


@dataclass
class RunReport:
    config: PipelineConfig
    stages: list = dc_field(default_factory=list)
    dims: list = dc_field(default_factory=list)
    passed: bool = False
    error: str = None

    def stage(self, name):
        for s in self.stages:
            if s.name == name:
                return s
        return None

    def to_json_dict(self):
        return {
            "pass": self.passed,
            "dims": self.dims,
            "config": self.config.to_json_dict(),
            "config_sha256": self.config.config_hash(),
            "stages": [s.to_json_dict() for s in self.stages],
            "error": self.error,
        }


def write_artifact(path, payload):
    """Canonical JSON writer: artifacts must be byte-identical across reruns."""
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def read_artifact(path, schema):
    with open(path) as fh:
        data = json.load(fh)
    if data.get("schema") != schema:
        raise ConfigError(f"{path}: expected schema '{schema}', found '{data.get('schema')}'")
    return data


class PipelineRun:
    """Holds all in-memory stage outputs of one run."""

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.field, self.curve = config.validate()
        self.report = RunReport(config)
        self.ideal_map = None
        self.ideal_space = None
        self.secant_eq = None  # MultiPoly F (odd) or (F1, F2) (even)
        self.phi = None
        self.klein = None
        self.forward = None
        self.inverse = None
        self.composition = None
        self.omega = None
        self.poisson = None
        self.szego = None
        self.ranks = None

    @property
    def stage_names(self):
        return ODD_STAGES if self.config.n % 2 else EVEN_STAGES


def _timed(run, name, fn):
    t0 = time.perf_counter()
    try:
        details = fn()
    except Exception as exc:
        run.report.stages.append(StageResult(name, "FAIL", time.perf_counter() - t0, {"error": str(exc)}))
        run.report.error = f"{name}: {exc}"
        raise PipelineError(name, f"{exc}; rerun with a different --seed or --prime") from exc
    run.report.stages.append(StageResult(name, "PASS", time.perf_counter() - t0, details))


# -- stage bodies -------------------------------------------------------------


def stage_curve_sample(run: PipelineRun):
    cfg = run.config
    rng = cfg.stage_rng("curve-sample")
    n = cfg.n
    pts = [run.curve.random_point(rng) for _ in range(2 * n)]
    embedded = [embed_point(run.field, Q, n) for Q in pts]
    rk = modmat.rank(modmat.as_matrix(embedded, run.field), run.field)
    if rk != n:
        raise PipelineError("curve-sample", f"embedded curve is degenerate: rank {rk} != {n}")
    return {"embedded_rank": rk, "points": len(pts)}


def stage_ideal(run: PipelineRun):
    cfg = run.config
    rng = cfg.stage_rng("ideal")
    run.ideal_map, run.ideal_space = secant_ideal_generators(run.curve, cfg.n, rng, cfg.margin)
    return {"dim": run.ideal_space.dim, "degree": run.ideal_space.degree}


def stage_secant_eq(run: PipelineRun):
    cfg = run.config
    rng = cfg.stage_rng("secant-eq")
    if cfg.n % 2:
        F, space = secant_hypersurface(run.curve, cfg.n, rng, cfg.margin)
        run.secant_eq = F
    else:
        (F1, F2), space = secant_ci_pair(run.curve, cfg.n, rng, cfg.margin)
        run.secant_eq = (F1, F2)
    return {"dim": space.dim, "degree": space.degree}


def stage_klein(run: PipelineRun):
    problem = SyzygyProblem([list(run.ideal_map)], entry_degree=1)
    basis = skew_syzygy(problem)
    if len(basis) != 1:
        raise PipelineError("klein", f"skew linear syzygy space has dimension {len(basis)}, expected 1")
    run.phi = basis[0].normalized()
    run.klein = KleinTensor.from_skew_matrix(run.phi)
    residuals = verify_complex(problem, run.phi)
    if not residuals.ok:
        raise PipelineError("klein", f"complex identity failed at {residuals.failures()}")
    return {"dim": 1, "complex_ok": True}


def stage_pfaffians(run: PipelineRun):
    cfg = run.config
    rng = cfg.stage_rng("pfaffians")
    run.forward = forward_map(run.klein, run.ideal_map)
    # At any point b of the target's dual, the specialized matrix kills the
    # forward image vector.
    p = run.field.p
    xv = run.phi
    for _ in range(20):
        b = [run.field.rand_elem(rng) for _ in range(cfg.n)]
        vec = run.forward.evaluate(b)
        mat = xv.evaluate(b)
        for i in range(cfg.n):
            if sum(mat[i][j] * vec[j] for j in range(cfg.n)) % p:
                raise PipelineError("pfaffians", "specialized matrix does not kill the forward image")
    if not run.forward.no_common_factor(rng):
        raise PipelineError("pfaffians", "forward map components share a factor")
    return {"span_matches_ideal": True, "kills_forward_image": True, "no_common_factor": True}


def stage_sigma(run: PipelineRun):
    cfg = run.config
    rng = cfg.stage_rng("sigma")
    run.inverse = sigma(run.klein)
    deg = run.inverse.degree
    if deg != cfg.n - 2:
        raise PipelineError("sigma", f"inverse map degree {deg} != {cfg.n - 2}")
    nofactor = run.inverse.no_common_factor(rng)
    return {"degree": deg, "annihilation_ok": True, "no_common_factor": nofactor}


def stage_cremona_check(run: PipelineRun):
    cfg = run.config
    rng = cfg.stage_rng("cremona-check")
    run.composition = composition_check(run.forward, run.inverse)
    run.composition.record_comparison("secant_hypersurface", run.secant_eq)
    if not pointwise_identity_probe(run.forward, run.inverse, rng, trials=20):
        raise PipelineError("cremona-check", "pointwise f(p(x)) ~ x probe failed")
    return {
        "factor_degree": run.composition.factor_degree,
        "factor_is_secant_equation_times": run.composition.factor_matches.get("secant_hypersurface"),
        "pointwise_ok": True,
    }


def stage_omega(run: PipelineRun):
    cfg = run.config
    n = cfg.n
    if n % 2:
        F = run.secant_eq
        rows = [[F.partial_derivative(i) for i in range(n)]]
    else:
        rows = [[Fa.partial_derivative(i) for i in range(n)] for Fa in run.secant_eq]
    problem = SyzygyProblem(rows, entry_degree=2)
    basis = skew_syzygy(problem)
    if len(basis) != 1:
        raise PipelineError("omega", f"skew quadric syzygy space has dimension {len(basis)}, expected 1")
    run.omega = basis[0].normalized()
    residuals = verify_complex(problem, run.omega)
    if not residuals.ok:
        raise PipelineError("omega", f"complex identity failed at {residuals.failures()}")
    details = {"dim": 1, "complex_ok": True}
    if n % 2:
        # gradient recovery: signed submaximal pfaffians reproduce the
        # gradient of the secant equation up to one scalar, and integrate
        # back to it
        spf = sub_pfaffians(run.omega)
        F = run.secant_eq
        lam = None
        for i in range(n):
            dF = rows[0][i]
            if dF.is_zero() != spf[i].is_zero():
                raise PipelineError("omega", "pfaffian/gradient support mismatch")
            if dF.is_zero():
                continue
            e, c = dF.leading_term()
            li = run.field.div(spf[i].terms.get(e, 0), c)
            if lam is None:
                lam = li
            if li != lam or spf[i] != dF.scale(lam):
                raise PipelineError("omega", "pfaffians not a single scalar times the gradient")
        F_back = euler_integrate([spf_i.scale(run.field.inv(lam)) for spf_i in spf], n)
        if F_back != F:
            raise PipelineError("omega", "pfaffians do not integrate back to the secant equation")
        details["pfaffian_gradient_scalar"] = str(lam)
    return details


def stage_poisson_check(run: PipelineRun):
    cfg = run.config
    rng = cfg.stage_rng("poisson-check")
    bracket = QuadraticBracket(run.omega)
    casimirs = [run.secant_eq] if cfg.n % 2 else list(run.secant_eq)
    run.poisson = poisson_report(bracket, casimirs)
    if not run.poisson["jacobi_zero"] or not run.poisson["casimirs_zero"]:
        raise PipelineError("poisson-check", f"failures: {run.poisson['failures']}")
    if not caslem_engine_identity(bracket, 2, rng):
        raise PipelineError("poisson-check", "bracket engine self-test failed")
    return dict(run.poisson, engine_identity_ok=True)


def stage_szego_check(run: PipelineRun):
    cfg = run.config
    rng = cfg.stage_rng("szego-check")
    run.szego = compare_brackets(run.curve, run.omega, cfg.n, rng, cfg.trials, cfg.margin)
    if not run.szego.passed:
        raise PipelineError("szego-check", "bracket ratio is not a single constant")
    return run.szego.to_json_dict() | {"trials_used": run.szego.used}


def stage_rank_profile(run: PipelineRun):
    cfg = run.config
    rng = cfg.stage_rng("rank-profile")
    r = (cfg.n - 1) // 2
    sampler = make_sampler(run.curve, r - 1, cfg.n, cfg.stage_rng("rank-profile-secant"))
    run.ranks = rank_profile(run.klein, run.forward, run.inverse, sampler, rng, samples=20)
    if not run.ranks.ok:
        raise PipelineError("rank-profile", f"rank profile violated: {run.ranks.to_json_dict()}")
    return run.ranks.to_json_dict()


_STAGE_BODIES = {
    "ideal": stage_ideal,
    "secant-eq": stage_secant_eq,
    "klein": stage_klein,
    "pfaffians": stage_pfaffians,
    "sigma": stage_sigma,
    "cremona-check": stage_cremona_check,
    "omega": stage_omega,
    "poisson-check": stage_poisson_check,
    "szego-check": stage_szego_check,
    "rank-profile": stage_rank_profile,
}


def execute_pipeline(config: PipelineConfig, outdir=None, through_stage=None) -> PipelineRun:
    """Run all stages for the configured n; write artifacts if outdir is set.

    Returns the PipelineRun holding every stage object; run.report.passed
    is True only if every stage's identity checks held exactly.
    """
    run = PipelineRun(config)
    stages = run.stage_names
    if through_stage is not None and through_stage not in stages:
        raise ConfigError(f"unknown stage '{through_stage}' for n={config.n}; choose from {stages}")
    try:
        for name in stages:
            if name == "curve-sample":
                _timed(run, name, lambda: stage_curve_sample(run))
            else:
                _timed(run, name, lambda body=_STAGE_BODIES[name]: body(run))
            if outdir is not None:
                _write_stage_artifacts(run, name, outdir)
            if name == through_stage:
                break
    except PipelineError:
        run.report.passed = False
    else:
        run.report.passed = True
        run.report.dims = _dims(run)
    if outdir is not None:
        _write_manifest(run, outdir)
        write_artifact(f"{outdir}/report.json", run.report.to_json_dict())
    return run


def run_pipeline(config: PipelineConfig, outdir=None, through_stage=None) -> RunReport:
    return execute_pipeline(config, outdir, through_stage).report


def _dims(run):
    if run.config.n % 2:
        return [run.ideal_space.dim if run.ideal_space else None, 1, 1, 1]
    return [2, 1]


# -- artifact writing ----------------------------------------------------------


def _base(run, kind):
    return {"schema": f"ellsec/{kind}/v1", "config": run.config.to_json_dict()}


ARTIFACT_FILES = {
    "curve-sample": "curve.json",
    "ideal": "ideal.json",
    "secant-eq": "secant_eq.json",
    "klein": "phi.json",
    "pfaffians": "forward.json",
    "sigma": "inverse.json",
    "cremona-check": "composition.json",
    "omega": "omega.json",
    "poisson-check": "poisson.json",
    "szego-check": "szego.json",
    "rank-profile": "ranks.json",
}


def stage_payload(run: PipelineRun, name: str) -> dict:
    """The persisted JSON payload of a completed stage."""
    if name == "curve-sample":
        return _base(run, "curve")
    if name == "ideal":
        return _base(run, "ideal") | {
            "space": run.ideal_space.to_json_dict(),
            "map": run.ideal_map.to_json_dict(),
        }
    if name == "secant-eq":
        eqs = [run.secant_eq] if run.config.n % 2 else list(run.secant_eq)
        return _base(run, "secant-eq") | {"equations": [F.to_json_dict() for F in eqs]}
    if name == "klein":
        return _base(run, "phi") | {"matrix": run.phi.to_json_dict()}
    if name == "pfaffians":
        return _base(run, "forward") | {"map": run.forward.to_json_dict()}
    if name == "sigma":
        return _base(run, "inverse") | {"map": run.inverse.to_json_dict()}
    if name == "cremona-check":
        return _base(run, "composition") | {
            "factor": run.composition.factor.to_json_dict(),
            "reverse_factor": run.composition.reverse_factor.to_json_dict(),
            "factor_degree": run.composition.factor_degree,
            "comparisons": run.composition.factor_matches,
        }
    if name == "omega":
        return _base(run, "omega") | {"matrix": run.omega.to_json_dict()}
    if name == "poisson-check":
        return _base(run, "poisson") | dict(run.poisson)
    if name == "szego-check":
        return _base(run, "szego") | run.szego.to_json_dict()
    if name == "rank-profile":
        return _base(run, "ranks") | run.ranks.to_json_dict()
    raise ValueError(f"unknown stage '{name}'")


def _write_stage_artifacts(run: PipelineRun, name: str, outdir: str):
    write_artifact(f"{outdir}/{ARTIFACT_FILES[name]}", stage_payload(run, name))


def _write_manifest(run: PipelineRun, outdir: str):
    write_artifact(
        f"{outdir}/manifest.json",
        {
            "schema": "ellsec/manifest/v1",
            "config": run.config.to_json_dict(),
            "config_sha256": run.config.config_hash(),
            "stages": list(run.stage_names),
        },
    )
