"""Command-line front end.

Subcommands::

    solve          solve a configured (or reference) problem, write density CSV + diagnostics JSON
    validate       run the check suite for a reference case or a config, print a pass/fail table
    particles      run the particle oracle, write positions CSV + metrics JSON
    fourier-check  tabulate the cosine transform of the extended kernel

Exit codes: 0 success, 1 failed validation checks, 2 invalid input, 3 solver failure.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import os
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import (
    Carleman1DError,
    ConditioningError,
    ConvergenceError,
    DataError,
    PreconditionError,
    SolutionRejectedError,
)
from .kernels import KernelSpec, PolynomialVReg, PotentialSpec, TabulatedVReg, check_assumptions, kernel_fourier
from .reference import REFERENCE_NAMES, reference_case

CONFIG_SCHEMA = "carleman1d.run/1"
DIAGNOSTICS_SCHEMA = "carleman1d.diagnostics/1"
PARTICLES_SCHEMA = "carleman1d.particles/1"
THREADS_ENV = "CARLEMAN1D_NUM_THREADS"

EXIT_OK, EXIT_CHECKS, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3


class ConfigError(DataError):
    """Invalid configuration; ``field`` names the offending entry."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


# --------------------------------------------------------------------------
# Configuration


def _barrier(value, name):
    if value is None:
        return -math.inf if name.endswith("[0]") else math.inf
    if isinstance(value, str):
        if value.strip().lower() in ("-inf", "-infinity"):
            return -math.inf
        if value.strip().lower() in ("inf", "+inf", "infinity"):
            return math.inf
        raise ConfigError(name, f"expected a number, null or 'inf', got {value!r}")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(name, f"expected a number, got {value!r}")
    return float(value)


def _number(section, key, default=None, where=""):
    value = section.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(float(value)):
        raise ConfigError(f"{where}{key}", f"expected a finite number, got {value!r}")
    return float(value)


def _integer(section, key, default=None, where=""):
    value = section.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}{key}", f"expected an integer, got {value!r}")
    return value


def _coefficients(value, where):
    if not isinstance(value, list) or not value:
        raise ConfigError(where, "expected a non-empty list of numbers")
    out = []
    for i, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(float(v)):
            raise ConfigError(f"{where}[{i}]", f"expected a finite number, got {v!r}")
        out.append(float(v))
    return out


@dataclass(frozen=True)
class KernelConfig:
    a: float = 0.0
    vreg_name: str = "zero"
    vreg_params: dict = field(default_factory=dict)

    def build(self) -> KernelSpec:
        if self.vreg_name in ("zero", "dislocation"):
            return KernelSpec(self.a, self.vreg_name)
        if self.vreg_name == "polynomial":
            return KernelSpec(self.a, PolynomialVReg(tuple(self.vreg_params["coefficients"])))
        return KernelSpec(self.a, TabulatedVReg(self.vreg_params["grid"], self.vreg_params["values"]))


@dataclass(frozen=True)
class PotentialConfig:
    form: str = "zero"
    params: dict = field(default_factory=dict)
    barriers: tuple[float, float] = (0.0, 1.0)

    def build(self) -> PotentialSpec:
        p = self.params
        if self.form == "zero":
            return PotentialSpec.zero(self.barriers)
        if self.form == "affine":
            return PotentialSpec.affine(p.get("gamma", 1.0), self.barriers, p.get("offset", 0.0))
        if self.form == "quadratic":
            return PotentialSpec.quadratic(p["coefficients"], self.barriers)
        return PotentialSpec.polynomial(p["coefficients"], self.barriers)


@dataclass(frozen=True)
class SolverConfig:
    mode: str = "fixed_interval"
    nodes: int = 256
    tolerance: float = 1e-9
    max_outer: int = 60
    deterministic: bool = True
    method: str = "direct"


@dataclass(frozen=True)
class OutputConfig:
    density_path: str = "density.csv"
    diagnostics_path: str = "diagnostics.json"
    sample_count: int = 199
    positions_path: str = "positions.csv"
    metrics_path: str = "metrics.json"


@dataclass(frozen=True)
class ParticlesConfig:
    n: int = 200
    seed: int = 0
    compare: bool = True


@dataclass(frozen=True)
class RunConfig:
    kernel: KernelConfig
    potential: PotentialConfig
    solver: SolverConfig
    outputs: OutputConfig
    particles: ParticlesConfig | None = None
    reference: str | None = None

    def __post_init__(self):
        a = self.kernel.a
        if not 0.0 <= a < 1.0:
            raise ConfigError("kernel.a", f"must satisfy 0 <= a < 1, got {a}")
        n = self.solver.nodes
        if n < 64 or n > 4096 or n & (n - 1):
            raise ConfigError("solver.nodes", f"must be a power of two in [64, 4096], got {n}")
        tol = self.solver.tolerance
        if not 1e-12 <= tol <= 1e-3:
            raise ConfigError("solver.tolerance", f"must lie in [1e-12, 1e-3], got {tol}")
        if self.solver.mode not in ("fixed_interval", "free_boundary"):
            raise ConfigError("solver.mode", f"must be fixed_interval or free_boundary, got {self.solver.mode!r}")
        if self.solver.method not in ("direct", "picard"):
            raise ConfigError("solver.method", f"must be direct or picard, got {self.solver.method!r}")
        if self.solver.max_outer < 1:
            raise ConfigError("solver.max_outer", "must be positive")
        s1, s2 = self.potential.barriers
        if not s1 < s2:
            raise ConfigError("potential.barriers", f"need s1 < s2, got {[s1, s2]}")
        if self.solver.mode == "fixed_interval" and not (math.isfinite(s1) and math.isfinite(s2)):
            raise ConfigError("potential.barriers", "fixed_interval mode requires both barriers finite")
        if self.outputs.sample_count < 1:
            raise ConfigError("outputs.sample_count", "must be at least 1")
        if self.particles is not None and self.particles.n < 2:
            raise ConfigError("particles.n", "need at least two particles")

    @property
    def degree(self) -> int:
        return min(64, self.solver.nodes // 2)

    def build(self):
        return self.kernel.build(), self.potential.build()


def _section(raw, key, required=False):
    value = raw.get(key)
    if value is None:
        if required:
            raise ConfigError(key, "section is required")
        return {}
    if not isinstance(value, dict):
        raise ConfigError(key, "must be an object")
    return value


_KNOWN = {
    "kernel": {"a", "vreg", "vreg_name", "vreg_params"},
    "potential": {"form", "params", "barriers"},
    "solver": {"mode", "nodes", "tolerance", "max_outer", "deterministic", "method"},
    "outputs": {"density_path", "diagnostics_path", "sample_count", "positions_path", "metrics_path"},
    "particles": {"n", "seed", "compare"},
}


def parse_config(raw) -> RunConfig:
    """Validate a decoded JSON document and build a :class:`RunConfig`."""
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "configuration must be a JSON object")
    if raw.get("schema") != CONFIG_SCHEMA:
        raise ConfigError("schema", f"expected {CONFIG_SCHEMA!r}, got {raw.get('schema')!r}")
    unknown = set(raw) - {"schema", "kernel", "potential", "solver", "outputs", "particles", "reference"}
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown top-level key")
    for key, allowed in _KNOWN.items():
        extra = set(_section(raw, key)) - allowed
        if extra:
            raise ConfigError(f"{key}.{sorted(extra)[0]}", "unknown key")

    k = _section(raw, "kernel", required=True)
    vreg = k.get("vreg_name", k.get("vreg", "zero"))
    if vreg not in ("zero", "dislocation", "polynomial", "tabulated"):
        raise ConfigError("kernel.vreg", f"unknown regular part {vreg!r}")
    vparams = k.get("vreg_params", {}) or {}
    if not isinstance(vparams, dict):
        raise ConfigError("kernel.vreg_params", "must be an object")
    if vreg == "polynomial":
        vparams = {"coefficients": _coefficients(vparams.get("coefficients"), "kernel.vreg_params.coefficients")}
    if vreg == "tabulated":
        vparams = {
            "grid": _coefficients(vparams.get("grid"), "kernel.vreg_params.grid"),
            "values": _coefficients(vparams.get("values"), "kernel.vreg_params.values"),
        }
    kernel = KernelConfig(_number(k, "a", where="kernel."), vreg, vparams)

    p = _section(raw, "potential", required=True)
    form = p.get("form", "zero")
    if form not in ("zero", "affine", "quadratic", "polynomial"):
        raise ConfigError("potential.form", f"unknown form {form!r}")
    params = p.get("params", {}) or {}
    if not isinstance(params, dict):
        raise ConfigError("potential.params", "must be an object")
    if form == "affine":
        params = {
            "gamma": _number(params, "gamma", 1.0, "potential.params."),
            "offset": _number(params, "offset", 0.0, "potential.params."),
        }
    elif form in ("quadratic", "polynomial"):
        coeffs = _coefficients(params.get("coefficients"), "potential.params.coefficients")
        if form == "quadratic" and len(coeffs) > 3:
            raise ConfigError("potential.params.coefficients", "quadratic takes at most three coefficients")
        params = {"coefficients": coeffs}
    else:
        params = {}
    bar = p.get("barriers", [0.0, 1.0])
    if not isinstance(bar, list) or len(bar) != 2:
        raise ConfigError("potential.barriers", "expected a two-element list")
    barriers = (_barrier(bar[0], "potential.barriers[0]"), _barrier(bar[1], "potential.barriers[1]"))
    potential = PotentialConfig(form, params, barriers)

    s = _section(raw, "solver")
    det = s.get("deterministic", True)
    if not isinstance(det, bool):
        raise ConfigError("solver.deterministic", "expected a boolean")
    mode = s.get("mode", "fixed_interval")
    method = s.get("method", "direct")
    if not isinstance(mode, str):
        raise ConfigError("solver.mode", "expected a string")
    if not isinstance(method, str):
        raise ConfigError("solver.method", "expected a string")
    solver = SolverConfig(
        mode,
        _integer(s, "nodes", 256, "solver."),
        _number(s, "tolerance", 1e-9, "solver."),
        _integer(s, "max_outer", 60, "solver."),
        det,
        method,
    )

    o = _section(raw, "outputs")
    paths = {}
    for key, default in (
        ("density_path", "density.csv"),
        ("diagnostics_path", "diagnostics.json"),
        ("positions_path", "positions.csv"),
        ("metrics_path", "metrics.json"),
    ):
        value = o.get(key, default)
        if not isinstance(value, str) or not value:
            raise ConfigError(f"outputs.{key}", "expected a non-empty path string")
        paths[key] = value
    outputs = OutputConfig(sample_count=_integer(o, "sample_count", 199, "outputs."), **paths)

    particles = None
    if raw.get("particles") is not None:
        q = _section(raw, "particles")
        compare = q.get("compare", True)
        if not isinstance(compare, bool):
            raise ConfigError("particles.compare", "expected a boolean")
        particles = ParticlesConfig(_integer(q, "n", 200, "particles."), _integer(q, "seed", 0, "particles."), compare)
    reference = raw.get("reference")
    if reference is not None and not isinstance(reference, str):
        raise ConfigError("reference", "expected a string")
    try:
        cfg = RunConfig(kernel, potential, solver, outputs, particles, reference)
        cfg.build()
    except ConfigError:
        raise
    except (DataError, ValueError, KeyError) as exc:
        raise ConfigError("kernel/potential", str(exc)) from None
    return cfg


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<json>", f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_config(raw)


def config_from_reference(name: str, nodes: int = 256) -> RunConfig:
    """A run configuration equivalent to a catalog reference case."""
    case = reference_case(name)
    pot = case.potential
    if pot.form == "affine":
        form, params = "affine", {"gamma": pot.coefficients[1], "offset": pot.coefficients[0]}
    elif pot.form == "zero":
        form, params = "zero", {}
    else:
        form, params = pot.form, {"coefficients": list(pot.coefficients)}
    return RunConfig(
        KernelConfig(case.a, "zero", {}),
        PotentialConfig(form, params, pot.barriers),
        SolverConfig(case.mode, nodes),
        OutputConfig(),
        ParticlesConfig(),
        name,
    )


# --------------------------------------------------------------------------
# Output helpers


def _json_value(value):
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    if isinstance(value, np.generic):
        return _json_value(value.item())
    return value


def dump_json(obj) -> str:
    return json.dumps(_json_value(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def load_schema(name: str) -> dict:
    return json.loads(resources.files("carleman1d").joinpath("schemas", name).read_text())


def validate_document(doc: dict, schema_name: str) -> None:
    import jsonschema

    jsonschema.validate(doc, load_schema(schema_name))


def format_csv(header, columns) -> str:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join("%.17g" % float(v) for v in row))
    return "\n".join(lines) + "\n"


def _write_all(out_dir: Path, files: dict) -> list[str]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for rel, text in files.items():
        path = out_dir / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(text)
        os.replace(tmp, path)
        written.append(str(path))
    return written


@contextlib.contextmanager
def thread_limits(deterministic: bool):
    """Cap BLAS threads from the environment; deterministic mode uses one thread."""
    limit = os.environ.get(THREADS_ENV)
    n = None
    if limit:
        try:
            n = max(1, int(limit))
        except ValueError:
            raise ConfigError(THREADS_ENV, f"expected an integer, got {limit!r}") from None
    if deterministic:
        n = 1
    if n is None:
        yield
        return
    from threadpoolctl import threadpool_limits

    with threadpool_limits(limits=n):
        yield


# --------------------------------------------------------------------------
# Commands


def _solve(cfg: RunConfig):
    from .equilibrium import solve_fixed_interval, solve_free_boundary

    kernel, potential = cfg.build()
    if cfg.solver.mode == "fixed_interval":
        return solve_fixed_interval(
            kernel, potential, n_nodes=cfg.solver.nodes, degree=cfg.degree, method=cfg.solver.method,
            tolerance=max(cfg.solver.tolerance, 1e-12),
        )
    return solve_free_boundary(
        kernel, potential, n_nodes=cfg.solver.nodes, degree=cfg.degree, max_outer=cfg.solver.max_outer,
        tolerance=max(cfg.solver.tolerance, 1e-10),
    )


def diagnostics_document(solution, cfg: RunConfig) -> dict:
    d = solution.diagnostics
    return {
        "schema": DIAGNOSTICS_SCHEMA,
        "t1": solution.t1,
        "t2": solution.t2,
        "C": solution.constant_C,
        "mass_error": d.mass_error,
        "h_flatness": d.h_flatness,
        "h_exterior_min_gap": d.h_exterior_min_gap,
        "endpoint_coeffs": list(d.endpoint_coeffs),
        "residual_sup": d.residual_sup,
        "iterations": d.iterations,
        "profile_case": d.profile_case,
        "exponent_mode": solution.density.exponent_mode,
        "min_density": d.min_density,
        "condition_number": d.condition_number,
        "method": d.method,
        "nodes": cfg.solver.nodes,
        "reference": cfg.reference,
    }


def density_table(solution, sample_count: int):
    t = np.linspace(solution.t1, solution.t2, sample_count + 2)
    rho = solution.density(t)
    lo_e, hi_e = solution.density.exponents
    # endpoint values follow the weight exponent: infinite blow-up or zero
    rho[0] = math.inf if lo_e < 0 else 0.0
    rho[-1] = math.inf if hi_e < 0 else 0.0
    h = solution.h(t)
    return t, rho, h


def run_solve(cfg: RunConfig, out_dir: Path) -> dict:
    with thread_limits(cfg.solver.deterministic):
        solution = _solve(cfg)
        t, rho, h = density_table(solution, cfg.outputs.sample_count)
    doc = diagnostics_document(solution, cfg)
    validate_document(_json_value(doc), "diagnostics.schema.json")
    files = {
        cfg.outputs.density_path: format_csv(("t", "rho", "h"), (t, rho, h)),
        cfg.outputs.diagnostics_path: dump_json(doc),
    }
    _write_all(out_dir, files)
    return doc


@dataclass
class CheckRow:
    name: str
    value: float
    tolerance: float
    passed: bool
    relation: str = "<="

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status:4s}  {self.name:34s} {self.value:12.3e} {self.relation} {self.tolerance:.1e}"


def _row(name, value, tol, relation="<="):
    value = float(value)
    # NaN fails both relations; an infinite gap (no exterior points) passes ">="
    ok = value <= tol if relation == "<=" else value >= tol
    return CheckRow(name, value, tol, bool(ok), relation)


def validation_rows(cfg: RunConfig) -> list[CheckRow]:
    """The check suite: assumptions, structural solve checks and closed-form agreement."""
    from .carleman import carleman_apply
    from .equilibrium import h_function

    kernel, potential = cfg.build()
    rows = []
    report = check_assumptions(kernel, potential, cfg.solver.mode)
    fails = [c for c in report.checks if not c.passed and c.name != "potential_slope"]
    rows.append(_row("assumptions (failures)", len(fails), 0))
    sol = _solve(cfg)
    d = sol.diagnostics
    rows.append(_row("mass error", d.mass_error, 1e-9))
    rows.append(_row("min density", d.min_density, -1e-8, ">="))
    rows.append(_row("h flatness", d.h_flatness, 1e-5))
    rows.append(_row("exterior h gap", d.h_exterior_min_gap, -1e-5, ">="))
    unit = carleman_apply(kernel.a, lambda t: np.ones_like(t), verify=True)
    rows.append(_row("Carleman residual C_a(1)", unit.residual_sup, 1e-5))
    expected_g = math.cos(0.5 * kernel.a * math.pi) / math.pi if kernel.a > 0 else 1.0 / (2 * math.pi * math.log(2))
    rows.append(_row("C_a(1) smooth factor", float(np.max(np.abs(unit.density.values - expected_g))), 1e-10))
    if cfg.reference:
        case = reference_case(cfg.reference)
        lo, hi = case.support
        x = np.linspace(lo, hi, 402)[1:-1]
        mass = abs(case.mass() - 1.0)
        rows.append(_row("closed form mass", mass, 1e-10))
        inner = x[(x > lo + 0.02 * (hi - lo)) & (x < hi - 0.02 * (hi - lo))]
        resid = float(np.max(np.abs(h_function(case.representation, case.kernel, case.potential, inner) - case.constant_C)))
        rows.append(_row("closed form residual", resid, 1e-5))
        rows.append(_row("support endpoints", max(abs(sol.t1 - lo), abs(sol.t2 - hi)), 1e-4))
        rows.append(_row("constant C (relative)", abs(sol.constant_C / case.constant_C - 1.0), 1e-8))
        exact = case.density(x)
        if case.mode == "fixed_interval":
            err = float(np.max(np.abs(sol.density(x) / exact - 1.0)))
            rows.append(_row("density sup relative error", err, 1e-6))
        else:
            err = float(np.max(np.abs(sol.density(x) - exact)))
            rows.append(_row("density sup error", err, 1e-4))
    return rows


def run_validate(cfg: RunConfig, out_dir: Path | None, stream=None) -> bool:
    stream = sys.stdout if stream is None else stream
    with thread_limits(cfg.solver.deterministic):
        rows = validation_rows(cfg)
    label = cfg.reference or "config"
    print(f"validation suite: {label}", file=stream)
    for r in rows:
        print(r.line(), file=stream)
    ok = all(r.passed for r in rows)
    print("ALL CHECKS PASS" if ok else "SOME CHECKS FAIL", file=stream)
    if out_dir is not None:
        doc = {
            "reference": cfg.reference,
            "passed": ok,
            "checks": [
                {"name": r.name, "value": r.value, "tolerance": r.tolerance, "relation": r.relation, "passed": r.passed}
                for r in rows
            ],
        }
        _write_all(out_dir, {"validation.json": dump_json(doc)})
    return ok


def run_particles(cfg: RunConfig, out_dir: Path) -> dict:
    from .particles import compare_to_density, minimize_particles

    if cfg.particles is None:
        raise ConfigError("particles", "section is required for the particles command")
    kernel, potential = cfg.build()
    with thread_limits(cfg.solver.deterministic):
        config = minimize_particles(cfg.particles.n, kernel, potential, seed=cfg.particles.seed)
        doc = {
            "schema": PARTICLES_SCHEMA,
            "n": config.n,
            "seed": cfg.particles.seed,
            "energy": config.energy,
            "gradient_norm": config.gradient_norm,
            "iterations": config.iterations,
            "converged": config.converged,
            "support": list(config.support),
        }
        w1 = sup = None
        if cfg.particles.compare:
            continuum = reference_case(cfg.reference) if cfg.reference else _continuum(cfg)
            w1, sup = compare_to_density(config, continuum)
    doc["wasserstein1"] = w1
    doc["cdf_sup"] = sup
    validate_document(_json_value(doc), "particles.schema.json")
    idx = np.arange(1, config.n + 1)
    files = {
        cfg.outputs.positions_path: format_csv(("index", "x"), (idx, config.positions)),
        cfg.outputs.metrics_path: dump_json(doc),
    }
    _write_all(out_dir, files)
    return doc


def _continuum(cfg):
    try:
        return _solve(cfg)
    except (ConvergenceError, SolutionRejectedError, ConditioningError) as exc:
        raise ConfigError("particles.compare", f"no continuum solution available: {exc}") from None


def run_fourier_check(kernel: KernelSpec, b: float, omega_max: float, n_omega: int, out_dir, stream=None):
    stream = sys.stdout if stream is None else stream
    omegas = np.linspace(0.0, omega_max, n_omega)
    four = kernel_fourier(kernel, b=b, omega_grid=omegas)
    lo, hi = four.band
    summary = {
        "a": kernel.a,
        "vreg": kernel.vreg.describe(),
        "b": b,
        "shift": four.shift,
        "omega_max": omega_max,
        "positive": four.positive,
        "min_value": float(np.min(four.values)),
        "band": [lo, hi],
        "band_ratio": four.band_ratio,
    }
    print("omega          V_hat(omega)        V_hat*(1+omega^2)^((1-a)/2)", file=stream)
    step = max(1, n_omega // 20)
    for om, v, w in list(zip(four.omegas, four.values, four.weighted))[::step]:
        print(f"{om:8.3f}  {v:18.10e}  {w:18.10e}", file=stream)
    print(f"positive: {four.positive}  band: [{lo:.6g}, {hi:.6g}]  ratio C/c = {four.band_ratio:.4g}", file=stream)
    if out_dir is not None:
        _write_all(
            out_dir,
            {
                "fourier.csv": format_csv(("omega", "vhat", "weighted"), (four.omegas, four.values, four.weighted)),
                "fourier.json": dump_json(summary),
            },
        )
    return summary


# --------------------------------------------------------------------------
# Entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="carleman1d", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--reference", help=f"catalog case: {', '.join(REFERENCE_NAMES)} (parameters as key=value)")
        p.add_argument("--out-dir", help="directory for output files (default: current directory)")
        p.add_argument("--deterministic", action="store_true", help="single-threaded, bit-reproducible run")
        return p

    common(sub.add_parser("solve", help="solve for the equilibrium density"))
    common(sub.add_parser("validate", help="run the check suite"))
    common(sub.add_parser("particles", help="run the particle oracle"))
    fc = common(sub.add_parser("fourier-check", help="tabulate the kernel cosine transform"))
    fc.add_argument("--kernel", default="dislocation", choices=("zero", "dislocation"), help="regular part when no config")
    fc.add_argument("--a", type=float, default=0.0, help="kernel exponent when no config")
    fc.add_argument("--b", type=float, default=2.0, help="half-width of the extended kernel support")
    fc.add_argument("--omega-max", type=float, default=100.0)
    fc.add_argument("--n-omega", type=int, default=1001)
    return parser


def _resolve_config(args) -> RunConfig:
    if args.config and args.reference:
        raise ConfigError("--reference", "give either --config or --reference, not both")
    if args.config:
        cfg = load_config(args.config)
    elif args.reference:
        try:
            cfg = config_from_reference(args.reference)
        except DataError as exc:
            raise ConfigError("--reference", str(exc)) from None
    else:
        raise ConfigError("--config", "a --config file or a --reference name is required")
    if args.deterministic and not cfg.solver.deterministic:
        cfg = RunConfig(
            cfg.kernel, cfg.potential,
            SolverConfig(cfg.solver.mode, cfg.solver.nodes, cfg.solver.tolerance, cfg.solver.max_outer, True,
                         cfg.solver.method),
            cfg.outputs, cfg.particles, cfg.reference,
        )
    return cfg


def _error(kind: str, exc: Exception, code: int) -> int:
    record = {"error": kind, "message": str(exc)}
    if isinstance(exc, ConfigError):
        record["field"] = exc.field
    diag = getattr(exc, "diagnostics", None)
    if diag:
        record["diagnostics"] = _json_value(diag)
    sys.stderr.write(json.dumps(record, sort_keys=True, default=str) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out_dir = Path(args.out_dir) if args.out_dir else Path(".")
    try:
        if args.command == "fourier-check":
            if args.config:
                kernel = load_config(args.config).kernel.build()
            else:
                kernel = KernelSpec(args.a, args.kernel)
            with thread_limits(args.deterministic):
                run_fourier_check(kernel, args.b, args.omega_max, args.n_omega, Path(args.out_dir) if args.out_dir else None)
            return EXIT_OK
        cfg = _resolve_config(args)
        if args.command == "solve":
            doc = run_solve(cfg, out_dir)
            print(dump_json({k: doc[k] for k in ("t1", "t2", "C", "profile_case")}), end="")
            return EXIT_OK
        if args.command == "validate":
            return EXIT_OK if run_validate(cfg, None) else EXIT_CHECKS
        if args.command == "particles":
            doc = run_particles(cfg, out_dir)
            print(dump_json({k: doc[k] for k in ("n", "wasserstein1", "cdf_sup", "energy")}), end="")
            return EXIT_OK
    except ConfigError as exc:
        return _error("invalid_config", exc, EXIT_INPUT)
    except PreconditionError as exc:
        return _error("assumptions_failed", exc, EXIT_INPUT)
    except (ConvergenceError, SolutionRejectedError, ConditioningError) as exc:
        return _error(type(exc).__name__, exc, EXIT_SOLVER)
    except Carleman1DError as exc:
        return _error(type(exc).__name__, exc, EXIT_INPUT)
    return EXIT_INPUT  # pragma: no cover - argparse enforces a command


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
