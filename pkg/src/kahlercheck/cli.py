"""Scenario manifests, check orchestration, and machine-readable reports.

A manifest is a JSON document (``"schema": 1``)::

    {
      "schema": 1,
      "name": "boch1_flat_to_ball",
      "domain": {"catalog": "flat", "params": {"dim": 1}},
      "target": {"catalog": "complex_hyperbolic_ball", "params": {"dim": 2, "c": 1.0}},
      "map": ["z1/2", "z1^2/2"],
      "sampler": {"count": 50, "radius": 0.8, "seed": 7},
      "checks": [{"kind": "boch1", "tolerance": 1e-6}]
    }

Charts are either catalog references or expression-defined
(``{"dim": 1, "potential": "-log(1 - abs2(z1))", "region": {"kind": "ball"}}``;
a ``"metric"`` matrix of expressions is accepted in place of a potential).
Check kinds: boch1, boch2, log_w, schwarz, volume, royden, hoop,
three_circle, psh, averaging.  Hypothesis constants for the bound checks
come from the check parameters or the scenario ``"constants"`` block
(trusted as analytic), else from catalog curvature facts (analytic),
else from sampling (advisory).

The report is a JSON document with top level
``{schema, scenario, seed, checks, summary}`` where summary counts
passed / failed / advisory checks.  Floats are written with 17
significant digits and complex values as [re, im] pairs, so a report is
byte-identical across runs of the same manifest and seed.  Exit status:
0 when no check failed (advisory outcomes do not gate), 1 on check
failure, 2 on a configuration problem.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import bounds as bounds_mod
from . import identities as ident_mod
from .errors import ConfigurationError, KahlerCheckError
from .functionals import holo_sectional, ricci, scalar_curvature
from .geometry import (
    CATALOG,
    Ball,
    FullSpace,
    KahlerChart,
    Polydisk,
    PotentialChart,
    ComponentChart,
    catalog,
    curvature_tensor,
)
from .identities import CheckReport
from .linalg import pencil_eigh, rng_for
from .maps import HoloMap

SCHEMA_VERSION = 1
DEFAULT_PROBE_ORDER = 2
SAMPLER_STREAM = 37
CURVATURE_STREAM = 83


# -- manifest loading -------------------------------------------------------------


def _require(doc: dict, key: str, what: str):
    if key not in doc:
        raise ConfigurationError(f"{what} is missing the {key!r} field")
    return doc[key]


def _region_from_spec(spec, dim: int):
    if spec is None:
        return None
    kind = _require(spec, "kind", "region spec")
    if kind == "full":
        return FullSpace(dim)
    if kind == "ball":
        return Ball(dim, float(spec.get("radius", 1.0)))
    if kind == "polydisk":
        radii = spec.get("radii")
        if radii is None or len(radii) != dim:
            raise ConfigurationError(f"polydisk region needs {dim} radii")
        return Polydisk(dim, tuple(float(r) for r in radii))
    raise ConfigurationError(f"unknown region kind {kind!r}")


def chart_from_spec(spec: dict, role: str) -> KahlerChart:
    """Build a chart from a manifest entry: catalog reference or expressions."""
    if not isinstance(spec, dict):
        raise ConfigurationError(f"{role} spec must be an object")
    if "catalog" in spec:
        return catalog(spec["catalog"], **spec.get("params", {}))
    dim = int(_require(spec, "dim", f"{role} spec"))
    region = _region_from_spec(spec.get("region"), dim)
    label = spec.get("label", role)
    if "potential" in spec:
        return PotentialChart(dim, spec["potential"], region, label)
    if "metric" in spec:
        return ComponentChart(dim, spec["metric"], region, label)
    raise ConfigurationError(f"{role} spec needs 'catalog', 'potential', or 'metric'")


def _complex_from_json(value, what: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ConfigurationError(f"{what} entries must be numbers or [re, im] pairs")


def _vector_from_json(value, dim: int, what: str) -> np.ndarray:
    vec = np.array([_complex_from_json(v, what) for v in value], dtype=complex)
    if vec.shape != (dim,):
        raise ConfigurationError(f"{what} must have {dim} entries, got {len(vec)}")
    return vec


@dataclass
class Scenario:
    """A validated manifest, ready to run."""

    name: str
    domain: KahlerChart
    target: KahlerChart
    holo_map: HoloMap
    count: int
    radius: float | None
    radii: tuple[float, ...] | None
    seed: int
    checks: list[dict]
    constants: dict = field(default_factory=dict)
    probe_order: int = DEFAULT_PROBE_ORDER


def load_scenario(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ConfigurationError("manifest must be a JSON object")
    if doc.get("schema") != SCHEMA_VERSION:
        raise ConfigurationError(f"manifest schema must be {SCHEMA_VERSION}, got {doc.get('schema')!r}")
    name = _require(doc, "name", "manifest")
    domain = chart_from_spec(_require(doc, "domain", "manifest"), "domain")
    target = chart_from_spec(_require(doc, "target", "manifest"), "target")
    components = _require(doc, "map", "manifest")
    if len(components) != target.dim:
        raise ConfigurationError(
            f"map has {len(components)} components but the target dimension is {target.dim}"
        )
    holo_map = HoloMap(domain, target, components, label=name)
    sampler = _require(doc, "sampler", "manifest")
    if "seed" not in sampler:
        raise ConfigurationError("sampler must carry an explicit seed (reproducibility)")
    radius = sampler.get("radius")
    radii = sampler.get("radii")
    if (radius is None) == (radii is None):
        raise ConfigurationError("sampler needs exactly one of 'radius' or 'radii'")
    if radii is not None:
        radii = tuple(float(r) for r in radii)
        if len(radii) != domain.dim:
            raise ConfigurationError(f"sampler radii must have {domain.dim} entries")
    checks = _require(doc, "checks", "manifest")
    if not isinstance(checks, list) or not checks:
        raise ConfigurationError("manifest needs a nonempty list of checks")
    for check in checks:
        _require(check, "kind", "check spec")
    return Scenario(
        name=name,
        domain=domain,
        target=target,
        holo_map=holo_map,
        count=int(sampler.get("count", 20)),
        radius=None if radius is None else float(radius),
        radii=radii,
        seed=int(sampler["seed"]),
        checks=checks,
        constants=doc.get("constants", {}),
    )


def load_manifest(path: str) -> Scenario:
    with open(path, encoding="utf-8") as handle:
        return load_scenario(json.load(handle))


def sample_points(scenario: Scenario) -> np.ndarray:
    """Seeded Gaussian cloud, row norms clamped into the sampling region."""
    dim = scenario.domain.dim
    rng = rng_for(scenario.seed, SAMPLER_STREAM)
    raw = rng.normal(size=(scenario.count, dim)) + 1j * rng.normal(size=(scenario.count, dim))
    if scenario.radius is not None:
        pts = raw * (0.4 * scenario.radius)
        norms = np.linalg.norm(pts, axis=1)
        return pts * np.minimum(1.0, scenario.radius / np.maximum(norms, 1e-12))[:, None]
    scales = np.asarray(scenario.radii)
    pts = raw * (0.4 * scales)[None, :]
    caps = np.minimum(1.0, scales[None, :] / np.maximum(np.abs(pts), 1e-12))
    return pts * caps


def _probe_charts(scenario: Scenario, points: np.ndarray):
    # expression-defined metrics are validated up front: realness of the
    # potential and Hermitian-ness would otherwise only surface mid-run
    order = scenario.probe_order
    scenario.domain.metric_jets(points[0], order)
    scenario.target.metric_jets(scenario.holo_map.image_point(points[0]), order)


# -- hypothesis constants ----------------------------------------------------------

# kind -> ((facts field for K, sign), (facts field for kappa, sign))
_CONSTANT_RULES = {
    "schwarz": (("hol_sec_min", -1.0), ("hol_sec_max", -1.0)),
    "volume": (("scalar", -1.0), ("ricci_max", -1.0)),
    "royden": (("ricci_min", -1.0), ("hol_sec_max", -1.0)),
    ("hoop", "volume"): (("ricci_min", 1.0), ("ricci_max", 1.0)),
    ("hoop", "stretching"): (("hol_sec_min", 1.0), ("hol_sec_max", 1.0)),
}


def _sampled_range(chart: KahlerChart, points, quantity: str, seed: int):
    lo, hi = np.inf, -np.inf
    rng = rng_for(seed, CURVATURE_STREAM)
    for point in points:
        cp = curvature_tensor(chart, point)
        if quantity.startswith("hol_sec"):
            for _ in range(8):
                z = rng.normal(size=chart.dim) + 1j * rng.normal(size=chart.dim)
                value = holo_sectional(cp, z)[1]
                lo, hi = min(lo, value), max(hi, value)
        elif quantity.startswith("ricci"):
            vals = pencil_eigh(ricci(cp), cp.g)[0]
            lo, hi = min(lo, vals[0]), max(hi, vals[-1])
        else:
            value = scalar_curvature(cp)
            lo, hi = min(lo, value), max(hi, value)
    return lo, hi


def _resolve_constant(scenario, check, const_name, rule, chart, chart_points):
    """Check params and scenario constants are trusted analytic; catalog facts
    are analytic; anything else falls back to sampled (advisory) estimates."""
    if const_name in check:
        return bounds_mod.Constant.analytic(const_name, float(check[const_name]))
    if const_name in scenario.constants:
        return bounds_mod.Constant.analytic(const_name, float(scenario.constants[const_name]))
    facts_field, sign = rule
    facts = getattr(chart, "facts", None)
    if facts is not None:
        return bounds_mod.Constant.analytic(const_name, sign * getattr(facts, facts_field))
    lo, hi = _sampled_range(chart, chart_points, facts_field, scenario.seed)
    value = lo if facts_field.endswith("_min") or facts_field == "scalar" else hi
    return bounds_mod.Constant.sampled(const_name, sign * value)


def resolve_bound_constants(scenario, check, kind, points):
    key = (kind, check.get("mode", "volume")) if kind == "hoop" else kind
    k_rule, kappa_rule = _CONSTANT_RULES[key]
    probe = points[: min(len(points), 12)]
    images = np.array([scenario.holo_map.image_point(p) for p in probe])
    k = _resolve_constant(scenario, check, "K", k_rule, scenario.domain, probe)
    kappa = _resolve_constant(scenario, check, "kappa", kappa_rule, scenario.target, images)
    return k, kappa


# -- check runners ------------------------------------------------------------------


def _direction(scenario, check):
    if "direction" in check:
        return _vector_from_json(check["direction"], scenario.domain.dim, "direction")
    vec = np.zeros(scenario.domain.dim, dtype=complex)
    vec[0] = 1.0
    return vec


def _run_identity(scenario, check, points):
    kind = check["kind"]
    verify = {"boch1": ident_mod.verify_boch1,
              "boch2": ident_mod.verify_boch2,
              "log_w": ident_mod.verify_log_w}[kind]
    tol = float(check.get("tolerance", ident_mod.DEFAULT_TOL))
    return verify(scenario.holo_map, points, _direction(scenario, check), tol)


def _run_bound(scenario, check, points):
    kind = check["kind"]
    tol = float(check.get("tolerance", 1e-8))
    k, kappa = resolve_bound_constants(scenario, check, kind, points)
    if kind == "hoop":
        mode = check.get("mode", "volume")
        return bounds_mod.hoop_check(scenario.holo_map, points, mode, k, kappa, tol)
    runner = {"schwarz": bounds_mod.schwarz_bound_report,
              "volume": bounds_mod.volume_bound_report,
              "royden": bounds_mod.royden_bound_report}[kind]
    return runner(scenario.holo_map, points, k, kappa, tol)


def _run_three_circle(scenario, check, points):
    radii = _require(check, "radii", "three_circle check")
    counts = check.get("counts", 64)
    if isinstance(counts, list):
        counts = tuple(int(c) for c in counts)
    return bounds_mod.three_circle_check(
        scenario.holo_map,
        tuple(float(r) for r in radii),
        counts,
        tol=float(check.get("tolerance", 1e-9)),
        seed=int(check.get("seed", scenario.seed)),
    )


def _run_psh(scenario, check, points):
    return ident_mod.psh_check(
        _require(check, "quantity", "psh check"),
        scenario.holo_map,
        points,
        tol=float(check.get("tolerance", 1e-8)),
        hypothesis_samples=int(check.get("hypothesis_samples", 3)),
        seed=int(check.get("seed", scenario.seed)),
    )


def _run_averaging(scenario, check, points):
    weights = _require(check, "weights", "averaging check")
    anchor = (_vector_from_json(check["point"], scenario.domain.dim, "averaging point")
              if "point" in check else points[0])
    cp = curvature_tensor(scenario.domain, anchor)
    kappa = check.get("kappa")
    return ident_mod.averaging_identity_check(
        cp,
        [float(w) for w in weights],
        tol=float(check.get("tolerance", 1e-9)),
        count=int(check.get("count", 20000)),
        seed=int(check.get("seed", scenario.seed)),
        kappa=None if kappa is None else float(kappa),
    )


_RUNNERS = {
    "boch1": _run_identity,
    "boch2": _run_identity,
    "log_w": _run_identity,
    "schwarz": _run_bound,
    "volume": _run_bound,
    "royden": _run_bound,
    "hoop": _run_bound,
    "three_circle": _run_three_circle,
    "psh": _run_psh,
    "averaging": _run_averaging,
}


def run_check(scenario: Scenario, check: dict, points: np.ndarray):
    kind = check["kind"]
    if kind not in _RUNNERS:
        raise ConfigurationError(f"unknown check kind {kind!r}; known: {', '.join(sorted(_RUNNERS))}")
    return _RUNNERS[kind](scenario, check, points)


# -- report assembly ----------------------------------------------------------------


def classify(report) -> str:
    """passed / failed / advisory; advisory outcomes never gate the exit code."""
    if isinstance(report, CheckReport):
        if report.status != "ok":
            return "advisory"
        return "passed" if report.passed else "failed"
    sampled = any(c.source == "sampled" for c in report.constants)
    if report.passed:
        return "advisory" if sampled else "passed"
    if sampled or report.kind.startswith("hoop"):
        # a sampled maximum that misses a lower bound is not a disproof
        return "advisory"
    return "failed"


def _complex_json(value: complex):
    return [float(value.real), float(value.imag)]


def _point_json(point):
    return None if point is None else [_complex_json(complex(v)) for v in np.asarray(point)]


def check_report_json(report: CheckReport, details: bool) -> dict:
    doc = {
        "type": "check",
        "kind": report.kind,
        "passed": report.passed,
        "status": report.status,
        "points_checked": report.points_checked,
        "skipped_points": report.skipped_points,
        "max_abs_residual": report.max_abs_residual,
        "tolerance": report.tolerance,
        "worst_point": _point_json(report.worst_point),
        "notes": list(report.notes),
    }
    if details and report.details is not None:
        doc["residuals"] = list(report.details)
    return doc


def bound_report_json(report) -> dict:
    return {
        "type": "bound",
        "kind": report.kind,
        "passed": report.passed,
        "equality_case": report.equality_case,
        "observed": report.observed,
        "bound": report.bound,
        "slack": report.slack,
        "tolerance": report.tolerance,
        "points_checked": report.points_checked,
        "coefficient": report.coefficient,
        "constants": [
            {"name": c.name, "value": c.value, "source": c.source} for c in report.constants
        ],
        "notes": list(report.notes),
    }


def run_scenario(scenario: Scenario, details: bool = False) -> tuple[dict, int]:
    """Execute all checks in declaration order; report document plus exit code."""
    points = sample_points(scenario)
    _probe_charts(scenario, points)
    checks_json = []
    tally = {"passed": 0, "failed": 0, "advisory": 0}
    for check in scenario.checks:
        report = run_check(scenario, check, points)
        verdict = classify(report)
        tally[verdict] += 1
        doc = (check_report_json(report, details) if isinstance(report, CheckReport)
               else bound_report_json(report))
        doc["verdict"] = verdict
        checks_json.append(doc)
    report_doc = {
        "schema": SCHEMA_VERSION,
        "scenario": scenario.name,
        "seed": scenario.seed,
        "checks": checks_json,
        "summary": dict(tally),
    }
    return report_doc, (0 if tally["failed"] == 0 else 1)


def curvature_report(scenario: Scenario) -> dict:
    """Closed-form facts where available plus sampled curvature ranges."""
    points = sample_points(scenario)
    _probe_charts(scenario, points)
    probe = points[: min(len(points), 20)]
    images = np.array([scenario.holo_map.image_point(p) for p in probe])
    charts = []
    for role, chart, pts in (("domain", scenario.domain, probe),
                             ("target", scenario.target, images)):
        entry = {"role": role, "label": chart.label, "dim": chart.dim}
        family = getattr(chart, "family", None)
        if family is not None:
            entry["family"] = family
        facts = getattr(chart, "facts", None)
        if facts is not None:
            entry["facts"] = {
                "hol_sec_min": facts.hol_sec_min,
                "hol_sec_max": facts.hol_sec_max,
                "ricci_min": facts.ricci_min,
                "ricci_max": facts.ricci_max,
                "scalar": facts.scalar,
                "constant_hol_sec": facts.constant_hol_sec,
                "einstein": facts.einstein,
            }
        sampled = {}
        for quantity in ("hol_sec", "ricci", "scalar"):
            lo, hi = _sampled_range(chart, pts, quantity, scenario.seed)
            sampled[quantity] = {"min": lo, "max": hi}
        entry["sampled"] = sampled
        entry["points_sampled"] = len(pts)
        charts.append(entry)
    return {
        "schema": SCHEMA_VERSION,
        "scenario": scenario.name,
        "seed": scenario.seed,
        "charts": charts,
    }


# -- serialization -------------------------------------------------------------------


def render_json(obj, indent: int = 0) -> str:
    """JSON with floats at 17 significant digits, keys in insertion order."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = (f"{inner}{json.dumps(str(k))}: {render_json(v, indent + 1)}" for k, v in obj.items())
        return "{\n" + ",\n".join(rows) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        rows = (f"{inner}{render_json(v, indent + 1)}" for v in obj)
        return "[\n" + ",\n".join(rows) + f"\n{pad}]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if not np.isfinite(value):
            raise ConfigurationError(f"cannot serialize non-finite value {value}")
        return format(value, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    raise ConfigurationError(f"cannot serialize {type(obj).__name__} into a report")


def write_report(doc: dict, output: str | None):
    text = render_json(doc) + "\n"
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text)


# -- shipped scenarios ----------------------------------------------------------------


def shipped_scenarios() -> dict[str, dict]:
    """Name -> manifest document for the scenarios bundled with the package."""
    root = resources.files(__package__).joinpath("scenarios")
    docs = {}
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".json"):
            docs[entry.name[: -len(".json")]] = json.loads(entry.read_text(encoding="utf-8"))
    return docs


def shipped_scenario(name: str) -> Scenario:
    docs = shipped_scenarios()
    if name not in docs:
        raise ConfigurationError(f"unknown shipped scenario {name!r}; known: {', '.join(sorted(docs))}")
    return load_scenario(docs[name])


# -- command line ---------------------------------------------------------------------


def _apply_overrides(scenario: Scenario, args) -> Scenario:
    if args.points is not None:
        if args.points < 1:
            raise ConfigurationError("--points must be at least 1")
        scenario.count = args.points
    if args.seed is not None:
        scenario.seed = args.seed
    if args.tol is not None:
        if args.tol <= 0:
            raise ConfigurationError("--tol must be positive")
        scenario.checks = [{**check, "tolerance": args.tol} for check in scenario.checks]
    if args.order is not None:
        if not 1 <= args.order <= 6:
            raise ConfigurationError("--order must be between 1 and 6")
        scenario.probe_order = args.order
    return scenario


def _scenario_from_arg(path: str) -> Scenario:
    try:
        return load_manifest(path)
    except FileNotFoundError:
        # allow the bundled scenarios to be named directly
        return shipped_scenario(path)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kahlercheck",
        description="curvature identities and Schwarz-type bounds for holomorphic maps",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def manifest_flags(p, with_details):
        p.add_argument("manifest", help="manifest path or shipped scenario name")
        p.add_argument("--tol", type=float, default=None, help="override every check tolerance")
        p.add_argument("--seed", type=int, default=None, help="override the sampler seed")
        p.add_argument("--points", type=int, default=None, help="override the sample count")
        p.add_argument("--order", type=int, default=None, help="jet order for chart validation probes")
        p.add_argument("--output", default=None, help="write the report here instead of stdout")
        if with_details:
            p.add_argument("--details", action="store_true", help="include per-point residuals")

    manifest_flags(sub.add_parser("run", help="run a scenario's checks"), with_details=True)
    manifest_flags(sub.add_parser("curvature", help="curvature report only"), with_details=False)
    catalog_parser = sub.add_parser("catalog", help="inspect built-in data")
    catalog_parser.add_argument("what", choices=["list"], help="'list' the chart catalog")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "catalog":
            for name, entry in sorted(CATALOG.items()):
                sys.stdout.write(f"{name:24s} {entry.params:32s} {entry.description}\n")
            for name in sorted(shipped_scenarios()):
                sys.stdout.write(f"scenario:{name}\n")
            return 0
        scenario = _apply_overrides(_scenario_from_arg(args.manifest), args)
        if args.command == "curvature":
            write_report(curvature_report(scenario), args.output)
            return 0
        doc, status = run_scenario(scenario, details=args.details)
        write_report(doc, args.output)
        return status
    except (KahlerCheckError, json.JSONDecodeError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
