"""Schwarz-type estimates, three-circle convexity, hoop bounds, degeneracy tables.

Every report carries its hypothesis constants together with how they
were obtained: constants read off a catalog chart's closed-form
curvature are certified, constants estimated by sampling make the
verdict advisory.  Sampled maxima always underestimate the true
supremum, so for the reverse (hoop) bounds a failure is advisory in
the same way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConfigurationError, DegenerateInputError
from .functionals import bisectional
from .geometry import curvature_tensor
from .identities import CheckReport
from .linalg import rng_for
from .maps import HoloMap, map_point_data, sigma_k

ANALYTIC = "analytic"
SAMPLED = "sampled"


@dataclass(frozen=True)
class Constant:
    """A hypothesis constant and the provenance that decides its authority."""

    name: str
    value: float
    source: str

    def __post_init__(self):
        if self.source not in (ANALYTIC, SAMPLED):
            raise ConfigurationError(f"constant source must be analytic or sampled, got {self.source!r}")
        if not math.isfinite(self.value):
            raise ConfigurationError(f"constant {self.name} must be finite")

    @classmethod
    def analytic(cls, name: str, value: float) -> "Constant":
        return cls(name, float(value), ANALYTIC)

    @classmethod
    def sampled(cls, name: str, value: float) -> "Constant":
        return cls(name, float(value), SAMPLED)

    def describe(self) -> str:
        return f"{self.name}={self.value:.12g} ({self.source})"


@dataclass(frozen=True, eq=False)
class BoundReport:
    """One bound evaluation.

    ``slack`` is the margin in the bound's favorable direction:
    bound − observed for upper bounds, observed − bound for the hoop
    (reverse) bounds; in both cases passed ⇔ slack ≥ −tolerance, and
    equality_case flags |slack| ≤ tolerance.
    """

    kind: str
    constants: tuple[Constant, ...]
    observed: float
    bound: float
    slack: float
    tolerance: float
    passed: bool
    equality_case: bool
    points_checked: int
    coefficient: str | None = None
    notes: tuple[str, ...] = ()


def _require_positive_kappa(kappa: Constant) -> float:
    if kappa.value <= 0:
        raise ConfigurationError(f"hypothesis constant {kappa.name} must be positive")
    return kappa.value


def _provenance_notes(*constants: Constant) -> list[str]:
    notes = [" ; ".join(c.describe() for c in constants)]
    if any(c.source == SAMPLED for c in constants):
        notes.append("sampled hypothesis constants: the verdict is advisory, not certified")
    return notes


def _report(kind, constants, observed, bound, tol, points, reverse=False,
            coefficient=None, notes=()):
    slack = (observed - bound) if reverse else (bound - observed)
    return BoundReport(
        kind=kind,
        constants=tuple(constants),
        observed=float(observed),
        bound=float(bound),
        slack=float(slack),
        tolerance=tol,
        passed=slack >= -tol,
        equality_case=abs(slack) <= tol,
        points_checked=points,
        coefficient=coefficient,
        notes=tuple(notes),
    )


def _as_points(points, dim: int) -> np.ndarray:
    pts = np.asarray(points, dtype=complex)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[1] != dim or len(pts) == 0:
        raise ConfigurationError(f"points must have shape (k, {dim}) with k >= 1")
    return pts


# -- Schwarz-type upper bounds ---------------------------------------------------


def schwarz_bound_report(f: HoloMap, points, k: Constant, kappa: Constant,
                         tol: float = 1e-8) -> BoundReport:
    """Top-stretch bound ‖∂f‖²_m ≤ K/κ under H^M ≥ −K, H^N ≤ −κ."""
    kappa_val = _require_positive_kappa(kappa)
    if k.value < 0:
        raise ConfigurationError("K must be nonnegative (it bounds −H from above)")
    pts = _as_points(points, f.m)
    observed = max(float(map_point_data(f, p).singular_sq[0]) for p in pts)
    bound = k.value / kappa_val
    notes = _provenance_notes(k, kappa)
    if bound == 0 and observed > tol:
        notes.append("hypotheses force a constant map; any stretching fails the bound")
    return _report("schwarz", (k, kappa), observed, bound, tol, len(pts), notes=notes)


def volume_bound_report(f: HoloMap, points, k: Constant, kappa: Constant,
                        tol: float = 1e-8) -> BoundReport:
    """Volume bound D ≤ (K/(mκ))^m under S^M ≥ −K, Ric^N_m ≤ −κ."""
    kappa_val = _require_positive_kappa(kappa)
    if k.value < 0:
        raise ConfigurationError("K must be nonnegative (it bounds −S from above)")
    if f.m > f.n:
        raise ConfigurationError(f"volume bound needs m <= n, got m={f.m}, n={f.n}")
    pts = _as_points(points, f.m)
    observed = 0.0
    for p in pts:
        data = map_point_data(f, p)
        observed = max(observed, float(np.prod(data.singular_sq)) if data.rank == f.m else 0.0)
    bound = (k.value / (f.m * kappa_val)) ** f.m
    notes = _provenance_notes(k, kappa)
    if bound == 0 and observed > tol:
        notes.append("hypotheses force degeneracy; any full-rank sample fails the bound")
    return _report("volume", (k, kappa), observed, bound, tol, len(pts), notes=notes)


def royden_bound_report(f: HoloMap, points, k: Constant, kappa: Constant,
                        tol: float = 1e-8) -> BoundReport:
    """Energy bound ‖∂f‖² ≤ (2d/(d+1))·K/κ with d = largest sampled rank."""
    kappa_val = _require_positive_kappa(kappa)
    if k.value < 0:
        raise ConfigurationError("K must be nonnegative (it bounds −Ric from above)")
    pts = _as_points(points, f.m)
    observed, rank = 0.0, 0
    for p in pts:
        data = map_point_data(f, p)
        observed = max(observed, float(np.sum(data.singular_sq)))
        rank = max(rank, data.rank)
    coefficient = Fraction(2 * rank, rank + 1)
    bound = float(coefficient) * k.value / kappa_val
    notes = _provenance_notes(k, kappa)
    notes.append(f"rank d={rank}, coefficient 2d/(d+1) = {coefficient}")
    return _report("royden", (k, kappa), observed, bound, tol, len(pts),
                   coefficient=str(coefficient), notes=notes)


# -- three-circle convexity ------------------------------------------------------


def _require_flat_domain(f: HoloMap, what: str):
    if getattr(f.domain, "family", None) != "flat":
        raise ConfigurationError(f"{what} needs a flat domain chart (|x| must be the distance)")


def _sphere_points(radius: float, dim: int, count: int, seed: int) -> np.ndarray:
    """Deterministic sphere samples; doubling count keeps earlier points."""
    if dim == 1:
        angles = 2.0 * np.pi * np.arange(count) / count
        return radius * np.exp(1j * angles)[:, None]
    # one row per variate block, so a doubled count extends the sample set
    raw = rng_for(seed, 71).normal(size=(count, 2 * dim))
    z = raw[:, :dim] + 1j * raw[:, dim:]
    return radius * z / np.linalg.norm(z, axis=1, keepdims=True)


def three_circle_data(f: HoloMap, radii, counts, seed: int = 0) -> tuple[float, float, float]:
    """Sampled sup of the top stretch |∂f| on the three spheres."""
    _require_flat_domain(f, "three-circle check")
    r1, r2, r3 = (float(r) for r in radii)
    if not 0 < r1 < r2 < r3:
        raise ConfigurationError(f"radii must be strictly increasing and positive, got {radii}")
    if isinstance(counts, int):
        counts = (counts, counts, counts)
    maxima = []
    for r, count in zip((r1, r2, r3), counts):
        samples = _sphere_points(r, f.m, count, seed)
        top = max(float(map_point_data(f, p).singular_sq[0]) for p in samples)
        maxima.append(math.sqrt(top))
    return tuple(maxima)


def three_circle_check(f: HoloMap, radii, counts=64, tol: float = 1e-9,
                       seed: int = 0, hypothesis_samples: int = 2) -> CheckReport:
    """Convexity of log M(r) in log r, M(r) = sup of |∂f| on the r-sphere.

    The middle value must stay below the log-log interpolation of the
    outer two.  Target nonpositivity of the bisectional curvature is
    sampled; a violation downgrades the verdict to not_applicable.
    """
    m1, m2, m3 = three_circle_data(f, radii, counts, seed)
    r1, r2, r3 = (float(r) for r in radii)
    total = sum(counts) if not isinstance(counts, int) else 3 * counts
    notes = [f"M(r1)={m1:.12g} M(r2)={m2:.12g} M(r3)={m3:.12g}"]

    hypothesis_notes = []
    rng = rng_for(seed, 73)
    for p in _sphere_points(r2, f.m, hypothesis_samples, seed + 1):
        cp_n = curvature_tensor(f.target, f.image_point(p))
        x = rng.normal(size=f.n) + 1j * rng.normal(size=f.n)
        y = rng.normal(size=f.n) + 1j * rng.normal(size=f.n)
        bn = bisectional(cp_n, x, y)
        if bn > 1e-9:
            hypothesis_notes.append(f"target bisectional {bn:.3e} > 0 near radius {r2}")

    if min(m1, m2, m3) == 0.0:
        notes.append("constant map: all sphere maxima vanish, inequality vacuous")
        violation = 0.0
    else:
        weight = (math.log(r2) - math.log(r1)) / (math.log(r3) - math.log(r1))
        interp = (1.0 - weight) * math.log(m1) + weight * math.log(m3)
        signed = interp - math.log(m2)
        violation = max(0.0, -signed)
        notes.append(f"signed_slack={signed:.12g}")
    status = "ok"
    if hypothesis_notes:
        status = "not_applicable"
        notes.append("hypotheses not satisfied:")
        notes.extend(dict.fromkeys(hypothesis_notes))
    return CheckReport(
        kind="three_circle",
        points_checked=total,
        max_abs_residual=violation,
        worst_point=None,
        tolerance=tol,
        passed=violation <= tol,
        status=status,
        notes=tuple(notes),
    )


# -- hoop (reverse) bounds -------------------------------------------------------

HOOP_MODES = ("volume", "stretching")


def hoop_check(f: HoloMap, points, mode: str, k: Constant, kappa: Constant,
               tol: float = 1e-8) -> BoundReport:
    """Reverse bound max D^{1/m} ≥ K/κ (volume) or max ‖∂f‖²_m ≥ K/κ (stretching).

    Positive curvature must dominate the domain for these; the sampled
    maximum can only undershoot the true one, so a failed hoop check is
    advisory by construction.
    """
    if mode not in HOOP_MODES:
        raise ConfigurationError(f"unknown hoop mode {mode!r}; choose from {HOOP_MODES}")
    kappa_val = _require_positive_kappa(kappa)
    if k.value <= 0:
        raise ConfigurationError("hoop bounds need K > 0 (positively curved domain)")
    pts = _as_points(points, f.m)
    if mode == "volume" and f.m > f.n:
        raise ConfigurationError(f"volume mode needs m <= n, got m={f.m}, n={f.n}")
    observed = 0.0
    for p in pts:
        data = map_point_data(f, p)
        if mode == "volume":
            value = float(np.prod(data.singular_sq)) ** (1.0 / f.m) if data.rank == f.m else 0.0
        else:
            value = float(data.singular_sq[0])
        observed = max(observed, value)
    if observed == 0.0:
        raise DegenerateInputError(
            f"map is degenerate on every sample; hoop {mode} bound needs a nontrivial map"
        )
    bound = k.value / kappa_val
    notes = _provenance_notes(k, kappa)
    notes.append("sampled maximum underestimates the true maximum; a failure is advisory")
    return _report(f"hoop[{mode}]", (k, kappa), observed, bound, tol, len(pts),
                   reverse=True, notes=notes)


# -- degeneracy profile ----------------------------------------------------------


@dataclass(frozen=True)
class DegeneracyRow:
    """Per-radius extremes of the stretch spectrum along the given rays."""

    radius: float
    min_stretch_sq: float
    sigma_second: float  # σ_{m−1} of the squared singular values


def degeneracy_profile(f: HoloMap, directions, radii) -> tuple[DegeneracyRow, ...]:
    """Table of min|λ|² and σ_{m−1} over rays, one row per radius.

    Pointwise data only: finite samples cannot witness the r → ∞
    degeneracy statements, so interpretation stays with the caller.
    """
    _require_flat_domain(f, "degeneracy profile")
    radii = [float(r) for r in radii]
    if not radii:
        raise ConfigurationError("need at least one radius")
    if any(r < 0 for r in radii):
        raise ConfigurationError("radii must be nonnegative")
    dirs = _as_points(directions, f.m)
    norms = np.linalg.norm(dirs, axis=1)
    if np.any(norms == 0):
        raise DegenerateInputError("ray directions must be nonzero")
    dirs = dirs / norms[:, None]
    rows = []
    for r in radii:
        min_sq, sigma = np.inf, np.inf
        for u in dirs:
            vals = map_point_data(f, r * u).singular_sq
            min_sq = min(min_sq, float(vals[-1]))
            sigma = min(sigma, sigma_k(vals, f.m - 1))
        rows.append(DegeneracyRow(radius=r, min_stretch_sq=min_sq, sigma_second=sigma))
    return tuple(rows)
