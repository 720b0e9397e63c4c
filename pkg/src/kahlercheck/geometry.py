"""Kähler charts, curvature, normal coordinates, and the model catalog.

A chart is a single coordinate patch carrying a Hermitian metric, given
either by a real potential (g is its mixed Hessian) or by an explicit
matrix of component functions.  Everything downstream evaluates through
jets, so the same chart object serves metric values, Christoffel
symbols, curvature, and the higher derivatives the identity checks
need.

Index conventions for the arrays produced here::

    g[a, b]          g_{a b̄}
    gamma[b, a, c]   Γ^b_{a c}                (symmetric in a, c)
    riem[a, b, c, d] R_{a b̄ c d̄}  (lowered)

The curvature sign is fixed so the hyperbolic models come out negative:
at points where the first metric derivatives vanish,
R_{a b̄ c d̄} = −∂²g_{a b̄}/∂z^c ∂z̄^d.  Away from such points the
quadratic first-derivative correction enters with the sign that makes
the tensor invariant under passage to normal coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import expressions
from .errors import ConfigurationError, DomainError, FrameError, MetricError
from .jets import (
    MAX_HOLOMORPHIC_VARS,
    WirtingerJet,
    compose,
    derivative,
    jet_constant,
    variable_jets,
)
from .linalg import check_positive_definite, frame_normalizer

KAHLER_TOL = 1e-8
REALNESS_TOL = 1e-10
FRAME_TOL = 1e-8


# -- domains -------------------------------------------------------------------


class Domain:
    """Region-of-validity predicate for a chart."""

    dim: int

    def contains(self, point) -> bool:
        raise NotImplementedError

    def _accepts(self, point) -> np.ndarray | None:
        pt = np.asarray(point, dtype=complex)
        return pt if pt.shape == (self.dim,) else None


@dataclass(frozen=True)
class FullSpace(Domain):
    dim: int

    def contains(self, point) -> bool:
        return self._accepts(point) is not None

    def __str__(self) -> str:
        return "all of C^%d" % self.dim


@dataclass(frozen=True)
class Ball(Domain):
    dim: int
    radius: float = 1.0

    def contains(self, point) -> bool:
        pt = self._accepts(point)
        return pt is not None and float(np.sum(np.abs(pt) ** 2)) < self.radius**2

    def __str__(self) -> str:
        return "|z| < %g" % self.radius


@dataclass(frozen=True)
class Polydisk(Domain):
    dim: int
    radii: tuple[float, ...]

    def contains(self, point) -> bool:
        pt = self._accepts(point)
        return pt is not None and bool(np.all(np.abs(pt) < np.asarray(self.radii)))

    def __str__(self) -> str:
        return "polydisk with radii %s" % (self.radii,)


# -- charts --------------------------------------------------------------------


def _as_jet_function(source, dim: int, what: str) -> Callable:
    """Normalize an expression AST / text / number / callable to a jet callable."""
    if isinstance(source, (int, float, complex)) and not isinstance(source, bool):
        value = complex(source)
        return lambda zs: value
    if isinstance(source, str):
        source = expressions.parse(source)
    if isinstance(
        source,
        (expressions.Num, expressions.Imag, expressions.Var, expressions.Neg,
         expressions.BinOp, expressions.Pow, expressions.Call),
    ):
        expressions.check_dimension(source, dim, what)
        return expressions.compiled(source)
    if callable(source):
        return source
    raise ConfigurationError(f"{what} must be an expression or a callable")


class KahlerChart:
    """One coordinate patch with a Kähler metric.

    Immutable after construction; all evaluation methods are pure, so
    concurrent use at distinct points is safe.
    """

    def __init__(self, dim: int, domain: Domain | None, label: str):
        if not 1 <= dim <= MAX_HOLOMORPHIC_VARS:
            raise ConfigurationError(
                f"chart dimension must be between 1 and {MAX_HOLOMORPHIC_VARS}, got {dim}"
            )
        self.dim = dim
        self.domain = domain if domain is not None else FullSpace(dim)
        self.label = label

    def require_inside(self, point) -> np.ndarray:
        pt = np.asarray(point, dtype=complex)
        if pt.shape != (self.dim,):
            raise DomainError(
                f"{self.label}: point has {pt.shape} coordinates, chart has dimension {self.dim}"
            )
        if not self.domain.contains(pt):
            raise DomainError(f"{self.label}: point {pt} is outside the domain ({self.domain})")
        return pt

    def metric_jets(self, point, order: int) -> list[list[WirtingerJet]]:
        """m×m nested list of g_{a b̄} jets of the given order at ``point``."""
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.label!r} dim={self.dim}>"


class PotentialChart(KahlerChart):
    """Chart whose metric is the mixed Hessian of a real potential."""

    def __init__(self, dim: int, potential, domain: Domain | None = None, label: str = "chart"):
        super().__init__(dim, domain, label)
        self._potential = _as_jet_function(potential, dim, "potential")

    def potential_jet(self, point, order: int) -> WirtingerJet:
        pt = self.require_inside(point)
        phi = self._potential(variable_jets(pt, self.dim, order))
        if not isinstance(phi, WirtingerJet):
            phi = jet_constant(complex(phi), self.dim, order)
        defect = np.max(np.abs((phi - phi.conj()).coeffs))
        if defect > REALNESS_TOL * (1.0 + float(np.max(np.abs(phi.coeffs)))):
            raise MetricError(f"{self.label}: potential is not real-valued (defect {defect:.3e})")
        return phi

    def metric_jets(self, point, order: int) -> list[list[WirtingerJet]]:
        phi = self.potential_jet(point, order + 2)
        dphi = [phi.d_dz(a) for a in range(self.dim)]
        return [[dphi[a].d_dzbar(b) for b in range(self.dim)] for a in range(self.dim)]


class ComponentChart(KahlerChart):
    """Chart whose metric entries are given directly as functions of (z, z̄)."""

    def __init__(self, dim: int, entries, domain: Domain | None = None, label: str = "chart"):
        super().__init__(dim, domain, label)
        entries = list(entries)
        if len(entries) != dim or any(len(row) != dim for row in entries):
            raise ConfigurationError(f"{label}: component matrix must be {dim}x{dim}")
        self._entries = [
            [_as_jet_function(entry, dim, f"metric component ({a + 1},{b + 1})")
             for b, entry in enumerate(row)]
            for a, row in enumerate(entries)
        ]

    def metric_jets(self, point, order: int) -> list[list[WirtingerJet]]:
        pt = self.require_inside(point)
        zs = variable_jets(pt, self.dim, order)
        out = []
        for row in self._entries:
            jets_row = []
            for fn in row:
                val = fn(zs)
                if not isinstance(val, WirtingerJet):
                    val = jet_constant(complex(val), self.dim, order)
                jets_row.append(val)
            out.append(jets_row)
        return out


def pullback_metric_jets(
    target: KahlerChart, component_jets: Sequence[WirtingerJet], order: int
) -> list[list[WirtingerJet]]:
    """Jets of the pulled-back form f*h given jets of the map components.

    ``component_jets`` are the target coordinates of the map as jets in
    the source variables, of order at least ``order + 1`` (one order is
    spent on the differentials).  Entry (μ,ν) of the result is
    Σ_{i,j} (∂f^i/∂z^μ) · (h_{i ȷ̄} ∘ f) · conj(∂f^j/∂z^ν).
    """
    fjets = list(component_jets)
    if len(fjets) != target.dim:
        raise ConfigurationError(
            f"map has {len(fjets)} components, target dimension is {target.dim}"
        )
    if fjets[0].order < order + 1:
        raise ConfigurationError(
            f"pullback to order {order} needs component jets of order {order + 1}"
        )
    image = np.array([fj.value for fj in fjets])
    h = target.metric_jets(image, order)
    disp = [fj.truncated(order) - fj.value for fj in fjets]
    h_along = [[compose(h[i][j], disp) for j in range(target.dim)] for i in range(target.dim)]
    df = [[fj.d_dz(mu).truncated(order) for mu in range(fjets[0].num_vars)] for fj in fjets]
    m_src = fjets[0].num_vars
    n_tgt = target.dim
    out = []
    for mu in range(m_src):
        row = []
        for nu in range(m_src):
            acc = jet_constant(0.0, m_src, order)
            for i in range(n_tgt):
                for j in range(n_tgt):
                    acc = acc + df[i][mu] * h_along[i][j] * df[j][nu].conj()
            row.append(acc)
        out.append(row)
    return out


@dataclass(frozen=True)
class ChartMap:
    """Polynomial coordinate change z = base + linear·w + ½·quad(w, w).

    ``quad[i, μ, κ]`` is symmetric in (μ, κ).  This is exactly the family
    normal-coordinate constructions live in, so the map is stored in
    closed form and all of its derivatives are exact.
    """

    base: np.ndarray
    linear: np.ndarray
    quad: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.base)

    def apply_point(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        return self.base + self.linear @ w + 0.5 * np.einsum("imk,m,k->i", self.quad, w, w)

    def jacobian(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        return self.linear + np.einsum("imk,k->im", self.quad, w)

    def push_vector(self, vector, at_w) -> np.ndarray:
        return self.jacobian(at_w) @ np.asarray(vector, dtype=complex)

    def pull_vector(self, vector, at_w) -> np.ndarray:
        return np.linalg.solve(self.jacobian(at_w), np.asarray(vector, dtype=complex))

    def component_jets(self, w_point, order: int) -> list[WirtingerJet]:
        ws = variable_jets(np.asarray(w_point, dtype=complex), self.dim, order)
        out = []
        for i in range(self.dim):
            acc = jet_constant(self.base[i], self.dim, order)
            for mu in range(self.dim):
                if self.linear[i, mu] != 0:
                    acc = acc + self.linear[i, mu] * ws[mu]
                for k in range(self.dim):
                    if self.quad[i, mu, k] != 0:
                        acc = acc + 0.5 * self.quad[i, mu, k] * ws[mu] * ws[k]
            out.append(acc)
        return out


class PulledBackChart(KahlerChart):
    """A chart seen through a polynomial coordinate change.

    Valid only near w = 0; the stored domain is unrestricted and points
    are checked against the source domain after mapping.
    """

    def __init__(self, source: KahlerChart, change: ChartMap, label: str):
        super().__init__(source.dim, FullSpace(source.dim), label)
        self.source = source
        self.change = change

    def metric_jets(self, point, order: int) -> list[list[WirtingerJet]]:
        pt = self.require_inside(point)
        return pullback_metric_jets(self.source, self.change.component_jets(pt, order + 1), order)


# -- pointwise curvature data ----------------------------------------------------


@dataclass(frozen=True)
class CurvaturePoint:
    """Metric, Christoffel symbols, and lowered curvature at one point."""

    point: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    gamma: np.ndarray  # gamma[b, a, c] = Γ^b_{a c}
    riem: np.ndarray  # riem[a, b, c, d] = R_{a b̄ c d̄}


def _metric_derivative_data(chart: KahlerChart, point, order: int):
    gjets = chart.metric_jets(point, order)
    m = chart.dim
    g = check_positive_definite(
        np.array([[gjets[a][b].value for b in range(m)] for a in range(m)]),
        f"{chart.label}: metric",
    )
    units = np.eye(m, dtype=int)
    zero = (0,) * m
    dg = np.array(
        [[[derivative(gjets[a][b], units[c], zero) for b in range(m)] for a in range(m)]
         for c in range(m)]
    )
    kahler_defect = float(np.max(np.abs(dg - dg.transpose(1, 0, 2)))) if m > 1 else 0.0
    if kahler_defect > KAHLER_TOL:
        raise MetricError(
            f"{chart.label}: metric violates the Kähler condition (defect {kahler_defect:.3e})"
        )
    return gjets, g, np.linalg.inv(g), dg


def metric_at(chart: KahlerChart, point) -> np.ndarray:
    """Validated metric matrix g_{a b̄}(point)."""
    gjets = chart.metric_jets(point, 0)
    m = chart.dim
    g = np.array([[gjets[a][b].value for b in range(m)] for a in range(m)])
    return check_positive_definite(g, f"{chart.label}: metric")


def christoffel(chart: KahlerChart, point) -> np.ndarray:
    """Γ^b_{a c} as gamma[b, a, c]; Kähler-symmetric in (a, c)."""
    _, _, g_inv, dg = _metric_derivative_data(chart, point, 1)
    return np.einsum("gad,db->bag", dg, g_inv)


def curvature_tensor(chart: KahlerChart, point) -> CurvaturePoint:
    """Curvature data at a point, with the lowered tensor R_{a b̄ c d̄}."""
    gjets, g, g_inv, dg = _metric_derivative_data(chart, point, 2)
    m = chart.dim
    units = np.eye(m, dtype=int)
    ddg = np.array(
        [[[[derivative(gjets[a][b], units[c], units[d]) for d in range(m)] for c in range(m)]
          for b in range(m)]
         for a in range(m)]
    )
    gamma = np.einsum("gad,db->bag", dg, g_inv)
    correction = np.einsum("gam,mr,dbr->abgd", dg, g_inv, np.conj(dg))
    riem = -ddg + correction
    pt = np.asarray(point, dtype=complex)
    return CurvaturePoint(point=pt, g=g, g_inv=g_inv, gamma=gamma, riem=riem)


def normal_chart(chart: KahlerChart, point, frame: np.ndarray | None = None) -> PulledBackChart:
    """Chart in normal coordinates centered at ``point``.

    In the returned chart the metric is the identity at 0 and all its
    first derivatives vanish there.  ``frame`` may supply the columns of
    the linear part (any g-orthonormal frame); by default the Cholesky
    normalizer of g(point) is used.  The coordinate change is available
    as the ``change`` attribute of the result.
    """
    cp = curvature_tensor(chart, point)
    if frame is None:
        b = frame_normalizer(cp.g)
    else:
        b = np.asarray(frame, dtype=complex)
        if b.shape != (chart.dim, chart.dim):
            raise FrameError(f"frame must be {chart.dim}x{chart.dim}")
        defect = np.max(np.abs(b.T @ cp.g @ b.conj() - np.eye(chart.dim)))
        if defect > FRAME_TOL:
            raise FrameError(f"frame is not g-orthonormal (defect {defect:.3e})")
    quad = -np.einsum("irs,rm,sk->imk", cp.gamma, b, b)
    change = ChartMap(base=cp.point, linear=b, quad=quad)
    return PulledBackChart(chart, change, label=f"normal[{chart.label}]")


# -- model catalog ----------------------------------------------------------------


@dataclass(frozen=True)
class CurvatureFacts:
    """Closed-form curvature constants of a model chart.

    ``hol_sec_min``/``hol_sec_max`` bound the normalized holomorphic
    sectional curvature R(v, v̄, v, v̄)/|v|⁴; ``ricci_min``/``ricci_max``
    bound the Ricci form against the metric.  Bound modules treat these
    as certified hypotheses, in contrast to sampled estimates.
    """

    hol_sec_min: float
    hol_sec_max: float
    ricci_min: float
    ricci_max: float
    scalar: float

    @property
    def constant_hol_sec(self) -> bool:
        return self.hol_sec_min == self.hol_sec_max

    @property
    def einstein(self) -> bool:
        return self.ricci_min == self.ricci_max


def _require_positive(params: dict, key: str) -> float:
    val = float(params[key])
    if not val > 0 or not math.isfinite(val):
        raise ConfigurationError(f"parameter {key} must be positive, got {params[key]!r}")
    return val


def _require_dim(params: dict) -> int:
    dim = params["dim"]
    if dim != int(dim) or not 1 <= int(dim) <= MAX_HOLOMORPHIC_VARS:
        raise ConfigurationError(
            f"dim must be an integer between 1 and {MAX_HOLOMORPHIC_VARS}, got {dim!r}"
        )
    return int(dim)


def _abs2_sum(zs) -> WirtingerJet:
    acc = zs[0] * zs[0].conj()
    for z in zs[1:]:
        acc = acc + z * z.conj()
    return acc


def _build_flat(dim: int = 1) -> KahlerChart:
    return PotentialChart(dim, _abs2_sum, FullSpace(dim), label=f"flat({dim})")


def _facts_flat(dim: int = 1) -> CurvatureFacts:
    return CurvatureFacts(0.0, 0.0, 0.0, 0.0, 0.0)


def _build_poincare_disk(a: float = 1.0) -> KahlerChart:
    def entry(zs):
        return a * ((1.0 - zs[0] * zs[0].conj()) ** 2).reciprocal()

    return ComponentChart(1, [[entry]], Ball(1), label=f"poincare_disk(a={a:g})")


def _facts_poincare_disk(a: float = 1.0) -> CurvatureFacts:
    return CurvatureFacts(-2.0 / a, -2.0 / a, -2.0 / a, -2.0 / a, -2.0 / a)


def _build_poincare_polydisk(dim: int = 2, a: float = 1.0) -> KahlerChart:
    def diag_entry(k):
        def entry(zs):
            return a * ((1.0 - zs[k] * zs[k].conj()) ** 2).reciprocal()

        return entry

    entries = [
        [diag_entry(i) if i == j else 0.0 for j in range(dim)] for i in range(dim)
    ]
    return ComponentChart(
        dim, entries, Polydisk(dim, (1.0,) * dim), label=f"poincare_polydisk({dim}, a={a:g})"
    )


def _facts_poincare_polydisk(dim: int = 2, a: float = 1.0) -> CurvatureFacts:
    # H is minimized on a single factor and maximized on the diagonal
    return CurvatureFacts(-2.0 / a, -2.0 / (dim * a), -2.0 / a, -2.0 / a, -2.0 * dim / a)


def _build_complex_hyperbolic_ball(dim: int = 1, c: float = 1.0) -> KahlerChart:
    def potential(zs):
        return (1.0 - _abs2_sum(zs)).log() * (-c)

    return PotentialChart(dim, potential, Ball(dim),
                          label=f"complex_hyperbolic_ball({dim}, c={c:g})")


def _facts_complex_hyperbolic_ball(dim: int = 1, c: float = 1.0) -> CurvatureFacts:
    ric = -(dim + 1.0) / c
    return CurvatureFacts(-2.0 / c, -2.0 / c, ric, ric, dim * ric)


def _build_fubini_study(dim: int = 1, c: float = 1.0) -> KahlerChart:
    def potential(zs):
        return (1.0 + _abs2_sum(zs)).log() * c

    return PotentialChart(dim, potential, FullSpace(dim), label=f"fubini_study({dim}, c={c:g})")


def _facts_fubini_study(dim: int = 1, c: float = 1.0) -> CurvatureFacts:
    ric = (dim + 1.0) / c
    return CurvatureFacts(2.0 / c, 2.0 / c, ric, ric, dim * ric)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    description: str
    params: str
    build: Callable[..., KahlerChart]
    facts: Callable[..., CurvatureFacts]


CATALOG: dict[str, CatalogEntry] = {
    entry.name: entry
    for entry in (
        CatalogEntry(
            "flat",
            "flat metric on C^dim, potential |z|^2",
            "dim (default 1)",
            _build_flat,
            _facts_flat,
        ),
        CatalogEntry(
            "poincare_disk",
            "unit disk with g = a/(1-|z|^2)^2",
            "a > 0 (default 1)",
            _build_poincare_disk,
            _facts_poincare_disk,
        ),
        CatalogEntry(
            "poincare_polydisk",
            "product of dim Poincaré disks",
            "dim (default 2), a > 0 (default 1)",
            _build_poincare_polydisk,
            _facts_poincare_polydisk,
        ),
        CatalogEntry(
            "complex_hyperbolic_ball",
            "unit ball with potential -c*log(1-|z|^2)",
            "dim (default 1), c > 0 (default 1)",
            _build_complex_hyperbolic_ball,
            _facts_complex_hyperbolic_ball,
        ),
        CatalogEntry(
            "fubini_study",
            "C^dim chart of projective space, potential c*log(1+|z|^2)",
            "dim (default 1), c > 0 (default 1)",
            _build_fubini_study,
            _facts_fubini_study,
        ),
    )
}


def _catalog_call(fn: Callable, name: str, params: dict):
    params = dict(params)
    if "m" in params and "dim" not in params:
        params["dim"] = params.pop("m")
    if "dim" in params:
        params["dim"] = _require_dim(params)
    for key in ("a", "c"):
        if key in params:
            params[key] = _require_positive(params, key)
    try:
        return fn(**params)
    except TypeError:
        raise ConfigurationError(
            f"invalid parameters {sorted(params)} for catalog chart {name!r}"
        ) from None


def catalog(name: str, **params) -> KahlerChart:
    """Build a model chart by name; see ``CATALOG`` for the choices."""
    if name not in CATALOG:
        raise ConfigurationError(
            f"unknown catalog chart {name!r}; known: {', '.join(sorted(CATALOG))}"
        )
    chart = _catalog_call(CATALOG[name].build, name, dict(params))
    chart.family = name
    chart.facts = _catalog_call(CATALOG[name].facts, name, params)
    return chart


def catalog_facts(name: str, **params) -> CurvatureFacts:
    """Closed-form curvature constants for a catalog chart."""
    if name not in CATALOG:
        raise ConfigurationError(
            f"unknown catalog chart {name!r}; known: {', '.join(sorted(CATALOG))}"
        )
    return _catalog_call(CATALOG[name].facts, name, params)
