"""Desk-scale checker for Kahler curvature identities and Schwarz-type bounds.

The package evaluates metrics, Christoffel symbols, and curvature
tensors of charted Kahler manifolds by exact truncated Taylor
arithmetic, computes the standard curvature functionals and
holomorphic-map invariants built on them, and numerically certifies the
Bochner-type identities and distance-free bounds those objects satisfy.
"""

__version__ = "0.1.0"

from .bounds import (
    BoundReport,
    Constant,
    DegeneracyRow,
    degeneracy_profile,
    hoop_check,
    royden_bound_report,
    schwarz_bound_report,
    three_circle_check,
    three_circle_data,
    volume_bound_report,
)
from .cli import (
    Scenario,
    curvature_report,
    load_manifest,
    load_scenario,
    render_json,
    run_scenario,
    shipped_scenario,
    shipped_scenarios,
)
from .errors import (
    ConfigurationError,
    DegenerateInputError,
    DomainError,
    FrameError,
    HolomorphyError,
    KahlerCheckError,
    MetricError,
    MultiplicityError,
    OrderError,
    ParseError,
    RankError,
    SingularJetError,
)
from .functionals import (
    bisectional,
    holo_sectional,
    k_ricci_extremes,
    k_scalar,
    k_scalar_average,
    k_scalar_quadrature,
    ricci,
    scalar_curvature,
    subspace_frame,
)
from .geometry import (
    Ball,
    ComponentChart,
    FullSpace,
    KahlerChart,
    Polydisk,
    PotentialChart,
    PulledBackChart,
    catalog,
    catalog_facts,
    christoffel,
    curvature_tensor,
    metric_at,
    normal_chart,
    pullback_metric_jets,
)
from .identities import (
    CheckReport,
    averaging_form,
    averaging_identity_check,
    psh_check,
    sandwich_check,
    verify_boch1,
    verify_boch2,
    verify_log_w,
)
from .jets import WirtingerJet, derivative, fd_cross_check, jet_constant, jet_variable
from .maps import (
    HoloMap,
    StretchBarrier,
    barrier_w,
    catalog_isometry,
    energy_density,
    map_hessian,
    map_point_data,
    max_norm,
    postcompose,
    precompose,
    sigma_k,
    volume_ratio,
)

__all__ = [
    "__version__",
    "WirtingerJet",
    "jet_constant",
    "jet_variable",
    "derivative",
    "fd_cross_check",
    "KahlerCheckError",
    "ConfigurationError",
    "ParseError",
    "DomainError",
    "MetricError",
    "HolomorphyError",
    "FrameError",
    "SingularJetError",
    "OrderError",
    "RankError",
    "MultiplicityError",
    "DegenerateInputError",
    "KahlerChart",
    "PotentialChart",
    "ComponentChart",
    "PulledBackChart",
    "FullSpace",
    "Ball",
    "Polydisk",
    "catalog",
    "catalog_facts",
    "metric_at",
    "christoffel",
    "curvature_tensor",
    "normal_chart",
    "pullback_metric_jets",
    "holo_sectional",
    "bisectional",
    "ricci",
    "scalar_curvature",
    "subspace_frame",
    "k_scalar",
    "k_scalar_average",
    "k_scalar_quadrature",
    "k_ricci_extremes",
    "HoloMap",
    "map_point_data",
    "map_hessian",
    "volume_ratio",
    "energy_density",
    "max_norm",
    "sigma_k",
    "precompose",
    "postcompose",
    "catalog_isometry",
    "StretchBarrier",
    "barrier_w",
    "CheckReport",
    "verify_boch1",
    "verify_boch2",
    "verify_log_w",
    "sandwich_check",
    "averaging_form",
    "averaging_identity_check",
    "psh_check",
    "BoundReport",
    "Constant",
    "DegeneracyRow",
    "schwarz_bound_report",
    "volume_bound_report",
    "royden_bound_report",
    "three_circle_check",
    "three_circle_data",
    "hoop_check",
    "degeneracy_profile",
    "Scenario",
    "load_scenario",
    "load_manifest",
    "run_scenario",
    "curvature_report",
    "shipped_scenario",
    "shipped_scenarios",
    "render_json",
]
