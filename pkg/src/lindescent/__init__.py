"""Derivative-light descent on manifolds and loop spaces.

Core objects: built-in manifolds with closed-form exp/log, the
linearization pair (nu, delta) over the augmented cotangent bundle,
gap-induced witness metrics, 1D improvement methods, the descent loop,
trace adherence analysis, discretized loop spaces with spectral Sobolev
norms, and fixed-point search by minimization.
"""

from .manifolds import (
    CotangentVec,
    Manifold,
    Point,
    TangentVec,
    euclidean,
    sphere,
    torus,
)
from .linearization import (
    BundleElem,
    Linearization,
    check_linearization,
    zero_elem,
)
from .gap_metric import (
    GapFn,
    GapMetric,
    WitnessSet,
    grid_witnesses,
    metric_audit,
    random_witnesses,
)
from .methods import (
    ArmijoBacktrack,
    GoldenSection,
    GridRefine,
    ScalarPath,
    apply_method,
    method_contract_audit,
)
from .descent import (
    DescentConfig,
    DescentTrace,
    Functional,
    StopReason,
    euclidean_sqnorm,
    path_at,
    run_descent,
    sphere_cosine,
    torus_height,
    write_trace_csv,
)
from .adherence import ClusterReport, ConvexProbe, cluster_limits, convexity_audit
from .mapping_space import (
    DiscreteMap,
    LiftedBundleElem,
    MapFunctional,
    SobolevSpec,
    circle_loop,
    degree_loop,
    dirichlet_energy,
    dirichlet_functional,
    discrete_map,
    latitude_loop,
    lifted_delta,
    lifted_nu,
    run_mapping_descent,
    sobolev_distance,
    sobolev_norm,
    sobolev_tracking_functional,
    winding_number,
)
from .fixed_point import (
    FixedPointReport,
    SelfMap,
    contraction_map,
    fixed_point_objective,
    identity_map,
    rotation_map,
    run_fixed_point,
    translation_map,
)
from .errors import (
    ConfigError,
    CutLocusError,
    EvaluationError,
    FiberMismatchError,
    ShapeError,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
