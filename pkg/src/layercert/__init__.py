"""Variational and finite-element certification of bound states in
quantum layers built over ruled surfaces.

The package splits into geometry (charts, surfaces), analysis
(asymptotics, topology), certification (certify), numerics (quadrature,
spectrum, kernels), and a pipeline driver (config, report, cli).
"""

from .asymptotics import (
    DegreeProfile,
    GrowthVerdict,
    IntegrabilityReport,
    classify_degrees,
    dominance_scale,
    growth_classification,
    h2_integrability,
    sector_integral_mean,
)
from .certify import (
    Certificate,
    PlateauProfile,
    QuadraticFormDecomposition,
    TestFunctionParams,
    capacity_function,
    certify,
    cutoff_j,
    direct_form_value,
    ground_mode,
    plateau_psi,
    quadratic_form,
    transverse_weights,
    verify_certificate,
)
from .charts import (
    CoefficientProfile,
    DevelopabilityReport,
    RuledChart,
    assert_in_gauge,
    coefficient_profile,
    gauge_residuals,
    is_developable,
    metric_terms,
)
from .config import RunConfig, config_to_ini, parse_config
from .errors import (
    ConfigError,
    DegenerateChart,
    InconclusiveFit,
    LayercertError,
    NoConvergence,
    NonconvergentTail,
    NotParabolicNumerically,
    QuadratureFailure,
    SearchExhausted,
    SupportViolation,
    ThicknessViolation,
    UnstableWindow,
)
from .quadrature import Axis, integrate, integrate_fixed, radial_integral
from .report import RunReport, emit
from .spectrum import (
    AssembledForms,
    AssembledRadialForms,
    MeshSpec,
    RadialMeshSpec,
    SpectralReport,
    assemble,
    assemble_radial,
    certificate_rayleigh_on_mesh,
    lowest_eigenvalues,
    radial_ladder,
    spectral_report,
    threshold_scan,
    transverse_interval_eigenvalue,
)
from .surfaces import (
    CATALOG,
    LayerModel,
    RadialProfile,
    SurfaceModel,
    chart_layer_terms,
    check_core_glue,
    make_surface,
    radial_layer_terms,
)
from .topology import (
    TopologyReport,
    WhiteReport,
    hartman_residual,
    isoperimetric_constants,
    topology_report,
    total_curvature,
    white_check,
)

__version__ = "0.1.0"
