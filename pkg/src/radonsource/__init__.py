"""Multi-frequency near-field acoustic source synthesis and direct
sampling reconstruction.

Pipeline: build a compactly supported source (``sources``), synthesize its
scattered field on a sensor ring over a wavenumber band (``forward``),
evaluate the sampling indicator over a search grid (``reconstruct``), and
quantify agreement with the true source (``verify``).  ``io_config`` holds
the bit-exact file formats and experiment configuration; ``cli`` wires the
stages into commands.
"""

from .errors import DomainError, ParseError, PreconditionError, UsageError
from .forward import (
    FieldTensor,
    NoiseSpec,
    Provenance,
    QuadratureSpec,
    SensorArray,
    SourceQuadrature,
    WavenumberGrid,
    add_noise,
    build_quadrature,
    disk_field_closed_form,
    greens,
    scattered_field,
    synthesize,
)
from .io_config import (
    ExperimentConfig,
    parse_config,
    read_field_tensor,
    read_grid,
    read_raster_mask,
    write_error_stats,
    write_field_tensor,
    write_grid,
    write_heatmap,
)
from .reconstruct import (
    GeometryCache,
    IndicatorConfig,
    indicator_grid,
    indicator_point,
    k_weights,
    precompute_geometry,
)
from .sources import (
    AnalyticPeaks,
    Annulus,
    Disk,
    Polygon,
    RasterMask,
    RealGrid,
    SamplingGrid,
    ShapeSum,
    bounding_box,
    builtin_example,
    contains,
    eval_source,
    eval_source_many,
    rasterize,
    support_radius,
)
from .specfun import bessel_j, bessel_y, hankel1_0
from .verify import (
    ErrorStats,
    check_disk_identity,
    check_inversion_identity,
    error_stats,
    theorem_residual,
)

__version__ = "0.1.0"
