from .charts import sample_chart_boundary, sample_chart_interior, surface_grid
from .gluing import glue_charts, identify
from .nonhausdorff import (
    cone_surface_construction,
    detect_nonhausdorff,
    slit_plane_construction,
    validate_certificate,
)
from .tracing import image_separation, trace_lightspace_point, transition_map
from finsler_cone.services.fermat import convexity_probe_S, fermat_metric

__all__ = [
    "sample_chart_interior",
    "sample_chart_boundary",
    "surface_grid",
    "glue_charts",
    "identify",
    "trace_lightspace_point",
    "transition_map",
    "image_separation",
    "detect_nonhausdorff",
    "validate_certificate",
    "cone_surface_construction",
    "slit_plane_construction",
    "fermat_metric",
    "convexity_probe_S",
]
