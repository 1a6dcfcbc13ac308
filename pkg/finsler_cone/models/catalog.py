import json
import logging
import math
from pathlib import Path
from typing import Any, Callable, Dict, List

from pydantic import ValidationError

from finsler_cone.core.errors import ConfigError, ModelDefinitionError
from finsler_cone.models.ads import DecayProfile, make_ads, make_ads_conformal, make_asympt_ads
from finsler_cone.models.base import SpacetimeModel
from finsler_cone.models.cone_triple import make_cone_triple
from finsler_cone.models.products import (
    make_cylinder_strip,
    make_minkowski,
    make_product_cone_surface,
    make_stationary,
)
from finsler_cone.models.slit_plane import make_product_slit_plane
from finsler_cone.schemas.catalog import ExpectedValue, ModelCatalogEntry, ModelDefinition

logger = logging.getLogger(__name__)


def _build_asympt_ads(n: int = 2, profile: Dict[str, Any] | None = None) -> SpacetimeModel:
    return make_asympt_ads(n=n, profile=DecayProfile(**(profile or {})))


def _build_cylinder_strip(interval: List[Any] | None = None) -> SpacetimeModel:
    if interval is None:
        return make_cylinder_strip()
    return make_cylinder_strip(tuple(float(b) for b in interval))


BUILDERS: Dict[str, Callable[..., SpacetimeModel]] = {
    "minkowski": make_minkowski,
    "ads": make_ads,
    "ads_conformal": make_ads_conformal,
    "asympt_ads": _build_asympt_ads,
    "cone_triple": make_cone_triple,
    "stationary": make_stationary,
    "product_cone_surface": make_product_cone_surface,
    "product_slit_plane": make_product_slit_plane,
    "cylinder_strip": _build_cylinder_strip,
}


def _sqrt_ratio(r: float) -> float:
    return math.sqrt(1.0 + r * r) / r


CATALOG: Dict[str, ModelCatalogEntry] = {
    "minkowski": ModelCatalogEntry(
        name="minkowski",
        description="Flat L = vt^2 - |v|^2, optionally the half-space {x >= 0}",
        params={"n": 1, "half_space": False},
        expected_values=[
            ExpectedValue(name="L_unit_time", value=1.0, tolerance=1e-12, provenance="direct evaluation"),
            ExpectedValue(name="half_space_ii", value=0.0, tolerance=1e-10, provenance="flat boundary"),
        ],
    ),
    "ads": ModelCatalogEntry(
        name="ads",
        description="AdS in (t, r, angles) with region {r <= r0}, {r >= r0} or no boundary",
        params={"n": 2, "region": "inner", "r0": 1.0},
        expected_values=[
            *[ExpectedValue(name=f"ii_r{r:g}", value=_sqrt_ratio(r), tolerance=1e-6,
                            provenance="second fundamental form of H_r, sqrt(1+r^2)/r")
              for r in (0.5, 1.0, 2.0, 10.0)],
            ExpectedValue(name="null_delta_t_2_10", value=math.atan(10.0) - math.atan(2.0), tolerance=1e-6,
                          provenance="integral of dt/dr = 1/(1+r^2)"),
            ExpectedValue(name="null_escape_bound", value=math.pi / 2.0, tolerance=1e-4,
                          provenance="integral of dt/dr = 1/(1+r^2) over (0, inf)"),
        ],
    ),
    "ads_conformal": ModelCatalogEntry(
        name="ads_conformal",
        description="Conformal AdS -f(z) dt^2 + dz^2 + g_S with boundary z = z_*",
        params={"n": 2},
        expected_values=[
            ExpectedValue(name="z_star", value=math.asinh(0.5), tolerance=1e-10,
                          provenance="quadrature of dr/(r sqrt(1+r^2)) on (2, inf); closed form asinh(1/2)"),
            ExpectedValue(name="f_boundary", value=1.0, tolerance=1e-10, provenance="C^2 extension"),
            ExpectedValue(name="df_boundary", value=0.0, tolerance=1e-6, provenance="C^2 extension"),
            ExpectedValue(name="d2f_boundary", value=2.0, tolerance=1e-4, provenance="C^2 extension"),
            ExpectedValue(name="boundary_ii", value=0.0, tolerance=1e-6, provenance="totally geodesic boundary"),
        ],
    ),
    "asympt_ads": ModelCatalogEntry(
        name="asympt_ads",
        description="Conformal AdS plus a decaying perturbation (default c e^{-r} dt^2)",
        params={"n": 2, "profile": {"kind": "exp", "coefficient": 1.0}},
        expected_values=[
            ExpectedValue(name="boundary_metric_gap", value=0.0, tolerance=1e-5,
                          provenance="perturbation and its derivatives vanish at z_*"),
            ExpectedValue(name="boundary_ii", value=0.0, tolerance=1e-6, provenance="totally geodesic boundary"),
        ],
    ),
    "cone_triple": ModelCatalogEntry(
        name="cone_triple",
        description="L = Omega^2 - F(Pi v)^2 with Euclidean or Randers F",
        params={"n": 2, "norm": "euclidean"},
        expected_values=[
            ExpectedValue(name="cone_root", value=1.0, tolerance=1e-10, provenance="Omega(v) = F(v) on the cone"),
        ],
    ),
    "stationary": ModelCatalogEntry(
        name="stationary",
        description="-dt^2 + 2 omega dt + g_S over a plane, half-space, disk, disk exterior or Cassini dumbbell",
        params={"n": 2, "domain": "disk", "radius": 1.0},
        expected_values=[
            ExpectedValue(name="disk_ii", value=1.0, tolerance=1e-6, provenance="sphere shape operator 1/R"),
            ExpectedValue(name="fermat_constant_x", value=0.5 + math.sqrt(1.25), tolerance=1e-10,
                          provenance="F(d_x) = c + sqrt(1 + c^2) for omega = c dx, c = 0.5"),
        ],
    ),
    "product_cone_surface": ModelCatalogEntry(
        name="product_cone_surface",
        description="L x S with S the flat cone surface without vertex",
        params={},
        expected_values=[
            ExpectedValue(name="family_distance_k1e5", value=1e-5, tolerance=1e-8,
                          provenance="gamma_k sits at distance 1/k from the limit lifts"),
        ],
    ),
    "product_slit_plane": ModelCatalogEntry(
        name="product_slit_plane",
        description="L x S with S the plane (-inf, 1) x R minus K slits",
        params={"K": 6, "kappa": 1.0},
        expected_values=[
            ExpectedValue(name="length_upper_bound", value=4.0, tolerance=0.0,
                          provenance="length of the guide curves c_m"),
            ExpectedValue(name="length_lower_bound", value=1.0, tolerance=0.0,
                          provenance="lower bound on T_m"),
        ],
    ),
    "cylinder_strip": ModelCatalogEntry(
        name="cylinder_strip",
        description="I x [-1, 1] in L^2",
        params={},
        expected_values=[
            ExpectedValue(name="interior_classes_per_point", value=2.0, tolerance=0.0,
                          provenance="two null directions per interior point"),
            ExpectedValue(name="boundary_directions_per_point", value=1.0, tolerance=0.0,
                          provenance="one inward null direction when n = 1"),
            ExpectedValue(name="lightspace_dimension", value=1.0, tolerance=0.0, provenance="2n - 1"),
        ],
    ),
}


def catalog_entries() -> List[ModelCatalogEntry]:
    return [CATALOG[name] for name in sorted(CATALOG)]


def describe(name: str) -> Dict[str, Any]:
    if name not in CATALOG:
        raise ModelDefinitionError(f"Unknown builtin model {name}; known: {sorted(CATALOG)}")
    entry = CATALOG[name]
    model = build_model(name, entry.params)
    return {"entry": entry.model_dump(), "model": model.describe()}


def build_model(builtin: str, params: Dict[str, Any] | None = None) -> SpacetimeModel:
    if builtin not in BUILDERS:
        raise ModelDefinitionError(f"Unknown builtin model {builtin}; known: {sorted(BUILDERS)}")
    try:
        return BUILDERS[builtin](**(params or {}))
    except TypeError as e:
        raise ModelDefinitionError(f"Bad parameters for {builtin}: {e}") from e
    except (ValidationError, ConfigError) as e:
        raise ModelDefinitionError(f"Invalid parameters for {builtin}: {e}") from e


def load_definition(path: str | Path) -> ModelDefinition:
    try:
        return ModelDefinition(**json.loads(Path(path).read_text()))
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        raise ModelDefinitionError(f"Cannot read model definition {path}: {e}") from e


def load_model(ref: str) -> SpacetimeModel:
    """Build a model from a builtin name or a JSON definition file."""
    if ref in BUILDERS:
        return build_model(ref, CATALOG[ref].params)
    definition = load_definition(ref)
    if definition.expression is not None:
        raise ModelDefinitionError(
            f"Model {definition.name}: expression Lagrangians are not supported; use a builtin"
        )
    model = build_model(definition.builtin, definition.params)
    if definition.dim is not None and definition.dim != model.dim:
        raise ModelDefinitionError(
            f"Model {definition.name}: declared dim {definition.dim} but builtin {definition.builtin} has dim {model.dim}"
        )
    logger.info(f"Loaded model {definition.name} (builtin {definition.builtin}, dim {model.dim})")
    return model
