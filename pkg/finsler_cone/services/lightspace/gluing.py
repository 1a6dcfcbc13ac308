import logging
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from finsler_cone.core.errors import GridMismatchError
from finsler_cone.schemas.lightspace import ChartKind, GluedClass, GluedLightspace, LightspacePoint

logger = logging.getLogger(__name__)

OPPOSITE = {
    ChartKind.PLUS_INTERIOR: ChartKind.MINUS_INTERIOR,
    ChartKind.MINUS_INTERIOR: ChartKind.PLUS_INTERIOR,
}


def identify(q: LightspacePoint) -> LightspacePoint:
    """R+ v ~ R+ w iff R+ v = -R+ w: the same geodesic seen from the other interior chart.

    Boundary chart points are fixed.
    """
    if q.chart.is_boundary:
        return q
    return q.model_copy(update={"chart": OPPOSITE[q.chart]})


def _key(q: LightspacePoint) -> np.ndarray:
    return np.concatenate([q.p, q.v])


def _check_signs(points: Sequence[LightspacePoint], sign: int, label: str) -> None:
    for q in points:
        if q.chart.sign != sign:
            raise GridMismatchError(f"{label} chart contains a {q.chart.value} point")


def glue_charts(plus: Sequence[LightspacePoint], minus: Sequence[LightspacePoint],
                match_tol: float = 1e-9) -> GluedLightspace:
    """Quotient of ell^+ and ell^- samples by the interior identification.

    Both interior charts must be sampled over the same surface grid; boundary
    points always form singleton classes.
    """
    _check_signs(plus, 1, "plus")
    _check_signs(minus, -1, "minus")
    plus_inner = [(i, q) for i, q in enumerate(plus) if not q.chart.is_boundary]
    minus_inner = [(i, q) for i, q in enumerate(minus) if not q.chart.is_boundary]

    if plus_inner or minus_inner:
        if not plus_inner or not minus_inner:
            raise GridMismatchError("Only one of the interior charts was sampled")
        base_plus = np.array([q.p for _, q in plus_inner])
        base_minus = np.array([q.p for _, q in minus_inner])
        scale = max(1.0, float(np.max(np.abs(np.vstack([base_plus, base_minus])))))
        gap_pm, _ = cKDTree(base_minus).query(base_plus)
        gap_mp, _ = cKDTree(base_plus).query(base_minus)
        if max(float(np.max(gap_pm)), float(np.max(gap_mp))) > match_tol * scale:
            raise GridMismatchError("ell^+_S and ell^-_S were sampled over different surface grids")

    classes: List[GluedClass] = []
    identification: Dict[str, int] = {}

    def add(members: List[Tuple[ChartKind, int]]) -> None:
        for chart, index in members:
            identification[f"{chart.value}:{index}"] = len(classes)
        classes.append(GluedClass(members=members, charts=sorted({c for c, _ in members}, key=lambda c: c.value)))

    matched = set()
    if plus_inner:
        keys_minus = np.array([_key(q) for _, q in minus_inner])
        tree = cKDTree(keys_minus)
        scale = max(1.0, float(np.max(np.abs(keys_minus))))
        for i, q in plus_inner:
            distance, j = tree.query(_key(q))
            if distance <= match_tol * scale and j not in matched:
                matched.add(int(j))
                add([(q.chart, i), (ChartKind.MINUS_INTERIOR, minus_inner[j][0])])
            else:
                add([(q.chart, i)])
    for j, (i, q) in enumerate(minus_inner):
        if j not in matched:
            add([(q.chart, i)])
    for points in (plus, minus):
        for i, q in enumerate(points):
            if q.chart.is_boundary:
                add([(q.chart, i)])

    logger.info(f"Glued {len(plus)} + {len(minus)} chart points into {len(classes)} classes")
    return GluedLightspace(classes=classes, identification=identification)
