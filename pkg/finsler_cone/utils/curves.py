"""Polyline helpers: exact point-to-curve distances and arc-length resampling."""
from typing import List, Optional, Sequence

import numpy as np


def _segments(polyline: np.ndarray, breaks: Sequence[int] = ()) -> tuple[np.ndarray, np.ndarray]:
    """Start/end arrays of all segments, skipping the jumps at chart breaks."""
    polyline = np.asarray(polyline, dtype=float)
    if polyline.shape[0] == 1:
        return polyline, polyline
    starts = polyline[:-1]
    ends = polyline[1:]
    keep = np.ones(starts.shape[0], dtype=bool)
    for index in breaks:
        if 0 < index <= starts.shape[0]:
            keep[index - 1] = False
    return starts[keep], ends[keep]


def point_to_polyline_distances(points: np.ndarray, polyline: np.ndarray,
                                breaks: Sequence[int] = (), chunk: int = 256) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    starts, ends = _segments(polyline, breaks)
    delta = ends - starts
    length_sq = np.einsum("sd,sd->s", delta, delta)
    safe = np.where(length_sq > 0.0, length_sq, 1.0)
    result = np.empty(points.shape[0])
    for lo in range(0, points.shape[0], chunk):
        block = points[lo:lo + chunk]
        rel = block[:, None, :] - starts[None, :, :]
        t = np.einsum("msd,sd->ms", rel, delta) / safe[None, :]
        t = np.clip(np.where(length_sq[None, :] > 0.0, t, 0.0), 0.0, 1.0)
        nearest = starts[None, :, :] + t[:, :, None] * delta[None, :, :]
        dist = np.linalg.norm(block[:, None, :] - nearest, axis=2)
        result[lo:lo + chunk] = dist.min(axis=1)
    return result


def max_distance_to_polyline(points: np.ndarray, polyline: np.ndarray, breaks: Sequence[int] = ()) -> float:
    if len(points) == 0:
        return float("inf")
    return float(point_to_polyline_distances(points, polyline, breaks).max())


def hausdorff_distance(first: np.ndarray, second: np.ndarray) -> float:
    return max(max_distance_to_polyline(first, second), max_distance_to_polyline(second, first))


def cumulative_arc_length(polyline: np.ndarray) -> np.ndarray:
    polyline = np.asarray(polyline, dtype=float)
    steps = np.linalg.norm(np.diff(polyline, axis=0), axis=1)
    return np.concatenate([[0.0], np.cumsum(steps)])


def arc_length_resample(polyline: np.ndarray, count: int, max_length: Optional[float] = None) -> np.ndarray:
    """Points at uniform arc length along the polyline, truncated at max_length."""
    polyline = np.asarray(polyline, dtype=float)
    arc = cumulative_arc_length(polyline)
    total = arc[-1] if max_length is None else min(arc[-1], max_length)
    targets = np.linspace(0.0, total, count)
    # drop zero-length steps so np.interp sees a strictly increasing abscissa
    keep = np.concatenate([[True], np.diff(arc) > 0.0])
    arc, polyline = arc[keep], polyline[keep]
    return np.stack([np.interp(targets, arc, polyline[:, k]) for k in range(polyline.shape[1])], axis=1)


def split_pieces(values: np.ndarray, breaks: Sequence[int]) -> List[np.ndarray]:
    edges = [0] + [b for b in breaks if 0 < b < len(values)] + [len(values)]
    return [values[a:b] for a, b in zip(edges[:-1], edges[1:]) if b > a]


def segments_intersect(p1: np.ndarray, p2: np.ndarray, q1: np.ndarray, q2: np.ndarray) -> bool:
    """Closed 2D segment intersection test."""

    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0:
        return True

    def on_segment(a, b, c):
        return (min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= c[1] <= max(a[1], b[1]))

    if d1 == 0 and on_segment(q1, q2, p1):
        return True
    if d2 == 0 and on_segment(q1, q2, p2):
        return True
    if d3 == 0 and on_segment(p1, p2, q1):
        return True
    if d4 == 0 and on_segment(p1, p2, q2):
        return True
    return False
