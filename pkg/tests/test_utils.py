import numpy as np
import pytest

from finsler_cone.services.constant_cache import ConstantCache
from finsler_cone.utils.curves import (
    arc_length_resample,
    hausdorff_distance,
    max_distance_to_polyline,
    segments_intersect,
    split_pieces,
)
from finsler_cone.utils.sampling import hyperspherical_angles, sphere_directions


def test_distance_skips_chart_break_jumps():
    polyline = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 5.0], [2.0, 5.0]])
    point = np.array([[1.0, 2.5]])
    assert max_distance_to_polyline(point, polyline) == pytest.approx(0.0)
    assert max_distance_to_polyline(point, polyline, breaks=[2]) == pytest.approx(2.5)


def test_hausdorff_distance_of_parallel_segments():
    a = np.array([[0.0, 0.0], [1.0, 0.0]])
    b = np.array([[0.0, 0.3], [1.0, 0.3]])
    assert hausdorff_distance(a, b) == pytest.approx(0.3)


def test_arc_length_resample_is_uniform():
    polyline = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])
    points = arc_length_resample(polyline, 5)
    np.testing.assert_allclose(points, [[0, 0], [0.5, 0], [1, 0], [1, 0.5], [1, 1]], atol=1e-12)


def test_split_pieces_and_segment_intersection():
    pieces = split_pieces(np.arange(6), [2, 5])
    assert [p.tolist() for p in pieces] == [[0, 1], [2, 3, 4], [5]]
    assert segments_intersect(np.array([0.0, -1.0]), np.array([0.0, 1.0]),
                              np.array([-1.0, 0.0]), np.array([1.0, 0.0]))
    assert not segments_intersect(np.array([0.0, 0.5]), np.array([0.0, 1.0]),
                                  np.array([-1.0, 0.0]), np.array([1.0, 0.0]))


def test_sphere_directions_are_unit_vectors():
    for dim in (1, 2, 3, 5):
        directions = sphere_directions(dim, 7, seed=1)
        np.testing.assert_allclose(np.linalg.norm(directions, axis=1), 1.0)
    assert sphere_directions(1, 7).shape == (2, 1)
    e = np.array([0.0, 0.6, 0.8])
    assert len(hyperspherical_angles(e)) == 2


def test_constant_cache_persists_to_json(tmp_path):
    path = tmp_path / "constants.json"
    cache = ConstantCache.reset(str(path))
    calls = []
    assert cache.get_or_compute("answer", lambda: calls.append(1) or 42.0) == 42.0
    assert cache.get_or_compute("answer", lambda: calls.append(1) or 0.0) == 42.0
    assert calls == [1]
    assert ConstantCache.reset(str(path)).get("answer") == 42.0
    ConstantCache.reset()
