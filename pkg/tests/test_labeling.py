import numpy as np
import pytest
from scipy import ndimage

import oracles
from gspcd.labeling import connected_components, find_runs, label


def _partition(labels):
    comps = {}
    for (r, c), v in np.ndenumerate(labels):
        if v:
            comps.setdefault(v, set()).add((r, c))
    return {frozenset(s) for s in comps.values()}


def test_diagonal_pixels():
    m = np.array([[1, 0], [0, 1]], bool)
    assert len(connected_components(m, 8)) == 1
    assert len(connected_components(m, 4)) == 2


def test_empty_mask():
    assert connected_components(np.zeros((5, 5), bool)) == []
    labels, n = label(np.zeros((3, 3), bool))
    assert n == 0 and not labels.any()


def test_runs():
    m = np.array([[1, 1, 0, 1], [0, 0, 0, 0], [1, 1, 1, 1]], bool)
    rows, starts, stops = find_runs(m)
    assert list(zip(rows, starts, stops)) == [(0, 0, 2), (0, 3, 4), (2, 0, 4)]


def test_detection_fields():
    m = np.zeros((10, 10), bool)
    m[2:4, 5:8] = True   # 2x3 block
    m[7, 1] = True
    dets = connected_components(m)
    assert [d.bounding_box for d in dets] == [(2, 5, 3, 7), (7, 1, 7, 1)]
    assert dets[0].pixel_count == 6
    assert (dets[0].centroid_row, dets[0].centroid_col) == (2.5, 6.0)
    assert (dets[1].centroid_row, dets[1].centroid_col, dets[1].pixel_count) == (7.0, 1.0, 1)


def test_order_by_min_row_then_min_col():
    m = np.zeros((8, 8), bool)
    m[1, 6] = True
    m[1:5, 3] = True
    m[4, 0:2] = True
    m[4, 2] = False
    boxes = [d.bounding_box[:2] for d in connected_components(m, 4)]
    assert boxes == sorted(boxes)


def test_u_shape_merges():
    # the two arms only join at the bottom row
    m = np.zeros((5, 5), bool)
    m[0:5, 0] = m[0:5, 4] = True
    m[4, :] = True
    assert len(connected_components(m, 4)) == 1
    assert connected_components(m, 4)[0].pixel_count == 13


@pytest.mark.parametrize("connectivity", [4, 8])
def test_against_flood_fill(connectivity):
    rng = np.random.default_rng(connectivity)
    for _ in range(60):
        m = rng.random(rng.integers(1, 20, size=2)) < rng.uniform(0.2, 0.7)
        labels, n = label(m, connectivity)
        expected = oracles.flood_fill_components(m.tolist(), connectivity)
        assert _partition(labels) == expected
        dets = connected_components(m, connectivity)
        assert len(dets) == n == len(expected)
        assert sorted(d.pixel_count for d in dets) == sorted(len(c) for c in expected)


def test_centroids_match_scipy():
    rng = np.random.default_rng(12)
    m = rng.random((60, 50)) < 0.45
    dets = connected_components(m, 8)
    labels, n = ndimage.label(m, structure=np.ones((3, 3)))
    centres = ndimage.center_of_mass(m, labels, range(1, n + 1))
    got = sorted((round(d.centroid_row, 9), round(d.centroid_col, 9)) for d in dets)
    want = sorted((round(r, 9), round(c, 9)) for r, c in centres)
    assert got == want
