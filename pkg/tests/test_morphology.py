import numpy as np
import pytest
from scipy import ndimage

import oracles
from gspcd.morphology import dilate, erode, opening


def _random_masks(count, seed=0, max_side=24):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        shape = rng.integers(1, max_side + 1, size=2)
        yield rng.random(shape) < rng.uniform(0.2, 0.9)


def test_erode_single_pixel_vanishes():
    m = np.zeros((9, 9), bool)
    m[4, 4] = True
    assert not erode(m, 3).any()


def test_erode_full_mask_border():
    out = erode(np.ones((10, 10), bool), 3)
    assert out[1:-1, 1:-1].all() and out.sum() == 64


def test_kernel_one_is_identity():
    m = next(_random_masks(1, seed=3))
    assert np.array_equal(erode(m, 1), m)
    assert np.array_equal(dilate(m, 1), m)


def test_dilate_single_pixel_block():
    m = np.zeros((15, 15), bool)
    m[7, 7] = True
    out = dilate(m, 7)
    assert out.sum() == 49 and out[4:11, 4:11].all()
    assert not dilate(np.zeros((5, 5), bool), 7).any()


def test_opening_examples():
    m = np.zeros((12, 12), bool)
    m[6, 6] = True
    assert not opening(m, 3).any()
    block = np.zeros((20, 20), bool)
    block[5:15, 5:15] = True
    assert np.array_equal(opening(block, 3), block)


@pytest.mark.parametrize("kernel", [4, 0, -1])
def test_bad_kernel(kernel):
    with pytest.raises(ValueError):
        erode(np.ones((3, 3), bool), kernel)


@pytest.mark.parametrize("kernel", [3, 5, 7])
def test_against_bruteforce(kernel):
    for m in _random_masks(25, seed=kernel, max_side=14):
        lists = m.tolist()
        assert erode(m, kernel).tolist() == oracles.erode(lists, kernel)
        assert dilate(m, kernel).tolist() == oracles.dilate(lists, kernel)


@pytest.mark.parametrize("kernel", [3, 7, 9])
def test_against_scipy(kernel):
    se = np.ones((kernel, kernel), bool)
    for m in _random_masks(40, seed=10 + kernel, max_side=40):
        assert np.array_equal(erode(m, kernel), ndimage.binary_erosion(m, se, border_value=0))
        assert np.array_equal(dilate(m, kernel), ndimage.binary_dilation(m, se, border_value=0))


def test_algebra_on_random_masks():
    for m in _random_masks(100, seed=42):
        for k in (3, 5):
            o = opening(m, k)
            d = dilate(m, k)
            assert np.array_equal(opening(o, k), o)
            assert not (o & ~m).any()
            assert not (m & ~d).any()
            r = k // 2
            dual = ~erode(~m, k)
            assert np.array_equal(d[r:m.shape[0] - r, r:m.shape[1] - r],
                                  dual[r:m.shape[0] - r, r:m.shape[1] - r])


def test_monotonicity():
    rng = np.random.default_rng(1)
    for m1 in _random_masks(60, seed=5):
        m2 = m1 | (rng.random(m1.shape) < 0.3)
        for k in (3, 7):
            assert not (opening(m1, k) & ~opening(m2, k)).any()
            assert not (dilate(m1, k) & ~dilate(m2, k)).any()
