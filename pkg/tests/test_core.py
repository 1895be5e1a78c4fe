import numpy as np
import pytest

from gspcd.core import CdaParams, Detection, Image, ImageStack, extract_series


def test_extract_series_constant_stack():
    stack = ImageStack((Image(np.ones((4, 4))), Image(np.ones((4, 4)))))
    assert extract_series(stack, 0, 0).tolist() == [1.0, 1.0]


def test_extract_series_identity_read():
    layers = np.zeros((3, 8, 8))
    layers[:, 5, 5] = [0.1, 0.2, 0.3]
    stack = ImageStack.from_array(layers)
    assert extract_series(stack, 5, 5).tolist() == [0.1, 0.2, 0.3]


@pytest.mark.parametrize("row,col", [(4, 0), (0, 4), (-1, 0)])
def test_extract_series_out_of_bounds(row, col):
    stack = ImageStack.from_array(np.zeros((2, 4, 4)))
    with pytest.raises(IndexError):
        extract_series(stack, row, col)


def test_extract_series_is_pure_projection():
    rng = np.random.default_rng(1)
    layers = rng.random((5, 6, 7))
    stack = ImageStack.from_array(layers)
    rebuilt = np.empty_like(layers)
    for r in range(6):
        for c in range(7):
            s = extract_series(stack, r, c)
            assert s.shape == (5,)
            rebuilt[:, r, c] = s
    assert np.array_equal(rebuilt, stack.data)


def test_image_rejects_nan_and_is_immutable():
    with pytest.raises(ValueError, match="non-finite"):
        Image(np.array([[0.0, np.nan]]))
    img = Image(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        img.data[0, 0] = 1.0


def test_image_from_flat_row_major():
    img = Image.from_flat(2, 3, [0, 1, 2, 3, 4, 5])
    assert img.data[1, 0] == 3
    assert img.pixels.tolist() == [0, 1, 2, 3, 4, 5]
    with pytest.raises(ValueError):
        Image.from_flat(2, 2, [1, 2, 3])


def test_stack_validation():
    with pytest.raises(ValueError, match="at least 2"):
        ImageStack((Image(np.zeros((2, 2))),))
    with pytest.raises(ValueError, match="shape"):
        ImageStack((Image(np.zeros((2, 2))), Image(np.zeros((2, 3)))))
    with pytest.raises(ValueError, match="spacing"):
        ImageStack((Image(np.zeros((2, 2))), Image(np.zeros((2, 2)), pixel_spacing_m=1.0)))


def test_area_km2_from_pixel_spacing():
    assert Image(np.zeros((3000, 2000)), pixel_spacing_m=1.0).area_km2 == pytest.approx(6.0)
    assert Image(np.zeros((400, 400))).area_km2 == pytest.approx(1.0)


def test_cda_params_validation():
    assert CdaParams(5.0).dilation_kernel == 7
    with pytest.raises(ValueError):
        CdaParams(5.0, opening_kernel=4)
    with pytest.raises(ValueError):
        CdaParams(5.0, connectivity=6)


def test_detection_invariants():
    Detection(1.0, 1.0, 1, (1, 1, 1, 1))
    with pytest.raises(ValueError):
        Detection(5.0, 1.0, 1, (1, 1, 1, 1))
    with pytest.raises(ValueError):
        Detection(1.0, 1.0, 0, (1, 1, 1, 1))
