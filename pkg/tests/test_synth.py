import numpy as np
import pytest

from gspcd.cda import detect
from gspcd.core import CdaParams
from gspcd.evaluation import match
from gspcd.gsp import EstimatorKind, predict_scene
from gspcd.synth import (SynthConfig, SynthTarget, default_scenario, generate, target_grid,
                         uniform_stream)


def test_uniform_stream_mapping():
    raw = np.random.PCG64(123).random_raw(5)
    expected = [(int(x) >> 11) * 2.0 ** -53 for x in raw]
    assert uniform_stream(123)(5).tolist() == expected


def test_determinism():
    cfg = default_scenario(rows=60, cols=40, n_targets=2, seed=9)
    a, b = generate(cfg), generate(cfg)
    assert a.stack.data.tobytes() == b.stack.data.tobytes()
    assert a.targets == b.targets
    assert generate(default_scenario(rows=60, cols=40, n_targets=2, seed=10)).stack.data.tobytes() \
        != a.stack.data.tobytes()


def test_no_targets_no_jitter_gives_identical_images():
    res = generate(SynthConfig(rows=30, cols=20, temporal_jitter_std=0.0, seed=1))
    first = res.stack.data[0]
    assert all(np.array_equal(layer, first) for layer in res.stack.data)
    assert np.array_equal(predict_scene(res.stack, EstimatorKind("median")).data, first)


def test_clutter_statistics_and_nonnegative():
    res = generate(SynthConfig(rows=200, cols=200, seed=4))
    assert (res.stack.data >= 0).all()
    assert res.clutter.data.mean() == pytest.approx(0.14, abs=0.01)
    assert res.clutter.data.std() == pytest.approx(0.07, abs=0.01)


def test_temporal_jitter_spread():
    cfg = SynthConfig(rows=100, cols=100, seed=2, clutter_mean=1.0, clutter_std=0.05)
    res = generate(cfg)
    per_pixel_var = res.stack.data.var(axis=0, ddof=1)
    assert np.sqrt(per_pixel_var.mean()) == pytest.approx(cfg.temporal_jitter_std, rel=0.02)
    # uniform jitter is bounded by sqrt(3) * std around the clutter
    assert np.abs(res.stack.data - res.clutter.data).max() <= np.sqrt(3) * 0.01 + 1e-12


def test_targets_only_in_designated_images():
    cfg = default_scenario(rows=120, cols=100, n_targets=4, target_images=(0, 3), seed=5)
    res = generate(cfg)
    assert [len(t) for t in res.targets] == [4, 0, 0, 4, 0, 0, 0, 0]
    for t in res.targets[0]:
        series = res.stack.data[:, int(t.row), int(t.col)] - res.clutter.data[int(t.row), int(t.col)]
        assert (series > 0.4).sum() == 2
        assert series[0] > 0.4 and series[3] > 0.4


def test_blob_shape():
    cfg = SynthConfig(rows=40, cols=40, n_images=2, temporal_jitter_std=0.0, clutter_std=0.0,
                      targets=(SynthTarget(0, 20, 20, size_px=10, amplitude_boost=0.5),))
    added = generate(cfg).stack.data[0] - 0.14
    assert np.allclose(added[15:25, 15:25], 0.5)
    assert np.allclose(added[14, 14:26], 0.25) and np.allclose(added[25, 14:26], 0.25)
    assert np.isclose(added, 0.5).sum() == 100 and np.isclose(added, 0.25).sum() == 44


@pytest.mark.parametrize("bad", [
    dict(n_images=1),
    dict(targets=(SynthTarget(8, 5, 5),)),
    dict(targets=(SynthTarget(0, 500, 5),)),
    dict(targets=(SynthTarget(0, 5, 5, amplitude_boost=0.0),)),
])
def test_invalid_config(bad):
    with pytest.raises(ValueError):
        SynthConfig(rows=50, cols=50, **bad)


def test_target_grid_spacing():
    pts = target_grid(25, 300, 200, 20.0)
    assert len(pts) == 25
    assert pts[0] == (110.0, 60.0) and pts[-1] == (190.0, 140.0)


def test_five_targets_detected_at_c5():
    cfg = default_scenario(n_targets=5, target_images=(0,), seed=0)
    res = generate(cfg)
    ref = predict_scene(res.stack, EstimatorKind("median"))
    dets = detect(res.stack.images[0], ref, CdaParams(5))
    m = match(dets, res.targets[0], 10)
    assert m.detected >= 4
    assert len(m.false_alarms) == 0


@pytest.mark.parametrize("overrides", [dict(size_px=8), dict(rows=600, cols=400)])
def test_full_grid_detected_when_targets_do_not_dominate_sigma(overrides):
    # at 25 blobs of 10 px in 300x200 the blobs inflate sigma past the boost;
    # a smaller blob or a larger scene brings lambda back under it
    res = generate(default_scenario(target_images=(0, 1), **overrides))
    ref = predict_scene(res.stack, EstimatorKind("median"))
    m = match(detect(res.stack.images[0], ref, CdaParams(5)), res.targets[0], 10)
    assert m.detected == 25
    assert len(m.false_alarms) == 0
