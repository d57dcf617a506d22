import math

import numpy as np
import pytest

from pixelpaq.pq_errors import (ConfigError, EmptyBlock, MeanOutOfRange,
                                UsageError)
from pixelpaq.pq_jnd import (CHROMA, DEFAULT_PARAMS, LUMA, JndParams,
                             block_mean, chroma_weight, compute_weights,
                             curve_table, luma_weight, normalised_curve)

BIT_DEPTHS = (8, 10, 12, 16)


def test_block_mean_constant():
    assert block_mean(np.full((64, 64), 512)) == 512.0


def test_block_mean_symmetric_extremes():
    assert block_mean(np.array([0, 255] * 2048)) == 127.5


def test_block_mean_matches_loop_sum(rng):
    samples = rng.integers(0, 1024, 4096)
    total = 0
    for s in samples.tolist():
        total += s
    assert block_mean(samples) == pytest.approx(total / 4096.0, abs=1e-9)


def test_block_mean_empty():
    with pytest.raises(EmptyBlock):
        block_mean(np.array([]))


def test_luma_weight_anchors():
    assert luma_weight(0, 8) == 3.0
    assert luma_weight(128, 8) == 1.0
    # 1 + 0.8 * (510/256 - 1)^2
    assert luma_weight(255, 8) == pytest.approx(1.787548828125, abs=1e-12)
    assert luma_weight(64, 8) == luma_weight(256, 10)


def test_luma_weight_is_bit_depth_invariant():
    for mu in range(256):
        w8 = luma_weight(mu, 8)
        assert luma_weight(4 * mu, 10) == pytest.approx(w8, abs=1e-12)
        assert luma_weight(16 * mu, 12) == pytest.approx(w8, abs=1e-12)
        assert luma_weight(256 * mu, 16) == pytest.approx(w8, abs=1e-12)


@pytest.mark.parametrize('b', BIT_DEPTHS)
def test_luma_weight_continuous_at_midpoint(b):
    half = float(1 << (b - 1))
    eps = 1e-6
    assert abs(luma_weight(half - eps, b) - luma_weight(half + eps, b)) < 1e-9


@pytest.mark.parametrize('b', BIT_DEPTHS)
def test_luma_weight_at_least_one(b):
    for mu in np.linspace(0, (1 << b) - 1, 257):
        assert luma_weight(float(mu), b) >= 1.0


@pytest.mark.parametrize('mu', [-0.5, 256])
def test_luma_weight_mean_out_of_range(mu):
    with pytest.raises(MeanOutOfRange) as info:
        luma_weight(mu, 8)
    assert info.value.bit_depth == 8


def test_chroma_weight_8bit_examples():
    assert chroma_weight(0, 8) == 3.0
    assert chroma_weight(85, 8) == 1.0
    assert chroma_weight(90, 8) == 1.0
    assert chroma_weight(88, 8) == 1.0
    assert chroma_weight(255, 8) == 3.0
    assert chroma_weight(172.5, 8) == pytest.approx(2.0, abs=1e-12)


@pytest.mark.parametrize('b', BIT_DEPTHS)
def test_chroma_weight_identities_with_knee_scaling(b):
    h, j = DEFAULT_PARAMS.knees(b)
    top = (1 << b) - 1
    assert chroma_weight(0, b) == pytest.approx(3.0, abs=1e-12)
    assert chroma_weight(h, b) == pytest.approx(1.0, abs=1e-12)
    assert chroma_weight(j, b) == pytest.approx(1.0, abs=1e-12)
    assert chroma_weight(top, b) == pytest.approx(3.0, abs=1e-12)
    eps = 1e-6
    for knee in (h, j):
        below = chroma_weight(knee - eps, b)
        above = chroma_weight(knee + eps, b)
        assert abs(below - above) < 1e-6


def test_knee_scaling():
    assert DEFAULT_PARAMS.knees(10) == (340.0, 360.0)
    assert JndParams(scale_chroma_knees=False).knees(10) == (85.0, 90.0)


def test_params_validate():
    DEFAULT_PARAMS.validate(16)
    with pytest.raises(ConfigError):
        JndParams(h=95.0, j=90.0).validate(8)
    with pytest.raises(ConfigError):
        JndParams(g=0.5).validate(8)
    with pytest.raises(ConfigError):
        JndParams(a=0.0).validate(8)


def test_compute_weights():
    w = compute_weights(0.0, 88.0, 255.0, 8)
    assert (w.l_y, w.w_cb, w.w_cr) == (3.0, 1.0, 3.0)
    assert (w.mu_y, w.mu_cb, w.mu_cr) == (0.0, 88.0, 255.0)


def test_curve_table_luma_8bit():
    table = curve_table(8, 3, LUMA)
    assert [mu for mu, _ in table] == [0.0, 127.5, 255.0]
    assert table[0][1] == 3.0
    assert table[1][1] == pytest.approx(1.0 + 2.0 * (1.0 / 256.0) ** 3,
                                        abs=1e-15)
    assert table[2][1] == pytest.approx(1.787548828125, abs=1e-12)


def test_curve_table_endpoints_delegate():
    table = curve_table(10, 2, LUMA)
    assert table == [(0.0, 3.0), (1023.0, luma_weight(1023, 10))]
    assert curve_table(8, 2, CHROMA) == [(0.0, 3.0), (255.0, 3.0)]


def test_curve_table_rejects_bad_arguments():
    with pytest.raises(UsageError):
        curve_table(8, 1)
    with pytest.raises(UsageError):
        curve_table(8, 4, 'blue')


def test_normalised_luma_curve_is_bit_depth_free():
    for x, w in normalised_curve(8, 256, LUMA):
        assert luma_weight(x * 1024, 10) == pytest.approx(w, abs=1e-12)
        assert luma_weight(x * 65536, 16) == pytest.approx(w, abs=1e-12)


def test_weights_are_never_below_one():
    for b in BIT_DEPTHS:
        for _, w in curve_table(b, 101, CHROMA):
            assert w >= 1.0
            assert not math.isnan(w)


@pytest.mark.parametrize('b', BIT_DEPTHS)
def test_luma_weight_falls_then_rises(b):
    half = 1 << (b - 1)
    weights = np.array([luma_weight(mu, b) for mu in range(1 << b)])
    assert np.all(np.diff(weights[:half + 1]) < 0)
    assert np.all(np.diff(weights[half:]) > 0)


@pytest.mark.parametrize('b', BIT_DEPTHS)
def test_chroma_weight_falls_holds_then_rises(b):
    h, j = DEFAULT_PARAMS.knees(b)
    h, j = int(h), int(j)
    weights = np.array([chroma_weight(mu, b) for mu in range(1 << b)])
    assert np.all(np.diff(weights[:h + 1]) < 0)
    assert np.all(weights[h + 1:j] == 1.0)
    assert np.all(np.diff(weights[j:]) > 0)
