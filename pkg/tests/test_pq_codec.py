import math

import numpy as np
import pytest

from conftest import random_frame
from pixelpaq.pq_blocks import partition
from pixelpaq.pq_codec import (DEFAULT_THETA, bits_proxy, dequantize,
                               forward_transform, inverse_transform,
                               jnd_pass_table, quantize, simulate_frame)
from pixelpaq.pq_errors import BadBlockShape, GridMapMismatch, NonPositiveQStep
from pixelpaq.pq_jnd import JndWeights
from pixelpaq.pq_quant import CTC_QPS, QpMode, build_qp_map
from pixelpaq.pq_yuv import CHANNELS, Channel, ChromaFormat, VideoSpec
from pixelpaq.pq_yuv import constant_frame


def naive_dct2(block):
    "Literal orthonormal DCT-II double loop."
    n, m = block.shape
    out = np.zeros((n, m))
    for u in range(n):
        for v in range(m):
            cu = math.sqrt((1.0 if u == 0 else 2.0) / n)
            cv = math.sqrt((1.0 if v == 0 else 2.0) / m)
            s = 0.0
            for x in range(n):
                for y in range(m):
                    s += (block[x, y] *
                          math.cos(math.pi * (2 * x + 1) * u / (2.0 * n)) *
                          math.cos(math.pi * (2 * y + 1) * v / (2.0 * m)))
            out[u, v] = cu * cv * s
    return out


def test_zero_block():
    assert not forward_transform(np.zeros((8, 8))).any()
    assert not inverse_transform(np.zeros((8, 8))).any()


@pytest.mark.parametrize('n', [4, 16, 64])
def test_constant_block_has_only_dc(n):
    coefficients = forward_transform(np.full((n, n), 37.0))
    assert coefficients[0, 0] == pytest.approx(n * 37.0)
    ac = coefficients.copy()
    ac[0, 0] = 0.0
    assert np.abs(ac).max() < 1e-9


def test_dc_only_inverts_to_constant():
    coefficients = np.zeros((32, 32))
    coefficients[0, 0] = 32 * 5.0
    np.testing.assert_allclose(inverse_transform(coefficients), 5.0,
                               atol=1e-12)


def test_matches_naive_dct(rng):
    block = rng.uniform(-512, 512, (8, 8))
    np.testing.assert_allclose(forward_transform(block), naive_dct2(block),
                               rtol=0, atol=1e-9)


def test_round_trip_and_parseval(rng):
    for _ in range(1000):
        block = rng.integers(0, 1 << 16, (64, 64)).astype(np.float64)
        coefficients = forward_transform(block)
        assert np.abs(inverse_transform(coefficients) - block).max() <= 1e-6
        energy = np.sum(block * block)
        assert (abs(np.sum(coefficients * coefficients) - energy) / energy
                <= 1e-6)


@pytest.mark.parametrize('shape', [(8,), (6, 8), (2, 2), (8, 8, 8)])
def test_bad_block_shape(shape):
    with pytest.raises(BadBlockShape):
        forward_transform(np.zeros(shape))


def test_quantize_examples():
    assert quantize(np.array([0.0]), 8.0)[0] == 0
    assert quantize(np.array([10.0]), 8.0)[0] == 1
    assert quantize(np.array([-2.0]), 8.0)[0] == 0
    assert quantize(np.array([-10.0]), 8.0)[0] == -1
    assert dequantize(np.array([0]), 8.0)[0] == 0.0
    assert dequantize(np.array([1]), 8.0)[0] == 8.0


def test_non_positive_qstep():
    with pytest.raises(NonPositiveQStep):
        quantize(np.zeros(4), 0.0)
    with pytest.raises(NonPositiveQStep):
        dequantize(np.zeros(4), -1.0)


def test_quantiser_error_bounds(rng):
    c = rng.uniform(-5000.0, 5000.0, 100000)
    step = rng.uniform(1.0, 100.0, 100000)
    unit = c - dequantize(quantize(c, 1.0), 1.0)
    assert np.abs(unit).max() < 1.0
    rebuilt = np.sign(c) * np.floor(np.abs(c) / step + DEFAULT_THETA) * step
    np.testing.assert_array_equal(
        np.array([dequantize(quantize(ci, si), si)
                  for ci, si in zip(c[:2000], step[:2000])]),
        rebuilt[:2000])
    err = c - rebuilt
    assert (np.abs(err) < step).all()
    # magnitude error lies in (-step/3, 2 step/3]
    mag = np.abs(c) - np.abs(rebuilt)
    assert (mag > -step / 3.0 - 1e-9).all()
    assert (mag <= 2.0 * step / 3.0 + 1e-9).all()


def test_bits_proxy():
    assert bits_proxy(np.zeros((4, 4), dtype=int)) == 0.0
    assert bits_proxy(np.array([1, -1, 3, 0])) == pytest.approx(
        1.0 + 1.0 + 2.0 + 3.0)


def _constant(fmt=ChromaFormat.C420):
    spec = VideoSpec(96, 80, 10, fmt)
    return spec, partition(spec, 32), constant_frame(spec, 300, 700, 64)


@pytest.mark.parametrize('qp', CTC_QPS)
def test_constant_frame_is_lossless(qp):
    spec, grid, frame = _constant()
    for mode in QpMode:
        result = simulate_frame(frame, grid, build_qp_map(frame, grid, qp,
                                                          mode))
        assert result.recon == frame
        assert result.bits_proxy == 0.0
        for channel in CHANNELS:
            assert result.pass_rate(channel) == 1.0
        assert all(cb.q_max(c) == 0 for cb in result.per_cb for c in CHANNELS)


def test_coarser_uniform_qp_never_adds_coefficients(synthetic_frame_444):
    spec, frame = synthetic_frame_444
    grid = partition(spec, 32)
    fine = simulate_frame(frame, grid, build_qp_map(frame, grid, 22,
                                                    'uniform'))
    coarse = simulate_frame(frame, grid, build_qp_map(frame, grid, 51,
                                                      'uniform'))
    for f, c in zip(fine.per_cb, coarse.per_cb):
        for channel in CHANNELS:
            assert c.nonzero(channel) <= f.nonzero(channel)


def test_pixel_paq_saves_chroma_bits_only(synthetic_frame_444):
    spec, frame = synthetic_frame_444
    grid = partition(spec, 32)
    paq = simulate_frame(frame, grid, build_qp_map(frame, grid, 22,
                                                   QpMode.PIXEL_PAQ))
    idsq = simulate_frame(frame, grid, build_qp_map(frame, grid, 22,
                                                    QpMode.IDSQ))
    assert paq.bits(Channel.Y) == idsq.bits(Channel.Y)
    assert paq.recon.y == idsq.recon.y
    assert paq.bits_chroma <= idsq.bits_chroma
    for p, i in zip(paq.per_cb, idsq.per_cb):
        assert p.bits_cb <= i.bits_cb and p.bits_cr <= i.bits_cr


def test_recon_stays_in_range(synthetic_frame_444):
    spec, frame = synthetic_frame_444
    grid = partition(spec, 64)
    result = simulate_frame(frame, grid, build_qp_map(frame, grid, 51,
                                                      'uniform'))
    for plane in result.recon.planes():
        assert plane.samples.min() >= 0
        assert plane.samples.max() <= spec.max_value


def test_partial_blocks_only_measure_valid_samples():
    spec = VideoSpec(40, 24, 8, ChromaFormat.C444)
    grid = partition(spec, 32)
    frame = constant_frame(spec, 77)
    result = simulate_frame(frame, grid, build_qp_map(frame, grid, 37))
    assert result.recon == frame
    assert len(result.per_cb) == 2


@pytest.mark.parametrize('qp', [0, 22, 37, 51])
@pytest.mark.parametrize('mode', list(QpMode))
def test_block_error_is_bounded_by_the_step(rng, qp, mode):
    spec = VideoSpec(72, 40, 10, ChromaFormat.C420)
    grid = partition(spec, 32)
    frame = random_frame(spec, rng)
    qp_map = build_qp_map(frame, grid, qp, mode)
    result = simulate_frame(frame, grid, qp_map)
    for index, (cb, entry) in enumerate(zip(result.per_cb, qp_map.entries)):
        for channel, block in zip(CHANNELS, grid.colocated(index)):
            limit = entry.qstep(channel) * math.sqrt(block.w * block.h)
            assert cb.q_max(channel) <= limit


def test_explicit_thresholds(synthetic_frame_444):
    spec, frame = synthetic_frame_444
    grid = partition(spec, 64)
    qp_map = build_qp_map(frame, grid, 37)
    strict = [JndWeights(0.0, 0.0, 0.0, 0, 0, 0)] * len(grid)
    loose = [JndWeights(1e9, 1e9, 1e9, 0, 0, 0)] * len(grid)
    strict_result = simulate_frame(frame, grid, qp_map, strict)
    loose_result = simulate_frame(frame, grid, qp_map, loose)
    assert strict_result.pass_rate(Channel.Y) == 0.0
    assert loose_result.pass_rate(Channel.CR) == 1.0


def test_grid_map_mismatch(synthetic_frame_444):
    spec, frame = synthetic_frame_444
    qp_map = build_qp_map(frame, partition(spec, 32), 22)
    with pytest.raises(GridMapMismatch):
        simulate_frame(frame, partition(spec, 64), qp_map)
    with pytest.raises(GridMapMismatch):
        simulate_frame(frame, partition(spec, 32), qp_map, thresholds=[])


def test_jnd_pass_table_rows(synthetic_frame_444):
    spec, frame = synthetic_frame_444
    grid = partition(spec, 64)
    qp_map = build_qp_map(frame, grid, 22)
    rows = jnd_pass_table(simulate_frame(frame, grid, qp_map))
    assert [r['index'] for r in rows] == list(range(len(grid)))
    for row, entry in zip(rows, qp_map.entries):
        assert row['threshold_y'] == entry.l_y
        assert row['pass_cb'] == (row['q_max_cb'] <= entry.w_cb)
