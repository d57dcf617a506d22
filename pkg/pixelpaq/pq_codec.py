"""
Intra-only transform / quantise / reconstruct simulator.

Per CB and channel:

    residual = block - round(mu)                  (DC prediction)
    levels   = quantize(DCT(residual), qstep)     (dead-zone URQ)
    recon    = clip(round(mu) + IDCT(levels * qstep), 0, 2^b - 1)

q_max is the largest absolute pixel error over the in-frame part of the CB;
a CB is visually lossless on a channel when q_max <= its JND weight.
bits_proxy = sum(log2(1 + |level|)) + one sign bit per nonzero level.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import fft

from pixelpaq.pq_blocks import block_samples
from pixelpaq.pq_errors import BadBlockShape, GridMapMismatch, NonPositiveQStep
from pixelpaq.pq_yuv import CHANNELS, Channel, make_frame

DEFAULT_THETA = 1.0 / 3.0


def _check_shape(block):
    arr = np.asarray(block)
    if arr.ndim != 2:
        raise BadBlockShape('expected a 2-D block, got shape %s' %
                            (arr.shape,))
    for n in arr.shape:
        if n < 4 or n & (n - 1):
            raise BadBlockShape('block sides must be powers of two >= 4, '
                                'got %s' % (arr.shape,))
    return arr


def forward_transform(block):
    "Separable orthonormal 2-D DCT-II."
    arr = _check_shape(block)
    return fft.dctn(arr.astype(np.float64), type=2, norm='ortho')


def inverse_transform(coefficients):
    arr = _check_shape(coefficients)
    return fft.idctn(arr.astype(np.float64), type=2, norm='ortho')


def _check_qstep(qstep):
    if not qstep > 0:
        raise NonPositiveQStep(qstep)


def quantize(coefficients, qstep, theta=DEFAULT_THETA):
    "level = sign(c) * floor(|c| / qstep + theta)"
    _check_qstep(qstep)
    c = np.asarray(coefficients, dtype=np.float64)
    return (np.sign(c) * np.floor(np.abs(c) / qstep + theta)).astype(np.int64)


def dequantize(levels, qstep):
    _check_qstep(qstep)
    return np.asarray(levels, dtype=np.float64) * qstep


def bits_proxy(levels):
    mags = np.abs(np.asarray(levels))
    return float(np.log2(1.0 + mags).sum() + np.count_nonzero(mags))


@dataclass(frozen=True)
class CbResult:
    luma_index: int
    q_max_y: float
    q_max_cb: float
    q_max_cr: float
    nonzero_y: int
    nonzero_cb: int
    nonzero_cr: int
    bits_y: float
    bits_cb: float
    bits_cr: float

    @property
    def bits_proxy(self):
        return self.bits_y + self.bits_cb + self.bits_cr

    @property
    def bits_chroma(self):
        return self.bits_cb + self.bits_cr

    def q_max(self, channel):
        return {Channel.Y: self.q_max_y, Channel.CB: self.q_max_cb,
                Channel.CR: self.q_max_cr}[channel]

    def bits(self, channel):
        return {Channel.Y: self.bits_y, Channel.CB: self.bits_cb,
                Channel.CR: self.bits_cr}[channel]

    def nonzero(self, channel):
        return {Channel.Y: self.nonzero_y, Channel.CB: self.nonzero_cb,
                Channel.CR: self.nonzero_cr}[channel]


@dataclass(frozen=True)
class JndVerdict:
    pass_y: bool
    pass_cb: bool
    pass_cr: bool

    def passed(self, channel):
        return {Channel.Y: self.pass_y, Channel.CB: self.pass_cb,
                Channel.CR: self.pass_cr}[channel]


@dataclass(frozen=True)
class SimResult:
    recon: object
    per_cb: tuple = field(repr=False)
    jnd_pass: tuple = field(repr=False)
    thresholds: tuple = field(repr=False)

    def bits(self, channel):
        return float(sum(cb.bits(channel) for cb in self.per_cb))

    def nonzero(self, channel):
        return int(sum(cb.nonzero(channel) for cb in self.per_cb))

    @property
    def bits_proxy(self):
        return float(sum(cb.bits_proxy for cb in self.per_cb))

    @property
    def bits_chroma(self):
        return self.bits(Channel.CB) + self.bits(Channel.CR)

    def pass_rate(self, channel):
        if not self.jnd_pass:
            return 1.0
        return (sum(v.passed(channel) for v in self.jnd_pass) /
                float(len(self.jnd_pass)))


def _simulate_block(plane, block, mu, qstep, theta, max_value):
    samples = block_samples(plane, block).astype(np.float64)
    pred = np.floor(mu + 0.5)
    coefficients = forward_transform(samples - pred)
    levels = quantize(coefficients, qstep, theta)
    rebuilt = pred + inverse_transform(dequantize(levels, qstep))
    recon = np.clip(np.floor(rebuilt + 0.5), 0, max_value).astype(np.int64)
    recon = recon[:block.valid_h, :block.valid_w]
    orig = plane.samples[block.y:block.y + block.valid_h,
                         block.x:block.x + block.valid_w]
    q_max = float(np.abs(orig - recon).max())
    return recon, q_max, int(np.count_nonzero(levels)), bits_proxy(levels)


def simulate_frame(frame, grid, qp_map, thresholds=None, theta=DEFAULT_THETA):
    """
    Code one frame with the QSteps of a QP map

    Args:
        frame: original Frame
        grid: BlockGrid the map was built on
        qp_map: QpMap from pq_quant.build_qp_map
        thresholds: optional JndWeights per CB; defaults to the weights
                    recorded in the map entries
        theta: dead-zone rounding offset

    Returns:
        SimResult with the reconstructed frame, per-CB errors, nonzero
        counts and bit proxies, and the JND verdicts
    """
    if len(qp_map) != len(grid) or qp_map.cb_size != grid.cb_size:
        raise GridMapMismatch('QP map has %d entries of size %d, grid has %d '
                              'CBs of size %d' % (len(qp_map), qp_map.cb_size,
                                                  len(grid), grid.cb_size))
    if thresholds is not None and len(thresholds) != len(grid):
        raise GridMapMismatch('%d thresholds for %d CBs' %
                              (len(thresholds), len(grid)))
    spec = grid.spec
    max_value = spec.max_value
    recon = {c: np.zeros_like(frame.plane(c).samples) for c in CHANNELS}
    per_cb, verdicts, limits = [], [], []
    for index, entry in enumerate(qp_map.entries):
        if thresholds is None:
            limit = tuple(entry.threshold(c) for c in CHANNELS)
        else:
            t = thresholds[index]
            limit = (t.l_y, t.w_cb, t.w_cr)
        stats = {}
        for channel, block in zip(CHANNELS, grid.colocated(index)):
            rec, q_max, nonzero, bits = _simulate_block(
                frame.plane(channel), block, entry.mean(channel),
                entry.qstep(channel), theta, max_value)
            recon[channel][block.y:block.y + block.valid_h,
                           block.x:block.x + block.valid_w] = rec
            stats[channel] = (q_max, nonzero, bits)
        per_cb.append(CbResult(
            index,
            stats[Channel.Y][0], stats[Channel.CB][0], stats[Channel.CR][0],
            stats[Channel.Y][1], stats[Channel.CB][1], stats[Channel.CR][1],
            stats[Channel.Y][2], stats[Channel.CB][2], stats[Channel.CR][2]))
        verdicts.append(JndVerdict(*(stats[c][0] <= lim
                                     for c, lim in zip(CHANNELS, limit))))
        limits.append(limit)
    frame_out = make_frame(spec, recon[Channel.Y], recon[Channel.CB],
                           recon[Channel.CR])
    return SimResult(frame_out, tuple(per_cb), tuple(verdicts), tuple(limits))


def jnd_pass_table(result):
    "One row per CB: q_max, threshold and verdict for each channel."
    rows = []
    for cb, verdict, limit in zip(result.per_cb, result.jnd_pass,
                                  result.thresholds):
        rows.append({
            'index': cb.luma_index,
            'q_max_y': cb.q_max_y,
            'q_max_cb': cb.q_max_cb,
            'q_max_cr': cb.q_max_cr,
            'threshold_y': limit[0],
            'threshold_cb': limit[1],
            'threshold_cr': limit[2],
            'pass_y': verdict.pass_y,
            'pass_cb': verdict.pass_cb,
            'pass_cr': verdict.pass_cr,
        })
    return rows
