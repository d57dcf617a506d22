"""
QP / QStep derivation and per-frame QP maps.

    QStep(QP) = 2^((QP - 4) / 6)        QP(QStep) = ceil(6 log2 QStep) + 4

Perceptual luma:   PStep_Y = QStep(base) * ceil(L)       PQP_Y = QP(PStep_Y)
Chroma offsets:    OQP = PQP_Y + [3 C]                   OStep = QStep(OQP)

[x] is round-half-up. All QPs are clipped to [0, 51].
"""

from collections import Counter
from dataclasses import asdict, dataclass, field
from enum import Enum
import math

from pixelpaq.pq_blocks import valid_samples
from pixelpaq.pq_errors import (NonPositiveQStep, QpOutOfRange, SpecMismatch,
                                UsageError)
from pixelpaq.pq_jnd import DEFAULT_PARAMS, block_mean, compute_weights
from pixelpaq.pq_yuv import Channel

QP_MIN = 0
QP_MAX = 51
CTC_QPS = (22, 27, 32, 37)

# keeps exact powers of two from rounding up a whole QP
CEIL_EPSILON = 1e-9


class QpMode(Enum):
    PIXEL_PAQ = 'pixel-paq'
    IDSQ = 'idsq'
    UNIFORM = 'uniform'

    @classmethod
    def parse(cls, value):
        if isinstance(value, QpMode):
            return value
        for mode in cls:
            if mode.value == str(value).strip().lower():
                return mode
        raise UsageError('unknown mode %r (use %s)' %
                         (value, ', '.join(m.value for m in cls)))


def round_half_up(x):
    return int(math.floor(x + 0.5))


def clip_qp(qp):
    return max(QP_MIN, min(QP_MAX, qp))


def _check_qp(qp):
    if not QP_MIN <= qp <= QP_MAX or int(qp) != qp:
        raise QpOutOfRange(qp)


def qstep_from_qp(qp):
    _check_qp(qp)
    return 2.0 ** ((qp - 4) / 6.0)


def qp_from_qstep(qstep):
    if not qstep > 0:
        raise NonPositiveQStep(qstep)
    return int(math.ceil(6.0 * math.log2(qstep) - CEIL_EPSILON)) + 4


def perceptual_luma(base_qp, l_y, exact_weights=False):
    """
    JND-weighted luma QStep and QP of one CB

    Args:
        base_qp: slice QP
        l_y: luma JND weight L(mu_Y), >= 1
        exact_weights: weigh with l_y itself instead of ceil(l_y)

    Returns:
        (pstep_y, pqp_y)
    """
    weight = l_y if exact_weights else math.ceil(l_y)
    pstep = qstep_from_qp(base_qp) * weight
    return pstep, clip_qp(qp_from_qstep(pstep))


def perceptual_chroma(base_qp, w, exact_weights=False):
    "Standalone chroma QStep/QP; the map itself uses chroma_offset."
    weight = w if exact_weights else round_half_up(w)
    pstep = qstep_from_qp(base_qp) * weight
    return pstep, clip_qp(qp_from_qstep(pstep))


def chroma_offset(pqp_y, w):
    """
    CB-level chroma QP offset against the perceptual luma QP

    Returns:
        (oqp, ostep) with oqp = clip(pqp_y + [3w])
    """
    _check_qp(pqp_y)
    oqp = clip_qp(pqp_y + round_half_up(3.0 * w))
    return oqp, qstep_from_qp(oqp)


@dataclass(frozen=True)
class QpMapEntry:
    luma_index: int
    x: int
    y: int
    mu_y: float
    mu_cb: float
    mu_cr: float
    l_y: float
    w_cb: float
    w_cr: float
    qp_y_base: int
    pqp_y: int
    oqp_cb: int
    oqp_cr: int
    pstep_y: float
    ostep_cb: float
    ostep_cr: float

    @property
    def offset_cb(self):
        return self.oqp_cb - self.pqp_y

    @property
    def offset_cr(self):
        return self.oqp_cr - self.pqp_y

    def qstep(self, channel):
        return {Channel.Y: self.pstep_y, Channel.CB: self.ostep_cb,
                Channel.CR: self.ostep_cr}[channel]

    def mean(self, channel):
        return {Channel.Y: self.mu_y, Channel.CB: self.mu_cb,
                Channel.CR: self.mu_cr}[channel]

    def threshold(self, channel):
        return {Channel.Y: self.l_y, Channel.CB: self.w_cb,
                Channel.CR: self.w_cr}[channel]


@dataclass(frozen=True)
class QpMap:
    mode: QpMode
    base_qp: int
    cb_size: int
    params: object
    exact_weights: bool
    entries: tuple = field(repr=False)

    def __len__(self):
        return len(self.entries)

    def header(self, spec):
        return {
            'spec': spec.to_dict(),
            'cb_size': self.cb_size,
            'base_qp': self.base_qp,
            'mode': self.mode.value,
            'exact_weights': self.exact_weights,
            'params': asdict(self.params),
        }


def _entry(index, luma_block, weights, base_qp, mode, exact_weights):
    base_step = qstep_from_qp(base_qp)
    if mode is QpMode.UNIFORM:
        pqp_y, pstep_y = base_qp, base_step
        oqp_cb = oqp_cr = base_qp
        ostep_cb = ostep_cr = base_step
    else:
        pstep_y, pqp_y = perceptual_luma(base_qp, weights.l_y, exact_weights)
        if mode is QpMode.PIXEL_PAQ:
            oqp_cb, ostep_cb = chroma_offset(pqp_y, weights.w_cb)
            oqp_cr, ostep_cr = chroma_offset(pqp_y, weights.w_cr)
        else:
            # luminance-only baseline: chroma follows PQP_Y with no offset
            oqp_cb = oqp_cr = pqp_y
            ostep_cb = ostep_cr = qstep_from_qp(pqp_y)
    return QpMapEntry(index, luma_block.x, luma_block.y,
                      weights.mu_y, weights.mu_cb, weights.mu_cr,
                      weights.l_y, weights.w_cb, weights.w_cr,
                      base_qp, pqp_y, oqp_cb, oqp_cr,
                      pstep_y, ostep_cb, ostep_cr)


def build_qp_map(frame, grid, base_qp, mode=QpMode.PIXEL_PAQ,
                 params=DEFAULT_PARAMS, exact_weights=False):
    """
    Derive the per-CB QPs of one frame

    Args:
        frame: Frame matching grid.spec
        grid: BlockGrid from pq_blocks.partition
        base_qp: slice QP
        mode: QpMode (pixel-paq, idsq or uniform)
        params: JndParams
        exact_weights: skip the ceiling on the luma weight

    Returns:
        QpMap with one entry per luma CB, in raster order
    """
    _check_qp(base_qp)
    mode = QpMode.parse(mode)
    spec = grid.spec
    if not frame.matches(spec):
        raise SpecMismatch('frame does not match the %dx%d %s grid' %
                           (spec.width, spec.height,
                            spec.chroma_format.value))
    params.validate(spec.bit_depth)
    entries = []
    for index in range(len(grid)):
        y_blk, cb_blk, cr_blk = grid.colocated(index)
        weights = compute_weights(
            block_mean(valid_samples(frame.y, y_blk)),
            block_mean(valid_samples(frame.cb, cb_blk)),
            block_mean(valid_samples(frame.cr, cr_blk)),
            spec.bit_depth, params)
        entries.append(_entry(index, y_blk, weights, base_qp, mode,
                              exact_weights))
    return QpMap(mode, base_qp, grid.cb_size, params, exact_weights,
                 tuple(entries))


def qp_histogram(qp_map):
    "Counts of each pqp_y / oqp_cb / oqp_cr value over the map."
    return {
        'pqp_y': dict(sorted(Counter(e.pqp_y for e in qp_map.entries).items())),
        'oqp_cb': dict(sorted(Counter(e.oqp_cb
                                      for e in qp_map.entries).items())),
        'oqp_cr': dict(sorted(Counter(e.oqp_cr
                                      for e in qp_map.entries).items())),
    }
