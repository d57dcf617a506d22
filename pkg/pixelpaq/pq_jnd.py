"""
Luminance and chrominance JND weights.

luma_weight is the parabolic luminance-adaptation curve

    L(mu) = a * (1 - 2mu/2^b)^d + 1      mu <= 2^b / 2
            c * (2mu/2^b - 1)^f + 1      otherwise

which depends on mu / 2^b only, so its shape is the same at every bit depth.

chroma_weight is the piecewise-linear chrominance-adaptation curve, read as
the continuous function that is g at 0, 1 on [h', j'] and k at 2^b - 1:

    C(mu) = g - (g - 1) * mu / h'                     mu <= h'
            1                                         h' < mu < j'
            1 + (k - 1) * (mu - j') / (2^b - 1 - j')  otherwise

The knees h, j are calibrated on 8-bit data; with scale_chroma_knees they
are multiplied by 2^(b-8).
"""

from dataclasses import asdict, dataclass
import math

import numpy as np

from pixelpaq.pq_errors import (ConfigError, EmptyBlock, MeanOutOfRange,
                                UsageError)

LUMA = 'luma'
CHROMA = 'chroma'


@dataclass(frozen=True)
class JndParams:
    a: float = 2.0
    c: float = 0.8
    d: float = 3.0
    f: float = 2.0
    g: float = 3.0
    h: float = 85.0
    j: float = 90.0
    k: float = 3.0
    scale_chroma_knees: bool = True

    def knees(self, bit_depth):
        "(h', j') at this bit depth."
        if self.scale_chroma_knees:
            scale = float(1 << (bit_depth - 8))
            return self.h * scale, self.j * scale
        return self.h, self.j

    def validate(self, bit_depth):
        h, j = self.knees(bit_depth)
        top = (1 << bit_depth) - 1
        if not (self.a > 0 and self.c > 0):
            raise ConfigError('luma parameters a and c must be positive')
        if not (self.g >= 1 and self.k >= 1):
            raise ConfigError('chroma parameters g and k must be >= 1')
        if not 0 < h < j < top:
            raise ConfigError('chroma knees need 0 < h < j < %d at %d bits, '
                              'got h=%g j=%g' % (top, bit_depth, h, j))
        return self

    def to_dict(self):
        return asdict(self)


DEFAULT_PARAMS = JndParams()


@dataclass(frozen=True)
class JndWeights:
    l_y: float
    w_cb: float
    w_cr: float
    mu_y: float
    mu_cb: float
    mu_cr: float


def block_mean(samples):
    """
    Arithmetic mean of a block, as an exact real

    Integer samples are summed in int64, which is exact for any supported
    block, so the only rounding is the final division.
    """
    arr = np.asarray(samples)
    if arr.size == 0:
        raise EmptyBlock('mean of an empty block')
    if np.issubdtype(arr.dtype, np.integer):
        return int(arr.sum(dtype=np.int64)) / arr.size
    return math.fsum(arr.ravel().tolist()) / arr.size


def _check_mean(mu, bit_depth):
    if not 0 <= mu <= (1 << bit_depth) - 1:
        raise MeanOutOfRange(mu, bit_depth)


def luma_weight(mu, bit_depth, params=DEFAULT_PARAMS):
    _check_mean(mu, bit_depth)
    full = float(1 << bit_depth)
    if mu <= full / 2:
        return params.a * (1.0 - 2.0 * mu / full) ** params.d + 1.0
    return params.c * (2.0 * mu / full - 1.0) ** params.f + 1.0


def chroma_weight(mu, bit_depth, params=DEFAULT_PARAMS):
    "Serves Cb and Cr alike."
    _check_mean(mu, bit_depth)
    h, j = params.knees(bit_depth)
    top = float((1 << bit_depth) - 1)
    if mu <= h:
        return params.g - (params.g - 1.0) * mu / h
    if mu < j:
        return 1.0
    return 1.0 + (params.k - 1.0) * (mu - j) / (top - j)


def compute_weights(mu_y, mu_cb, mu_cr, bit_depth, params=DEFAULT_PARAMS):
    return JndWeights(luma_weight(mu_y, bit_depth, params),
                      chroma_weight(mu_cb, bit_depth, params),
                      chroma_weight(mu_cr, bit_depth, params),
                      mu_y, mu_cb, mu_cr)


def curve_table(bit_depth, n_points, which=LUMA, params=DEFAULT_PARAMS):
    """
    Sample a weight curve for plotting

    Args:
        bit_depth: b
        n_points: number of evenly spaced mu values over [0, 2^b - 1], >= 2
        which: 'luma' or 'chroma'

    Returns:
        list of (mu, weight)
    """
    if n_points < 2:
        raise UsageError('a curve needs at least 2 points, got %r' %
                         (n_points,))
    if which == LUMA:
        fn = luma_weight
    elif which == CHROMA:
        fn = chroma_weight
    else:
        raise UsageError('unknown curve %r' % (which,))
    mus = np.linspace(0.0, float((1 << bit_depth) - 1), n_points)
    return [(float(mu), fn(float(mu), bit_depth, params)) for mu in mus]


def normalised_curve(bit_depth, n_points, which=LUMA, params=DEFAULT_PARAMS):
    "curve_table with mu expressed as mu / 2^b."
    full = float(1 << bit_depth)
    return [(mu / full, weight)
            for mu, weight in curve_table(bit_depth, n_points, which, params)]
