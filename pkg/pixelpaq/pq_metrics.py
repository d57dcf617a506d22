"""
Per-channel PSNR and SSIM.

SSIM uses the usual configuration: 11x11 Gaussian window with sigma 1.5,
K1 = 0.01, K2 = 0.03, dynamic range L = 2^b - 1. The index map holds one
value per window position that fits entirely inside the plane; the frame
score is its mean. Subsampled chroma planes are measured at their own size.
"""

from dataclasses import dataclass, field
import io
import math

import numpy as np
from PIL import Image
from scipy import ndimage

from pixelpaq.log import debug
from pixelpaq.pq_errors import DimsMismatch, PlaneTooSmall
from pixelpaq.pq_yuv import CHANNELS

WINDOW_SIZE = 11
WINDOW_SIGMA = 1.5
K1 = 0.01
K2 = 0.03

INF_MARKER = 'inf'


def gaussian_window(size=WINDOW_SIZE, sigma=WINDOW_SIGMA):
    "Normalised 1-D Gaussian; the 2-D window is its outer product."
    half = (size - 1) / 2.0
    x = np.arange(size, dtype=np.float64) - half
    g = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return g / g.sum()


def _as_array(plane):
    return np.asarray(getattr(plane, 'samples', plane), dtype=np.float64)


def _check_dims(a, b):
    if a.shape != b.shape:
        raise DimsMismatch('planes differ in size: %s vs %s' %
                           (a.shape, b.shape))


def psnr(orig, recon, bit_depth):
    """
    PSNR in dB between two planes

    Returns math.inf when the planes are identical.
    """
    a, b = _as_array(orig), _as_array(recon)
    _check_dims(a, b)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return math.inf
    peak = float((1 << bit_depth) - 1)
    return 10.0 * math.log10(peak * peak / mse)


def _filter_valid(img, window):
    "Separable Gaussian filtering restricted to fully covered positions."
    out = ndimage.correlate1d(img, window, axis=0, mode='constant')
    out = ndimage.correlate1d(out, window, axis=1, mode='constant')
    r = len(window) // 2
    return out[r:img.shape[0] - r, r:img.shape[1] - r]


def ssim(orig, recon, bit_depth):
    """
    Structural similarity of two planes

    Returns:
        (mean SSIM, index map)
    """
    a, b = _as_array(orig), _as_array(recon)
    _check_dims(a, b)
    if a.shape[0] < WINDOW_SIZE or a.shape[1] < WINDOW_SIZE:
        raise PlaneTooSmall('SSIM needs planes of at least %dx%d, got %s' %
                            (WINDOW_SIZE, WINDOW_SIZE, a.shape))
    dynamic_range = float((1 << bit_depth) - 1)
    c1 = (K1 * dynamic_range) ** 2
    c2 = (K2 * dynamic_range) ** 2
    window = gaussian_window()

    mu_a = _filter_valid(a, window)
    mu_b = _filter_valid(b, window)
    mu_aa, mu_bb, mu_ab = mu_a * mu_a, mu_b * mu_b, mu_a * mu_b
    sigma_aa = _filter_valid(a * a, window) - mu_aa
    sigma_bb = _filter_valid(b * b, window) - mu_bb
    sigma_ab = _filter_valid(a * b, window) - mu_ab

    index_map = (((2.0 * mu_ab + c1) * (2.0 * sigma_ab + c2)) /
                 ((mu_aa + mu_bb + c1) * (sigma_aa + sigma_bb + c2)))
    return float(index_map.mean()), index_map


@dataclass
class MetricsReport:
    """
    PSNR and SSIM of the three channels of one frame, or their average.

    An SSIM value is None when the plane is smaller than the SSIM window.
    """
    psnr_y: float
    psnr_cb: float
    psnr_cr: float
    ssim_y: float
    ssim_cb: float
    ssim_cr: float
    ssim_maps: dict = field(default=None, repr=False)

    def psnr(self, channel):
        return getattr(self, 'psnr_' + channel.name.lower())

    def ssim(self, channel):
        return getattr(self, 'ssim_' + channel.name.lower())

    def to_dict(self):
        return {
            'psnr_y': encode_db(self.psnr_y),
            'psnr_cb': encode_db(self.psnr_cb),
            'psnr_cr': encode_db(self.psnr_cr),
            'ssim_y': self.ssim_y,
            'ssim_cb': self.ssim_cb,
            'ssim_cr': self.ssim_cr,
        }


def encode_db(value):
    "JSON-safe PSNR: infinity becomes the string 'inf'."
    return INF_MARKER if math.isinf(value) else value


def report(orig, recon, bit_depth, with_maps=False):
    """
    PSNR and SSIM of every channel of a reconstructed frame

    Args:
        orig: original Frame
        recon: reconstructed Frame of the same geometry
        bit_depth: b
        with_maps: keep the SSIM index maps, keyed by Channel; channels
                   too small for SSIM have no map

    Planes smaller than the SSIM window get an SSIM of None; their PSNR is
    still measured.
    """
    values = {}
    maps = {} if with_maps else None
    for channel in CHANNELS:
        a, b = orig.plane(channel), recon.plane(channel)
        if (a.width, a.height) != (b.width, b.height):
            raise DimsMismatch('%s planes differ: %dx%d vs %dx%d' %
                               (channel.value, a.width, a.height, b.width,
                                b.height))
        try:
            mean_ssim, index_map = ssim(a, b, bit_depth)
        except PlaneTooSmall as e:
            debug('no SSIM for %s: %s\n' % (channel.value, e))
            mean_ssim, index_map = None, None
        values[channel] = (psnr(a, b, bit_depth), mean_ssim)
        if with_maps and index_map is not None:
            maps[channel] = index_map
    y, cb, cr = (values[c] for c in CHANNELS)
    return MetricsReport(y[0], cb[0], cr[0], y[1], cb[1], cr[1], maps)


def _mean_db(values):
    finite = [v for v in values if not math.isinf(v)]
    if not finite:
        return math.inf
    return math.fsum(finite) / len(finite)


def _mean_ssim(values):
    present = [v for v in values if v is not None]
    if not present:
        return None
    return math.fsum(present) / len(present)


def average_reports(reports):
    """
    Per-channel mean over frames. Frames with infinite PSNR are left out of
    the PSNR mean unless every frame is infinite; missing SSIM values are
    left out of the SSIM mean.
    """
    reports = list(reports)
    if not reports:
        raise ValueError('no reports to average')
    return MetricsReport(
        _mean_db([r.psnr_y for r in reports]),
        _mean_db([r.psnr_cb for r in reports]),
        _mean_db([r.psnr_cr for r in reports]),
        _mean_ssim([r.ssim_y for r in reports]),
        _mean_ssim([r.ssim_cb for r in reports]),
        _mean_ssim([r.ssim_cr for r in reports]),
    )


def ssim_map_image(index_map):
    "8-bit greyscale rendering: round(255 * clamp(ssim, 0, 1))."
    grey = np.floor(np.clip(index_map, 0.0, 1.0) * 255.0 + 0.5)
    return Image.fromarray(grey.astype(np.uint8))


def ssim_pgm_bytes(index_map):
    "Binary PGM (P5) payload of an SSIM index map."
    buf = io.BytesIO()
    ssim_map_image(index_map).save(buf, format='PPM')
    return buf.getvalue()
