"""
Seeded synthetic test sequences.

Each frame is a drifting set of smooth gradients with coloured noise on top
and a few saturated chroma patches, so that every part of both weight curves
is visited: dark and bright luma, chroma near 0, in the neutral band and
near the top of the range.
"""

import numpy as np

from pixelpaq.pq_yuv import (ChromaFormat, VideoSpec, make_frame,
                             write_sequence)

DEFAULT_SEED = 2024
NOISE_SIGMA = 6.0       # in 8-bit units, scaled to the bit depth
PATCH_SIZE = 48         # luma samples


def acceptance_spec(frame_count=32):
    "416x240 4:4:4 10-bit, the geometry of the mode-comparison check."
    return VideoSpec(416, 240, 10, ChromaFormat.C444, frame_count)


def _gradient(h, w, phase, top, horizontal=True):
    ramp = np.linspace(0.0, 1.0, w if horizontal else h)
    ramp = 0.5 - 0.5 * np.cos(2.0 * np.pi * (ramp + phase))
    plane = np.tile(ramp, (h, 1)) if horizontal else np.tile(ramp, (w, 1)).T
    return plane * top


def _patches(plane, rng, count, size, values):
    h, w = plane.shape
    for _ in range(count):
        y = int(rng.integers(0, max(1, h - size)))
        x = int(rng.integers(0, max(1, w - size)))
        plane[y:y + size, x:x + size] = values[int(rng.integers(len(values)))]


def synthetic_frame(spec, index, rng):
    """
    One frame of the synthetic sequence

    Args:
        spec: VideoSpec of the sequence
        index: frame number, drives the gradient drift
        rng: numpy Generator shared by the whole sequence
    """
    top = float(spec.max_value)
    scale = top / 255.0
    ch, cw = spec.chroma_height, spec.chroma_width
    sx, sy = spec.chroma_format.subsampling
    phase = index / 64.0

    y = _gradient(spec.height, spec.width, phase, top)
    cb = _gradient(ch, cw, 0.25 + phase, top, horizontal=False)
    cr = _gradient(ch, cw, 0.6 - phase, top)

    y += rng.normal(0.0, NOISE_SIGMA * scale, y.shape)
    # colour noise shares part of its component with luma
    shared = rng.normal(0.0, NOISE_SIGMA * scale, (ch, cw))
    cb += 0.5 * shared + rng.normal(0.0, NOISE_SIGMA * scale, (ch, cw))
    cr -= 0.5 * shared - rng.normal(0.0, NOISE_SIGMA * scale, (ch, cw))

    saturated = (0.0, 16.0 * scale, top - 16.0 * scale, top)
    _patches(y, rng, 2, PATCH_SIZE, saturated)
    chroma_patch = max(4, PATCH_SIZE // max(sx, sy))
    _patches(cb, rng, 3, chroma_patch, saturated)
    _patches(cr, rng, 3, chroma_patch, saturated)

    planes = [np.clip(np.floor(p + 0.5), 0, top).astype(np.int64)
              for p in (y, cb, cr)]
    return make_frame(spec, *planes)


def synthetic_frames(spec, seed=DEFAULT_SEED):
    "Yield spec.frame_count frames; the same seed gives the same frames."
    rng = np.random.default_rng(seed)
    for index in range(spec.frame_count):
        yield synthetic_frame(spec, index, rng)


def write_synthetic(path, spec, seed=DEFAULT_SEED):
    "Write a synthetic raw sequence; returns the number of frames written."
    return write_sequence(path, spec, synthetic_frames(spec, seed))
