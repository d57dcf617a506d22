import numpy as np
import pytest

from pixelpaq.pq_synthetic import (acceptance_spec, synthetic_frames,
                                   write_synthetic)
from pixelpaq.pq_yuv import ChromaFormat, VideoSpec, make_frame, write_sequence


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_frame(spec, rng, low=0, high=None):
    "Uniform random samples over [low, high] (default the full range)."
    high = spec.max_value if high is None else high
    luma = (spec.height, spec.width)
    chroma = (spec.chroma_height, spec.chroma_width)
    return make_frame(spec, rng.integers(low, high + 1, luma),
                      rng.integers(low, high + 1, chroma),
                      rng.integers(low, high + 1, chroma))


@pytest.fixture
def make_yuv(tmp_path):
    "Factory: write frames to a raw file and return (path, spec)."
    def _make(spec, frames, name='seq.yuv'):
        path = tmp_path / name
        frames = list(frames)
        write_sequence(path, spec.with_frame_count(len(frames)), frames)
        return str(path), spec.with_frame_count(len(frames))
    return _make


@pytest.fixture
def small_spec():
    "4:4:4 10-bit, 2x2 CBs of 64 with a partial last row and column."
    return VideoSpec(96, 80, 10, ChromaFormat.C444, 3)


@pytest.fixture
def small_sequence(tmp_path, small_spec):
    path = tmp_path / 'small_96x80_444_10b.yuv'
    write_synthetic(str(path), small_spec, seed=7)
    return str(path), small_spec


@pytest.fixture(scope='session')
def acceptance_sequence(tmp_path_factory):
    "The 416x240 4:4:4 10-bit 32-frame synthetic sequence, written once."
    spec = acceptance_spec(32)
    path = tmp_path_factory.mktemp('acceptance') / 'synthetic_416x240.yuv'
    write_synthetic(str(path), spec)
    return str(path), spec


@pytest.fixture
def synthetic_frame_444():
    spec = VideoSpec(128, 64, 10, ChromaFormat.C444, 1)
    return spec, next(synthetic_frames(spec, seed=3))
