import numpy as np
import pytest

from conftest import random_frame
from pixelpaq.pq_errors import (FileNotFound, IndexOutOfRange,
                                InvalidVideoSpec, IoFailure, SampleOutOfRange,
                                SizeMismatch, SpecMismatch)
from pixelpaq.pq_yuv import (ChromaFormat, Channel, FrameSink, FrameSource,
                             VideoSpec, constant_frame, count_frames,
                             frame_byte_size, make_frame, open_sequence,
                             raw_kbps, sequence_byte_size, write_sequence)


def test_frame_byte_size_420_8bit():
    spec = VideoSpec(1920, 1080, 8, ChromaFormat.C420)
    assert frame_byte_size(spec) == 3110400


def test_frame_byte_size_444_10bit():
    spec = VideoSpec(1920, 1080, 10, ChromaFormat.C444)
    assert frame_byte_size(spec) == 12441600


def test_sequence_size_matches_six_point_nine_five_gib():
    spec = VideoSpec(1920, 1080, 10, ChromaFormat.C444, 600)
    assert sequence_byte_size(spec) == 7464960000
    assert sequence_byte_size(spec) / float(1 << 30) == pytest.approx(6.95,
                                                                      rel=0.01)


def test_raw_kbps_counts_bit_depth_not_container():
    spec = VideoSpec(1920, 1080, 10, ChromaFormat.C444)
    assert raw_kbps(spec, 50) == 1920 * 1080 * 3 * 10 * 50 / 1000.0


@pytest.mark.parametrize('fmt, dims', [
    (ChromaFormat.C444, (64, 48)),
    (ChromaFormat.C422, (32, 48)),
    (ChromaFormat.C420, (32, 24)),
])
def test_chroma_plane_dims(fmt, dims):
    spec = VideoSpec(64, 48, 8, fmt)
    assert spec.plane_dims(Channel.CB) == dims
    assert spec.plane_dims(Channel.CR) == dims


@pytest.mark.parametrize('kwargs', [
    dict(width=0, height=16),
    dict(width=15, height=16, chroma_format='420'),
    dict(width=16, height=15, chroma_format='420'),
    dict(width=16, height=16, bit_depth=9),
    dict(width=16, height=16, frame_count=0),
])
def test_invalid_spec(kwargs):
    with pytest.raises(InvalidVideoSpec):
        VideoSpec(**kwargs)


def test_odd_height_is_fine_for_422():
    spec = VideoSpec(16, 15, 8, ChromaFormat.C422)
    assert spec.plane_dims(Channel.CB) == (8, 15)


def test_all_zero_file_reads_as_zero_frame(tmp_path):
    spec = VideoSpec(32, 16, 8, ChromaFormat.C420)
    path = tmp_path / 'zero.yuv'
    path.write_bytes(b'\x00' * spec.frame_byte_size)
    with open_sequence(path, spec) as source:
        frame = source.read_frame(0)
    for plane in frame.planes():
        assert not plane.samples.any()


def test_10bit_words_of_1023(tmp_path):
    spec = VideoSpec(16, 16, 10, ChromaFormat.C444)
    path = tmp_path / 'max.yuv'
    path.write_bytes(np.full(spec.frame_samples, 1023, '<u2').tobytes())
    with open_sequence(path, spec) as source:
        frame = source.read_frame(0)
    assert all((p.samples == 1023).all() for p in frame.planes())


def test_10bit_word_1024_is_out_of_range(tmp_path):
    spec = VideoSpec(16, 16, 10, ChromaFormat.C420)
    words = np.zeros(spec.frame_samples, '<u2')
    words[spec.luma_samples + 5] = 1024
    path = tmp_path / 'bad.yuv'
    path.write_bytes(words.tobytes())
    with open_sequence(path, spec) as source:
        with pytest.raises(SampleOutOfRange) as info:
            source.read_frame(0)
    assert info.value.plane == 'Cb'
    assert info.value.position == (5, 0)
    assert info.value.value == 1024


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFound):
        open_sequence(tmp_path / 'nope.yuv', VideoSpec(16, 16))


def test_unreadable_path_is_an_io_failure(tmp_path):
    with pytest.raises(IoFailure):
        FrameSource(tmp_path, VideoSpec(16, 16))


def test_truncated_file(tmp_path):
    spec = VideoSpec(16, 16, 8, ChromaFormat.C420, 2)
    path = tmp_path / 'short.yuv'
    path.write_bytes(b'\x10' * (spec.sequence_byte_size - 1))
    with pytest.raises(SizeMismatch) as info:
        open_sequence(path, spec)
    assert info.value.expected == spec.sequence_byte_size
    assert info.value.actual == spec.sequence_byte_size - 1


def test_index_out_of_range(tmp_path, rng):
    spec = VideoSpec(16, 16, 8, ChromaFormat.C420, 1)
    path = tmp_path / 'one.yuv'
    write_sequence(path, spec, [random_frame(spec, rng)])
    with open_sequence(path, spec) as source:
        with pytest.raises(IndexOutOfRange):
            source.read_frame(1)


@pytest.mark.parametrize('bit_depth', [8, 10, 16])
@pytest.mark.parametrize('fmt', list(ChromaFormat))
def test_write_then_read(tmp_path, rng, bit_depth, fmt):
    spec = VideoSpec(32, 16, bit_depth, fmt, 2)
    frames = [random_frame(spec, rng) for _ in range(2)]
    path = tmp_path / 'rt.yuv'
    assert write_sequence(path, spec, frames) == 2
    assert path.stat().st_size == spec.sequence_byte_size
    with open_sequence(path, spec) as source:
        assert list(source) == frames
        assert [i for i, _ in source.frames(1)] == [1]


def test_all_max_16bit_words(tmp_path):
    spec = VideoSpec(8, 8, 16, ChromaFormat.C444)
    path = tmp_path / 'max16.yuv'
    write_sequence(path, spec, [constant_frame(spec, 65535)])
    data = path.read_bytes()
    assert data[:2 * spec.luma_samples] == b'\xff\xff' * spec.luma_samples


def test_sink_rejects_mismatched_frame(tmp_path, rng):
    spec = VideoSpec(32, 16, 8, ChromaFormat.C420)
    other = VideoSpec(32, 16, 8, ChromaFormat.C444)
    with FrameSink(tmp_path / 'x.yuv', spec) as sink:
        with pytest.raises(SpecMismatch):
            sink.write_frame(random_frame(other, rng))


def test_make_frame_rejects_wrong_shape():
    spec = VideoSpec(16, 16, 8, ChromaFormat.C420)
    with pytest.raises(SpecMismatch):
        make_frame(spec, np.zeros((16, 16)), np.zeros((16, 16)),
                   np.zeros((8, 8)))


def test_count_frames(tmp_path, rng):
    spec = VideoSpec(16, 16, 8, ChromaFormat.C420)
    path = tmp_path / 'three.yuv'
    write_sequence(path, spec, [random_frame(spec, rng) for _ in range(3)])
    assert count_frames(path, spec) == 3
    with open(path, 'ab') as f:
        f.write(b'\x00')
    with pytest.raises(SizeMismatch):
        count_frames(path, spec)


def test_planes_are_read_only(rng):
    spec = VideoSpec(16, 16)
    frame = random_frame(spec, rng)
    with pytest.raises(ValueError):
        frame.y.samples[0, 0] = 1
