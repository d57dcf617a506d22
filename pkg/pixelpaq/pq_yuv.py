"""
Raw planar YCbCr sequences.

Layout per frame: the Y plane, then Cb, then Cr, each row-major. 8-bit data
uses one byte per sample; deeper data uses 16-bit little-endian words with
the sample in the low bits. Samples above 2^b - 1 are rejected, never clamped.
"""

from dataclasses import dataclass
from enum import Enum
import os

import numpy as np

from pixelpaq.log import debug
from pixelpaq.pq_errors import (FileNotFound, IndexOutOfRange, IoFailure,
                                InvalidVideoSpec, SampleOutOfRange,
                                SizeMismatch, SpecMismatch)

SUPPORTED_BIT_DEPTHS = (8, 10, 12, 16)


class ChromaFormat(Enum):
    C420 = '420'
    C422 = '422'
    C444 = '444'

    @property
    def subsampling(self):
        "(horizontal, vertical) chroma subsampling factors."
        return {
            ChromaFormat.C420: (2, 2),
            ChromaFormat.C422: (2, 1),
            ChromaFormat.C444: (1, 1),
        }[self]

    @classmethod
    def parse(cls, value):
        if isinstance(value, ChromaFormat):
            return value
        text = str(value).strip().upper().replace(':', '')
        if text.startswith('C'):
            text = text[1:]
        for fmt in cls:
            if fmt.value == text:
                return fmt
        raise InvalidVideoSpec('unknown chroma format %r (use 420, 422 or 444)'
                               % (value,))


class Channel(Enum):
    Y = 'Y'
    CB = 'Cb'
    CR = 'Cr'


CHANNELS = (Channel.Y, Channel.CB, Channel.CR)


@dataclass(frozen=True)
class VideoSpec:
    width: int
    height: int
    bit_depth: int = 8
    chroma_format: ChromaFormat = ChromaFormat.C420
    frame_count: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'chroma_format',
                           ChromaFormat.parse(self.chroma_format))
        if self.width <= 0 or self.height <= 0:
            raise InvalidVideoSpec('frame dimensions must be positive, got '
                                   '%dx%d' % (self.width, self.height))
        if self.bit_depth not in SUPPORTED_BIT_DEPTHS:
            raise InvalidVideoSpec('bit depth %r not in %s' %
                                   (self.bit_depth, SUPPORTED_BIT_DEPTHS))
        sx, sy = self.chroma_format.subsampling
        if self.width % sx or self.height % sy:
            raise InvalidVideoSpec(
                '%dx%d is not a valid %s frame size (subsampled dimensions '
                'must be even)' % (self.width, self.height,
                                   self.chroma_format.value))
        if self.frame_count < 1:
            raise InvalidVideoSpec('frame_count must be >= 1, got %r' %
                                   (self.frame_count,))

    @property
    def max_value(self):
        return (1 << self.bit_depth) - 1

    @property
    def container_bytes(self):
        return 1 if self.bit_depth == 8 else 2

    @property
    def dtype(self):
        return np.dtype(np.uint8) if self.bit_depth == 8 else np.dtype('<u2')

    @property
    def chroma_width(self):
        return self.width // self.chroma_format.subsampling[0]

    @property
    def chroma_height(self):
        return self.height // self.chroma_format.subsampling[1]

    def plane_dims(self, channel):
        "(width, height) of the plane carrying `channel`."
        if channel is Channel.Y:
            return self.width, self.height
        return self.chroma_width, self.chroma_height

    @property
    def luma_samples(self):
        return self.width * self.height

    @property
    def chroma_samples(self):
        return self.chroma_width * self.chroma_height

    @property
    def frame_samples(self):
        return self.luma_samples + 2 * self.chroma_samples

    @property
    def frame_byte_size(self):
        return self.frame_samples * self.container_bytes

    @property
    def sequence_byte_size(self):
        return self.frame_count * self.frame_byte_size

    def with_frame_count(self, frame_count):
        return VideoSpec(self.width, self.height, self.bit_depth,
                         self.chroma_format, frame_count)

    def to_dict(self):
        return {
            'width': self.width,
            'height': self.height,
            'bit_depth': self.bit_depth,
            'chroma_format': self.chroma_format.value,
            'frame_count': self.frame_count,
        }

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(int(data['width']), int(data['height']),
                       int(data.get('bit_depth', 8)),
                       ChromaFormat.parse(data.get('chroma_format', '420')),
                       int(data.get('frame_count', 1)))
        except KeyError as e:
            raise InvalidVideoSpec('video spec is missing %s' % e) from None


def frame_byte_size(spec):
    return spec.frame_byte_size


def sequence_byte_size(spec):
    return spec.sequence_byte_size


def raw_kbps(spec, fps):
    """
    Uncompressed bitrate of a sequence in Kbps

    Args:
        spec: VideoSpec of the sequence
        fps: frames per second

    Returns:
        (luma + 2 x chroma samples) x bit depth x fps / 1000; container
        padding bits of the 16-bit words are not counted
    """
    return spec.frame_samples * spec.bit_depth * fps / 1000.0


@dataclass(frozen=True)
class Plane:
    channel: Channel
    width: int
    height: int
    samples: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.samples)
        if arr.ndim == 1:
            if arr.size != self.width * self.height:
                raise SpecMismatch(
                    '%s plane holds %d samples, expected %dx%d' %
                    (self.channel.value, arr.size, self.width, self.height))
            arr = arr.reshape(self.height, self.width)
        if arr.shape != (self.height, self.width):
            raise SpecMismatch('%s plane shape %s, expected (%d, %d)' %
                               (self.channel.value, arr.shape, self.height,
                                self.width))
        arr = arr.astype(np.int64, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, 'samples', arr)

    def check_range(self, bit_depth):
        "Raise SampleOutOfRange on the first sample outside [0, 2^b - 1]."
        max_value = (1 << bit_depth) - 1
        bad = np.flatnonzero((self.samples < 0) | (self.samples > max_value))
        if bad.size:
            y, x = divmod(int(bad[0]), self.width)
            raise SampleOutOfRange(self.channel.value, (x, y),
                                   int(self.samples[y, x]), max_value)

    def __eq__(self, other):
        if not isinstance(other, Plane):
            return NotImplemented
        return (self.channel == other.channel
                and self.samples.shape == other.samples.shape
                and bool(np.array_equal(self.samples, other.samples)))

    __hash__ = None


@dataclass(frozen=True, eq=True)
class Frame:
    y: Plane
    cb: Plane
    cr: Plane

    def plane(self, channel):
        return {Channel.Y: self.y, Channel.CB: self.cb,
                Channel.CR: self.cr}[channel]

    def planes(self):
        return self.y, self.cb, self.cr

    def matches(self, spec):
        return all((p.width, p.height) == spec.plane_dims(p.channel)
                   for p in self.planes())

    def check(self, spec):
        "Raise SpecMismatch or SampleOutOfRange if the frame does not fit spec."
        for p in self.planes():
            if (p.width, p.height) != spec.plane_dims(p.channel):
                raise SpecMismatch(
                    '%s plane is %dx%d, %s expects %dx%d' %
                    ((p.channel.value, p.width, p.height,
                      spec.chroma_format.value) + spec.plane_dims(p.channel)))
            p.check_range(spec.bit_depth)

    __hash__ = None


def make_frame(spec, y, cb, cr):
    "Build a Frame from three 2-D arrays and validate it against spec."
    frame = Frame(
        Plane(Channel.Y, spec.width, spec.height, y),
        Plane(Channel.CB, spec.chroma_width, spec.chroma_height, cb),
        Plane(Channel.CR, spec.chroma_width, spec.chroma_height, cr),
    )
    frame.check(spec)
    return frame


def constant_frame(spec, y_value, cb_value=None, cr_value=None):
    cb_value = y_value if cb_value is None else cb_value
    cr_value = y_value if cr_value is None else cr_value
    luma = (spec.height, spec.width)
    chroma = (spec.chroma_height, spec.chroma_width)
    return make_frame(spec, np.full(luma, y_value), np.full(chroma, cb_value),
                      np.full(chroma, cr_value))


def count_frames(path, spec):
    """
    Infer the number of frames in a raw file from its size

    Raises SizeMismatch when the file does not hold a whole number of frames.
    """
    path = str(path)
    if not os.path.isfile(path):
        raise FileNotFound(path)
    size = os.path.getsize(path)
    frames, rest = divmod(size, spec.frame_byte_size)
    if rest or frames == 0:
        expected = max(frames, 1) * spec.frame_byte_size
        raise SizeMismatch(expected, size)
    return frames


class FrameSource:
    """Single-consumer reader over a raw planar YCbCr file.

       Frames returned by read_frame are immutable and may be shared with
       concurrent workers; the source itself must not be."""

    def __init__(self, path, spec):
        self.path = str(path)
        self.spec = spec
        self.position = 0
        self._fh = None
        try:
            self._fh = open(self.path, 'rb')
        except OSError as e:
            raise IoFailure('cannot open %s for reading: %s' %
                            (self.path, e)) from e

    def __len__(self):
        return self.spec.frame_count

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self):
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def read_frame(self, index):
        spec = self.spec
        if not 0 <= index < spec.frame_count:
            raise IndexOutOfRange(index, spec.frame_count)
        self._fh.seek(index * spec.frame_byte_size)
        raw = np.fromfile(self._fh, dtype=spec.dtype, count=spec.frame_samples)
        if raw.size != spec.frame_samples:
            raise IoFailure('short read of frame %d from %s' %
                            (index, self.path))
        self.position = index + 1

        luma, chroma = spec.luma_samples, spec.chroma_samples
        planes = (raw[:luma], raw[luma:luma + chroma], raw[luma + chroma:])
        frame = Frame(*(Plane(channel, *spec.plane_dims(channel), samples)
                        for channel, samples in zip(CHANNELS, planes)))
        frame.check(spec)
        return frame

    def frames(self, start=0, stop=None):
        "Yield (index, frame) over [start, stop)."
        stop = self.spec.frame_count if stop is None else stop
        for index in range(start, stop):
            yield index, self.read_frame(index)

    def __iter__(self):
        for _, frame in self.frames():
            yield frame


def open_sequence(path, spec):
    """
    Open a raw sequence for reading

    Args:
        path: raw planar YCbCr file
        spec: VideoSpec describing it; frame_count must match the file

    Returns:
        FrameSource positioned at frame 0
    """
    path = str(path)
    if not os.path.isfile(path):
        raise FileNotFound(path)
    actual = os.path.getsize(path)
    if actual != spec.sequence_byte_size:
        raise SizeMismatch(spec.sequence_byte_size, actual)
    debug('open %s: %d frames of %d bytes\n' %
          (path, spec.frame_count, spec.frame_byte_size))
    return FrameSource(path, spec)


def read_frame(source, index):
    return source.read_frame(index)


class FrameSink:
    "Writer producing the exact byte layout FrameSource reads."

    def __init__(self, path, spec):
        self.path = str(path)
        self.spec = spec
        self.frames_written = 0
        try:
            self._fh = open(self.path, 'wb')
        except OSError as e:
            raise IoFailure('cannot open %s for writing: %s' %
                            (self.path, e)) from e

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self):
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def write_frame(self, frame):
        frame.check(self.spec)
        dtype = self.spec.dtype
        try:
            for plane in frame.planes():
                self._fh.write(plane.samples.astype(dtype).tobytes())
        except OSError as e:
            raise IoFailure('write to %s failed: %s' % (self.path, e)) from e
        self.frames_written += 1


def open_sink(path, spec):
    return FrameSink(path, spec)


def write_frame(sink, frame):
    sink.write_frame(frame)


def write_sequence(path, spec, frames):
    "Write every frame of `frames` to `path`; returns the number written."
    with open_sink(path, spec) as sink:
        for frame in frames:
            sink.write_frame(frame)
        return sink.frames_written
