"""
pixelpaq error hierarchy.

Three families map onto the CLI exit status: configuration/usage problems,
IO problems and data-validation problems. Every concrete error keeps the
values that triggered it as attributes so callers can report them.
"""

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_DATA = 4


class PixelpaqError(Exception):
    "Base class of every error raised by pixelpaq."
    exit_code = 1


class ConfigError(PixelpaqError):
    exit_code = EXIT_CONFIG


class PixelpaqIOError(PixelpaqError):
    exit_code = EXIT_IO


class DataError(PixelpaqError, ValueError):
    exit_code = EXIT_DATA


# -- configuration -----------------------------------------------------------

class UsageError(ConfigError):
    pass


class InvalidVideoSpec(ConfigError):
    pass


# -- IO ----------------------------------------------------------------------

class FileNotFound(PixelpaqIOError):

    def __init__(self, path):
        self.path = str(path)
        super().__init__('file not found: %s' % self.path)


class SizeMismatch(PixelpaqIOError):
    "The file size does not match the geometry it was opened with."

    def __init__(self, expected, actual):
        self.expected = expected
        self.actual = actual
        super().__init__('file size mismatch: expected %d bytes, got %d '
                         '(wrong spec or truncated file)' % (expected, actual))


class IoFailure(PixelpaqIOError):
    pass


# -- data validation ---------------------------------------------------------

class IndexOutOfRange(DataError):

    def __init__(self, index, count):
        self.index = index
        self.count = count
        super().__init__('frame index %d outside [0, %d)' % (index, count))


class SampleOutOfRange(DataError):

    def __init__(self, plane, position, value, max_value):
        self.plane = plane
        self.position = position
        self.value = value
        self.max_value = max_value
        super().__init__('%s sample %d at (x=%d, y=%d) exceeds %d '
                         '(corrupt data or wrong bit depth)' %
                         (plane, value, position[0], position[1], max_value))


class SpecMismatch(DataError):
    pass


class UnsupportedBlockSize(DataError):

    def __init__(self, cb_size, supported):
        self.cb_size = cb_size
        super().__init__('unsupported CB size %r, expected one of %s' %
                         (cb_size, sorted(supported)))


class ChannelMismatch(DataError):
    pass


class EmptyBlock(DataError):
    pass


class MeanOutOfRange(DataError):

    def __init__(self, mu, bit_depth):
        self.mu = mu
        self.bit_depth = bit_depth
        super().__init__('mean %r outside [0, %d] for %d-bit data' %
                         (mu, (1 << bit_depth) - 1, bit_depth))


class QpOutOfRange(DataError):

    def __init__(self, qp):
        self.qp = qp
        super().__init__('QP %r outside [0, 51]' % (qp,))


class NonPositiveQStep(DataError):

    def __init__(self, qstep):
        self.qstep = qstep
        super().__init__('QStep must be positive, got %r' % (qstep,))


class BadBlockShape(DataError):
    pass


class GridMapMismatch(DataError):
    pass


class DimsMismatch(DataError):
    pass


class PlaneTooSmall(DataError):
    pass
