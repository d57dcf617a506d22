"""
pixelpaq utils used by the facade in pq_synchronizer: run configuration,
frame ranges, atomic output files and the per-frame worker threads.
"""
from dataclasses import dataclass, field, replace
import argparse
import json
import os
import tempfile
import threading

from pixelpaq.log import debug, warn
from pixelpaq.pq_blocks import DEFAULT_CB_SIZE, SUPPORTED_CB_SIZES
from pixelpaq.pq_codec import DEFAULT_THETA, simulate_frame
from pixelpaq.pq_errors import (ConfigError, IoFailure, PixelpaqError,
                                UsageError)
from pixelpaq.pq_jnd import JndParams
from pixelpaq.pq_metrics import report
from pixelpaq.pq_quant import CTC_QPS, QP_MAX, QP_MIN, QpMode, build_qp_map
from pixelpaq.pq_yuv import (ChromaFormat, VideoSpec, count_frames,
                             write_sequence)

DEFAULT_FPS = 50.0
SIDECAR_SUFFIX = '.json'


@dataclass(frozen=True)
class RunConfig:
    input: str = None
    spec: VideoSpec = None
    cb_size: int = DEFAULT_CB_SIZE
    base_qp: int = 22
    mode: QpMode = QpMode.PIXEL_PAQ
    modes: tuple = (QpMode.PIXEL_PAQ, QpMode.IDSQ)
    qps: tuple = CTC_QPS
    exact_weights: bool = False
    scale_chroma_knees: bool = True
    deadzone_theta: float = DEFAULT_THETA
    frames: tuple = (0, None)
    out_dir: str = '.'
    emit_recon: bool = False
    emit_ssim_maps: bool = False
    fps: float = DEFAULT_FPS
    workers: int = 1
    params: JndParams = field(default=None)

    def __post_init__(self):
        if not QP_MIN <= self.base_qp <= QP_MAX:
            raise ConfigError('base QP %r outside [%d, %d]' %
                              (self.base_qp, QP_MIN, QP_MAX))
        for qp in self.qps:
            if not QP_MIN <= qp <= QP_MAX:
                raise ConfigError('QP %r outside [%d, %d]' %
                                  (qp, QP_MIN, QP_MAX))
        if self.cb_size not in SUPPORTED_CB_SIZES:
            raise ConfigError('--cb-size must be one of %s' %
                              (SUPPORTED_CB_SIZES,))
        if not 0.0 <= self.deadzone_theta < 1.0:
            raise ConfigError('dead-zone offset must lie in [0, 1), got %r' %
                              (self.deadzone_theta,))
        if self.workers < 1:
            raise ConfigError('--workers must be >= 1')
        if self.params is None:
            object.__setattr__(
                self, 'params',
                JndParams(scale_chroma_knees=self.scale_chroma_knees))

    def frame_range(self):
        "(start, stop) clamped to the sequence length."
        start, stop = self.frames
        count = self.spec.frame_count
        stop = count if stop is None else min(stop, count)
        if not 0 <= start < stop:
            raise UsageError('frame range %s is empty for a %d-frame sequence'
                             % (format_frames(self.frames), count))
        return start, stop

    def with_qp(self, qp):
        return replace(self, base_qp=qp)


def parse_frames(text):
    """
    Frame selection: 'A..B' is A (inclusive) to B (exclusive), 'A..' runs to
    the end, a single 'N' is one frame.
    """
    if text is None or text == '':
        return 0, None
    text = str(text).strip()
    try:
        if '..' in text:
            a, b = text.split('..', 1)
            start = int(a) if a else 0
            stop = int(b) if b else None
        else:
            start = int(text)
            stop = start + 1
    except ValueError:
        raise UsageError('bad frame range %r (use A..B, A.. or N)' %
                         (text,)) from None
    if start < 0 or (stop is not None and stop <= start):
        raise UsageError('bad frame range %r' % (text,))
    return start, stop


def format_frames(frames):
    start, stop = frames
    return '%d..%s' % (start, '' if stop is None else stop)


def parse_list(text, convert=str):
    if text is None:
        return ()
    if isinstance(text, (list, tuple)):
        return tuple(convert(v) for v in text)
    return tuple(convert(v.strip()) for v in str(text).split(',') if v.strip())


def pq_load_sidecar(path):
    "Read a JSON sidecar; returns {} when path is None."
    if path is None:
        return {}
    try:
        with open(path, 'r', encoding='utf8') as f:
            table = json.load(f)
    except FileNotFoundError:
        raise ConfigError('config file not found: %s' % path) from None
    except (OSError, ValueError) as e:
        raise ConfigError('cannot read config %s: %s' % (path, e)) from None
    if not isinstance(table, dict):
        raise ConfigError('config %s must hold a JSON object' % path)
    return table


def sidecar_for(input_path):
    "`<input>.json` next to the raw file, when it exists."
    if not input_path:
        return None
    candidate = input_path + SIDECAR_SUFFIX
    return candidate if os.path.isfile(candidate) else None


# sidecar key -> argparse dest
SIDECAR_KEYS = {
    'width': 'width',
    'height': 'height',
    'bit_depth': 'bit_depth',
    'chroma_format': 'chroma',
    'frame_count': 'frame_count',
    'cb_size': 'cb_size',
    'base_qp': 'qp',
    'mode': 'mode',
    'exact_weights': 'exact_weights',
    'scale_chroma_knees': 'knee_scaling',
    'deadzone_theta': 'theta',
    'frames': 'frames',
    'fps': 'fps',
}

CONFIG_DEFAULTS = {
    'input': None,
    'width': None,
    'height': None,
    'bit_depth': 8,
    'chroma': '420',
    'frame_count': None,
    'cb_size': DEFAULT_CB_SIZE,
    'qp': 22,
    'mode': QpMode.PIXEL_PAQ.value,
    'modes': None,
    'qps': None,
    'exact_weights': False,
    'knee_scaling': True,
    'theta': DEFAULT_THETA,
    'frames': None,
    'out': '.',
    'emit_recon': False,
    'emit_ssim_maps': False,
    'fps': DEFAULT_FPS,
    'workers': 1,
}


def pq_merge_sidecar(args, table):
    """
    Fill the arguments the command line left unset (None) from the sidecar
    table, then from CONFIG_DEFAULTS. Flags always win over the sidecar.
    """
    for key, value in table.items():
        dest = SIDECAR_KEYS.get(key)
        if dest is None:
            warn('ignoring unknown config key %r\n' % key)
            continue
        if getattr(args, dest, None) is None:
            setattr(args, dest, value)
    for dest, value in CONFIG_DEFAULTS.items():
        if getattr(args, dest, None) is None:
            setattr(args, dest, value)
    return args


def pq_load_config(path=None, **overrides):
    """
    Build a RunConfig from a JSON config file plus keyword overrides

    Args:
        path: JSON file with the sidecar keys, or None
        overrides: argparse-style names (input, width, qp, mode, out, ...)

    Returns:
        RunConfig
    """
    args = argparse.Namespace(**overrides)
    if path is None:
        path = sidecar_for(overrides.get('input'))
    return pq_build_config(pq_merge_sidecar(args, pq_load_sidecar(path)))


def _switch(name, value):
    "JSON booleans only; a string such as 'false' is not a switch."
    if not isinstance(value, bool):
        raise ConfigError('%s must be true or false, got %r' % (name, value))
    return value


def pq_build_config(args):
    """
    Turn parsed CLI arguments (already merged with the sidecar defaults) into
    a RunConfig. Geometry is optional for commands that do not read video.
    """
    spec = None
    if getattr(args, 'width', None) and getattr(args, 'height', None):
        try:
            spec = VideoSpec(int(args.width), int(args.height),
                             int(args.bit_depth),
                             ChromaFormat.parse(args.chroma),
                             int(args.frame_count or 1))
        except PixelpaqError:
            raise
        except (TypeError, ValueError) as e:
            raise ConfigError('bad video geometry: %s' % e) from None
        input_path = getattr(args, 'input', None)
        if not args.frame_count and input_path:
            spec = spec.with_frame_count(count_frames(input_path, spec))
    try:
        return RunConfig(
            input=getattr(args, 'input', None),
            spec=spec,
            cb_size=int(args.cb_size),
            base_qp=int(args.qp),
            mode=QpMode.parse(args.mode),
            modes=parse_list(getattr(args, 'modes', None), QpMode.parse) or
            (QpMode.PIXEL_PAQ, QpMode.IDSQ),
            qps=parse_list(getattr(args, 'qps', None), int) or CTC_QPS,
            exact_weights=_switch('exact_weights', args.exact_weights),
            scale_chroma_knees=_switch('scale_chroma_knees',
                                       args.knee_scaling),
            deadzone_theta=float(args.theta),
            frames=parse_frames(getattr(args, 'frames', None)),
            out_dir=args.out,
            emit_recon=bool(getattr(args, 'emit_recon', False)),
            emit_ssim_maps=bool(getattr(args, 'emit_ssim_maps', False)),
            fps=float(args.fps),
            workers=int(args.workers),
        )
    except (TypeError, ValueError) as e:
        if isinstance(e, PixelpaqError):
            raise
        raise ConfigError('bad configuration value: %s' % e) from None


def _stage(path, data):
    "Write data to a temporary file next to path; returns the temp path."
    directory = os.path.dirname(os.path.abspath(path))
    mode = 'wb' if isinstance(data, bytes) else 'w'
    fd, tmp = tempfile.mkstemp(prefix='.pq-', dir=directory)
    try:
        with os.fdopen(fd, mode, **({} if mode == 'wb' else
                                    {'encoding': 'utf8', 'newline': ''})) as f:
            f.write(data)
    except BaseException:
        os.unlink(tmp)
        raise
    return tmp


def pq_write_group(outputs):
    """
    Write several (path, data) outputs as one unit: every payload is staged
    in a temporary file first, and no target is replaced unless all of
    them were staged.

    Returns:
        list of written paths
    """
    outputs = list(outputs)
    staged = []
    path = None
    try:
        for path, data in outputs:
            staged.append(_stage(path, data))
        for tmp, (path, _) in zip(list(staged), outputs):
            os.replace(tmp, path)
            staged.remove(tmp)
    except OSError as e:
        for tmp in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)
        raise IoFailure('cannot write %s: %s' % (path, e)) from e
    for path, _ in outputs:
        debug('wrote %s\n' % path)
    return [path for path, _ in outputs]


def pq_write_atomic(path, data):
    """
    Write text or bytes to `path` through a temporary file in the same
    directory, so a failed run never leaves a partial output behind.
    """
    return pq_write_group([(path, data)])[0]


def pq_write_sequence_atomic(path, spec, frames):
    "write_sequence through a temporary file; returns the frame count."
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix='.pq-', dir=directory)
    os.close(fd)
    try:
        written = write_sequence(tmp, spec, frames)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    debug('wrote %s (%d frames)\n' % (path, written))
    return written


def pq_init_directory(path):
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        raise IoFailure('cannot create output directory %s: %s' %
                        (path, e)) from e
    return path


@dataclass
class FrameOutcome:
    index: int
    qp_map: object
    sim: object = None
    metrics: object = None


def pq_process_frame(index, frame, grid, config, modes, simulate=True,
                     with_maps=False):
    "Analyse (and optionally simulate) one frame under every mode."
    outcomes = {}
    for mode in modes:
        qp_map = build_qp_map(frame, grid, config.base_qp, mode,
                              config.params, config.exact_weights)
        outcome = FrameOutcome(index, qp_map)
        if simulate:
            outcome.sim = simulate_frame(frame, grid, qp_map,
                                         theta=config.deadzone_theta)
            outcome.metrics = report(frame, outcome.sim.recon,
                                     grid.spec.bit_depth, with_maps)
        outcomes[mode] = outcome
    return outcomes


# A thread that analyses and simulates one frame; the result (or the error)
# is kept on the thread object and collected by the caller after join().
class pq_Frame_Thread(threading.Thread):

    def __init__(self, index, frame, grid, config, modes, simulate,
                 with_maps):
        threading.Thread.__init__(self, name='pq-frame-%d' % index)
        self.index = index
        self.frame = frame
        self.grid = grid
        self.config = config
        self.modes = modes
        self.simulate = simulate
        self.with_maps = with_maps
        self.result = None
        self.error = None

    def run(self):
        try:
            self.result = pq_process_frame(self.index, self.frame, self.grid,
                                           self.config, self.modes,
                                           self.simulate, self.with_maps)
        except Exception as e:
            self.error = e


def pq_run_frames(source, grid, config, modes, simulate=True,
                  with_maps=False):
    """
    Process the configured frame range, `config.workers` frames at a time.
    Frames are read by the calling thread only; results come back in frame
    order whatever order the workers finish in.
    """
    start, stop = config.frame_range()
    results = []
    index = start
    while index < stop:
        batch = range(index, min(index + config.workers, stop))
        threads = [pq_Frame_Thread(i, source.read_frame(i), grid, config,
                                   modes, simulate, with_maps) for i in batch]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        for t in threads:
            if t.error is not None:
                raise t.error
            results.append(t.result)
        debug('processed frames %d..%d\n' % (batch[0], batch[-1]))
        index = batch[-1] + 1
    return results
