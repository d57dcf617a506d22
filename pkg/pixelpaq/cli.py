"""
Command-line interface for pixelpaq.

    pixelpaq analyze  --input seq.yuv --width 416 --height 240 --chroma 444 \\
                      --bit-depth 10 --qp 22 --out out/
    pixelpaq simulate --input seq.yuv --mode idsq --emit-recon --out out/
    pixelpaq compare  --input seq.yuv --modes pixel-paq,idsq --sweep
    pixelpaq curves   --bit-depths 8,10 --n-points 256 --out curves/
    pixelpaq info     --input seq.yuv

Geometry and defaults may come from a JSON sidecar (--config, or
<input>.json next to the raw file); flags override it.

`pixelpaq shell` opens a console accepting the same subcommands, e.g.

pixelpaq> compare --qp 27 --frames 0..8
"""

from cmd import Cmd
import argparse
import shlex
import sys

from pixelpaq.log import LEVELS, error, info, output, setLogLevel
from pixelpaq.pq_errors import EXIT_CONFIG, EXIT_OK, PixelpaqError
from pixelpaq.pq_quant import QpMode
from pixelpaq.pq_synchronizer import DEFAULT_CURVE_POINTS, PixelPaq
from pixelpaq.pq_utils import (parse_list, pq_build_config, pq_load_sidecar,
                               pq_merge_sidecar, sidecar_for)
from pixelpaq.pq_yuv import SUPPORTED_BIT_DEPTHS


def _common_arguments(parser):
    # every default is None so that the sidecar can fill what is left unset
    parser.add_argument('--config', help='JSON config (sidecar) file')
    parser.add_argument('--input', help='raw planar YCbCr file')
    parser.add_argument('--width', type=int)
    parser.add_argument('--height', type=int)
    parser.add_argument('--bit-depth', type=int, dest='bit_depth',
                        choices=SUPPORTED_BIT_DEPTHS)
    parser.add_argument('--chroma', choices=('420', '422', '444'))
    parser.add_argument('--frame-count', type=int, dest='frame_count',
                        help='frames in the file (default: from its size)')
    parser.add_argument('--frames', help='A..B, A.. or N')
    parser.add_argument('--cb-size', type=int, dest='cb_size',
                        choices=(16, 32, 64))
    parser.add_argument('--qp', type=int, help='base QP, 0..51')
    parser.add_argument('--mode', choices=[m.value for m in QpMode])
    parser.add_argument('--exact-weights', action='store_true', default=None,
                        dest='exact_weights',
                        help='use L itself instead of ceil(L)')
    parser.add_argument('--no-knee-scaling', action='store_false',
                        default=None, dest='knee_scaling',
                        help='keep the chroma knees at their 8-bit values')
    parser.add_argument('--theta', type=float,
                        help='dead-zone rounding offset (default 1/3)')
    parser.add_argument('--out', help='output directory')
    parser.add_argument('--fps', type=float)
    parser.add_argument('--workers', type=int,
                        help='frames processed concurrently')
    parser.add_argument('--verbosity', choices=list(LEVELS), default=None)


def build_parser():
    parser = argparse.ArgumentParser(
        prog='pixelpaq',
        description='JND-based luma/chroma perceptual quantisation')
    sub = parser.add_subparsers(dest='command', metavar='COMMAND')
    sub.required = True

    p = sub.add_parser('analyze', help='write per-CB QP maps (JSON + CSV)')
    _common_arguments(p)

    p = sub.add_parser('simulate', help='code frames, report PSNR/SSIM/JND')
    _common_arguments(p)
    p.add_argument('--emit-recon', action='store_true', dest='emit_recon',
                   help='write the reconstructed YUV')
    p.add_argument('--emit-ssim-maps', action='store_true',
                   dest='emit_ssim_maps', help='write SSIM index maps (PGM)')

    p = sub.add_parser('compare', help='compare QP modes on the same frames')
    _common_arguments(p)
    p.add_argument('--modes', help='comma list, first is the mode under '
                   'test (default pixel-paq,idsq)')
    p.add_argument('--sweep', action='store_true',
                   help='repeat at every QP of --qps and average')
    p.add_argument('--qps', help='comma list (default 22,27,32,37)')

    p = sub.add_parser('curves', help='write JND weight curves (CSV)')
    _common_arguments(p)
    p.add_argument('--bit-depths', dest='bit_depths',
                   default=','.join(str(b) for b in SUPPORTED_BIT_DEPTHS))
    p.add_argument('--n-points', type=int, dest='n_points',
                   default=DEFAULT_CURVE_POINTS)

    p = sub.add_parser('info', help='geometry, sizes and raw bitrate')
    _common_arguments(p)

    p = sub.add_parser('shell', help='interactive console')
    _common_arguments(p)
    return parser


def parse_config(args):
    "Merge the sidecar into parsed arguments and build the RunConfig."
    path = args.config or sidecar_for(args.input)
    if path:
        info('*** config %s\n' % path)
    return pq_build_config(pq_merge_sidecar(args, pq_load_sidecar(path)))


def run_command(args):
    "Execute one parsed command; returns what the facade method returned."
    if args.verbosity:
        setLogLevel(args.verbosity)
    config = parse_config(args)
    pq = PixelPaq(config)
    command = args.command
    if command == 'analyze':
        return pq.analyze()
    if command == 'simulate':
        return pq.simulate()
    if command == 'compare':
        return pq.compare(sweep=args.sweep)
    if command == 'curves':
        return pq.curves(parse_list(args.bit_depths, int), args.n_points)
    if command == 'info':
        return pq.info()
    raise PixelpaqError('unhandled command %r' % command)


class CLI(Cmd):
    "Console running pixelpaq subcommands on top of the startup flags."

    prompt = 'pixelpaq> '

    def __init__(self, base_argv, stdin=sys.stdin, *args, **kwargs):
        """Start and run the console
           base_argv: flags given on the command line after `shell`; each
                      console command is parsed with them in front
           stdin: standard input for the console"""
        self.base_argv = list(base_argv)
        self.parser = build_parser()
        self.last_status = EXIT_OK
        Cmd.__init__(self, *args, stdin=stdin, **kwargs)
        if stdin is not sys.stdin:
            self.use_rawinput = False
        info('*** Starting CLI:\n')

        self.run()

    def run(self):
        "Run our cmdloop(), catching KeyboardInterrupt"
        while True:
            try:
                self.cmdloop()
                break
            except KeyboardInterrupt:
                # pylint: disable=broad-except
                try:
                    output('\nInterrupt\n')
                except Exception:
                    pass
                # pylint: enable=broad-except

    def emptyline(self):
        "Don't repeat last command when you hit return."
        pass

    helpStr = (
        'Supported commands are as follows:\n'
        '  pixelpaq> help\n'
        '  pixelpaq> info\n'
        '  pixelpaq> analyze --qp 27\n'
        '   // It means writing the QP map of the selected frames at base QP 27.\n'
        '  pixelpaq> simulate --mode idsq --frames 0..4\n'
        '   // It means coding frames 0 to 3 with the luma-only QPs.\n'
        '  pixelpaq> compare --sweep\n'
        '   // It means comparing pixel-paq with idsq at QPs 22, 27, 32, 37.\n'
        '  pixelpaq> curves --bit-depths 8,10\n'
        '  pixelpaq> exit\n'
        '  pixelpaq> quit\n'
        '  pixelpaq> EOF\n'
        ' Flags given to `pixelpaq shell` apply to every command; flags on\n'
        ' a command line override them.\n')

    def do_help(self, line):
        "Describe available CLI commands."
        Cmd.do_help(self, line)
        if line == '':
            output(self.helpStr)

    def _dispatch(self, command, line):
        argv = [command] + self.base_argv + shlex.split(line)
        try:
            args = self.parser.parse_args(argv)
        except SystemExit:
            self.last_status = EXIT_CONFIG
            return
        self.last_status = _guarded(run_command, args)

    def do_analyze(self, line):
        "write per-CB QP maps"
        self._dispatch('analyze', line)

    def do_simulate(self, line):
        "code the selected frames and report metrics"
        self._dispatch('simulate', line)

    def do_compare(self, line):
        "compare QP modes on the same frames"
        self._dispatch('compare', line)

    def do_curves(self, line):
        "write the JND weight curves"
        self._dispatch('curves', line)

    def do_info(self, line):
        "geometry, sizes and raw bitrate"
        self._dispatch('info', line)

    def do_exit(self, _line):
        "Exit"
        return 'exited by user command'

    def do_quit(self, line):
        "Exit"
        return self.do_exit(line)

    def do_EOF(self, line):
        "Exit"
        output('\n')
        return self.do_exit(line)

    def default(self, line):
        error('*** Unknown command: %s\n' % line)
        return


def _guarded(fn, *args):
    "Run fn, mapping pixelpaq errors to their exit status."
    try:
        fn(*args)
    except PixelpaqError as e:
        error('%s: %s\n' % (type(e).__name__, e))
        return e.exit_code
    return EXIT_OK


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    if args.command == 'shell':
        if args.verbosity:
            setLogLevel(args.verbosity)
        console = CLI(argv[1:])
        return console.last_status
    return _guarded(run_command, args)


if __name__ == '__main__':
    sys.exit(main())
