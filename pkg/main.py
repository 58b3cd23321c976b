import argparse
import logging
import sys
from typing import List, Optional

from commands import COMMANDS
from commands.thp.figures import FIGURES
from commands.thp.log import set_verbosity

# global logging configuration
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[
        logging.StreamHandler()  # output to the console
    ]
)

# plotting backends are only imported by generated scripts, keep them quiet anyway
logging.getLogger('matplotlib').setLevel(logging.WARNING)


def build_parser() -> argparse.ArgumentParser:
    """command line parser; flags left unset fall back to the config file, then to defaults"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='key=value settings file')
    common.add_argument('--nt', type=int, help='transmit antennas')
    common.add_argument('--k', type=int, help='users')
    common.add_argument('--m', type=int, help='QAM constellation size')
    common.add_argument('--bits', help="feedback bits, comma list or 'start:step:stop'")
    common.add_argument('--snr-db', dest='snr_db', help="SNR grid in dB, 'start:step:stop' or comma list")
    common.add_argument('--trials', type=int, help='monte carlo trials per cell')
    common.add_argument('--seed', type=int, help='master seed')
    common.add_argument('--schemes', help='comma list of th_perfect,th_quantized,zf_perfect,zf_quantized')
    common.add_argument('--out', help='output directory, or a .csv file')
    common.add_argument('--workers', type=int, help='worker threads')
    common.add_argument('--b', type=float, help='allowed rate gap factor for scaled feedback')
    common.add_argument('--eps', type=float, help='slack of the TH scaling rule')
    common.add_argument('--quantizer', choices=('auto', 'codebook', 'sampled', 'genie'),
                        help='how quantized directions are produced')
    common.add_argument('--verbose', action='store_true', help='debug logging')

    parser = argparse.ArgumentParser(description='TH precoding with quantized channel feedback')
    subparsers = parser.add_subparsers(dest='command', required=True)
    for name, command in COMMANDS.items():
        sub = subparsers.add_parser(name, parents=[common], help=command.help)
        if name == 'reproduce':
            sub.add_argument('figure', choices=FIGURES)
        elif name == 'validate':
            sub.add_argument('--sample-scale', dest='sample_scale', type=float,
                             help='fraction of the full-scale sample sizes, in (0, 1]')
            sub.add_argument('--with-scaled', dest='with_scaled', action='store_true',
                             help='also run the scaled-feedback dB-gap checks')
        elif name == 'simulate':
            sub.add_argument('--print', action='store_true', help='also write the CSV to stdout')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
        set_verbosity(logging.DEBUG)
    return COMMANDS[args.command]().run(args)


if __name__ == '__main__':
    sys.exit(main())
