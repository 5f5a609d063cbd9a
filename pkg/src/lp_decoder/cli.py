# -*- coding: utf-8 -*-
"""
Command-line front end: decode, simulate, bench and check sub-commands.

Data goes to the output stream (stdout or --output), diagnostics to stderr.
Exit codes: 0 success, 1 usage error, 2 input-format error.
"""
import argparse
import contextlib
import json
import logging
import logging.config
import os
import sys

import numpy as np

from lp_decoder.channels import ChannelSpec
from lp_decoder.codes import as_llr_vector, gf2_rank, load_alist
from lp_decoder.exceptions import (
    AlistFormatError, ChannelError, ConfigError, DegreeGuardError,
    DimensionError, DimensionGuardError, LPDecoderError,
)
from lp_decoder.harness import (
    bench_inner_solvers, make_fixtures, simulate, write_bench_csv,
    write_bench_json, write_records_csv, write_records_json,
    write_summary_json,
)
from lp_decoder.ipm import (
    ALGORITHMS, INNER_SOLVERS, SolverConfig, decode, write_trajectory_csv,
)
from lp_decoder.main import app
from lp_decoder.polytope import polytope_statistics

log = logging.getLogger(__name__)  # pylint: disable=invalid-name

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2


class UsageError(Exception):
    """
    Raised instead of exiting when the command line is invalid.
    """
    def __init__(self, message, usage=''):
        super(UsageError, self).__init__(message)
        self.usage = usage


class ArgumentParser(argparse.ArgumentParser):
    """
    Parser that raises UsageError so run() decides the exit code.
    """
    def error(self, message):
        raise UsageError(message, self.format_usage())


def _solver_options():
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--matrix', required=True, metavar='PATH',
                        help='parity-check matrix in alist format')
    parser.add_argument('--output', metavar='PATH',
                        help='write data here instead of stdout')
    parser.add_argument('--format', choices=['csv', 'json'],
                        help='bulk output format')
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--workers', type=int, default=os.cpu_count() or 1)
    parser.add_argument('--solver', choices=ALGORITHMS, dest='algorithm')
    parser.add_argument('--inner', choices=INNER_SOLVERS)
    parser.add_argument('--eps-gap', type=float, dest='eps_gap')
    parser.add_argument('--max-iter', type=int, dest='max_iter')
    parser.add_argument('--max-iter-short', type=int, dest='max_iter_short')
    parser.add_argument('--beta', type=float)
    parser.add_argument('--sigma', type=float)
    parser.add_argument('--round-every', type=int, dest='round_every')
    parser.add_argument('--tau-round', type=float, dest='tau_round')
    parser.add_argument('--max-degree', type=int, dest='max_check_degree')
    parser.add_argument('--damping', type=float, dest='gabp_damping')
    return parser


def build_parser():
    """
    :return: ArgumentParser with the four sub-commands
    """
    common = _solver_options()
    parser = ArgumentParser(
        prog='lp_decoder',
        description='Interior-point LP decoding of binary linear codes.',
    )
    commands = parser.add_subparsers(dest='command',
                                     parser_class=ArgumentParser)
    commands.required = True

    decode_parser = commands.add_parser(
        'decode', parents=[common], help='decode one LLR vector',
    )
    decode_parser.add_argument('--llr', required=True,
                               help='file or inline comma separated LLRs')
    decode_parser.add_argument('--trace', metavar='PATH',
                               help='write the iterate trajectory as CSV')

    simulate_parser = commands.add_parser(
        'simulate', parents=[common], help='Monte-Carlo FER/BER estimate',
    )
    simulate_parser.add_argument('--channel', required=True,
                                 help='bsc:P or biawgn:SNR_DB[:RATE]')
    simulate_parser.add_argument('--trials', type=int, default=1000)
    simulate_parser.add_argument('--compare-ml', action='store_true',
                                 dest='compare_ml')
    simulate_parser.add_argument('--summary', metavar='PATH',
                                 help='write the JSON summary here')
    simulate_parser.add_argument('--timing', action='store_true',
                                 help='include wall time in the output')

    bench_parser = commands.add_parser(
        'bench', parents=[common], help='compare inner solvers',
    )
    bench_parser.add_argument('--fixtures', type=int, default=5)
    bench_parser.add_argument('--channel', default='bsc:0.05')
    bench_parser.add_argument('--solvers', default=','.join(ALGORITHMS))
    bench_parser.add_argument('--inners', default='cg,dense')

    commands.add_parser(
        'check', parents=[common], help='validate an alist file',
    )
    return parser


def solver_config(args, **extra):
    """
    SolverConfig from app.config defaults and the solver flags.
    """
    overrides = {
        field: getattr(args, field, None)
        for field in ('algorithm', 'inner', 'eps_gap', 'max_iter',
                      'max_iter_short', 'beta',
                      'sigma', 'round_every', 'tau_round',
                      'max_check_degree', 'gabp_damping')
    }
    overrides.update(extra)
    return SolverConfig.from_config(app.config, **overrides)


def parse_llr(value):
    """
    Reads LLRs from a file when value names one, else parses it inline.
    Entries are separated by commas and/or whitespace.
    """
    if os.path.isfile(value):
        with open(value) as stream:
            value = stream.read()
    tokens = value.replace(',', ' ').split()
    try:
        return np.array([float(token) for token in tokens])
    except ValueError as error:
        raise DimensionError('malformed LLR vector: {}'.format(error))


def _split(value, allowed, what):
    items = [item.strip() for item in value.split(',') if item.strip()]
    unknown = [item for item in items if item not in allowed]
    if unknown:
        raise ConfigError('unknown {}: {}'.format(what, ', '.join(unknown)))
    return items


@contextlib.contextmanager
def _output(path, stdout):
    if path is None:
        yield stdout
    else:
        with open(path, 'w') as stream:
            yield stream


def _dump(data, stream):
    json.dump(data, stream, indent=2)
    stream.write('\n')


def command_decode(args, matrix, stdout):
    cfg = solver_config(args, trace=bool(args.trace))
    gamma = as_llr_vector(parse_llr(args.llr), matrix.n)
    result = decode(matrix, gamma, cfg)
    with _output(args.output, stdout) as stream:
        _dump(result.to_dict(), stream)
    if args.trace:
        with open(args.trace, 'w') as stream:
            write_trajectory_csv(result.trajectory or [], stream)


def command_simulate(args, matrix, stdout, stderr):
    cfg = solver_config(args)
    rate = float(matrix.n - gf2_rank(matrix)) / matrix.n
    spec = ChannelSpec.parse(args.channel, default_rate=rate or 1.0)
    summary, records = simulate(
        matrix, spec, args.trials, cfg, args.seed, args.workers,
        args.compare_ml,
    )
    with _output(args.output, stdout) as stream:
        if args.format == 'json':
            write_records_json(records, stream, args.timing)
        else:
            write_records_csv(records, stream, args.timing)
    if args.summary:
        with open(args.summary, 'w') as stream:
            write_summary_json(summary, stream, args.timing)
    else:
        write_summary_json(summary, stderr, args.timing)


def command_bench(args, matrix, stdout):
    algorithms = _split(args.solvers, ALGORITHMS, 'solvers')
    inners = _split(args.inners, INNER_SOLVERS, 'inner solvers')
    grid = [
        solver_config(args, algorithm=algorithm, inner=inner)
        for algorithm in algorithms for inner in inners
    ]
    rate = float(matrix.n - gf2_rank(matrix)) / matrix.n
    spec = ChannelSpec.parse(args.channel, default_rate=rate or 1.0)
    fixtures = make_fixtures(matrix, spec, args.fixtures, args.seed)
    rows = bench_inner_solvers(matrix, fixtures, grid)
    with _output(args.output, stdout) as stream:
        if args.format == 'json':
            write_bench_json(rows, stream)
        else:
            write_bench_csv(rows, stream)


def command_check(args, matrix, stdout):
    stats = polytope_statistics(matrix, args.max_check_degree or 3)
    rank = gf2_rank(matrix)
    stats['rank'] = rank
    stats['dimension'] = matrix.n - rank
    with _output(args.output, stdout) as stream:
        _dump(stats, stream)


def run(argv, stdout=None, stderr=None):
    """
    Runs one command.
    :param argv: arguments without the program name
    :param stdout: data stream, sys.stdout by default
    :param stderr: diagnostic stream, sys.stderr by default
    :return: exit code
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.workers < 1:
            raise UsageError('--workers must be at least 1',
                             parser.format_usage())
        matrix = load_alist(args.matrix)
        if args.command == 'decode':
            command_decode(args, matrix, stdout)
        elif args.command == 'simulate':
            command_simulate(args, matrix, stdout, stderr)
        elif args.command == 'bench':
            command_bench(args, matrix, stdout)
        else:
            command_check(args, matrix, stdout)
    except UsageError as error:
        stderr.write(error.usage)
        stderr.write('error: {}\n'.format(error))
        return EXIT_USAGE
    except SystemExit as error:
        # --help
        return EXIT_OK if not error.code else EXIT_USAGE
    except (ConfigError, ChannelError) as error:
        stderr.write('error: {}\n'.format(error))
        return EXIT_USAGE
    except (AlistFormatError, DimensionError, DimensionGuardError,
            DegreeGuardError, IOError) as error:
        stderr.write('input error: {}\n'.format(error))
        return EXIT_INPUT
    except LPDecoderError as error:
        log.error('%s', error)
        stderr.write('error: {}\n'.format(error))
        return EXIT_INPUT
    return EXIT_OK


def main():
    """
    Console script entry point.
    """
    logging.config.fileConfig(app.config['LOGGING_INI'],
                              disable_existing_loggers=False)
    sys.exit(run(sys.argv[1:]))
