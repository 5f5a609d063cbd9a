# -*- coding: utf-8 -*-
"""
Monte-Carlo frame and bit error estimation, inner-solver benchmarks and
their CSV / JSON writers.
"""
import collections
import csv
import json
import logging
import math
import time

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from lp_decoder.channels import transmit_and_llr
from lp_decoder.codes import is_codeword, ml_decode_exhaustive
from lp_decoder.exceptions import ConfigError
from lp_decoder.ipm import (
    EARLY_ROUNDED, FAILURE, INTEGRAL, decode,
)

log = logging.getLogger(__name__)  # pylint: disable=invalid-name

TrialRecord = collections.namedtuple('TrialRecord', [
    'index', 'channel', 'status', 'bit_errors', 'frame_error', 'iterations',
    'inner_iterations', 'ml_frame_error', 'certificate_violation',
    'early_rounded_invalid', 'wall_time',
])

RECORD_COLUMNS = [
    'index', 'channel', 'status', 'bit_errors', 'frame_error', 'iterations',
    'inner_iterations', 'ml_frame_error', 'certificate_violation',
]

BENCH_COLUMNS = [
    'algorithm', 'inner', 'fixture', 'status', 'cost', 'iterations',
    'inner_calls', 'inner_iterations', 'fallbacks', 'max_residual',
    'wall_time',
]


class SimSummary(object):
    """
    Aggregate of a simulation. Counts and sums only, so the result does not
    depend on the order the trials finished in.
    """
    def __init__(self, trials, n, frame_errors, bit_errors, status_counts,
                 iteration_sums, ml_frame_errors=None,
                 certificate_violations=0, early_rounded_invalid=0,
                 wall_time=0.0):
        self.trials = trials
        self.n = n
        self.frame_errors = frame_errors
        self.bit_errors = bit_errors
        self.status_counts = status_counts
        self.iteration_sums = iteration_sums
        self.ml_frame_errors = ml_frame_errors
        self.certificate_violations = certificate_violations
        self.early_rounded_invalid = early_rounded_invalid
        self.wall_time = wall_time

    @classmethod
    def from_records(cls, records, n):
        """
        :param records: iterable of TrialRecord
        :param n: code length
        :return: SimSummary
        """
        records = list(records)
        status_counts = collections.Counter(r.status for r in records)
        iteration_sums = collections.Counter()
        for record in records:
            iteration_sums[record.status] += record.iterations
        compared = [r for r in records if r.ml_frame_error is not None]
        return cls(
            trials=len(records),
            n=n,
            frame_errors=sum(r.frame_error for r in records),
            bit_errors=sum(r.bit_errors for r in records),
            status_counts=dict(status_counts),
            iteration_sums=dict(iteration_sums),
            ml_frame_errors=(
                sum(r.ml_frame_error for r in compared) if compared else None
            ),
            certificate_violations=sum(
                r.certificate_violation for r in records
            ),
            early_rounded_invalid=sum(
                r.early_rounded_invalid for r in records
            ),
            wall_time=sum(r.wall_time for r in records),
        )

    @property
    def fer(self):
        return float(self.frame_errors) / self.trials if self.trials else 0.0

    @property
    def fer_ci95(self):
        """
        Half-width of the normal-approximation binomial interval.
        """
        if not self.trials:
            return 0.0
        return 1.96 * math.sqrt(self.fer * (1 - self.fer) / self.trials)

    @property
    def ber(self):
        total = self.trials * self.n
        return float(self.bit_errors) / total if total else 0.0

    @property
    def mean_iterations(self):
        return {
            status: float(self.iteration_sums.get(status, 0)) / count
            for status, count in self.status_counts.items()
        }

    def to_dict(self, timing=False):
        result = collections.OrderedDict([
            ('trials', self.trials),
            ('frame_errors', self.frame_errors),
            ('fer', self.fer),
            ('fer_ci95', self.fer_ci95),
            ('bit_errors', self.bit_errors),
            ('ber', self.ber),
            ('status_counts', dict(sorted(self.status_counts.items()))),
            ('mean_iterations', dict(sorted(self.mean_iterations.items()))),
            ('ml_frame_errors', self.ml_frame_errors),
            ('certificate_violations', self.certificate_violations),
            ('early_rounded_invalid', self.early_rounded_invalid),
        ])
        if timing:
            result['wall_time'] = self.wall_time
        return result


def _hard_decision(gamma):
    return (np.asarray(gamma) < 0).astype(np.uint8)


def run_trial(matrix, spec, cfg, base_seed, index, compare_ml=False):
    """
    Sends the all-zero codeword once and decodes it.
    :return: TrialRecord
    """
    started = time.perf_counter()
    gamma = transmit_and_llr(np.zeros(matrix.n, dtype=np.uint8), spec,
                             base_seed, index)
    result = decode(matrix, gamma, cfg)
    output = result.output
    if output is None:
        output = _hard_decision(gamma)
    bit_errors = int(np.count_nonzero(output))
    frame_error = result.status == FAILURE or bit_errors > 0

    ml_frame_error = None
    violation = False
    if compare_ml:
        ml_word, ml_cost = ml_decode_exhaustive(matrix, gamma)
        ml_frame_error = bool(np.any(ml_word))
        if result.status == INTEGRAL and \
                np.any(result.output != ml_word) and \
                abs(result.cost - ml_cost) > 1e-9 * (1 + abs(ml_cost)):
            log.warning('trial %d: integral LP output is not ML', index)
            violation = True
    invalid = result.status == EARLY_ROUNDED and \
        not is_codeword(matrix, result.output)
    return TrialRecord(
        index=index,
        channel=str(spec),
        status=result.status,
        bit_errors=bit_errors,
        frame_error=bool(frame_error),
        iterations=result.iterations,
        inner_iterations=result.inner_stats.get('iterations', 0),
        ml_frame_error=ml_frame_error,
        certificate_violation=violation,
        early_rounded_invalid=bool(invalid),
        wall_time=time.perf_counter() - started,
    )


def simulate(matrix, spec, trials, cfg, base_seed, workers=1,
             compare_ml=False):
    """
    All-zero codeword simulation. Trial i uses the stream (base_seed, i), so
    the outcome does not depend on the worker count.
    :param matrix: SparseBinaryMatrix
    :param spec: ChannelSpec
    :param trials: number of frames, at least one
    :param cfg: SolverConfig
    :param base_seed: integer seed
    :param workers: thread pool size
    :param compare_ml: decode every frame with the exhaustive ML oracle too
    :return: (SimSummary, list of TrialRecord in index order)
    """
    if trials < 1:
        raise ConfigError('trials must be at least 1')
    if workers < 1:
        raise ConfigError('workers must be at least 1')

    def trial(index):
        return run_trial(matrix, spec, cfg, base_seed, index, compare_ml)

    if workers == 1:
        records = [trial(index) for index in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(trial, range(trials)))
    summary = SimSummary.from_records(records, matrix.n)
    log.info('simulate %s: %d trials, %d frame errors', spec, trials,
             summary.frame_errors)
    return summary, records


def bench_inner_solvers(matrix, fixtures, grid):
    """
    Decodes every fixture with every configuration.
    :param matrix: SparseBinaryMatrix
    :param fixtures: non-empty list of LLR vectors
    :param grid: non-empty list of SolverConfig
    :return: list of row dicts keyed by BENCH_COLUMNS
    """
    if not fixtures:
        raise ConfigError('benchmark needs at least one fixture')
    if not grid:
        raise ConfigError('benchmark needs at least one configuration')
    rows = []
    for cfg in grid:
        for index, gamma in enumerate(fixtures):
            started = time.perf_counter()
            result = decode(matrix, gamma, cfg)
            elapsed = time.perf_counter() - started
            stats = result.inner_stats
            rows.append(collections.OrderedDict([
                ('algorithm', cfg.algorithm),
                ('inner', cfg.inner),
                ('fixture', index),
                ('status', result.status),
                ('cost', result.cost),
                ('iterations', result.iterations),
                ('inner_calls', stats.get('calls', 0)),
                ('inner_iterations', stats.get('iterations', 0)),
                ('fallbacks', stats.get('fallbacks', 0)),
                ('max_residual', stats.get('max_residual', 0.0)),
                ('wall_time', elapsed),
            ]))
            log.debug('bench %s/%s fixture %d: %s', cfg.algorithm,
                      cfg.inner, index, result.status)
    return rows


def make_fixtures(matrix, spec, count, seed):
    """
    LLR fixtures from the all-zero codeword, trial indices 0..count-1.
    """
    if count < 1:
        raise ConfigError('fixture count must be at least 1')
    zero = np.zeros(matrix.n, dtype=np.uint8)
    return [transmit_and_llr(zero, spec, seed, index)
            for index in range(count)]


def _cell(value):
    if value is None:
        return ''
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, float):
        return repr(value)
    return value


def write_records_csv(records, stream, timing=False):
    """
    Header row, then one TrialRecord per line.
    """
    columns = RECORD_COLUMNS + (['wall_time'] if timing else [])
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(columns)
    for record in records:
        values = record._asdict()
        writer.writerow([_cell(values[column]) for column in columns])


def write_records_json(records, stream, timing=False):
    columns = RECORD_COLUMNS + (['wall_time'] if timing else [])
    json.dump(
        [collections.OrderedDict(
            (column, getattr(record, column)) for column in columns
        ) for record in records],
        stream, indent=2,
    )
    stream.write('\n')


def write_summary_json(summary, stream, timing=False):
    json.dump(summary.to_dict(timing), stream, indent=2)
    stream.write('\n')


def write_bench_csv(rows, stream):
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(BENCH_COLUMNS)
    for row in rows:
        writer.writerow([_cell(row[column]) for column in BENCH_COLUMNS])


def write_bench_json(rows, stream):
    json.dump(rows, stream, indent=2)
    stream.write('\n')
