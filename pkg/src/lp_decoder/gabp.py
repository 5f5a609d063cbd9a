# -*- coding: utf-8 -*-
"""
Gaussian belief propagation for the normal equations.

The quadratic 1/2 u^T N u - <v, u> is factored pairwise over the rows of A:
nodes are checks, and two checks are coupled when they share a column, so
the graph mirrors check adjacency in the Tanner graph. Messages use the
information form: a precision and a mean parameter per directed edge.
"""
import collections
import logging

import numpy as np
import scipy.sparse as sps

from lp_decoder.exceptions import DimensionError, GaBPDivergenceError
from lp_decoder.linalg import (
    ConjugateGradientSolver, InnerSolver, SolveReport,
)

log = logging.getLogger(__name__)  # pylint: disable=invalid-name

GaBPResult = collections.namedtuple(
    'GaBPResult', ['means', 'report', 'state'],
)


class GaussianFactorGraph(object):
    """
    Pairwise Gaussian model: node precisions, symmetric couplings on
    directed edges (each undirected edge appears in both directions) and the
    linear term.
    """
    def __init__(self, diagonal, sources, targets, couplings, v):
        self.diagonal = np.asarray(diagonal, dtype=float)
        self.sources = np.asarray(sources, dtype=np.int64)
        self.targets = np.asarray(targets, dtype=np.int64)
        self.couplings = np.asarray(couplings, dtype=float)
        self.v = np.asarray(v, dtype=float)
        if np.any(self.diagonal <= 0):
            raise DimensionError('node precisions must be positive')
        if self.v.shape != self.diagonal.shape:
            raise DimensionError('linear term does not match node count')
        order = {
            (int(s), int(t)): e
            for e, (s, t) in enumerate(zip(self.sources, self.targets))
        }
        try:
            self.reverse = np.array(
                [order[(int(t), int(s))]
                 for s, t in zip(self.sources, self.targets)],
                dtype=np.int64,
            )
        except KeyError:
            raise DimensionError('every edge needs its reverse direction')
        if np.any(self.couplings != self.couplings[self.reverse]):
            raise DimensionError('couplings must be symmetric')

    @classmethod
    def from_sparse(cls, matrix, v, pattern=None):
        """
        :param matrix: symmetric sparse (or dense) precision matrix
        :param v: linear term
        :param pattern: optional sparse matrix whose off-diagonal nonzeros
            define the edges, the nonzeros of matrix otherwise
        :return: GaussianFactorGraph
        """
        matrix = sps.csr_matrix(matrix, dtype=float)
        pattern = matrix if pattern is None else sps.csr_matrix(pattern)
        pattern = sps.coo_matrix(pattern)
        mask = pattern.row != pattern.col
        sources = pattern.row[mask]
        targets = pattern.col[mask]
        order = np.lexsort((targets, sources))
        sources, targets = sources[order], targets[order]
        couplings = np.asarray(matrix[sources, targets]).ravel() \
            if sources.size else np.zeros(0)
        return cls(matrix.diagonal(), sources, targets, couplings, v)

    @property
    def h(self):
        return self.diagonal.size

    @property
    def edges(self):
        """
        Undirected edges (j, k) with j < k.
        """
        mask = self.sources < self.targets
        return list(zip(self.sources[mask].tolist(),
                        self.targets[mask].tolist()))

    def apply(self, u):
        """
        :return: N u
        """
        product = self.diagonal * u
        if self.sources.size:
            product += np.bincount(
                self.targets, weights=self.couplings * u[self.sources],
                minlength=self.h,
            )
        return product


class MessageState(object):
    """
    Messages per directed edge: precision and mean parameters.
    """
    def __init__(self, precision, mean):
        self.precision = np.asarray(precision, dtype=float)
        self.mean = np.asarray(mean, dtype=float)

    @classmethod
    def zeros(cls, graph):
        size = graph.sources.size
        return cls(np.zeros(size), np.zeros(size))

    def copy(self):
        return MessageState(self.precision.copy(), self.mean.copy())


def build_pairwise_graph(system):
    """
    Builds the check-adjacency graph of an InnerSystem. Edges follow the
    structural pattern |A| |A|^T, couplings are the entries of A D^2 A^T.
    :param system: InnerSystem
    :return: GaussianFactorGraph
    """
    matrix = system.coupling_matrix()
    if np.any(matrix.diagonal() <= 0):
        raise DimensionError('zero diagonal; A is rank deficient')
    structure = abs(system.A)
    pattern = structure @ structure.T
    return GaussianFactorGraph.from_sparse(matrix, system.v, pattern)


def _incoming(graph, values):
    return np.bincount(graph.targets, weights=values, minlength=graph.h)


def marginal_means(graph, state):
    """
    :return: (posterior means, posterior precisions)
    """
    precision = graph.diagonal + _incoming(graph, state.precision)
    mean = graph.v + _incoming(graph, state.mean)
    with np.errstate(divide='ignore', invalid='ignore'):
        return mean / precision, precision


def gabp_sweep(graph, state, damping=0.0):
    """
    One synchronous update of every directed-edge message, convexly damped
    with the previous state.
    :param graph: GaussianFactorGraph
    :param state: MessageState
    :param damping: weight of the previous state, in [0, 1)
    :return: new MessageState
    """
    if not 0 <= damping < 1:
        raise DimensionError('damping must lie in [0, 1)')
    if not graph.sources.size:
        return state.copy()
    total_precision = graph.diagonal + _incoming(graph, state.precision)
    total_mean = graph.v + _incoming(graph, state.mean)
    src = graph.sources
    cavity_precision = total_precision[src] - state.precision[graph.reverse]
    cavity_mean = total_mean[src] - state.mean[graph.reverse]
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        precision = -graph.couplings ** 2 / cavity_precision
        mean = -graph.couplings * cavity_mean / cavity_precision
    if damping:
        precision = (1 - damping) * precision + damping * state.precision
        mean = (1 - damping) * mean + damping * state.mean
    if not (np.all(np.isfinite(precision)) and np.all(np.isfinite(mean))):
        raise GaBPDivergenceError('non-finite message')
    return MessageState(precision, mean)


def gabp_solve(graph, tol=1e-8, max_sweeps=200, damping=0.3, state=None):
    """
    Sweeps until successive means change by less than tol (infinity norm)
    and ||N u - v||_inf <= 100 tol ||v||_inf, or max_sweeps is reached.
    Not converging is a verdict, not an error: report.converged is False and
    means hold the last estimate.
    :param graph: GaussianFactorGraph
    :param tol: positive tolerance
    :param max_sweeps: sweep budget
    :param damping: weight of the previous state
    :param state: warm-start MessageState
    :return: GaBPResult(means, report, state)
    """
    if tol <= 0:
        raise DimensionError('tolerance must be positive')
    state = MessageState.zeros(graph) if state is None else state
    means, _ = marginal_means(graph, state)
    v_scale = np.max(np.abs(graph.v)) if graph.v.size else 0.0
    sweeps = 0
    residual = np.inf
    for sweeps in range(1, max_sweeps + 1):
        try:
            state = gabp_sweep(graph, state, damping)
        except GaBPDivergenceError:
            log.debug('gabp diverged after %d sweeps', sweeps)
            return GaBPResult(means, SolveReport(sweeps, np.inf, False),
                              state)
        updated, _ = marginal_means(graph, state)
        if not np.all(np.isfinite(updated)):
            return GaBPResult(means, SolveReport(sweeps, np.inf, False),
                              state)
        change = np.max(np.abs(updated - means)) if means.size else 0.0
        means = updated
        residual = np.max(np.abs(graph.apply(means) - graph.v)) \
            if means.size else 0.0
        if change < tol and residual <= 100 * tol * v_scale:
            log.debug('gabp converged after %d sweeps', sweeps)
            return GaBPResult(means, SolveReport(sweeps, residual, True),
                              state)
    log.debug('gabp not converged after %d sweeps, residual %.3e',
              sweeps, residual)
    return GaBPResult(means, SolveReport(sweeps, residual, False), state)


class GaussianBPSolver(InnerSolver):
    """
    Normal-equation solver by Gaussian belief propagation with a conjugate
    gradient fallback.

    Cold mode runs gabp_solve from zero messages each call and falls back to
    CG from the caller's guess (zero when none) when it does not converge.
    Warm mode runs a few sweeps starting from the messages of the previous
    call and, when the means miss the tolerance, hands them to CG as
    starting vector.
    """
    name = 'gabp'

    def __init__(self, warm=False, damping=0.3, max_sweeps=200,
                 warm_sweeps=1):
        super(GaussianBPSolver, self).__init__()
        self.warm = warm
        self.damping = damping
        self.max_sweeps = max_sweeps
        self.warm_sweeps = warm_sweeps
        self.state = None
        self.sweeps = 0
        self.fallback = ConjugateGradientSolver()
        if warm:
            self.name = 'gabp-warm'

    def solve(self, system, tol, u0=None):
        graph = build_pairwise_graph(system)
        state = self.state
        if state is not None and state.precision.size != graph.sources.size:
            state = None
        if self.warm:
            result = gabp_solve(graph, tol, self.warm_sweeps, self.damping,
                                state)
        else:
            result = gabp_solve(graph, tol, self.max_sweeps, self.damping)
        self.sweeps += result.report.iterations
        if self.warm:
            self.state = result.state
        relative = np.linalg.norm(system.residual(result.means)) / max(
            np.linalg.norm(system.v), np.finfo(float).tiny
        ) if np.all(np.isfinite(result.means)) else np.inf
        log.debug('%s: %d sweeps, relative residual %.3e',
                  self.name, result.report.iterations, relative)
        if result.report.converged or relative <= tol:
            report = SolveReport(
                result.report.iterations,
                float(np.linalg.norm(system.residual(result.means))), True,
            )
            self.record(report)
            return result.means, report

        self.fallbacks += 1
        start = u0
        if self.warm and np.isfinite(relative):
            start = result.means
        elif self.warm:
            self.state = None
        u, report = self.fallback.solve(system, tol, u0=start)
        report = SolveReport(
            report.iterations + result.report.iterations,
            report.residual, report.converged,
        )
        self.record(report)
        return u, report

    def statistics(self):
        stats = super(GaussianBPSolver, self).statistics()
        stats['sweeps'] = self.sweeps
        return stats
