# -*- coding: utf-8 -*-
"""
The fundamental polytope as an explicit inequality system, its slack-based
standard-form embedding, degree-3 check decomposition, rounding to
{0, 1/2, 1} and a brute-force LP oracle for tests.
"""
import itertools
import json
import logging
import math

import numpy as np
import scipy.linalg
import scipy.sparse as sps
from scipy.optimize import linprog

from lp_decoder.codes import SparseBinaryMatrix, as_llr_vector
from lp_decoder.exceptions import (
    DegreeGuardError, DimensionError, DimensionGuardError, InfeasibleLPError,
)
from lp_decoder.main import app

log = logging.getLogger(__name__)  # pylint: disable=invalid-name

MAX_CHECK_DEGREE = 31
PIVOT_THRESHOLD = 1e-10
ORACLE_MAX_DIMENSION = 60
ORACLE_MAX_SIMPLEX_DIMENSION = 400


class LinearInequality(object):
    """
    One inequality <coeffs, x> <= rhs with sparse integer-valued coefficients.
    """
    __slots__ = ('coeffs', 'rhs')

    def __init__(self, coeffs, rhs):
        """
        :param coeffs: mapping or pairs variable index -> coefficient
        :param rhs: right-hand side
        """
        items = coeffs.items() if hasattr(coeffs, 'items') else coeffs
        self.coeffs = tuple(sorted((int(i), float(v)) for i, v in items))
        if not self.coeffs:
            raise DimensionError('an inequality needs a non-empty support')
        self.rhs = float(rhs)

    def __eq__(self, other):
        return (
            isinstance(other, LinearInequality) and
            (self.coeffs, self.rhs) == (other.coeffs, other.rhs)
        )

    def __hash__(self):
        return hash((self.coeffs, self.rhs))

    def __repr__(self):
        terms = ' '.join(
            '{}x{}'.format('+' if v > 0 else '-', i) for i, v in self.coeffs
        )
        return '<{} <= {:g}>'.format(terms, self.rhs)

    def negated(self):
        return tuple((i, -v) for i, v in self.coeffs)


class IneqSystem(object):
    """
    Inequality description of the polytope together with the implicit box
    0 <= x <= 1.
    """
    def __init__(self, n, inequalities):
        self.n = int(n)
        self.inequalities = tuple(inequalities)

    def __len__(self):
        return len(self.inequalities)

    def to_sparse(self):
        """
        :return: (G as csr matrix, h vector) with G x <= h
        """
        rows, cols, vals = [], [], []
        for r, ineq in enumerate(self.inequalities):
            for i, v in ineq.coeffs:
                rows.append(r)
                cols.append(i)
                vals.append(v)
        matrix = sps.csr_matrix(
            (vals, (rows, cols)), shape=(len(self.inequalities), self.n)
        )
        rhs = np.array([ineq.rhs for ineq in self.inequalities])
        return matrix, rhs

    def slacks(self, x):
        """
        :param x: point of length n
        :return: h - G x for every inequality
        """
        x = np.asarray(x, dtype=float)
        matrix, rhs = self.to_sparse()
        return rhs - matrix @ x

    def is_feasible(self, x, tol=1e-9):
        """
        :param x: point of length n
        :param tol: absolute tolerance
        :return: True when x lies in the polytope
        """
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionError('point length does not match polytope')
        if np.any(x < -tol) or np.any(x > 1 + tol):
            return False
        return bool(np.all(self.slacks(x) >= -tol)) if self.inequalities \
            else True

    def to_json(self):
        """
        Debug dump: dimension header and one coefficient list per inequality.
        """
        return json.dumps({
            'n': self.n,
            'box': [0, 1],
            'inequalities': [
                {'coeffs': [[i, v] for i, v in ineq.coeffs], 'rhs': ineq.rhs}
                for ineq in self.inequalities
            ],
        }, sort_keys=True)


class StandardFormLP(object):
    """
    Linear program: minimize <c, x> subject to A x = b, x >= 0.

    For the decoding embedding the columns are ordered as code coordinates,
    inequality slacks, box slacks, and the rows as inequality rows (each with
    its own slack), slack-free equality rows, box rows.
    """
    def __init__(self, A, b, c, original_n, n_inequalities=0,
                 n_equalities=None, n_box=0):
        self.A = sps.csr_matrix(A, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.c = np.asarray(c, dtype=float)
        k, N = self.A.shape
        if self.b.shape != (k,) or self.c.shape != (N,):
            raise DimensionError(
                'A is {}x{} but b has {} and c has {} entries'.format(
                    k, N, self.b.size, self.c.size
                )
            )
        if not 0 <= original_n <= N:
            raise DimensionError('original_n must lie in [0, N]')
        self.original_n = int(original_n)
        self.n_inequalities = int(n_inequalities)
        self.n_box = int(n_box)
        if n_equalities is None:
            n_equalities = k - self.n_inequalities - self.n_box
        self.n_equalities = int(n_equalities)
        self.A_T = self.A.T.tocsr()

    @property
    def shape(self):
        return self.A.shape

    @property
    def is_decoding_layout(self):
        """
        True when the row/column blocks follow the decoding embedding.
        """
        k, N = self.A.shape
        return (
            self.n_box == self.original_n and
            k == self.n_inequalities + self.n_equalities + self.n_box and
            N == self.original_n + self.n_inequalities + self.n_box
        )

    def with_cost(self, c):
        """
        Same constraints, different cost vector.
        """
        return StandardFormLP(
            self.A, self.b, c, self.original_n, self.n_inequalities,
            self.n_equalities, self.n_box,
        )

    def cost(self, x):
        return float(self.c @ x)

    def primal_residual(self, x):
        return self.b - self.A @ x

    def to_json(self):
        """
        Debug dump: dimension header and triplet list of A.
        """
        coo = self.A.tocoo()
        return json.dumps({
            'rows': self.A.shape[0],
            'columns': self.A.shape[1],
            'original_n': self.original_n,
            'blocks': {
                'inequalities': self.n_inequalities,
                'equalities': self.n_equalities,
                'box': self.n_box,
            },
            'A': [[int(r), int(col), float(v)]
                  for r, col, v in zip(coo.row, coo.col, coo.data)],
            'b': self.b.tolist(),
            'c': self.c.tolist(),
        }, sort_keys=True)


class DecompositionMap(object):
    """
    Relates a decomposed code to the original one: the first original_n
    coordinates are the original variables, the rest are auxiliaries.
    """
    def __init__(self, original_n, aux_count):
        self.original_n = int(original_n)
        self.aux_count = int(aux_count)

    @property
    def decomposed_n(self):
        return self.original_n + self.aux_count

    def project(self, x):
        """
        :param x: vector of the decomposed code (or a batch, last axis)
        :return: its original coordinates
        """
        return np.asarray(x)[..., :self.original_n]

    def extend_llr(self, gamma):
        """
        Auxiliary variables carry zero cost.
        """
        return np.concatenate([np.asarray(gamma, dtype=float),
                               np.zeros(self.aux_count)])


def check_inequalities(support):
    """
    Odd-subset facets of the convex hull of one parity check: for each
    odd S in the support, sum_S x - sum_{support - S} x <= |S| - 1.
    :param support: sorted variable indices of the check
    :return: list of 2**(d-1) LinearInequality
    """
    support = tuple(sorted(support))
    degree = len(support)
    if degree < 1:
        raise DimensionError('a check needs a non-empty support')
    if degree > MAX_CHECK_DEGREE:
        raise DegreeGuardError(
            'check degree {} exceeds {}; decompose the checks first'.format(
                degree, MAX_CHECK_DEGREE
            )
        )
    result = []
    for size in range(1, degree + 1, 2):
        for odd in itertools.combinations(support, size):
            chosen = set(odd)
            result.append(LinearInequality(
                [(i, 1.0 if i in chosen else -1.0) for i in support],
                size - 1,
            ))
    return result


def build_polytope(matrix):
    """
    Fundamental polytope of a parity-check matrix.
    :param matrix: SparseBinaryMatrix
    :return: IneqSystem
    """
    worst = max(matrix.row_degrees)
    if worst > MAX_CHECK_DEGREE:
        raise DegreeGuardError(
            'check degree {} exceeds {}; decompose the checks first'.format(
                worst, MAX_CHECK_DEGREE
            )
        )
    inequalities = []
    for row in matrix.rows:
        inequalities.extend(check_inequalities(row))
    log.debug('polytope: n=%d, %d inequalities', matrix.n, len(inequalities))
    return IneqSystem(matrix.n, inequalities)


def decompose_checks(matrix, max_degree=3):
    """
    Replaces every check of degree k > max_degree by a chain of k - 2
    degree-3 checks linked through k - 3 auxiliary partial-parity variables.
    :param matrix: SparseBinaryMatrix
    :param max_degree: largest degree kept as is, at least 3
    :return: (decomposed SparseBinaryMatrix, DecompositionMap)
    """
    if max_degree < 3:
        raise DimensionError('max_degree must be at least 3')
    rows = []
    next_aux = matrix.n
    for row in matrix.rows:
        k = len(row)
        if k <= max_degree:
            rows.append(row)
            continue
        aux = list(range(next_aux, next_aux + k - 3))
        next_aux += k - 3
        rows.append((row[0], row[1], aux[0]))
        for t in range(1, k - 3):
            rows.append((aux[t - 1], row[t + 1], aux[t]))
        rows.append((aux[-1], row[k - 2], row[k - 1]))
    aux_count = next_aux - matrix.n
    decomposed = SparseBinaryMatrix(len(rows), next_aux, rows)
    log.debug('decomposition: %d checks -> %d checks, %d auxiliaries',
              matrix.m, decomposed.m, aux_count)
    return decomposed, DecompositionMap(matrix.n, aux_count)


def _independent_rows(dense, threshold=PIVOT_THRESHOLD):
    """
    Rank-revealing pivoted QR on the transposed rows.
    :return: sorted indices of a maximal independent subset of rows
    """
    if not dense.shape[0]:
        return []
    _, r, perm = scipy.linalg.qr(dense.T, mode='economic', pivoting=True)
    diagonal = np.abs(np.diag(r))
    if not diagonal.size or diagonal[0] == 0:
        return []
    rank = int(np.sum(diagonal > threshold * diagonal[0]))
    return sorted(int(p) for p in perm[:rank])


def to_standard_form(polytope, gamma):
    """
    Embeds min <gamma, x> over the polytope as min <c, z>, A z = b, z >= 0.

    Each inequality gets a slack, each upper bound x_i <= 1 gets a box slack.
    Complementary inequality pairs (g x <= 0 and -g x <= 0, coming from
    degree-2 checks) are merged into one slack-free equality row so that the
    embedding keeps a strictly interior point; dependent equality rows are
    dropped.
    :param polytope: IneqSystem
    :param gamma: cost vector of length polytope.n
    :return: StandardFormLP
    """
    n = polytope.n
    gamma = as_llr_vector(gamma, n)

    index = {}
    for r, ineq in enumerate(polytope.inequalities):
        index.setdefault(ineq.coeffs, r)
    merged = set()
    equalities = []
    for r, ineq in enumerate(polytope.inequalities):
        if r in merged:
            continue
        partner = index.get(ineq.negated())
        if (partner is not None and partner not in merged and
                partner != r and
                polytope.inequalities[partner].rhs + ineq.rhs == 0):
            merged.update((r, partner))
            equalities.append(ineq)
    inequalities = [
        ineq for r, ineq in enumerate(polytope.inequalities)
        if r not in merged
    ]

    if equalities:
        eq_dense = np.zeros((len(equalities), n))
        for r, ineq in enumerate(equalities):
            for i, v in ineq.coeffs:
                eq_dense[r, i] = v
        keep = _independent_rows(eq_dense)
        if len(keep) < len(equalities):
            log.debug('pruned %d redundant equality rows',
                      len(equalities) - len(keep))
        equalities = [equalities[r] for r in keep]

    r_count, e_count = len(inequalities), len(equalities)
    k = r_count + e_count + n
    N = n + r_count + n
    rows, cols, vals = [], [], []
    b = np.zeros(k)
    for r, ineq in enumerate(inequalities):
        for i, v in ineq.coeffs:
            rows.append(r)
            cols.append(i)
            vals.append(v)
        rows.append(r)
        cols.append(n + r)
        vals.append(1.0)
        b[r] = ineq.rhs
    for e, ineq in enumerate(equalities):
        for i, v in ineq.coeffs:
            rows.append(r_count + e)
            cols.append(i)
            vals.append(v)
        b[r_count + e] = ineq.rhs
    for i in range(n):
        row = r_count + e_count + i
        rows.extend((row, row))
        cols.extend((i, n + r_count + i))
        vals.extend((1.0, 1.0))
        b[row] = 1.0
    A = sps.csr_matrix((vals, (rows, cols)), shape=(k, N))
    c = np.concatenate([gamma, np.zeros(r_count + n)])
    return StandardFormLP(A, b, c, n, r_count, e_count, n)


def round_iterate(x, tau_round=1e-9):
    """
    Maps entries below 1/2 - tau to 0, above 1/2 + tau to 1, others to 1/2.
    :param x: real vector with entries in [-tau, 1 + tau]
    :param tau_round: half-width of the tie band
    :return: float array over {0, 0.5, 1}
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < -tau_round) or np.any(x > 1 + tau_round) or \
            not np.all(np.isfinite(x)):
        raise DimensionError('entries must lie in [-tau, 1 + tau]')
    rounded = np.full(x.shape, 0.5)
    rounded[x < 0.5 - tau_round] = 0.0
    rounded[x > 0.5 + tau_round] = 1.0
    return rounded


def lp_oracle_dense(lp, max_bases=None):
    """
    Reference optimum for small programs. Basic feasible solutions are
    enumerated when there are at most max_bases column subsets (ties go to
    the lexicographically smallest point); larger desk-scale programs are
    handed to the HiGHS dual simplex, which also returns a vertex.
    :param lp: StandardFormLP
    :param max_bases: enumeration budget, ORACLE_MAX_BASES when None
    :return: (x*, cost)
    """
    if max_bases is None:
        max_bases = app.config['ORACLE_MAX_BASES']
    k, N = lp.A.shape
    if N > ORACLE_MAX_SIMPLEX_DIMENSION or k > ORACLE_MAX_SIMPLEX_DIMENSION:
        raise DimensionGuardError(
            'LP of size {}x{} is beyond the oracle guard'.format(k, N)
        )
    if (N <= ORACLE_MAX_DIMENSION and k <= ORACLE_MAX_DIMENSION and
            math.comb(N, k) <= max_bases):
        return _enumerate_bases(lp)
    return _simplex(lp)


def _enumerate_bases(lp):
    k, N = lp.A.shape
    dense = lp.A.toarray()
    best_x, best_cost = None, None
    for basis in itertools.combinations(range(N), k):
        columns = dense[:, basis]
        if np.linalg.cond(columns) > 1e12:
            continue
        values = np.linalg.solve(columns, lp.b)
        if np.any(values < -1e-9):
            continue
        x = np.zeros(N)
        x[list(basis)] = np.clip(values, 0.0, None)
        cost = float(lp.c @ x)
        if best_cost is None or cost < best_cost - 1e-12:
            best_x, best_cost = x, cost
        elif abs(cost - best_cost) <= 1e-12 and \
                tuple(np.round(x, 12)) < tuple(np.round(best_x, 12)):
            best_x, best_cost = x, cost
    if best_x is None:
        raise InfeasibleLPError('no basic feasible solution exists')
    return best_x, best_cost


def _simplex(lp):
    result = linprog(
        lp.c, A_eq=lp.A, b_eq=lp.b, bounds=(0, None), method='highs-ds',
    )
    if result.status == 2:
        raise InfeasibleLPError(result.message)
    if result.status != 0:
        raise InfeasibleLPError(
            'simplex oracle failed: {}'.format(result.message)
        )
    x = np.clip(result.x, 0.0, None)
    return x, float(lp.c @ x)


def polytope_statistics(matrix, max_degree=3):
    """
    Summary used by the check command and the HTTP API.
    :param matrix: SparseBinaryMatrix
    :param max_degree: decomposition preview threshold
    :return: dict
    """
    degrees = matrix.row_degrees
    stats = {
        'n': matrix.n,
        'm': matrix.m,
        'edges': matrix.edge_count,
        'max_check_degree': max(degrees),
        'min_check_degree': min(degrees),
        'max_variable_degree': max(matrix.column_degrees),
        'inequalities': sum(2 ** (d - 1) for d in degrees),
    }
    decomposed, mapping = decompose_checks(matrix, max_degree)
    stats['decomposition'] = {
        'max_degree': max_degree,
        'checks': decomposed.m,
        'aux_variables': mapping.aux_count,
        'inequalities': sum(2 ** (d - 1) for d in decomposed.row_degrees),
    }
    if max(degrees) <= MAX_CHECK_DEGREE:
        lp = to_standard_form(build_polytope(matrix), np.zeros(matrix.n))
        stats['standard_form'] = {
            'rows': lp.A.shape[0], 'columns': lp.A.shape[1],
        }
    return stats
