# -*- coding: utf-8 -*-
"""
Binary linear codes given by sparse parity-check matrices: alist parsing and
serialization, codeword predicates, small-code enumeration, exhaustive ML
decoding and regular LDPC generation.
"""
import logging

import numpy as np

from lp_decoder.exceptions import (
    AlistFormatError, DimensionError, DimensionGuardError,
)

log = logging.getLogger(__name__)  # pylint: disable=invalid-name

MAX_ENUMERATION_DIMENSION = 20


class SparseBinaryMatrix(object):
    """
    Parity-check matrix over GF(2) stored as the sorted support of each row.
    Instances are immutable and hashable, so they can key caches and be
    shared between worker threads.
    """
    __slots__ = ('m', 'n', 'rows')

    def __init__(self, m, n, rows):
        """
        :param m: number of checks
        :param n: number of variables
        :param rows: iterable of m index collections (0-based)
        """
        rows = tuple(tuple(sorted(int(i) for i in row)) for row in rows)
        if len(rows) != m:
            raise DimensionError(
                'expected {} rows, got {}'.format(m, len(rows))
            )
        for j, row in enumerate(rows):
            if not row:
                raise DimensionError('row {} has empty support'.format(j))
            if len(set(row)) != len(row):
                raise DimensionError('row {} repeats an index'.format(j))
            if row[0] < 0 or row[-1] >= n:
                raise DimensionError(
                    'row {} has an index outside [0, {})'.format(j, n)
                )
        object.__setattr__(self, 'm', int(m))
        object.__setattr__(self, 'n', int(n))
        object.__setattr__(self, 'rows', rows)

    def __setattr__(self, name, value):
        raise AttributeError('SparseBinaryMatrix is immutable')

    def __eq__(self, other):
        return (
            isinstance(other, SparseBinaryMatrix) and
            (self.m, self.n, self.rows) == (other.m, other.n, other.rows)
        )

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.m, self.n, self.rows))

    def __reduce__(self):
        return (SparseBinaryMatrix, (self.m, self.n, self.rows))

    def __repr__(self):
        return 'SparseBinaryMatrix(m={}, n={}, edges={})'.format(
            self.m, self.n, self.edge_count
        )

    @classmethod
    def from_dense(cls, dense):
        """
        Builds a matrix from a 0/1 array-like.
        :param dense: m x n array-like
        :return: SparseBinaryMatrix
        """
        dense = np.asarray(dense)
        if dense.ndim != 2:
            raise DimensionError('dense matrix must be two-dimensional')
        rows = [np.flatnonzero(dense[j] % 2) for j in range(dense.shape[0])]
        return cls(dense.shape[0], dense.shape[1], rows)

    def to_dense(self):
        """
        :return: m x n uint8 array
        """
        dense = np.zeros((self.m, self.n), dtype=np.uint8)
        for j, row in enumerate(self.rows):
            dense[j, list(row)] = 1
        return dense

    @property
    def columns(self):
        """
        Column supports (checks containing each variable), sorted.
        """
        columns = [[] for _ in range(self.n)]
        for j, row in enumerate(self.rows):
            for i in row:
                columns[i].append(j)
        return tuple(tuple(col) for col in columns)

    @property
    def row_degrees(self):
        return [len(row) for row in self.rows]

    @property
    def column_degrees(self):
        return [len(col) for col in self.columns]

    @property
    def edge_count(self):
        return sum(len(row) for row in self.rows)


def as_binary_word(x, n=None):
    """
    Normalizes a word to a uint8 array of zeros and ones.
    :param x: array-like over {0, 1}
    :param n: expected length or None
    :return: numpy uint8 array
    """
    word = np.asarray(x)
    if word.ndim != 1:
        raise DimensionError('a word must be one-dimensional')
    if n is not None and word.shape[0] != n:
        raise DimensionError(
            'word length {} does not match code length {}'.format(
                word.shape[0], n
            )
        )
    if not np.all((word == 0) | (word == 1)):
        raise DimensionError('a binary word may only hold 0 and 1')
    return word.astype(np.uint8)


def as_llr_vector(gamma, n=None):
    """
    Normalizes log-likelihood ratios to a finite float array.
    :param gamma: array-like of reals
    :param n: expected length or None
    :return: numpy float array
    """
    values = np.asarray(gamma, dtype=float)
    if values.ndim != 1:
        raise DimensionError('an LLR vector must be one-dimensional')
    if n is not None and values.shape[0] != n:
        raise DimensionError(
            'LLR length {} does not match code length {}'.format(
                values.shape[0], n
            )
        )
    if not np.all(np.isfinite(values)):
        raise DimensionError('LLR entries must be finite')
    return values


def parse_alist(text):
    """
    Parses an alist document (1-based indices, see README) into a matrix.
    Blank lines are skipped; reported line numbers are physical ones.
    :param text: alist document as a string or a file-like object
    :return: SparseBinaryMatrix
    """
    if hasattr(text, 'read'):
        text = text.read()
    lines = [
        (number, line.split())
        for number, line in enumerate(text.splitlines(), 1)
        if line.strip()
    ]
    cursor = iter(lines)

    def next_line(what):
        try:
            return next(cursor)
        except StopIteration:
            raise AlistFormatError(
                'unexpected end of document, expected {}'.format(what),
                len(text.splitlines()) + 1,
            )

    def integers(number, tokens):
        try:
            return [int(token) for token in tokens]
        except ValueError:
            raise AlistFormatError('non-integer entry', number)

    number, tokens = next_line('header "n m"')
    header = integers(number, tokens)
    if len(header) != 2 or min(header) < 1:
        raise AlistFormatError('malformed header, expected "n m"', number)
    n, m = header

    number, tokens = next_line('maximum degrees')
    max_degrees = integers(number, tokens)
    if len(max_degrees) != 2 or min(max_degrees) < 0:
        raise AlistFormatError(
            'malformed maximum degree line, expected two integers', number
        )
    max_col_degree, max_row_degree = max_degrees

    number, tokens = next_line('column degrees')
    col_degrees = integers(number, tokens)
    if len(col_degrees) != n:
        raise AlistFormatError(
            'expected {} column degrees, got {}'.format(n, len(col_degrees)),
            number,
        )
    if max(col_degrees) != max_col_degree or min(col_degrees) < 0:
        raise AlistFormatError(
            'column degrees disagree with maximum {}'.format(max_col_degree),
            number,
        )

    number, tokens = next_line('row degrees')
    row_degrees = integers(number, tokens)
    if len(row_degrees) != m:
        raise AlistFormatError(
            'expected {} row degrees, got {}'.format(m, len(row_degrees)),
            number,
        )
    if max(row_degrees) != max_row_degree or min(row_degrees) < 1:
        raise AlistFormatError(
            'row degrees disagree with maximum {}'.format(max_row_degree),
            number,
        )

    def support(degree, bound, width, what):
        number, tokens = next_line(what)
        entries = integers(number, tokens)
        if len(entries) > width:
            raise AlistFormatError(
                'more than {} entries in {}'.format(width, what), number
            )
        if len(entries) < degree:
            raise AlistFormatError(
                'degree mismatch in {}: declared {}, found {}'.format(
                    what, degree, len(entries)
                ),
                number,
            )
        indices, padding = entries[:degree], entries[degree:]
        for index in indices:
            if not 1 <= index <= bound:
                raise AlistFormatError(
                    'index {} out of range [1, {}] in {}'.format(
                        index, bound, what
                    ),
                    number,
                )
        if any(padding):
            raise AlistFormatError(
                'degree mismatch in {}: declared {}, found {}'.format(
                    what, degree, degree + sum(1 for p in padding if p)
                ),
                number,
            )
        if len(set(indices)) != len(indices):
            raise AlistFormatError('repeated index in {}'.format(what), number)
        return number, sorted(index - 1 for index in indices)

    columns = []
    for i, degree in enumerate(col_degrees):
        columns.append(
            support(degree, m, max_col_degree, 'column {}'.format(i + 1))[1]
        )

    rows = []
    for j, degree in enumerate(row_degrees):
        number, row = support(degree, n, max_row_degree,
                              'row {}'.format(j + 1))
        expected = sorted(i for i, col in enumerate(columns) if j in col)
        if row != expected:
            raise AlistFormatError(
                'row {} disagrees with the column section'.format(j + 1),
                number,
            )
        rows.append(row)

    for number, tokens in cursor:
        raise AlistFormatError('trailing data after row section', number)

    log.debug('parsed alist: n=%d m=%d', n, m)
    return SparseBinaryMatrix(m, n, rows)


def format_alist(matrix):
    """
    Serializes a matrix to canonical alist text: single spaces, zero padding,
    trailing newline.
    :param matrix: SparseBinaryMatrix
    :return: string
    """
    columns = matrix.columns
    col_degrees = [len(col) for col in columns]
    row_degrees = matrix.row_degrees
    max_col, max_row = max(col_degrees), max(row_degrees)

    def padded(indices, width):
        entries = [i + 1 for i in indices] + [0] * (width - len(indices))
        return ' '.join(str(entry) for entry in entries)

    lines = [
        '{} {}'.format(matrix.n, matrix.m),
        '{} {}'.format(max_col, max_row),
        ' '.join(str(d) for d in col_degrees),
        ' '.join(str(d) for d in row_degrees),
    ]
    lines.extend(padded(col, max_col) for col in columns)
    lines.extend(padded(row, max_row) for row in matrix.rows)
    return '\n'.join(lines) + '\n'


def load_alist(path):
    """
    Reads an alist file.
    :param path: file name
    :return: SparseBinaryMatrix
    """
    with open(path, 'r') as alist:
        return parse_alist(alist.read())


def syndrome(matrix, x):
    """
    :param matrix: SparseBinaryMatrix
    :param x: binary word of length n
    :return: uint8 array of m parities
    """
    word = as_binary_word(x, matrix.n)
    return np.array(
        [int(word[list(row)].sum()) % 2 for row in matrix.rows],
        dtype=np.uint8,
    )


def is_codeword(matrix, x):
    """
    True iff every check has even overlap with the support of x.
    :param matrix: SparseBinaryMatrix
    :param x: binary word of length n
    :return: bool
    """
    return not syndrome(matrix, x).any()


def gf2_row_reduce(matrix):
    """
    Reduced row echelon form over GF(2).
    :param matrix: SparseBinaryMatrix
    :return: (reduced uint8 array with rank rows, list of pivot columns)
    """
    work = matrix.to_dense().copy()
    pivots = []
    rank = 0
    for col in range(matrix.n):
        candidates = np.flatnonzero(work[rank:, col]) + rank
        if not candidates.size:
            continue
        pivot = candidates[0]
        if pivot != rank:
            work[[rank, pivot]] = work[[pivot, rank]]
        others = np.flatnonzero(work[:, col])
        others = others[others != rank]
        work[others] ^= work[rank]
        pivots.append(col)
        rank += 1
        if rank == matrix.m:
            break
    return work[:rank], pivots


def gf2_rank(matrix):
    """
    :param matrix: SparseBinaryMatrix
    :return: rank of the matrix over GF(2)
    """
    return len(gf2_row_reduce(matrix)[1])


def enumerate_codewords(matrix):
    """
    Lists all codewords in lexicographic order.
    :param matrix: SparseBinaryMatrix
    :return: uint8 array of shape (2**k, n)
    """
    reduced, pivots = gf2_row_reduce(matrix)
    free = [i for i in range(matrix.n) if i not in set(pivots)]
    if len(free) > MAX_ENUMERATION_DIMENSION:
        raise DimensionGuardError(
            'code dimension {} exceeds enumeration guard {}'.format(
                len(free), MAX_ENUMERATION_DIMENSION
            )
        )
    count = 1 << len(free)
    assignments = (
        (np.arange(count)[:, None] >> np.arange(len(free))[None, :]) & 1
    ).astype(np.uint8)
    words = np.zeros((count, matrix.n), dtype=np.uint8)
    words[:, free] = assignments
    if pivots:
        dependent = reduced[:, free].astype(np.int64)
        words[:, pivots] = (assignments.astype(np.int64) @ dependent.T) % 2
    order = np.lexsort(words.T[::-1])
    return words[order]


def ml_decode_exhaustive(matrix, gamma):
    """
    Maximum-likelihood decoding by scanning every codeword.
    Ties go to the lexicographically smallest word.
    :param matrix: SparseBinaryMatrix
    :param gamma: LLR vector, positive values favor 0
    :return: (codeword as uint8 array, cost)
    """
    gamma = as_llr_vector(gamma, matrix.n)
    words = enumerate_codewords(matrix)
    costs = words.astype(float) @ gamma
    best = int(np.argmin(costs))
    return words[best].copy(), float(costs[best])


def gen_regular_ldpc(n, wc, wr, seed, max_attempts=1000):
    """
    Gallager-style regular LDPC construction: variable sockets are shuffled
    and dealt to checks, and sockets that would repeat an edge are swapped
    with sockets of other checks.
    :param n: code length
    :param wc: column weight
    :param wr: row weight
    :param seed: integer seed
    :param max_attempts: reshuffles tried before giving up
    :return: SparseBinaryMatrix with m = n * wc / wr rows
    """
    if wc < 2 or wr < 2:
        raise DimensionError('column and row weights must be at least 2')
    if (n * wc) % wr:
        raise DimensionError(
            'n * wc = {} is not divisible by wr = {}'.format(n * wc, wr)
        )
    if wr > n:
        raise DimensionError('row weight {} exceeds length {}'.format(wr, n))
    m = n * wc // wr
    if wc > m:
        raise DimensionError(
            'column weight {} exceeds check count {}'.format(wc, m)
        )
    rng = np.random.default_rng(seed)
    sockets = np.repeat(np.arange(n), wc)
    for attempt in range(max_attempts):
        groups = rng.permutation(sockets).reshape(m, wr)
        if _repair_collisions(groups, rng):
            log.debug('regular LDPC built after %d reshuffles', attempt)
            return SparseBinaryMatrix(m, n, [sorted(g) for g in groups])
    raise DimensionError(
        'no collision-free assignment found for n={} wc={} wr={}'.format(
            n, wc, wr
        )
    )


def _repair_collisions(groups, rng, max_swaps=10000):
    """
    Swaps repeated sockets into other checks in place.
    :return: True when every check has distinct variables
    """
    m, wr = groups.shape
    for _ in range(max_swaps):
        collision = None
        for j in range(m):
            values, first = np.unique(groups[j], return_index=True)
            if values.size < wr:
                duplicate = np.setdiff1d(np.arange(wr), first)[0]
                collision = (j, duplicate)
                break
        if collision is None:
            return True
        j, p = collision
        a = groups[j, p]
        swapped = False
        for flat in rng.permutation(m * wr):
            k, q = divmod(int(flat), wr)
            b = groups[k, q]
            if k == j or a in groups[k] or b in groups[j]:
                continue
            groups[j, p], groups[k, q] = b, a
            swapped = True
            break
        if not swapped:
            return False
    return False
