# -*- coding: utf-8 -*-
"""
Normal-equation kernels: the implicit operator A D^2 A^T, preconditioned
conjugate gradient, Jacobi preconditioning and a dense Cholesky oracle.
"""
import collections
import logging

import numpy as np
import scipy.linalg
import scipy.sparse as sps

from lp_decoder.exceptions import (
    DimensionError, DimensionGuardError, InnerSolverError,
    NotPositiveDefiniteError,
)

log = logging.getLogger(__name__)  # pylint: disable=invalid-name

DENSE_MAX_DIMENSION = 2000

SolveReport = collections.namedtuple(
    'SolveReport', ['iterations', 'residual', 'converged'],
)


class InnerSystem(object):
    """
    The system (A diag(d2) A^T) u = v, kept in factored form.
    """
    def __init__(self, A, d2, v, A_T=None):
        """
        :param A: k x N sparse matrix with full row rank
        :param d2: strictly positive weights of length N
        :param v: right-hand side of length k
        :param A_T: optional precomputed csr transpose of A
        """
        self.A = sps.csr_matrix(A, dtype=float)
        self.A_T = self.A.T.tocsr() if A_T is None else A_T
        self.d2 = np.asarray(d2, dtype=float)
        self.v = np.asarray(v, dtype=float)
        k, N = self.A.shape
        if self.d2.shape != (N,) or self.v.shape != (k,):
            raise DimensionError(
                'A is {}x{} but d2 has {} and v has {} entries'.format(
                    k, N, self.d2.size, self.v.size
                )
            )
        if not np.all(self.d2 > 0) or not np.all(np.isfinite(self.d2)):
            raise DimensionError('scaling weights must be positive and finite')

    @property
    def h(self):
        return self.A.shape[0]

    def apply(self, w):
        """
        :param w: vector of length k
        :return: A (d2 * (A^T w))
        """
        w = np.asarray(w, dtype=float)
        if w.shape != (self.h,):
            raise DimensionError('operand length does not match system')
        return self.A @ (self.d2 * (self.A_T @ w))

    def diagonal(self):
        """
        :return: diag(N) = sum_i A_ji^2 d2_i
        """
        return np.asarray(self.A.multiply(self.A) @ self.d2).ravel()

    def coupling_matrix(self):
        """
        :return: sparse A diag(d2) A^T in csr form
        """
        return (self.A @ sps.diags(self.d2) @ self.A_T).tocsr()

    def materialize(self):
        """
        :return: dense k x k matrix
        """
        return self.coupling_matrix().toarray()

    def residual(self, u):
        return self.v - self.apply(u)


def apply_inner(system, w):
    """
    Applies the normal-equation operator without materializing it.
    :param system: InnerSystem
    :param w: vector of length k
    :return: A (d2 * (A^T w))
    """
    return system.apply(w)


class JacobiPreconditioner(object):
    """
    Diagonal preconditioner applied as entrywise division.
    """
    def __init__(self, diagonal):
        self.diagonal = np.asarray(diagonal, dtype=float)

    def __call__(self, r):
        return r / self.diagonal


def identity_precond(r):
    return r


def jacobi_precond(system):
    """
    :param system: InnerSystem
    :return: JacobiPreconditioner built from diag(N)
    """
    diagonal = system.diagonal()
    if np.any(diagonal <= 0):
        raise InnerSolverError(
            'zero diagonal entry at rows {}; A is rank deficient'.format(
                np.flatnonzero(diagonal <= 0).tolist()
            )
        )
    return JacobiPreconditioner(diagonal)


def cg_solve(system, precond=None, tol=1e-8, max_iter=None, u0=None):
    """
    Preconditioned conjugate gradient.
    :param system: InnerSystem
    :param precond: callable r -> M^{-1} r, identity when None
    :param tol: relative residual target ||v - N u|| <= tol ||v||
    :param max_iter: iteration cap, 4 h by default
    :param u0: starting vector, zero by default
    :return: (u, SolveReport)
    """
    if tol <= 0:
        raise DimensionError('tolerance must be positive')
    h = system.h
    if max_iter is None:
        max_iter = 4 * h
    if max_iter < 1:
        raise DimensionError('max_iter must be at least 1')
    precond = precond or identity_precond

    v = system.v
    v_norm = np.linalg.norm(v)
    if u0 is None:
        u = np.zeros(h)
        r = v.copy()
    else:
        u = np.array(u0, dtype=float)
        r = system.residual(u)
    if v_norm == 0:
        return np.zeros(h), SolveReport(0, 0.0, True)
    target = tol * v_norm
    if np.linalg.norm(r) <= target:
        return u, SolveReport(0, float(np.linalg.norm(r)), True)

    z = precond(r)
    p = z.copy()
    rz = float(r @ z)
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        q = system.apply(p)
        curvature = float(p @ q)
        if not np.isfinite(curvature) or not np.isfinite(rz):
            raise InnerSolverError('non-finite value in conjugate gradient')
        if curvature <= 0:
            raise NotPositiveDefiniteError(
                'non-positive curvature {:g} in conjugate gradient'.format(
                    curvature
                )
            )
        alpha = rz / curvature
        u += alpha * p
        r -= alpha * q
        if np.linalg.norm(r) <= target:
            converged = True
            break
        z = precond(r)
        rz_next = float(r @ z)
        p = z + (rz_next / rz) * p
        rz = rz_next

    residual = float(np.linalg.norm(system.residual(u)))
    if not np.isfinite(residual):
        raise InnerSolverError('non-finite residual in conjugate gradient')
    log.debug('cg: %d iterations, residual %.3e, converged %s',
              iterations, residual, converged)
    return u, SolveReport(iterations, residual, converged)


def cholesky_solve_dense(system):
    """
    Materializes the normal matrix and solves it by Cholesky factorization.
    :param system: InnerSystem with k <= 2000
    :return: u
    """
    if system.h > DENSE_MAX_DIMENSION:
        raise DimensionGuardError(
            'dense solve limited to {} rows'.format(DENSE_MAX_DIMENSION)
        )
    dense = system.materialize()
    try:
        factor = scipy.linalg.cho_factor(dense, lower=True)
    except (np.linalg.LinAlgError, ValueError) as error:
        raise NotPositiveDefiniteError(
            'Cholesky factorization failed: {}'.format(error)
        )
    return scipy.linalg.cho_solve(factor, system.v)


def dump_triplets(matrix):
    """
    Debug text dump: header "rows cols nnz", then "row col value" lines.
    :param matrix: scipy sparse matrix
    :return: string
    """
    coo = sps.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    lines = ['{} {} {}'.format(coo.shape[0], coo.shape[1], coo.nnz)]
    lines.extend(
        '{} {} {!r}'.format(int(coo.row[i]), int(coo.col[i]),
                            float(coo.data[i]))
        for i in order
    )
    return '\n'.join(lines) + '\n'


class InnerSolver(object):
    """
    Base class for all normal-equation solvers used by the interior-point
    drivers. Subclasses may keep state between outer iterations, so one
    instance serves one decode call.
    """
    name = None

    def __init__(self):
        self.calls = 0
        self.iterations = 0
        self.fallbacks = 0
        self.unconverged = 0
        self.max_residual = 0.0

    def solve(self, system, tol, u0=None):
        """
        Method to solve the system.
        :param system: InnerSystem
        :param tol: relative tolerance
        :param u0: starting guess; direct solvers ignore it
        :return: (u, SolveReport)
        """
        raise NotImplementedError

    def record(self, report):
        """
        Accumulates statistics of one solve.
        """
        self.calls += 1
        self.iterations += report.iterations
        self.max_residual = max(self.max_residual, report.residual)
        if not report.converged:
            self.unconverged += 1

    def statistics(self):
        return {
            'solver': self.name,
            'calls': self.calls,
            'iterations': self.iterations,
            'fallbacks': self.fallbacks,
            'unconverged': self.unconverged,
            'max_residual': self.max_residual,
        }


class ConjugateGradientSolver(InnerSolver):
    """
    Jacobi-preconditioned conjugate gradient.
    """
    name = 'cg'

    def __init__(self, max_iter_factor=4):
        super(ConjugateGradientSolver, self).__init__()
        self.max_iter_factor = max_iter_factor

    def solve(self, system, tol, u0=None):
        u, report = cg_solve(
            system, jacobi_precond(system), tol,
            self.max_iter_factor * system.h, u0=u0,
        )
        self.record(report)
        return u, report


class DenseCholeskySolver(InnerSolver):
    """
    Dense Cholesky with a least-squares fallback for the nearly singular
    systems met close to the optimum.
    """
    name = 'dense'

    def solve(self, system, tol, u0=None):
        try:
            u = cholesky_solve_dense(system)
        except NotPositiveDefiniteError as error:
            log.warning('%s; falling back to least squares', error)
            self.fallbacks += 1
            u = scipy.linalg.lstsq(system.materialize(), system.v)[0]
        if not np.all(np.isfinite(u)):
            raise InnerSolverError('non-finite dense solution')
        residual = float(np.linalg.norm(system.residual(u)))
        report = SolveReport(1, residual, True)
        self.record(report)
        return u, report
