# -*- coding: utf-8 -*-
"""
LP decoder unit tests.
"""
import csv
import datetime
import io
import json
import os.path
import shutil
import tempfile
import unittest

import numpy as np
import scipy.sparse as sps
from mock import Mock, patch

import run
import scripts

from lp_decoder import main
from lp_decoder.blueprints.api_v1 import utils
from lp_decoder.cache import Cache, MemoryCache, cached
from lp_decoder import channels, cli, codes, gabp, harness, ipm, linalg
from lp_decoder import polytope
from lp_decoder.exceptions import (
    AlistFormatError, ChannelError, ConfigError, DimensionError,
    DimensionGuardError, FormulationError, InnerSolverError,
    NotPositiveDefiniteError,
)

TEST_DATA_DIR = os.path.join(
    os.path.dirname(__file__), '..', '..', 'runtime', 'data'
)

HAMMING_ALIST = os.path.join(TEST_DATA_DIR, 'hamming74.alist')

REPETITION_ALIST = os.path.join(TEST_DATA_DIR, 'repetition3.alist')

HAMMING_TEXT = (
    '7 3\n3 4\n3 2 2 2 1 1 1\n4 4 4\n'
    '1 2 3\n1 2 0\n1 3 0\n2 3 0\n1 0 0\n2 0 0\n3 0 0\n'
    '1 2 3 5\n1 2 4 6\n1 3 4 7\n'
)


def hamming():
    return codes.load_alist(HAMMING_ALIST)


def repetition():
    return codes.load_alist(REPETITION_ALIST)


def config(**kwargs):
    """
    Defaults from the app config with overrides.
    """
    return ipm.SolverConfig.from_config(main.app.config, **kwargs)


def oracle_cost(matrix, gamma):
    """
    Exact LP optimum of the undecomposed embedding.
    """
    lp = ipm.build_embedding(matrix, None).lp
    cost = np.zeros(lp.shape[1])
    cost[:matrix.n] = gamma
    return polytope.lp_oracle_dense(lp.with_cost(cost))


def segment_lp(c=(1.0, 0.0)):
    """
    minimize <c, x> subject to x_1 + x_2 = 1, x >= 0.
    """
    return polytope.StandardFormLP(
        sps.csr_matrix([[1.0, 1.0]]), [1.0], list(c), 2,
    )


class TruncatedSolver(linalg.DenseCholeskySolver):
    """
    Dense solver whose answers carry a fixed error, like a conjugate
    gradient run stopped at its iteration cap.
    """
    def __init__(self, error, perturbed_calls=None):
        super(TruncatedSolver, self).__init__()
        self.error = np.asarray(error, dtype=float)
        self.perturbed_calls = perturbed_calls

    def solve(self, system, tol, u0=None):
        u, report = super(TruncatedSolver, self).solve(system, tol, u0)
        if self.perturbed_calls is None or \
                self.calls <= self.perturbed_calls:
            u = u + self.error
            report = linalg.SolveReport(report.iterations, report.residual,
                                        False)
        return u, report


class CodesTestCase(unittest.TestCase):
    """
    Parity-check matrices, alist files and codeword helpers.
    """

    def setUp(self):
        """
        Before each test, set up a environment.
        """
        self.matrix = hamming()

    def test_parse_alist(self):
        """
        Test parsing of the (7,4) Hamming code.
        """
        self.assertEqual(self.matrix.m, 3)
        self.assertEqual(self.matrix.n, 7)
        self.assertEqual(
            self.matrix.rows,
            ((0, 1, 2, 4), (0, 1, 3, 5), (0, 2, 3, 6)),
        )
        self.assertEqual(self.matrix.column_degrees, [3, 2, 2, 2, 1, 1, 1])
        self.assertEqual(self.matrix.edge_count, 12)

    def test_format_alist(self):
        """
        Canonical text is reproduced exactly.
        """
        self.assertEqual(codes.format_alist(self.matrix), HAMMING_TEXT)

    def test_parse_alist_blank_lines_and_padding(self):
        """
        Blank lines and omitted padding zeros are accepted.
        """
        text = '\n' + HAMMING_TEXT.replace('1 2 0\n', '1 2\n\n')
        self.assertEqual(codes.parse_alist(text), self.matrix)

    def test_parse_alist_index_zero(self):
        """
        An index 0 inside the declared degree is out of range.
        """
        text = HAMMING_TEXT.replace('1 2 3\n1 2 0', '0 2 3\n1 2 0', 1)
        with self.assertRaises(AlistFormatError) as context:
            codes.parse_alist(text)
        self.assertEqual(context.exception.line, 5)
        self.assertIn('line 5', str(context.exception))

    def test_parse_alist_physical_line_numbers(self):
        """
        Reported line numbers count blank lines too.
        """
        text = '\n' + HAMMING_TEXT.replace('1 2 3\n1 2 0', '0 2 3\n1 2 0', 1)
        with self.assertRaises(AlistFormatError) as context:
            codes.parse_alist(text)
        self.assertEqual(context.exception.line, 6)

    def test_parse_alist_degree_mismatch(self):
        """
        Fewer indices than the declared column degree.
        """
        text = HAMMING_TEXT.replace('1 2 3\n1 2 0', '1 2 0\n1 2 0', 1)
        with self.assertRaises(AlistFormatError) as context:
            codes.parse_alist(text)
        self.assertEqual(context.exception.line, 5)

    def test_parse_alist_inconsistent_sections(self):
        """
        The row section must agree with the column section.
        """
        text = HAMMING_TEXT.replace('1 3 4 7\n', '1 3 5 7\n')
        with self.assertRaises(AlistFormatError):
            codes.parse_alist(text)

    def test_parse_alist_malformed(self):
        """
        Truncated, trailing and non-numeric documents are rejected.
        """
        for text in ('', '7\n', HAMMING_TEXT + '1 2\n',
                     HAMMING_TEXT.replace('4 4 4', '4 x 4')):
            with self.assertRaises(AlistFormatError):
                codes.parse_alist(text)

    def test_matrix_immutable(self):
        """
        Matrices are immutable and hashable.
        """
        with self.assertRaises(AttributeError):
            self.matrix.n = 8
        same = codes.SparseBinaryMatrix.from_dense(self.matrix.to_dense())
        self.assertEqual(same, self.matrix)
        self.assertEqual(hash(same), hash(self.matrix))
        with self.assertRaises(DimensionError):
            codes.SparseBinaryMatrix(1, 3, [[0, 3]])

    def test_syndrome(self):
        """
        Test syndromes and codeword membership.
        """
        error = [1, 0, 0, 0, 0, 0, 0]
        self.assertEqual(list(codes.syndrome(self.matrix, error)), [1, 1, 1])
        self.assertFalse(codes.is_codeword(self.matrix, error))
        self.assertTrue(codes.is_codeword(self.matrix, [0] * 7))
        self.assertTrue(codes.is_codeword(self.matrix, [1] * 7))
        with self.assertRaises(DimensionError):
            codes.is_codeword(self.matrix, [0] * 6)
        with self.assertRaises(DimensionError):
            codes.syndrome(self.matrix, [2, 0, 0, 0, 0, 0, 0])

    def test_llr_vector(self):
        """
        LLR vectors must be finite and of the code length.
        """
        with self.assertRaises(DimensionError):
            codes.as_llr_vector([1.0, float('nan')])
        with self.assertRaises(DimensionError):
            codes.as_llr_vector([1.0, 2.0], 3)

    def test_enumerate_codewords(self):
        """
        Sixteen codewords in lexicographic order.
        """
        words = codes.enumerate_codewords(self.matrix)
        self.assertEqual(words.shape, (16, 7))
        self.assertEqual(list(words[0]), [0] * 7)
        self.assertEqual(list(words[-1]), [1] * 7)
        as_tuples = [tuple(word) for word in words]
        self.assertEqual(as_tuples, sorted(set(as_tuples)))
        for word in words:
            self.assertTrue(codes.is_codeword(self.matrix, word))
        self.assertEqual(codes.gf2_rank(self.matrix), 3)

    def test_enumerate_codewords_guard(self):
        """
        Codes of dimension above 20 are not enumerated.
        """
        matrix = codes.SparseBinaryMatrix(1, 22, [[0, 1]])
        with self.assertRaises(DimensionGuardError):
            codes.enumerate_codewords(matrix)

    def test_ml_decode_exhaustive(self):
        """
        Test exhaustive maximum-likelihood decoding and tie breaking.
        """
        word, cost = codes.ml_decode_exhaustive(
            self.matrix, [-1, 1, 1, 1, 1, 1, 1]
        )
        self.assertEqual(list(word), [0] * 7)
        self.assertEqual(cost, 0.0)
        for codeword in codes.enumerate_codewords(self.matrix):
            word, cost = codes.ml_decode_exhaustive(
                self.matrix, 1.0 - 2.0 * codeword
            )
            self.assertEqual(list(word), list(codeword))
            self.assertEqual(cost, -float(codeword.sum()))
        word, _ = codes.ml_decode_exhaustive(self.matrix, [0.0] * 7)
        self.assertEqual(list(word), [0] * 7)

    def test_gen_regular_ldpc(self):
        """
        Regular construction is deterministic per seed.
        """
        matrix = codes.gen_regular_ldpc(12, 3, 6, seed=7)
        self.assertEqual((matrix.m, matrix.n), (6, 12))
        self.assertEqual(matrix.row_degrees, [6] * 6)
        self.assertEqual(matrix.column_degrees, [3] * 12)
        self.assertEqual(matrix, codes.gen_regular_ldpc(12, 3, 6, seed=7))
        with self.assertRaises(DimensionError):
            codes.gen_regular_ldpc(10, 3, 4, seed=1)


class PolytopeTestCase(unittest.TestCase):
    """
    Fundamental polytope, embedding, decomposition, rounding and oracle.
    """

    def setUp(self):
        """
        Before each test, set up a environment.
        """
        self.matrix = hamming()
        self.rng = np.random.default_rng(5)

    def test_check_inequalities(self):
        """
        A degree-d check contributes 2**(d-1) odd-subset inequalities.
        """
        inequalities = polytope.check_inequalities((0, 1, 2))
        self.assertEqual(len(inequalities), 4)
        self.assertIn(
            polytope.LinearInequality({0: 1, 1: -1, 2: -1}, 0), inequalities
        )
        self.assertIn(
            polytope.LinearInequality({0: 1, 1: 1, 2: 1}, 2), inequalities
        )
        single = polytope.check_inequalities((4,))
        self.assertEqual(single, [polytope.LinearInequality({4: 1}, 0)])

    def test_build_polytope(self):
        """
        Codewords are feasible, single errors are not.
        """
        system = polytope.build_polytope(self.matrix)
        self.assertEqual(len(system), 24)
        for word in codes.enumerate_codewords(self.matrix):
            self.assertTrue(system.is_feasible(word))
        self.assertFalse(system.is_feasible([1, 0, 0, 0, 0, 0, 0]))
        self.assertTrue(system.is_feasible([0.5] * 7))
        self.assertEqual(json.loads(system.to_json())['n'], 7)

    def test_polytope_symmetry(self):
        """
        Reflecting a feasible point through a codeword keeps it feasible.
        """
        system = polytope.build_polytope(self.matrix)
        words = codes.enumerate_codewords(self.matrix).astype(float)
        for _ in range(100):
            weights = self.rng.dirichlet(np.ones(len(words)))
            point = weights @ words
            self.assertTrue(system.is_feasible(point))
            for word in words:
                self.assertTrue(system.is_feasible(np.abs(point - word)))

    def test_standard_form_shapes(self):
        """
        Test embedding dimensions with and without degree-2 checks.
        """
        lp = polytope.to_standard_form(
            polytope.build_polytope(self.matrix), np.zeros(7)
        )
        self.assertEqual(lp.shape, (31, 38))
        self.assertEqual(
            (lp.n_inequalities, lp.n_equalities, lp.n_box), (24, 0, 7)
        )
        self.assertTrue(lp.is_decoding_layout)

        segment = polytope.to_standard_form(
            polytope.build_polytope(repetition()), np.zeros(3)
        )
        self.assertEqual(segment.shape, (5, 6))
        self.assertEqual(segment.n_equalities, 2)
        self.assertEqual(json.loads(segment.to_json())['rows'], 5)

    def test_standard_form_prunes_dependent_equalities(self):
        """
        A cycle of degree-2 checks yields one redundant equality.
        """
        cycle = codes.SparseBinaryMatrix(3, 3, [[0, 1], [1, 2], [0, 2]])
        lp = polytope.to_standard_form(
            polytope.build_polytope(cycle), np.zeros(3)
        )
        self.assertEqual(lp.n_equalities, 2)
        self.assertEqual(lp.shape, (5, 6))

    def test_feasible_primal_start(self):
        """
        All Hamming inequality slacks equal one at the center.
        """
        lp = ipm.build_embedding(self.matrix, None).lp
        x = ipm.feasible_primal_start(lp)
        np.testing.assert_allclose(x[:7], 0.5)
        np.testing.assert_allclose(x[7:31], 1.0)
        np.testing.assert_allclose(x[31:], 0.5)
        self.assertLessEqual(np.max(np.abs(lp.primal_residual(x))), 1e-12)

    def test_feasible_start_degree_one(self):
        """
        A degree-1 check leaves no interior.
        """
        matrix = codes.SparseBinaryMatrix(2, 3, [[0], [0, 1, 2]])
        lp = ipm.build_embedding(matrix, None).lp
        with self.assertRaises(FormulationError):
            ipm.feasible_primal_start(lp)

    def test_feasible_dual_start(self):
        """
        Dual start is exactly feasible with slacks at least one.
        """
        lp = ipm.build_embedding(self.matrix, None).lp.with_cost(
            np.concatenate([self.rng.standard_normal(7), np.zeros(31)])
        )
        lam, s = ipm.feasible_dual_start(lp)
        self.assertTrue(np.all(s >= 1 - 1e-12))
        np.testing.assert_allclose(lp.c - lp.A_T @ lam - s, 0, atol=1e-12)

    def test_decompose_checks(self):
        """
        Degree-4 checks become pairs of degree-3 checks with one auxiliary.
        """
        decomposed, mapping = polytope.decompose_checks(self.matrix, 3)
        self.assertEqual((decomposed.m, decomposed.n), (6, 10))
        self.assertEqual(decomposed.row_degrees, [3] * 6)
        self.assertEqual(mapping.aux_count, 3)
        projected = set(
            tuple(word) for word in
            mapping.project(codes.enumerate_codewords(decomposed))
        )
        original = set(
            tuple(word) for word in codes.enumerate_codewords(self.matrix)
        )
        self.assertEqual(projected, original)
        self.assertEqual(list(mapping.extend_llr([1.0] * 7)),
                         [1.0] * 7 + [0.0] * 3)
        with self.assertRaises(DimensionError):
            polytope.decompose_checks(self.matrix, 2)

    def test_round_iterate(self):
        """
        Test rounding to {0, 1/2, 1}.
        """
        rounded = polytope.round_iterate([0.2, 0.5, 0.7, 0.5 + 1e-10, 0.0])
        self.assertEqual(list(rounded), [0.0, 0.5, 1.0, 0.5, 0.0])
        rounded = polytope.round_iterate([0.49999, 0.50001], 1e-4)
        self.assertEqual(list(rounded), [0.5, 0.5])
        with self.assertRaises(DimensionError):
            polytope.round_iterate([1.5])

    def test_lp_oracle_enumeration(self):
        """
        Test the basis-enumeration oracle on tiny programs.
        """
        x, cost = polytope.lp_oracle_dense(segment_lp())
        np.testing.assert_allclose(x, [0.0, 1.0])
        self.assertEqual(cost, 0.0)
        lp = ipm.build_embedding(repetition(), None).lp
        x, cost = polytope.lp_oracle_dense(
            lp.with_cost([1.0, 1.0, -3.0, 0.0, 0.0, 0.0])
        )
        np.testing.assert_allclose(x[:3], [1.0, 1.0, 1.0], atol=1e-9)
        self.assertAlmostEqual(cost, -1.0)

    def test_lp_oracle_simplex(self):
        """
        Larger programs go to the simplex path.
        """
        for word in codes.enumerate_codewords(self.matrix):
            x, cost = oracle_cost(self.matrix, 1.0 - 2.0 * word)
            np.testing.assert_allclose(x[:7], word, atol=1e-9)
            self.assertAlmostEqual(cost, -float(word.sum()))

    def test_lp_oracle_guard(self):
        """
        Programs above the size guard are refused.
        """
        matrix = codes.gen_regular_ldpc(24, 3, 6, seed=1)
        lp = polytope.to_standard_form(
            polytope.build_polytope(matrix), np.zeros(24)
        )
        with self.assertRaises(DimensionGuardError):
            polytope.lp_oracle_dense(lp)

    def test_lp_oracle_budget_from_config(self):
        """
        The enumeration budget comes from ORACLE_MAX_BASES.
        """
        with patch('lp_decoder.polytope._simplex') as simplex_mock:
            simplex_mock.return_value = (np.array([0.0, 1.0]), 0.0)
            polytope.lp_oracle_dense(segment_lp())
            self.assertFalse(simplex_mock.called)
            with patch.dict(main.app.config, {'ORACLE_MAX_BASES': 1}):
                polytope.lp_oracle_dense(segment_lp())
            self.assertTrue(simplex_mock.called)
        with patch.dict(main.app.config, {'ORACLE_MAX_BASES': 0}):
            x, cost = polytope.lp_oracle_dense(segment_lp())
        np.testing.assert_allclose(x, [0.0, 1.0], atol=1e-9)
        self.assertAlmostEqual(cost, 0.0)

    def test_fractional_vertices_half_bound(self):
        """
        Every fractional LP vertex of a code with checks of degree at least
        two has a coordinate of at least 1/2.
        """
        matrix = codes.gen_regular_ldpc(12, 3, 6, seed=7)
        self.assertGreaterEqual(min(matrix.row_degrees), 2)
        rng = np.random.default_rng(5)
        harvested = 0
        for _ in range(20000):
            x, _ = oracle_cost(matrix, rng.standard_normal(12))
            point = x[:12]
            if not np.any((point > 1e-7) & (point < 1 - 1e-7)):
                continue
            harvested += 1
            self.assertGreaterEqual(np.max(point), 0.5 - 1e-7)
            if harvested == 200:
                break
        self.assertEqual(harvested, 200)

    def test_polytope_statistics(self):
        """
        Test the check summary of the Hamming code.
        """
        stats = polytope.polytope_statistics(self.matrix)
        self.assertEqual(stats['inequalities'], 24)
        self.assertEqual(stats['max_check_degree'], 4)
        self.assertEqual(stats['decomposition']['checks'], 6)
        self.assertEqual(stats['decomposition']['aux_variables'], 3)
        self.assertEqual(stats['standard_form'],
                         {'rows': 31, 'columns': 38})


class LinalgTestCase(unittest.TestCase):
    """
    Normal-equation operator, conjugate gradient and Cholesky.
    """

    def setUp(self):
        """
        Before each test, set up a environment.
        """
        self.rng = np.random.default_rng(11)

    def random_system(self, k, extra, max_cond=1e3, low=0.5):
        while True:
            A = self.rng.standard_normal((k, k + extra))
            d2 = self.rng.uniform(low, 2.0, k + extra)
            system = linalg.InnerSystem(A, d2, self.rng.standard_normal(k))
            if np.linalg.cond(system.materialize()) <= max_cond:
                return system

    def test_inner_system(self):
        """
        Implicit product, diagonal and materialized matrix agree.
        """
        system = self.random_system(5, 3)
        dense = system.materialize()
        w = self.rng.standard_normal(5)
        np.testing.assert_allclose(system.apply(w), dense @ w)
        np.testing.assert_allclose(linalg.apply_inner(system, w), dense @ w)
        np.testing.assert_allclose(system.diagonal(), np.diag(dense))
        with self.assertRaises(DimensionError):
            linalg.InnerSystem(np.eye(2), [1.0, 0.0], [1.0, 1.0])
        with self.assertRaises(DimensionError):
            linalg.InnerSystem(np.eye(2), [1.0, 1.0], [1.0])

    def test_cg_identity(self):
        """
        Identity system converges in one iteration.
        """
        system = linalg.InnerSystem(np.eye(4), np.ones(4), [1.0, 2, 3, 4])
        u, report = linalg.cg_solve(system, tol=1e-12)
        np.testing.assert_allclose(u, [1, 2, 3, 4])
        self.assertEqual(report.iterations, 1)
        self.assertTrue(report.converged)

    def test_cg_matches_cholesky(self):
        """
        CG at tight tolerance agrees with the dense solve.
        """
        for _ in range(30):
            k = int(self.rng.integers(2, 20))
            system = self.random_system(k, int(self.rng.integers(0, 10)))
            expected = linalg.cholesky_solve_dense(system)
            for precond in (None, linalg.jacobi_precond(system)):
                u, report = linalg.cg_solve(system, precond, tol=1e-12)
                self.assertTrue(report.converged)
                self.assertLessEqual(report.iterations, 4 * k)
                self.assertLessEqual(
                    np.linalg.norm(u - expected),
                    1e-8 * np.linalg.norm(expected),
                )

    def test_cg_matches_cholesky_ill_conditioned(self):
        """
        Agreement holds up to condition number 1e4 and k = 40.
        """
        conditions = []
        for _ in range(100):
            k = int(self.rng.integers(2, 41))
            system = self.random_system(k, int(self.rng.integers(0, 10)),
                                        max_cond=1e4, low=0.01)
            conditions.append(np.linalg.cond(system.materialize()))
            expected = linalg.cholesky_solve_dense(system)
            u, report = linalg.cg_solve(system, linalg.jacobi_precond(system),
                                        tol=1e-12)
            self.assertTrue(report.converged)
            self.assertLessEqual(
                np.linalg.norm(u - expected),
                1e-8 * np.linalg.norm(expected),
            )
        self.assertGreater(max(conditions), 1e3)

    def test_cg_start_vector(self):
        """
        Starting at the solution needs no iteration, zero v gives zero.
        """
        system = self.random_system(6, 2)
        exact = linalg.cholesky_solve_dense(system)
        _, report = linalg.cg_solve(system, tol=1e-6, u0=exact)
        self.assertEqual(report.iterations, 0)
        zero = linalg.InnerSystem(system.A, system.d2, np.zeros(6))
        u, report = linalg.cg_solve(zero)
        self.assertFalse(np.any(u))
        self.assertTrue(report.converged)
        with self.assertRaises(DimensionError):
            linalg.cg_solve(system, tol=0)

    def test_jacobi_zero_diagonal(self):
        """
        A zero row of A has no Jacobi preconditioner.
        """
        A = np.array([[1.0, 1.0], [0.0, 0.0]])
        system = linalg.InnerSystem(A, [1.0, 1.0], [1.0, 0.0])
        with self.assertRaises(InnerSolverError):
            linalg.jacobi_precond(system)
        precond = linalg.JacobiPreconditioner([2.0, 4.0])
        np.testing.assert_allclose(precond(np.array([2.0, 2.0])), [1.0, 0.5])

    def test_cholesky_rank_deficient(self):
        """
        Repeated rows make the dense factorization fail.
        """
        A = np.array([[1.0, 0.0], [1.0, 0.0]])
        system = linalg.InnerSystem(A, [1.0, 1.0], [1.0, 1.0])
        with self.assertRaises(NotPositiveDefiniteError):
            linalg.cholesky_solve_dense(system)

    def test_cholesky_guard(self):
        """
        Dense solves are limited in size.
        """
        size = linalg.DENSE_MAX_DIMENSION + 1
        system = linalg.InnerSystem(sps.identity(size), np.ones(size),
                                    np.ones(size))
        with self.assertRaises(DimensionGuardError):
            linalg.cholesky_solve_dense(system)

    @patch('lp_decoder.linalg.log')
    def test_dense_solver_fallback(self, log_mock):
        """
        Dense solver falls back to least squares with a warning.
        """
        A = np.array([[1.0, 0.0], [1.0, 0.0]])
        system = linalg.InnerSystem(A, [1.0, 1.0], [1.0, 1.0])
        solver = linalg.DenseCholeskySolver()
        u, report = solver.solve(system, 1e-8)
        self.assertTrue(log_mock.warning.called)
        self.assertEqual(solver.fallbacks, 1)
        np.testing.assert_allclose(system.apply(u), [1.0, 1.0])
        self.assertTrue(report.converged)

    def test_inner_solver_statistics(self):
        """
        Solvers count calls and iterations.
        """
        system = self.random_system(5, 5)
        solver = linalg.ConjugateGradientSolver()
        solver.solve(system, 1e-10)
        solver.solve(system, 1e-10)
        stats = solver.statistics()
        self.assertEqual(stats['solver'], 'cg')
        self.assertEqual(stats['calls'], 2)
        self.assertGreater(stats['iterations'], 0)
        with self.assertRaises(NotImplementedError):
            linalg.InnerSolver().solve(system, 1e-10)

    def test_dump_triplets(self):
        """
        Test the debug dump of a sparse matrix.
        """
        dump = linalg.dump_triplets(sps.csr_matrix([[1.0, 0.0], [0.0, 2.0]]))
        self.assertEqual(dump, '2 2 2\n0 0 1.0\n1 1 2.0\n')


class GaBPTestCase(unittest.TestCase):
    """
    Gaussian belief propagation.
    """

    def setUp(self):
        """
        Before each test, set up a environment.
        """
        self.rng = np.random.default_rng(3)

    def test_build_pairwise_graph(self):
        """
        Identity has no edges, one shared column gives one edge.
        """
        system = linalg.InnerSystem(np.eye(3), [1.0, 2.0, 3.0], np.ones(3))
        graph = gabp.build_pairwise_graph(system)
        self.assertEqual(graph.edges, [])
        np.testing.assert_allclose(graph.diagonal, [1.0, 2.0, 3.0])

        A = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0]])
        graph = gabp.build_pairwise_graph(
            linalg.InnerSystem(A, np.ones(3), np.ones(2))
        )
        self.assertEqual(graph.edges, [(0, 1)])
        np.testing.assert_allclose(graph.couplings, [1.0, 1.0])
        np.testing.assert_allclose(graph.diagonal, [2.0, 2.0])

    def test_graph_mirrors_check_adjacency(self):
        """
        Hamming embedding edges are the check pairs sharing a variable.
        """
        lp = ipm.build_embedding(hamming(), None).lp
        d2 = self.rng.uniform(0.5, 2.0, lp.shape[1])
        system = linalg.InnerSystem(lp.A, d2, np.ones(lp.shape[0]), lp.A_T)
        graph = gabp.build_pairwise_graph(system)
        structure = np.abs(lp.A.toarray())
        shared = structure @ structure.T
        expected = set(
            (j, k) for j, k in zip(*np.nonzero(shared)) if j < k
        )
        self.assertEqual(set(graph.edges), expected)
        dense = system.materialize()
        np.testing.assert_allclose(
            graph.couplings, dense[graph.sources, graph.targets]
        )
        np.testing.assert_allclose(graph.apply(np.ones(lp.shape[0])),
                                   dense @ np.ones(lp.shape[0]))

    def test_edgeless_graph(self):
        """
        Diagonal systems converge in one sweep.
        """
        graph = gabp.GaussianFactorGraph.from_sparse(
            np.diag([2.0, 4.0]), [1.0, 1.0]
        )
        state = gabp.MessageState.zeros(graph)
        self.assertEqual(gabp.gabp_sweep(graph, state).precision.size, 0)
        result = gabp.gabp_solve(graph, tol=1e-10)
        np.testing.assert_allclose(result.means, [0.5, 0.25])
        self.assertEqual(result.report.iterations, 1)
        self.assertTrue(result.report.converged)

    def test_two_node_tree(self):
        """
        Test exact means on a two-node tree.
        """
        graph = gabp.GaussianFactorGraph.from_sparse(
            [[1.0, 0.5], [0.5, 1.0]], [1.0, 1.0]
        )
        state = gabp.MessageState.zeros(graph)
        for _ in range(2):
            state = gabp.gabp_sweep(graph, state)
        means, _ = gabp.marginal_means(graph, state)
        np.testing.assert_allclose(means, [2.0 / 3, 2.0 / 3], atol=1e-12)
        result = gabp.gabp_solve(graph, tol=1e-12, damping=0.0)
        np.testing.assert_allclose(result.means, [2.0 / 3, 2.0 / 3])
        self.assertTrue(result.report.converged)

    def test_chain_exact(self):
        """
        Means on a chain equal the dense solution after diameter+1 sweeps.
        """
        matrix = np.diag([3.0, 2.0, 4.0, 3.0])
        for j in range(3):
            matrix[j, j + 1] = matrix[j + 1, j] = self.rng.uniform(-1, 1)
        v = self.rng.standard_normal(4)
        graph = gabp.GaussianFactorGraph.from_sparse(matrix, v)
        state = gabp.MessageState.zeros(graph)
        for _ in range(4):
            state = gabp.gabp_sweep(graph, state)
        means, _ = gabp.marginal_means(graph, state)
        np.testing.assert_allclose(means, np.linalg.solve(matrix, v),
                                   atol=1e-9)

    def test_damping_same_fixed_point(self):
        """
        Damped and undamped runs reach the dense solution on a loop.
        """
        matrix = np.eye(4)
        for j in range(4):
            k = (j + 1) % 4
            matrix[j, k] = matrix[k, j] = 0.2
        v = np.array([1.0, -2.0, 0.5, 3.0])
        graph = gabp.GaussianFactorGraph.from_sparse(matrix, v)
        expected = np.linalg.solve(matrix, v)
        for damping in (0.0, 0.5):
            result = gabp.gabp_solve(graph, tol=1e-12, max_sweeps=2000,
                                     damping=damping)
            self.assertTrue(result.report.converged)
            np.testing.assert_allclose(result.means, expected, atol=1e-9)
            residual = np.max(np.abs(matrix @ result.means - v))
            self.assertLessEqual(residual, 100 * 1e-12 * np.max(np.abs(v)))

    def test_warm_start_consistency(self):
        """
        Resuming from a returned state reaches the cold fixed point.
        """
        matrix = np.array([[2.0, 0.3, 0.3], [0.3, 2.0, 0.3],
                           [0.3, 0.3, 2.0]])
        graph = gabp.GaussianFactorGraph.from_sparse(matrix, [1.0, 2.0, 3.0])
        cold = gabp.gabp_solve(graph, tol=1e-10, max_sweeps=500)
        warm = gabp.gabp_solve(graph, tol=1e-10, max_sweeps=500,
                               state=cold.state)
        np.testing.assert_allclose(warm.means, cold.means, atol=1e-9)
        self.assertLessEqual(warm.report.iterations, cold.report.iterations)

    def test_not_walk_summable(self):
        """
        A positive-definite loop with strong couplings does not converge.
        """
        matrix = np.full((3, 3), 0.6)
        np.fill_diagonal(matrix, 1.0)
        self.assertTrue(np.all(np.linalg.eigvalsh(matrix) > 0))
        graph = gabp.GaussianFactorGraph.from_sparse(matrix, np.ones(3))
        result = gabp.gabp_solve(graph, tol=1e-8, max_sweeps=500,
                                 damping=0.0)
        self.assertFalse(result.report.converged)

    def test_invalid_arguments(self):
        """
        Test input validation.
        """
        graph = gabp.GaussianFactorGraph.from_sparse(np.eye(2), np.ones(2))
        with self.assertRaises(DimensionError):
            gabp.gabp_solve(graph, tol=0)
        with self.assertRaises(DimensionError):
            gabp.gabp_sweep(graph, gabp.MessageState.zeros(graph), 1.0)
        with self.assertRaises(DimensionError):
            gabp.GaussianFactorGraph.from_sparse(np.diag([1.0, 0.0]),
                                                 np.ones(2))

    def test_gabp_matches_dense(self):
        """
        Converged GaBP means agree with the dense solve, the solver falls
        back to CG on the rest.
        """
        converged = 0
        for _ in range(100):
            k = int(self.rng.integers(3, 41))
            size = k + int(self.rng.integers(0, 10))
            A = np.zeros((k, size))
            for j in range(size):
                rows = self.rng.choice(k, 2, replace=False)
                A[rows, j] = self.rng.choice([-1.0, 1.0], 2)
            A[np.arange(k), np.arange(k)] = 2.0
            system = linalg.InnerSystem(
                sps.csr_matrix(A), self.rng.uniform(0.5, 2.0, size),
                self.rng.standard_normal(k),
            )
            expected = linalg.cholesky_solve_dense(system)
            scale = np.linalg.norm(expected)
            result = gabp.gabp_solve(gabp.build_pairwise_graph(system),
                                     tol=1e-12, max_sweeps=1000)
            if result.report.converged:
                converged += 1
                self.assertLessEqual(
                    np.linalg.norm(result.means - expected), 1e-6 * scale
                )
            u, _ = gabp.GaussianBPSolver().solve(system, 1e-12)
            self.assertLessEqual(np.linalg.norm(u - expected), 1e-6 * scale)
        self.assertGreater(converged, 0)

    def test_solver_cold(self):
        """
        Cold GaBP converges on a weakly coupled system without fallback.
        """
        A = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0]])
        system = linalg.InnerSystem(A, [1.0, 0.1, 1.0], [1.0, 2.0])
        solver = gabp.GaussianBPSolver(damping=0.0)
        u, report = solver.solve(system, 1e-10)
        self.assertTrue(report.converged)
        self.assertEqual(solver.fallbacks, 0)
        np.testing.assert_allclose(u, linalg.cholesky_solve_dense(system),
                                   atol=1e-8)

    def test_solver_warm_fallback(self):
        """
        One warm sweep is not enough on a chain, CG finishes from the means.
        """
        A = np.array([[1.0, 1.0, 0.0, 0.0], [0.0, 1.0, 1.0, 0.0],
                      [0.0, 0.0, 1.0, 1.0]])
        system = linalg.InnerSystem(A, [1.0, 0.1, 0.1, 1.0], [1.0, 2.0, 3.0])
        solver = gabp.GaussianBPSolver(warm=True, warm_sweeps=1)
        self.assertEqual(solver.name, 'gabp-warm')
        u, _ = solver.solve(system, 1e-10)
        self.assertEqual(solver.fallbacks, 1)
        self.assertIsNotNone(solver.state)
        np.testing.assert_allclose(u, linalg.cholesky_solve_dense(system),
                                   atol=1e-8)
        solver.solve(system, 1e-10)
        self.assertEqual(solver.statistics()['calls'], 2)
        self.assertGreaterEqual(solver.statistics()['sweeps'], 2)

    @patch('lp_decoder.gabp.gabp_solve')
    def test_solver_fallback_on_not_converged(self, solve_mock):
        """
        NotConverged hands the system to CG.
        """
        A = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0]])
        system = linalg.InnerSystem(A, [1.0, 1.0, 1.0], [1.0, 2.0])
        solve_mock.return_value = gabp.GaBPResult(
            np.zeros(2), linalg.SolveReport(200, np.inf, False), None,
        )
        solver = gabp.GaussianBPSolver()
        u, report = solver.solve(system, 1e-10)
        self.assertTrue(solve_mock.called)
        self.assertEqual(solver.fallbacks, 1)
        self.assertTrue(report.converged)
        np.testing.assert_allclose(u, linalg.cholesky_solve_dense(system),
                                   atol=1e-8)


class IpmTestCase(unittest.TestCase):
    """
    Interior-point drivers and decode.
    """

    def setUp(self):
        """
        Before each test, set up a environment.
        """
        self.rng = np.random.default_rng(2024)
        self.matrix = hamming()
        self.dense = linalg.DenseCholeskySolver()

    def random_lp(self):
        gamma = self.rng.standard_normal(7)
        lp = ipm.build_embedding(self.matrix, None).lp
        return lp.with_cost(np.concatenate([gamma, np.zeros(31)]))

    def test_config_defaults(self):
        """
        Config from the app settings equals the constructor defaults.
        """
        cfg = ipm.SolverConfig.from_config(main.app.config)
        self.assertEqual(cfg.to_dict(), ipm.SolverConfig().to_dict())
        cfg = ipm.SolverConfig.from_config(
            main.app.config, beta=0.5, sigma=None
        )
        self.assertEqual(cfg.beta, 0.5)
        self.assertEqual(cfg.sigma, 0.3)

    def test_config_validation(self):
        """
        Invalid values raise ConfigError.
        """
        for kwargs in ({'beta': 1.5}, {'sigma': 0}, {'algorithm': 'simplex'},
                       {'inner': 'lu'}, {'eps_gap': -1}, {'max_iter': 0},
                       {'max_iter_short': 0}, {'max_iter_short': 2.5},
                       {'round_every': -1}, {'max_check_degree': 2},
                       {'gabp_damping': 1.0}):
            with self.assertRaises(ConfigError):
                ipm.SolverConfig(**kwargs)
        with self.assertRaises(ConfigError):
            ipm.SolverConfig.from_config({}, colour='red')

    def test_affine_step_example(self):
        """
        Long step from the middle of a segment.
        """
        step = ipm.affine_scaling_step(
            segment_lp(), np.array([0.5, 0.5]), ipm.SolverConfig(),
            self.dense,
        )
        np.testing.assert_allclose(step.direction, [-0.125, 0.125])
        self.assertAlmostEqual(step.step_to_boundary, 4.0)
        np.testing.assert_allclose(step.x, [0.17, 0.83])
        np.testing.assert_allclose(step.reduced_cost, [0.5, -0.5])

    def test_affine_short_step(self):
        """
        Short step has scaled length equal to the radius.
        """
        x = np.array([0.5, 0.5])
        step = ipm.affine_scaling_step(
            segment_lp(), x, ipm.SolverConfig(), self.dense, short=True,
        )
        self.assertAlmostEqual(np.linalg.norm((step.x - x) / x), 0.25)
        self.assertAlmostEqual(step.x.sum(), 1.0)

    def test_affine_zero_cost(self):
        """
        Zero cost gives a zero direction and the same point.
        """
        x = np.array([0.5, 0.5])
        step = ipm.affine_scaling_step(
            segment_lp((0.0, 0.0)), x, ipm.SolverConfig(), self.dense,
        )
        self.assertFalse(np.any(step.direction))
        np.testing.assert_allclose(step.x, x)

    def test_affine_monotone(self):
        """
        Cost is non-increasing along affine-scaling iterates.
        """
        cfg = ipm.SolverConfig()
        for _ in range(5):
            lp = self.random_lp()
            x = ipm.feasible_primal_start(lp)
            for _ in range(10):
                step = ipm.affine_scaling_step(lp, x, cfg, self.dense)
                self.assertTrue(np.all(step.x > 0))
                self.assertLessEqual(lp.cost(step.x), lp.cost(x) + 1e-9)
                x = step.x

    def test_pdip_step_example(self):
        """
        One feasible step from x = s = 1 with sigma = 1/2.
        """
        lp = polytope.StandardFormLP(
            sps.csr_matrix([[1.0, 1.0, -1.0]]), [1.0], [1.0, 1.0, 1.0], 3,
        )
        start = ipm.IterateTriple(np.ones(3), np.zeros(1), np.ones(3))
        step = ipm.pdip_step(lp, start, ipm.SolverConfig(sigma=0.5),
                             self.dense, common_step=True)
        self.assertAlmostEqual(step.gap, 1.5)
        np.testing.assert_allclose(step.x, [2.0 / 3, 2.0 / 3, 1.0 / 3])
        r_p, r_d = step.residuals(lp)
        self.assertLessEqual(np.max(np.abs(r_p)), 1e-12)
        self.assertLessEqual(np.max(np.abs(r_d)), 1e-12)

    def test_pdip_gap_decreasing(self):
        """
        Feasible path following strictly decreases the duality gap.
        """
        cfg = ipm.SolverConfig()
        for _ in range(20):
            lp = self.random_lp()
            lam, s = ipm.feasible_dual_start(lp)
            t = ipm.IterateTriple(ipm.feasible_primal_start(lp), lam, s)
            gaps = [t.gap]
            for _ in range(200):
                if t.gap / (1 + abs(lp.cost(t.x))) <= cfg.eps_gap:
                    break
                t = ipm.pdip_step(lp, t, cfg, self.dense, common_step=True)
                gaps.append(t.gap)
            self.assertLessEqual(t.gap / (1 + abs(lp.cost(t.x))),
                                 cfg.eps_gap)
            for before, after in zip(gaps, gaps[1:]):
                self.assertLess(after, before)

    def test_infeasible_start(self):
        """
        Start is interior and scaled by the data.
        """
        lp = segment_lp()
        t = ipm.infeasible_start(lp)
        np.testing.assert_allclose(t.x, [1.0, 1.0])
        np.testing.assert_allclose(t.s, [1.0, 1.0])
        self.assertFalse(np.any(t.lam))
        t = ipm.infeasible_start(segment_lp((5.0, -2.0)))
        np.testing.assert_allclose(t.x, [5.0, 5.0])

    def test_infeasible_residuals_vanish(self):
        """
        Infeasible path following drives both residuals to zero.
        """
        lp = ipm.build_embedding(repetition(), None).lp.with_cost(
            [0.3, -0.2, 0.4, 0.0, 0.0, 0.0]
        )
        t = ipm.infeasible_start(lp)
        cfg = ipm.SolverConfig()
        for _ in range(100):
            r_p, r_d = t.residuals(lp)
            if t.gap <= 1e-10 and max(np.max(np.abs(r_p)),
                                      np.max(np.abs(r_d))) <= 1e-10:
                break
            t = ipm.pdip_step(lp, t, cfg, self.dense)
        r_p, r_d = t.residuals(lp)
        self.assertLessEqual(np.max(np.abs(r_p)), 1e-8)
        self.assertLessEqual(np.max(np.abs(r_d)), 1e-8)

    def test_iterate_positivity(self):
        """
        Iterates must be strictly positive.
        """
        with self.assertRaises(FormulationError):
            ipm.IterateTriple([1.0, 0.0], [0.0], [1.0, 1.0])

    def test_decode_single_error(self):
        """
        One unreliable bit is corrected with an ML certificate.
        """
        gamma = [-1, 1, 1, 1, 1, 1, 1]
        for algorithm in ipm.ALGORITHMS:
            cfg = config(algorithm=algorithm, inner='dense', round_every=0)
            result = ipm.decode(self.matrix, gamma, cfg)
            self.assertEqual(result.status, ipm.INTEGRAL)
            self.assertEqual(list(result.output), [0] * 7)
            self.assertAlmostEqual(result.cost, 0.0, places=6)
            self.assertTrue(result.ml_certificate)

    def test_decode_every_codeword(self):
        """
        gamma = 1 - 2c decodes to c for every codeword.
        """
        cfg = config(round_every=0)
        for word in codes.enumerate_codewords(self.matrix):
            result = ipm.decode(self.matrix, 1.0 - 2.0 * word, cfg)
            self.assertEqual(result.status, ipm.INTEGRAL)
            self.assertEqual(list(result.output), list(word))
            self.assertAlmostEqual(result.cost, -float(word.sum()), places=6)

    def test_decode_matches_oracle(self):
        """
        Every algorithm and direct or iterative inner solver attains the
        exact LP optimum at the default iteration budgets.
        """
        grid = [(algorithm, inner)
                for algorithm in ipm.ALGORITHMS
                for inner in ('cg', 'dense')]
        cases = [
            (self.matrix, None),
            (repetition(), None),
            (codes.gen_regular_ldpc(12, 3, 6, seed=7), 3),
        ]
        for matrix, max_check_degree in cases:
            for _ in range(50):
                gamma = self.rng.standard_normal(matrix.n)
                _, expected = oracle_cost(matrix, gamma)
                for algorithm, inner in grid:
                    cfg = config(algorithm=algorithm, inner=inner,
                                 round_every=0,
                                 max_check_degree=max_check_degree)
                    result = ipm.decode(matrix, gamma, cfg)
                    self.assertIn(result.status,
                                  (ipm.INTEGRAL, ipm.FRACTIONAL),
                                  (algorithm, inner, result.message))
                    self.assertLessEqual(abs(result.cost - expected), 1e-6,
                                         (algorithm, inner))

    def test_decode_short_step(self):
        """
        Short-step affine scaling has its own iteration budget.
        """
        cfg = config(algorithm='affine-short', max_iter=5)
        self.assertEqual(cfg.iteration_budget, 3000)
        self.assertEqual(config(max_iter=5).iteration_budget, 5)
        for matrix, inner in ((repetition(), 'cg'), (repetition(), 'dense'),
                              (self.matrix, 'cg'), (self.matrix, 'dense')):
            gamma = self.rng.standard_normal(matrix.n)
            _, expected = oracle_cost(matrix, gamma)
            cfg = config(algorithm='affine-short', inner=inner,
                         round_every=0)
            result = ipm.decode(matrix, gamma, cfg)
            self.assertNotEqual(result.status, ipm.FAILURE, result.message)
            self.assertLessEqual(abs(result.cost - expected), 1e-6)

    @patch('lp_decoder.ipm.log')
    def test_decode_short_step_budget(self, log_mock):
        """
        Running out of short steps reports the short-step budget.
        """
        result = ipm.decode(
            self.matrix, self.rng.standard_normal(7),
            config(algorithm='affine-short', max_iter_short=2,
                   round_every=0),
        )
        self.assertEqual(result.status, ipm.FAILURE)
        self.assertEqual(result.message, 'no convergence after 2 iterations')
        self.assertEqual(result.iterations, 2)
        self.assertTrue(log_mock.warning.called)

    def test_affine_certifies_integral_optima(self):
        """
        Affine scaling returns the ML certificate whenever the LP optimum
        is a codeword.
        """
        checked = 0
        for _ in range(40):
            gamma = 1.0 + 1.5 * self.rng.standard_normal(7)
            x, _ = oracle_cost(self.matrix, gamma)
            word = np.round(x[:7])
            if np.max(np.abs(x[:7] - word)) > 1e-9:
                continue
            checked += 1
            for inner in ('cg', 'dense'):
                result = ipm.decode(
                    self.matrix, gamma,
                    config(algorithm='affine-long', inner=inner,
                           round_every=0),
                )
                self.assertEqual(result.status, ipm.INTEGRAL)
                self.assertTrue(result.ml_certificate)
                self.assertEqual(list(result.output), list(word))
        self.assertGreater(checked, 0)

    def test_affine_step_refines_inexact_dual(self):
        """
        A truncated first inner solve still gives a step on A x = b equal to
        the exact step.
        """
        cfg = ipm.SolverConfig()
        for _ in range(5):
            lp = self.random_lp()
            x = ipm.feasible_primal_start(lp)
            exact = ipm.affine_scaling_step(lp, x, cfg, self.dense)
            error = 1e-2 * self.rng.standard_normal(lp.shape[0])
            inexact = TruncatedSolver(error, perturbed_calls=1)
            step = ipm.affine_scaling_step(lp, x, cfg, inexact)
            self.assertGreater(inexact.calls, 1)
            self.assertTrue(np.all(step.x > 0))
            self.assertLessEqual(
                np.max(np.abs(lp.primal_residual(step.x))),
                1e-9 * (1 + np.max(np.abs(lp.b))),
            )
            np.testing.assert_allclose(step.x, exact.x, atol=1e-8)
            np.testing.assert_allclose(step.dual, exact.dual, atol=1e-8)

    def test_restore_feasibility(self):
        """
        Newton projection returns to the segment or gives up outside the
        positive orthant.
        """
        lp = segment_lp()
        cfg = ipm.SolverConfig()
        restored = ipm.restore_feasibility(lp, np.array([0.6, 0.6]), cfg,
                                           self.dense)
        self.assertAlmostEqual(restored.sum(), 1.0, places=12)
        self.assertTrue(np.all(restored > 0))
        lp = polytope.StandardFormLP(
            sps.csr_matrix([[1.0, 1.0, -1.0]]), [1.0], [1.0, 1.0, 1.0], 3,
        )
        self.assertIsNone(ipm.restore_feasibility(
            lp, np.array([0.1, 0.1, 3.0]), cfg, self.dense
        ))

    @patch('lp_decoder.ipm.get_inner_solver')
    @patch('lp_decoder.ipm.log')
    def test_affine_infeasible_step_fails(self, log_mock, solver_mock):
        """
        Persistently wrong inner solves end in Failure, never in a verdict
        for a point off A x = b.
        """
        lp = ipm.build_embedding(self.matrix, None).lp
        solver_mock.return_value = TruncatedSolver(
            0.1 * np.ones(lp.shape[0])
        )
        result = ipm.decode(self.matrix, self.rng.standard_normal(7),
                            config(algorithm='affine-long', round_every=0))
        self.assertEqual(result.status, ipm.FAILURE)
        self.assertIn('InnerSolverError', result.message)
        self.assertIsNone(result.output)
        self.assertTrue(log_mock.warning.called)

    @patch('lp_decoder.ipm.log')
    def test_verdict_classification(self, log_mock):
        """
        Off-vertex optima are Fractional with a note, points off A x = b
        are Failure.
        """
        state = Mock(cfg=config(), lp=segment_lp(), scale=1.0,
                     matrix=repetition(), gamma=np.zeros(3), iterations=4,
                     trajectory=None)
        state.original.return_value = np.array([0.3, 0.3, 0.3])
        inner = linalg.DenseCholeskySolver()
        result = ipm._verdict(state, np.array([0.5, 0.5]), inner)
        self.assertEqual(result.status, ipm.FRACTIONAL)
        self.assertEqual(list(result.output), [0.0, 0.0, 0.0])
        self.assertIn('1/2', result.message)
        np.testing.assert_allclose(result.unrounded, [0.3, 0.3, 0.3])

        state.original.return_value = np.array([0.3, 0.5, 0.3])
        result = ipm._verdict(state, np.array([0.5, 0.5]), inner)
        self.assertEqual(list(result.output), [0.0, 0.5, 0.0])
        self.assertIsNone(result.message)

        result = ipm._verdict(state, np.array([0.7, 0.7]), inner)
        self.assertEqual(result.status, ipm.FAILURE)
        self.assertIn('violates', result.message)
        self.assertTrue(log_mock.warning.called)

    def test_decode_gabp_inner(self):
        """
        GaBP inner solvers with fallback agree with the dense solver.
        """
        gamma = self.rng.standard_normal(7)
        dense = ipm.decode(self.matrix, gamma,
                           config(inner='dense', round_every=0))
        for inner in ('gabp', 'gabp-warm'):
            result = ipm.decode(self.matrix, gamma,
                                config(inner=inner, round_every=0))
            self.assertLessEqual(abs(result.cost - dense.cost), 1e-6)
            self.assertEqual(result.inner_stats['solver'], inner)

    def test_decode_solver_agreement(self):
        """
        Affine scaling and path following agree on the cost.
        """
        gamma = self.rng.standard_normal(7)
        affine = ipm.decode(self.matrix, gamma,
                            config(algorithm='affine-long', round_every=0))
        pdip = ipm.decode(self.matrix, gamma, config(round_every=0))
        self.assertLessEqual(abs(affine.cost - pdip.cost), 1e-5)

    def test_decode_decomposed(self):
        """
        Decomposition leaves the LP optimum unchanged.
        """
        for _ in range(20):
            gamma = self.rng.standard_normal(7)
            _, expected = oracle_cost(self.matrix, gamma)
            plain = ipm.decode(self.matrix, gamma, config(round_every=0))
            split = ipm.decode(self.matrix, gamma,
                               config(round_every=0, max_check_degree=3))
            self.assertLessEqual(abs(split.cost - expected), 1e-6)
            self.assertLessEqual(abs(plain.cost - split.cost), 1e-6)
            if plain.status == ipm.INTEGRAL:
                self.assertEqual(split.status, ipm.INTEGRAL)
                self.assertEqual(list(plain.output), list(split.output))

    def test_decode_ml_certificate(self):
        """
        Integral outputs coincide with exhaustive ML.
        """
        for _ in range(30):
            gamma = 1.0 + 1.5 * self.rng.standard_normal(7)
            result = ipm.decode(self.matrix, gamma, config(round_every=0))
            if result.status != ipm.INTEGRAL:
                continue
            word, cost = codes.ml_decode_exhaustive(self.matrix, gamma)
            if list(word) != list(result.output):
                self.assertAlmostEqual(result.cost, cost, places=6)

    def test_decode_early_rounded(self):
        """
        Rounding an intermediate iterate already yields the codeword.
        """
        result = ipm.decode(self.matrix, [1.0] * 7,
                            config(inner='dense', round_every=1))
        self.assertEqual(result.status, ipm.EARLY_ROUNDED)
        self.assertEqual(list(result.output), [0] * 7)
        self.assertEqual(result.cost, 0.0)
        self.assertGreaterEqual(result.iterations, 1)
        self.assertTrue(codes.is_codeword(self.matrix, result.output))

    def test_decode_fractional(self):
        """
        A pseudocodeword optimum is reported as Fractional.
        """
        matrix = codes.gen_regular_ldpc(12, 3, 6, seed=7)
        gamma = None
        for _ in range(200):
            candidate = self.rng.standard_normal(12)
            x, _ = oracle_cost(matrix, candidate)
            if np.any((x[:12] > 1e-6) & (x[:12] < 1 - 1e-6)):
                gamma = candidate
                break
        self.assertIsNotNone(gamma)
        result = ipm.decode(matrix, gamma,
                            config(inner='dense', round_every=0))
        self.assertEqual(result.status, ipm.FRACTIONAL)
        self.assertFalse(result.ml_certificate)
        self.assertGreaterEqual(np.max(result.unrounded), 0.5 - 1e-6)
        self.assertTrue(set(result.output) <= {0.0, 0.5, 1.0})
        self.assertIn('unrounded', result.to_dict())

    def test_decode_zero_cost(self):
        """
        All-erasure input stops at the center.
        """
        result = ipm.decode(self.matrix, [0.0] * 7,
                            config(algorithm='affine-long'))
        self.assertEqual(result.status, ipm.FRACTIONAL)
        self.assertEqual(list(result.output), [0.5] * 7)

    @patch('lp_decoder.ipm.log')
    def test_decode_failure(self, log_mock):
        """
        Abnormal ends become Failure verdicts.
        """
        result = ipm.decode(self.matrix, self.rng.standard_normal(7),
                            config(max_iter=1, round_every=0))
        self.assertEqual(result.status, ipm.FAILURE)
        self.assertIn('no convergence', result.message)
        self.assertIsNone(result.output)
        self.assertTrue(log_mock.warning.called)

        degree_one = codes.SparseBinaryMatrix(2, 3, [[0], [0, 1, 2]])
        result = ipm.decode(degree_one, [1.0, 1.0, 1.0], config())
        self.assertEqual(result.status, ipm.FAILURE)
        self.assertIn('FormulationError', result.message)
        self.assertEqual(result.to_dict()['output'], None)

        with self.assertRaises(DimensionError):
            ipm.decode(self.matrix, [1.0] * 6, config())

    def test_decode_deterministic(self):
        """
        Repeated decodes give identical results.
        """
        gamma = self.rng.standard_normal(7)
        first = ipm.decode(self.matrix, gamma, config())
        second = ipm.decode(self.matrix, gamma, config())
        self.assertEqual(json.dumps(first.to_dict()),
                         json.dumps(second.to_dict()))

    def test_trajectory(self):
        """
        Traced decodes record original-coordinate iterates.
        """
        result = ipm.decode(self.matrix, self.rng.standard_normal(7),
                            config(trace=True, round_every=0))
        self.assertEqual(result.trajectory[0].iteration, 0)
        self.assertEqual(len(result.trajectory[-1].x), 7)
        stream = io.StringIO()
        ipm.write_trajectory_csv(result.trajectory, stream)
        rows = list(csv.reader(io.StringIO(stream.getvalue())))
        self.assertEqual(rows[0], ['iteration', 'cost', 'gap'] +
                         ['x_{}'.format(i) for i in range(7)])
        self.assertEqual(len(rows), len(result.trajectory) + 1)

    def test_embedding_cached(self):
        """
        The embedding is built once per matrix and degree.
        """
        ipm.embedding_cache.clean()
        first = ipm.build_embedding(self.matrix, None)
        second = ipm.build_embedding(self.matrix, None)
        self.assertIs(first, second)
        self.assertEqual(len(ipm.embedding_cache), 1)
        ipm.build_embedding(self.matrix, 3)
        self.assertEqual(len(ipm.embedding_cache), 2)


class ChannelsTestCase(unittest.TestCase):
    """
    Channel models.
    """

    def test_parse(self):
        """
        Test channel descriptions.
        """
        spec = channels.ChannelSpec.parse('bsc:0.05')
        self.assertEqual((spec.kind, spec.p), ('bsc', 0.05))
        spec = channels.ChannelSpec.parse('biawgn:3', default_rate=0.5)
        self.assertEqual((spec.snr_db, spec.rate), (3.0, 0.5))
        spec = channels.ChannelSpec.parse('BIAWGN:2.5:0.75')
        self.assertEqual(str(spec), 'biawgn:2.5:0.75')
        self.assertEqual(spec, channels.ChannelSpec.parse(str(spec)))
        for text in ('bsc:0.7', 'bsc:0', 'foo:1', 'bsc:x', 'bsc',
                     'biawgn:1:0', 'biawgn:1:2'):
            with self.assertRaises(ChannelError):
                channels.ChannelSpec.parse(text)

    def test_bsc_sign_convention(self):
        """
        Noiseless limit gives positive LLRs of magnitude ln((1-p)/p).
        """
        spec = channels.ChannelSpec('bsc', p=1e-9)
        llr = channels.transmit_and_llr(np.zeros(100, dtype=np.uint8),
                                        spec, 1)
        np.testing.assert_allclose(llr, np.log((1 - 1e-9) / 1e-9))
        llr = channels.transmit_and_llr(np.ones(100, dtype=np.uint8),
                                        spec, 1)
        self.assertTrue(np.all(llr < 0))

    def test_determinism(self):
        """
        The stream depends on seed and trial index only.
        """
        spec = channels.ChannelSpec.parse('biawgn:1.0:0.5')
        word = np.zeros(50, dtype=np.uint8)
        first = channels.transmit_and_llr(word, spec, 42, 3)
        np.testing.assert_array_equal(
            first, channels.transmit_and_llr(word, spec, 42, 3)
        )
        self.assertFalse(np.array_equal(
            first, channels.transmit_and_llr(word, spec, 42, 4)
        ))
        with self.assertRaises(ChannelError):
            channels.make_rng(-1)

    def test_bsc_flip_rate(self):
        """
        Empirical crossover within three standard deviations.
        """
        p, bits = 0.05, 10 ** 6
        spec = channels.ChannelSpec('bsc', p=p)
        llr = channels.transmit_and_llr(np.zeros(bits, dtype=np.uint8),
                                        spec, 9)
        rate = np.mean(llr < 0)
        self.assertLessEqual(abs(rate - p), 3 * np.sqrt(p * (1 - p) / bits))

    def test_biawgn_variance(self):
        """
        Test noise variance and LLR scaling.
        """
        spec = channels.ChannelSpec('biawgn', snr_db=0.0, rate=0.5)
        self.assertAlmostEqual(spec.noise_variance, 1.0)
        with self.assertRaises(ChannelError):
            channels.ChannelSpec('bsc', p=0.1).noise_variance

    def test_high_snr_decodes(self):
        """
        At 40 dB every frame decodes to the all-zero codeword.
        """
        matrix = hamming()
        spec = channels.ChannelSpec('biawgn', snr_db=40.0, rate=4.0 / 7)
        cfg = config(round_every=0)
        for seed in range(100):
            llr = channels.transmit_and_llr(np.zeros(7, dtype=np.uint8),
                                            spec, seed)
            self.assertTrue(np.all(llr > 0))
            result = ipm.decode(matrix, llr, cfg)
            self.assertEqual(result.status, ipm.INTEGRAL)
            self.assertEqual(list(result.output), [0] * 7)


class HarnessTestCase(unittest.TestCase):
    """
    Simulation and benchmark harness.
    """

    def setUp(self):
        """
        Before each test, set up a environment.
        """
        self.matrix = hamming()
        self.cfg = config(round_every=0)

    def test_noiseless(self):
        """
        No frame errors in the noiseless limit.
        """
        spec = channels.ChannelSpec('bsc', p=1e-9)
        summary, records = harness.simulate(self.matrix, spec, 100,
                                            config(), 0)
        self.assertEqual(summary.trials, 100)
        self.assertEqual(summary.frame_errors, 0)
        self.assertEqual(summary.fer, 0.0)
        self.assertEqual(summary.ber, 0.0)
        self.assertEqual(len(records), 100)

    def test_workers_independent(self):
        """
        Worker count does not change the outcome.
        """
        spec = channels.ChannelSpec('bsc', p=0.1)
        single, records = harness.simulate(self.matrix, spec, 40, self.cfg,
                                           11, workers=1)
        pooled, pooled_records = harness.simulate(self.matrix, spec, 40,
                                                  self.cfg, 11, workers=4)
        self.assertEqual(single.to_dict(), pooled.to_dict())
        self.assertEqual([r._replace(wall_time=0) for r in records],
                         [r._replace(wall_time=0) for r in pooled_records])

    def test_compare_ml(self):
        """
        LP never beats ML and integral outputs carry the certificate over
        ten thousand BSC trials.
        """
        spec = channels.ChannelSpec('bsc', p=0.05)
        summary, records = harness.simulate(self.matrix, spec, 10000,
                                            config(), 3, workers=4,
                                            compare_ml=True)
        self.assertEqual(summary.trials, 10000)
        self.assertEqual(summary.certificate_violations, 0)
        self.assertEqual(summary.early_rounded_invalid, 0)
        self.assertGreaterEqual(summary.frame_errors,
                                summary.ml_frame_errors)
        for record in records:
            if record.ml_frame_error:
                self.assertTrue(record.frame_error)

    def test_monotone_fer(self):
        """
        More noise, more frame errors on paired seeds.
        """
        low, _ = harness.simulate(self.matrix,
                                  channels.ChannelSpec('bsc', p=0.02), 300,
                                  self.cfg, 5, workers=2)
        high, _ = harness.simulate(self.matrix,
                                   channels.ChannelSpec('bsc', p=0.08), 300,
                                   self.cfg, 5, workers=2)
        self.assertLessEqual(low.fer, high.fer)

    def test_summary(self):
        """
        Test summary arithmetic.
        """
        records = [
            harness.TrialRecord(i, 'bsc:0.1', ipm.INTEGRAL if i > 2 else
                                ipm.FRACTIONAL, 0 if i > 2 else 2, i <= 2,
                                10 + i, 100, None, False, False, 0.5)
            for i in range(10)
        ]
        summary = harness.SimSummary.from_records(records, 7)
        self.assertAlmostEqual(summary.fer, 0.3)
        self.assertAlmostEqual(summary.fer_ci95,
                               1.96 * np.sqrt(0.3 * 0.7 / 10))
        self.assertAlmostEqual(summary.ber, 6.0 / 70)
        self.assertEqual(summary.status_counts,
                         {ipm.INTEGRAL: 7, ipm.FRACTIONAL: 3})
        self.assertAlmostEqual(summary.mean_iterations[ipm.FRACTIONAL], 11.0)
        self.assertIsNone(summary.ml_frame_errors)
        self.assertNotIn('wall_time', summary.to_dict())
        self.assertAlmostEqual(summary.to_dict(timing=True)['wall_time'], 5.0)
        with self.assertRaises(ConfigError):
            harness.simulate(self.matrix, channels.ChannelSpec('bsc', p=0.1),
                             0, self.cfg, 0)

    def test_writers(self):
        """
        CSV and JSON outputs parse with strict parsers.
        """
        spec = channels.ChannelSpec('bsc', p=0.05)
        summary, records = harness.simulate(self.matrix, spec, 5, self.cfg, 1)
        stream = io.StringIO()
        harness.write_records_csv(records, stream)
        rows = list(csv.DictReader(io.StringIO(stream.getvalue())))
        self.assertEqual(len(rows), 5)
        self.assertEqual(list(rows[0].keys()), harness.RECORD_COLUMNS)
        self.assertEqual(rows[0]['ml_frame_error'], '')
        stream = io.StringIO()
        harness.write_records_json(records, stream, timing=True)
        self.assertIn('wall_time', json.loads(stream.getvalue())[0])
        stream = io.StringIO()
        harness.write_summary_json(summary, stream)
        self.assertEqual(json.loads(stream.getvalue())['trials'], 5)

    def test_bench(self):
        """
        Inner solvers agree on every fixture.
        """
        spec = channels.ChannelSpec('bsc', p=0.1)
        fixtures = harness.make_fixtures(self.matrix, spec, 3, 8)
        grid = [config(inner=inner, round_every=0)
                for inner in ('dense', 'cg', 'gabp')]
        rows = harness.bench_inner_solvers(self.matrix, fixtures, grid)
        self.assertEqual(len(rows), 9)
        for index in range(3):
            costs = [row['cost'] for row in rows if row['fixture'] == index]
            self.assertLessEqual(max(costs) - min(costs), 1e-6)
        stream = io.StringIO()
        harness.write_bench_csv(rows, stream)
        header = stream.getvalue().splitlines()[0]
        self.assertEqual(header.split(','), harness.BENCH_COLUMNS)
        with self.assertRaises(ConfigError):
            harness.bench_inner_solvers(self.matrix, fixtures, [])
        with self.assertRaises(ConfigError):
            harness.bench_inner_solvers(self.matrix, [], grid)


class CliTestCase(unittest.TestCase):
    """
    Command-line front end.
    """

    def setUp(self):
        """
        Before each test, set up a environment.
        """
        self.directory = tempfile.mkdtemp()
        self.stdout = io.StringIO()
        self.stderr = io.StringIO()

    def tearDown(self):
        """
        Get rid of unused objects after each test.
        """
        shutil.rmtree(self.directory)

    def run_cli(self, *argv):
        self.stdout = io.StringIO()
        self.stderr = io.StringIO()
        return cli.run(list(argv), self.stdout, self.stderr)

    def test_check(self):
        """
        Test polytope statistics of the Hamming code.
        """
        code = self.run_cli('check', '--matrix', HAMMING_ALIST)
        self.assertEqual(code, cli.EXIT_OK)
        stats = json.loads(self.stdout.getvalue())
        self.assertEqual(stats['inequalities'], 24)
        self.assertEqual(stats['max_check_degree'], 4)
        self.assertEqual(stats['dimension'], 4)

    def test_decode_short_step_budget(self):
        """
        --max-iter-short caps short-step affine scaling only.
        """
        code = self.run_cli('decode', '--matrix', HAMMING_ALIST,
                            '--llr', '0.3,-0.2,0.9,0.4,1.1,-0.7,0.5',
                            '--solver', 'affine-short', '--max-iter', '1',
                            '--max-iter-short', '2', '--round-every', '0')
        self.assertEqual(code, cli.EXIT_OK)
        result = json.loads(self.stdout.getvalue())
        self.assertEqual(result['status'], 'Failure')
        self.assertEqual(result['message'],
                         'no convergence after 2 iterations')

    def test_decode_inline(self):
        """
        All-positive LLRs decode to the zero codeword.
        """
        code = self.run_cli('decode', '--matrix', HAMMING_ALIST,
                            '--llr', '1,1,1,1,1,1,1', '--round-every', '0')
        self.assertEqual(code, cli.EXIT_OK)
        result = json.loads(self.stdout.getvalue())
        self.assertEqual(result['status'], 'Integral')
        self.assertEqual(result['output'], [0] * 7)
        self.assertTrue(result['ml_certificate'])

    def test_decode_file_and_trace(self):
        """
        LLRs from a file, trajectory to a CSV file.
        """
        llr_path = os.path.join(self.directory, 'llr.txt')
        trace_path = os.path.join(self.directory, 'trace.csv')
        with open(llr_path, 'w') as stream:
            stream.write('-1 1 1\n1 1 1 1\n')
        code = self.run_cli('decode', '--matrix', HAMMING_ALIST,
                            '--llr', llr_path, '--trace', trace_path,
                            '--solver', 'affine-long', '--inner', 'dense')
        self.assertEqual(code, cli.EXIT_OK)
        result = json.loads(self.stdout.getvalue())
        self.assertEqual(result['output'], [0] * 7)
        with open(trace_path) as stream:
            header = stream.readline().strip()
        self.assertTrue(header.startswith('iteration,cost,gap,x_0'))

    def test_usage_errors(self):
        """
        Unknown flags and invalid values exit with 1.
        """
        code = self.run_cli('check', '--matrix', HAMMING_ALIST, '--bogus')
        self.assertEqual(code, cli.EXIT_USAGE)
        self.assertIn('usage', self.stderr.getvalue())
        self.assertEqual(self.stdout.getvalue(), '')
        self.assertEqual(self.run_cli('frobnicate'), cli.EXIT_USAGE)
        self.assertEqual(
            self.run_cli('decode', '--matrix', HAMMING_ALIST, '--llr', '1',
                         '--beta', '2'),
            cli.EXIT_USAGE,
        )
        self.assertEqual(
            self.run_cli('simulate', '--matrix', HAMMING_ALIST,
                         '--channel', 'bsc:0.9'),
            cli.EXIT_USAGE,
        )

    @patch('sys.stdout', new_callable=io.StringIO)
    def test_help(self, stdout_mock):
        """
        --help exits cleanly.
        """
        self.assertEqual(self.run_cli('--help'), cli.EXIT_OK)
        self.assertIn('decode', stdout_mock.getvalue())

    def test_input_errors(self):
        """
        Missing and malformed inputs exit with 2.
        """
        missing = os.path.join(self.directory, 'missing.alist')
        self.assertEqual(self.run_cli('check', '--matrix', missing),
                         cli.EXIT_INPUT)
        broken = os.path.join(self.directory, 'broken.alist')
        with open(broken, 'w') as stream:
            stream.write(HAMMING_TEXT.replace('1 2 3\n', '0 2 3\n', 1))
        self.assertEqual(self.run_cli('check', '--matrix', broken),
                         cli.EXIT_INPUT)
        self.assertIn('line 5', self.stderr.getvalue())
        self.assertEqual(
            self.run_cli('decode', '--matrix', HAMMING_ALIST, '--llr', '1,1'),
            cli.EXIT_INPUT,
        )
        self.assertEqual(
            self.run_cli('decode', '--matrix', HAMMING_ALIST, '--llr', 'a,b'),
            cli.EXIT_INPUT,
        )

    def test_simulate_reproducible(self):
        """
        Same arguments give byte-identical machine output.
        """
        summary_path = os.path.join(self.directory, 'summary.json')
        argv = ('simulate', '--matrix', HAMMING_ALIST, '--channel',
                'bsc:0.05', '--trials', '20', '--seed', '4', '--workers', '2',
                '--summary', summary_path, '--compare-ml')
        self.assertEqual(self.run_cli(*argv), cli.EXIT_OK)
        first = self.stdout.getvalue()
        self.assertEqual(self.run_cli(*argv), cli.EXIT_OK)
        self.assertEqual(self.stdout.getvalue(), first)
        rows = list(csv.DictReader(io.StringIO(first)))
        self.assertEqual(len(rows), 20)
        self.assertNotIn('wall_time', rows[0])
        with open(summary_path) as stream:
            summary = json.load(stream)
        self.assertEqual(summary['trials'], 20)
        self.assertEqual(summary['certificate_violations'], 0)

    def test_simulate_json(self):
        """
        JSON records, summary on the diagnostic stream.
        """
        code = self.run_cli('simulate', '--matrix', REPETITION_ALIST,
                            '--channel', 'biawgn:6', '--trials', '5',
                            '--format', 'json', '--timing')
        self.assertEqual(code, cli.EXIT_OK)
        records = json.loads(self.stdout.getvalue())
        self.assertEqual(len(records), 5)
        self.assertIn('wall_time', records[0])
        self.assertIn('"trials": 5', self.stderr.getvalue())

    def test_bench(self):
        """
        Test the solver grid output.
        """
        code = self.run_cli('bench', '--matrix', HAMMING_ALIST,
                            '--fixtures', '2', '--solvers', 'pdip',
                            '--inners', 'cg,dense', '--round-every', '0')
        self.assertEqual(code, cli.EXIT_OK)
        rows = list(csv.DictReader(io.StringIO(self.stdout.getvalue())))
        self.assertEqual(len(rows), 4)
        self.assertEqual(
            self.run_cli('bench', '--matrix', HAMMING_ALIST,
                         '--inners', 'qr'),
            cli.EXIT_USAGE,
        )


# pylint: disable=maybe-no-member, too-many-public-methods
class LPDecoderApiTestCase(unittest.TestCase):
    """
    API blueprint tests.
    """

    def setUp(self):
        """
        Before each test, set up a environment.
        """
        main.app.config.update({'CODES_DIR': TEST_DATA_DIR})
        self.client = main.app.test_client()
        utils.cache_backend.clean()

    def test_api_codes(self):
        """
        Test codes listing.
        """
        resp = self.client.get('/api/v1/codes')
        self.assertEqual(resp.status_code, 200)
        self.assertEqual(resp.content_type, 'application/json')
        self.assertEqual(json.loads(resp.data),
                         ['hamming74', 'repetition3'])

    def test_api_code(self):
        """
        Test statistics of one code.
        """
        resp = self.client.get('/api/v1/codes/hamming74')
        self.assertEqual(resp.status_code, 200)
        data = json.loads(resp.data)
        self.assertEqual(data['inequalities'], 24)
        self.assertEqual(data['n'], 7)

    def test_api_code_404(self):
        """
        Test unknown code.
        """
        resp = self.client.get('/api/v1/codes/golay')
        self.assertEqual(resp.status_code, 404)
        data = json.loads(resp.data)
        self.assertFalse(data['success'])

    def test_api_decode(self):
        """
        Test decoding by code name and by alist text.
        """
        resp = self.client.post('/api/v1/decode', json={
            'code': 'hamming74', 'llr': [1] * 7, 'round_every': 0,
        })
        self.assertEqual(resp.status_code, 200)
        data = json.loads(resp.data)
        self.assertEqual(data['status'], 'Integral')
        self.assertEqual(data['output'], [0] * 7)

        resp = self.client.post('/api/v1/decode', json={
            'alist': HAMMING_TEXT, 'llr': [-1, 1, 1, 1, 1, 1, 1],
            'inner': 'dense', 'round_every': 0,
        })
        self.assertEqual(resp.status_code, 200)
        self.assertEqual(json.loads(resp.data)['output'], [0] * 7)

    def test_api_decode_errors(self):
        """
        Invalid requests give JSON 400 responses.
        """
        bodies = [
            {'code': 'hamming74', 'llr': [1, 1]},
            {'code': 'hamming74', 'llr': [1] * 7, 'colour': 'red'},
            {'code': 'hamming74', 'llr': ['a'] * 7},
            {'llr': [1] * 7},
            {'alist': 'nonsense', 'llr': [1] * 7},
        ]
        for body in bodies:
            resp = self.client.post('/api/v1/decode', json=body)
            self.assertEqual(resp.status_code, 400)
            self.assertFalse(json.loads(resp.data)['success'])
        resp = self.client.post('/api/v1/decode', data='not json')
        self.assertEqual(resp.status_code, 400)
        resp = self.client.post('/api/v1/decode', json={
            'code': 'golay', 'llr': [1] * 7,
        })
        self.assertEqual(resp.status_code, 404)

    @patch('lp_decoder.blueprints.api_v1.utils.parse_alist')
    def test_code_cached(self, parse_mock):
        """
        Codes are read from disk once.
        """
        parse_mock.return_value = hamming()
        utils.get_code('hamming74')
        utils.get_code('hamming74')
        self.assertEqual(parse_mock.call_count, 1)

    def test_jsonify(self):
        """
        Decoder results and numpy scalars are serialized.
        """
        result = ipm.DecodeResult(ipm.FRACTIONAL, np.array([0.5, 0.0]), 1.5)
        view = utils.jsonify(lambda: {'result': result, 'count': np.int64(3)})
        resp = view()
        self.assertEqual(resp.mimetype, 'application/json')
        data = json.loads(resp.data)
        self.assertEqual(data['count'], 3)
        self.assertEqual(data['result']['status'], 'Fractional')
        self.assertEqual(data['result']['output'], [0.5, 0.0])
        with self.assertRaises(TypeError):
            utils.jsonify(object)()

    @patch('run.app')
    @patch('run.logging.config.fileConfig')
    def test_run_server(self, config_mock, app_mock):
        """
        Development server reads debug.ini and the port override.
        """
        with patch.dict(os.environ, {'LP_DECODER_PORT': '5055'}):
            run.main()
        self.assertTrue(config_mock.call_args[0][0].endswith('debug.ini'))
        app_mock.run.assert_called_once_with(host='0.0.0.0', port=5055)


class ScriptsTestCase(unittest.TestCase):
    """
    Cron scripts.
    """

    def setUp(self):
        """
        Before each test, set up a environment.
        """
        self.directory = tempfile.mkdtemp()
        main.app.config.update({'CODES_DIR': self.directory})

    def tearDown(self):
        """
        Get rid of unused objects after each test.
        """
        main.app.config.update({'CODES_DIR': TEST_DATA_DIR})
        shutil.rmtree(self.directory)

    @patch('scripts.requests.get')
    def test_download_alist(self, get_mock):
        """
        Valid files are stored in the codes directory.
        """
        get_mock.return_value = Mock(status_code=200, text=HAMMING_TEXT)
        path = scripts.download_alist(['http://example.com/codes/ham'])
        self.assertEqual(path, os.path.join(self.directory, 'ham.alist'))
        self.assertEqual(codes.load_alist(path), hamming())

        get_mock.return_value = Mock(status_code=200, text='nonsense')
        self.assertIsNone(
            scripts.download_alist(['http://example.com/codes/bad.alist'])
        )
        get_mock.return_value = Mock(status_code=404, text='')
        self.assertIsNone(
            scripts.download_alist(['http://example.com/codes/gone.alist'])
        )
        self.assertFalse(
            os.path.exists(os.path.join(self.directory, 'bad.alist'))
        )


class LPDecoderCacheTestCase(unittest.TestCase):
    """
    Tests for cache backends.
    """
    def setUp(self):
        """
        Before each test, set up a environment.
        """
        def tested_func(first, second):
            """
            Function for testing purposes, passed as argument to cache.
            """
            return ''.join([first, second])

        self.tested_func = tested_func
        self.base_cache = Cache()
        self.memory_cache = MemoryCache()
        self.memory_cache.clean()

    def test_cache_save_read(self):
        """
        Tests when no data is stored in memory cache, saves data and then
        checks cache read.
        """
        save = self.memory_cache.get_or_set(self.tested_func, 600, 'a', 'b')
        self.assertEqual(save, 'ab')
        read = self.memory_cache.get(self.tested_func, 'a', 'b')
        self.assertEqual(read, 'ab')
        self.assertEqual(len(self.memory_cache), 1)

    @patch('lp_decoder.cache.datetime')
    def test_cache_expired(self, datetime_mock):
        """
        Tests data save now and then read when it expired.
        """
        datetime_mock.now = Mock(return_value=datetime.datetime.now())
        self.memory_cache.set_expire(self.tested_func, 60, 'e', 'f')
        fake_datetime = datetime.datetime.now() + datetime.timedelta(minutes=5)
        datetime_mock.now = Mock(return_value=fake_datetime)
        read = self.memory_cache.get(self.tested_func, 'e', 'f')
        self.assertIsNone(read)

    def test_different_args(self):
        """
        Tests save and read from memory cache for same function, but different
        data.
        """
        save = self.memory_cache.get_or_set(self.tested_func, 600, 'a', 'b')
        self.assertEqual(save, 'ab')
        read_other_args = self.memory_cache.get(self.tested_func, 'c', 'd')
        self.assertIsNone(read_other_args)

    def test_decorator(self):
        """
        Decorated functions are computed once per arguments.
        """
        counter = Mock(side_effect=lambda value: value * 2)

        def doubled(value):
            """
            Function for testing purposes.
            """
            return counter(value)

        wrapped = cached(self.memory_cache, lambda: 600)(doubled)
        self.assertEqual(wrapped(2), 4)
        self.assertEqual(wrapped(2), 4)
        self.assertEqual(counter.call_count, 1)
        self.assertEqual(wrapped.uncached(3), 6)
        self.assertEqual(wrapped.__name__, 'doubled')

    def test_not_implemented(self):
        """
        Tests raising NotImplementedError for base Cache class.
        """
        with self.assertRaises(NotImplementedError):
            self.base_cache.get(self.tested_func, 'a', 'b')
        with self.assertRaises(NotImplementedError):
            self.base_cache.set_expire(self.tested_func, 600, 'a', 'b')


def suite():
    """
    Default test suite.
    """
    loader = unittest.defaultTestLoader
    base_suite = unittest.TestSuite()
    for case in (CodesTestCase, PolytopeTestCase, LinalgTestCase,
                 GaBPTestCase, IpmTestCase, ChannelsTestCase,
                 HarnessTestCase, CliTestCase, LPDecoderApiTestCase,
                 ScriptsTestCase, LPDecoderCacheTestCase):
        base_suite.addTest(loader.loadTestsFromTestCase(case))
    return base_suite


if __name__ == '__main__':
    unittest.main()
