# -*- coding: utf-8 -*-
"""
Interior-point LP decoding: affine scaling (long and short step), primal-dual
path following from feasible and infeasible starts, early rounding and the
decode entry point that turns every run into a verdict.
"""
import collections
import csv
import logging

import numpy as np

from lp_decoder.cache import MemoryCache, cached
from lp_decoder.codes import as_llr_vector, is_codeword
from lp_decoder.exceptions import (
    ConfigError, FormulationError, InnerSolverError, LPDecoderError,
    UnboundedError,
)
from lp_decoder.gabp import GaussianBPSolver
from lp_decoder.linalg import (
    ConjugateGradientSolver, DenseCholeskySolver, InnerSystem,
)
from lp_decoder.main import app
from lp_decoder.polytope import (
    DecompositionMap, build_polytope, decompose_checks, round_iterate,
    to_standard_form,
)

log = logging.getLogger(__name__)  # pylint: disable=invalid-name

ALGORITHMS = ('affine-long', 'affine-short', 'pdip', 'pdip-infeasible')
INNER_SOLVERS = ('cg', 'dense', 'gabp', 'gabp-warm')

INTEGRAL = 'Integral'
FRACTIONAL = 'Fractional'
EARLY_ROUNDED = 'EarlyRounded'
FAILURE = 'Failure'

# relative primal residual below which an iterate is rounded early
EARLY_ROUNDING_FEASIBILITY = 1e-6
# relative primal residual every affine-scaling iterate keeps
FEASIBILITY_TOLERANCE = 1e-9
# drift of the affine direction out of null(A), relative to its size
NULLSPACE_TOLERANCE = 1e-12
REFINEMENT_ROUNDS = 5
STEP_HALVINGS = 30

embedding_cache = MemoryCache()  # pylint: disable=invalid-name

AffineStep = collections.namedtuple(
    'AffineStep',
    ['x', 'direction', 'step_to_boundary', 'reduced_cost', 'dual'],
)
Embedding = collections.namedtuple(
    'Embedding', ['matrix', 'mapping', 'lp'],
)
TrajectoryPoint = collections.namedtuple(
    'TrajectoryPoint', ['iteration', 'cost', 'gap', 'x'],
)


class SolverConfig(object):
    """
    Validated decoder settings. Field defaults mirror the SOLVER_, GABP_
    keys of the application config.
    """
    CONFIG_KEYS = collections.OrderedDict([
        ('algorithm', 'SOLVER_ALGORITHM'),
        ('inner', 'SOLVER_INNER'),
        ('eps_gap', 'SOLVER_EPS_GAP'),
        ('max_iter', 'SOLVER_MAX_ITER'),
        ('max_iter_short', 'SOLVER_MAX_ITER_SHORT'),
        ('beta', 'SOLVER_BETA'),
        ('short_radius', 'SOLVER_SHORT_RADIUS'),
        ('sigma', 'SOLVER_SIGMA'),
        ('eta', 'SOLVER_ETA'),
        ('inner_tol_floor', 'SOLVER_INNER_TOL_FLOOR'),
        ('inner_tol_factor', 'SOLVER_INNER_TOL_FACTOR'),
        ('round_every', 'SOLVER_ROUND_EVERY'),
        ('tau_round', 'SOLVER_TAU_ROUND'),
        ('tau_fractional', 'SOLVER_TAU_FRACTIONAL'),
        ('cert_tol', 'SOLVER_CERT_TOL'),
        ('max_check_degree', 'SOLVER_MAX_CHECK_DEGREE'),
        ('gabp_damping', 'GABP_DAMPING'),
        ('gabp_max_sweeps', 'GABP_MAX_SWEEPS'),
        ('gabp_warm_sweeps', 'GABP_WARM_SWEEPS'),
    ])

    def __init__(self, algorithm='pdip', inner='cg', eps_gap=1e-8,
                 max_iter=200, max_iter_short=3000, beta=0.66,
                 short_radius=0.25, sigma=0.3, eta=0.995,
                 inner_tol_floor=1e-10, inner_tol_factor=0.01, round_every=1,
                 tau_round=1e-9, tau_fractional=1e-4, cert_tol=1e-6,
                 max_check_degree=None, gabp_damping=0.3, gabp_max_sweeps=200,
                 gabp_warm_sweeps=1, trace=False):
        self.algorithm = algorithm
        self.inner = inner
        self.eps_gap = eps_gap
        self.max_iter = max_iter
        self.max_iter_short = max_iter_short
        self.beta = beta
        self.short_radius = short_radius
        self.sigma = sigma
        self.eta = eta
        self.inner_tol_floor = inner_tol_floor
        self.inner_tol_factor = inner_tol_factor
        self.round_every = round_every
        self.tau_round = tau_round
        self.tau_fractional = tau_fractional
        self.cert_tol = cert_tol
        self.max_check_degree = max_check_degree
        self.gabp_damping = gabp_damping
        self.gabp_max_sweeps = gabp_max_sweeps
        self.gabp_warm_sweeps = gabp_warm_sweeps
        self.trace = trace
        self.validate()

    @classmethod
    def from_config(cls, mapping, **overrides):
        """
        Builds a config from application config keys. Overrides given as
        None are ignored, so unset command-line flags keep the defaults.
        :param mapping: dict-like, usually app.config
        :param overrides: field values taking precedence
        :return: SolverConfig
        """
        kwargs = {
            field: mapping[key]
            for field, key in cls.CONFIG_KEYS.items() if key in mapping
        }
        for field, value in overrides.items():
            if field not in cls.CONFIG_KEYS and field != 'trace':
                raise ConfigError('unknown solver setting {!r}'.format(field))
            if value is not None:
                kwargs[field] = value
        return cls(**kwargs)

    def validate(self):
        """
        Raises ConfigError on the first invalid field.
        """
        if self.algorithm not in ALGORITHMS:
            raise ConfigError('unknown algorithm {!r}'.format(self.algorithm))
        if self.inner not in INNER_SOLVERS:
            raise ConfigError('unknown inner solver {!r}'.format(self.inner))
        for field in ('beta', 'short_radius', 'sigma', 'eta'):
            if not 0 < getattr(self, field) < 1:
                raise ConfigError('{} must lie in (0, 1)'.format(field))
        for field in ('eps_gap', 'inner_tol_floor', 'inner_tol_factor',
                      'tau_round', 'tau_fractional', 'cert_tol'):
            if not getattr(self, field) > 0:
                raise ConfigError('{} must be positive'.format(field))
        for field in ('max_iter', 'max_iter_short'):
            value = getattr(self, field)
            if int(value) != value or value < 1:
                raise ConfigError(
                    '{} must be a positive integer'.format(field)
                )
        if int(self.round_every) != self.round_every or self.round_every < 0:
            raise ConfigError('round_every must be a non-negative integer')
        if self.max_check_degree is not None and self.max_check_degree < 3:
            raise ConfigError('max_check_degree must be at least 3')
        if not 0 <= self.gabp_damping < 1:
            raise ConfigError('gabp_damping must lie in [0, 1)')
        if self.gabp_max_sweeps < 1 or self.gabp_warm_sweeps < 1:
            raise ConfigError('GaBP sweep counts must be positive')

    @property
    def iteration_budget(self):
        """
        Outer iteration cap of the configured algorithm.
        """
        if self.algorithm == 'affine-short':
            return self.max_iter_short
        return self.max_iter

    def to_dict(self):
        result = collections.OrderedDict(
            (field, getattr(self, field)) for field in self.CONFIG_KEYS
        )
        result['trace'] = self.trace
        return result


class IterateTriple(object):
    """
    Primal point x, dual multipliers lam and dual slack s.
    """
    def __init__(self, x, lam, s):
        self.x = np.asarray(x, dtype=float)
        self.lam = np.asarray(lam, dtype=float)
        self.s = np.asarray(s, dtype=float)
        if not (np.all(self.x > 0) and np.all(self.s > 0)):
            raise FormulationError('iterate left the positive orthant')
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.s))
                and np.all(np.isfinite(self.lam))):
            raise InnerSolverError('non-finite iterate')

    @property
    def gap(self):
        return float(self.x @ self.s)

    def residuals(self, lp):
        """
        :return: (b - A x, c - A^T lam - s)
        """
        return (lp.primal_residual(self.x),
                lp.c - lp.A_T @ self.lam - self.s)


class DecodeResult(object):
    """
    Outcome of one decode call.

    output is a uint8 codeword for Integral and EarlyRounded, a float vector
    over {0, 1/2, 1} for Fractional and None for Failure.
    """
    def __init__(self, status, output=None, cost=None, ml_certificate=False,
                 iterations=0, inner_stats=None, unrounded=None,
                 trajectory=None, message=None):
        self.status = status
        self.output = output
        self.cost = cost
        self.ml_certificate = ml_certificate
        self.iterations = iterations
        self.inner_stats = inner_stats or {}
        self.unrounded = unrounded
        self.trajectory = trajectory
        self.message = message

    def __repr__(self):
        return '<DecodeResult {} cost={} iterations={}>'.format(
            self.status, self.cost, self.iterations
        )

    @property
    def is_codeword(self):
        return self.status in (INTEGRAL, EARLY_ROUNDED)

    def to_dict(self):
        """
        JSON-ready form; contains no timing so repeated runs are identical.
        """
        if self.output is None:
            output = None
        elif self.is_codeword:
            output = [int(v) for v in self.output]
        else:
            output = [float(v) for v in self.output]
        result = collections.OrderedDict([
            ('status', self.status),
            ('output', output),
            ('cost', self.cost),
            ('ml_certificate', self.ml_certificate),
            ('iterations', self.iterations),
            ('inner', self.inner_stats),
        ])
        if self.unrounded is not None:
            result['unrounded'] = [float(v) for v in self.unrounded]
        if self.message is not None:
            result['message'] = self.message
        return result


def get_inner_solver(cfg):
    """
    Fresh inner solver for one decode call.
    :param cfg: SolverConfig
    :return: InnerSolver
    """
    if cfg.inner == 'cg':
        return ConjugateGradientSolver()
    if cfg.inner == 'dense':
        return DenseCholeskySolver()
    return GaussianBPSolver(
        warm=cfg.inner == 'gabp-warm', damping=cfg.gabp_damping,
        max_sweeps=cfg.gabp_max_sweeps, warm_sweeps=cfg.gabp_warm_sweeps,
    )


def _max_step(v, dv):
    """
    Largest alpha with v + alpha dv >= 0, inf when dv >= 0.
    """
    negative = dv < 0
    if not np.any(negative):
        return np.inf
    return float(np.min(-v[negative] / dv[negative]))


def _feasibility_tolerance(lp):
    return FEASIBILITY_TOLERANCE * (1 + np.max(np.abs(lp.b), initial=0.0))


def _affine_dual(lp, d2, cfg, inner, lam0=None):
    """
    Solves A D^2 A^T lam = A D^2 c, then refines lam until the direction
    -D^2 (c - A^T lam) lies in the null space of A.
    """
    system = InnerSystem(lp.A, d2, lp.A @ (d2 * lp.c), lp.A_T)
    lam, _ = inner.solve(system, cfg.inner_tol_floor, u0=lam0)
    for _ in range(REFINEMENT_ROUNDS):
        direction = -d2 * (lp.c - lp.A_T @ lam)
        drift = lp.A @ direction
        bound = NULLSPACE_TOLERANCE * (
            1 + np.max(np.abs(direction), initial=0.0))
        if not np.max(np.abs(drift), initial=0.0) > bound:
            break
        correction, _ = inner.solve(
            InnerSystem(lp.A, d2, -drift, lp.A_T), cfg.inner_tol_floor
        )
        lam = lam + correction
    return lam


def restore_feasibility(lp, x, cfg, inner):
    """
    Newton projection of a positive point back onto A x = b.
    :param lp: StandardFormLP
    :param x: strictly positive point
    :param cfg: SolverConfig
    :param inner: InnerSolver
    :return: point with |b - A x|_inf within tolerance, or None when the
        projection leaves the positive orthant or does not settle
    """
    tolerance = _feasibility_tolerance(lp)
    for _ in range(REFINEMENT_ROUNDS + 1):
        residual = lp.primal_residual(x)
        if np.max(np.abs(residual), initial=0.0) <= tolerance:
            return x
        d2 = x * x
        correction, _ = inner.solve(
            InnerSystem(lp.A, d2, residual, lp.A_T), cfg.inner_tol_floor
        )
        x = x + d2 * (lp.A_T @ correction)
        if not np.all(x > 0):
            return None
    return None


def affine_scaling_step(lp, x, cfg, inner, short=False, lam0=None):
    """
    One affine-scaling step: minimize the cost over the Dikin ellipsoid
    around x. A step whose end point cannot be projected back onto A x = b
    is halved until it can.
    :param lp: StandardFormLP
    :param x: strictly positive point with A x = b
    :param cfg: SolverConfig
    :param inner: InnerSolver
    :param short: use the short step of radius cfg.short_radius
    :param lam0: starting guess for the dual estimate
    :return: AffineStep
    """
    x = np.asarray(x, dtype=float)
    d2 = x * x
    lam = _affine_dual(lp, d2, cfg, inner, lam0)
    reduced = lp.c - lp.A_T @ lam
    direction = -d2 * reduced
    if not np.all(np.isfinite(direction)):
        raise InnerSolverError('non-finite affine-scaling direction')
    if not np.any(direction):
        return AffineStep(x, direction, np.inf, reduced, lam)
    step_to_boundary = _max_step(x, direction)
    if not np.isfinite(step_to_boundary):
        raise UnboundedError('no coordinate decreases along the direction')

    if short:
        alpha = cfg.short_radius / np.linalg.norm(direction / x)
    else:
        alpha = cfg.beta * step_to_boundary
    for _ in range(STEP_HALVINGS):
        x_new = restore_feasibility(lp, x + alpha * direction, cfg, inner)
        if x_new is not None:
            return AffineStep(x_new, direction, step_to_boundary, reduced,
                              lam)
        alpha /= 2
        log.debug('affine step halved to %.3e', alpha)
    raise InnerSolverError('affine-scaling step cannot be kept on A x = b')


def _inner_tolerance(cfg, gap):
    return max(cfg.inner_tol_floor, cfg.inner_tol_factor * gap)


def pdip_step(lp, t, cfg, inner, common_step=False):
    """
    One primal-dual path-following step towards the point of the central
    path with complementarity sigma * <x, s> / N.
    :param lp: StandardFormLP
    :param t: IterateTriple
    :param cfg: SolverConfig
    :param inner: InnerSolver
    :param common_step: use min(alpha_p, alpha_d) for both blocks
    :return: IterateTriple
    """
    x, lam, s = t.x, t.lam, t.s
    r_p, r_d = t.residuals(lp)
    mu_target = cfg.sigma * t.gap / x.size
    d2 = x / s
    # dx = d2 A^T dlam - d2 r_d + mu/s - x, inserted into A dx = r_p
    shift = x - mu_target / s + d2 * r_d
    rhs = r_p + lp.A @ shift
    relative_gap = t.gap / (1 + abs(lp.cost(x)))
    dlam, _ = inner.solve(
        InnerSystem(lp.A, d2, rhs, lp.A_T), _inner_tolerance(cfg, relative_gap)
    )
    ds = r_d - lp.A_T @ dlam
    dx = -d2 * ds + (mu_target / s - x)
    if not (np.all(np.isfinite(dx)) and np.all(np.isfinite(ds))):
        raise InnerSolverError('non-finite primal-dual direction')
    alpha_p = min(1.0, cfg.eta * _max_step(x, dx))
    alpha_d = min(1.0, cfg.eta * _max_step(s, ds))
    if common_step:
        alpha_p = alpha_d = min(alpha_p, alpha_d)
    log.debug('pdip step: alpha_p %.3e alpha_d %.3e', alpha_p, alpha_d)
    return IterateTriple(x + alpha_p * dx, lam + alpha_d * dlam,
                         s + alpha_d * ds)


def infeasible_start(lp):
    """
    x = s = max(1, |b|_inf, |c|_inf) * ones, lam = 0.
    :param lp: StandardFormLP
    :return: IterateTriple
    """
    k, N = lp.shape
    scale = max(1.0, np.max(np.abs(lp.b)) if k else 0.0,
                np.max(np.abs(lp.c)) if N else 0.0)
    return IterateTriple(np.full(N, scale), np.zeros(k), np.full(N, scale))


def feasible_primal_start(lp):
    """
    Code coordinates at 1/2, slacks chosen so that A x = b.
    :param lp: StandardFormLP in decoding layout
    :return: strictly positive vector
    """
    if not lp.is_decoding_layout:
        raise FormulationError('LP does not follow the decoding layout')
    n, r = lp.original_n, lp.n_inequalities
    x = np.zeros(lp.shape[1])
    x[:n] = 0.5
    x[n + r:] = 0.5
    lhs = lp.A @ x
    x[n:n + r] = lp.b[:r] - lhs[:r]
    if np.any(x <= 0):
        raise FormulationError(
            'zero or negative slack at the polytope center; '
            'checks of degree one are not supported'
        )
    if np.max(np.abs(lp.primal_residual(x)), initial=0.0) > 1e-12:
        raise FormulationError('polytope center violates an equality row')
    return x


def feasible_dual_start(lp):
    """
    lam = -1 on inequality rows, 0 on equality rows and -M on box rows, with
    M large enough to make every dual slack at least one.
    :param lp: StandardFormLP in decoding layout
    :return: (lam, s)
    """
    if not lp.is_decoding_layout:
        raise FormulationError('LP does not follow the decoding layout')
    n, r = lp.original_n, lp.n_inequalities
    k = lp.shape[0]
    columns = np.asarray(lp.A[:r, :n].sum(axis=0)).ravel()
    lowest = np.min(lp.c[:n] + columns) if n else 0.0
    big = max(1.0, 1.0 - lowest)
    lam = np.zeros(k)
    lam[:r] = -1.0
    lam[k - lp.n_box:] = -big
    s = lp.c - lp.A_T @ lam
    return lam, s


@cached(embedding_cache, lambda: app.config['CACHE_SECONDS'])
def build_embedding(matrix, max_check_degree):
    """
    Decomposes (when asked), builds the polytope and its standard form with
    zero cost. Shared read-only between decode calls.
    :param matrix: SparseBinaryMatrix
    :param max_check_degree: decomposition threshold or None
    :return: Embedding
    """
    if max_check_degree is not None and \
            max(matrix.row_degrees) > max_check_degree:
        decomposed, mapping = decompose_checks(matrix, max_check_degree)
    else:
        decomposed, mapping = matrix, DecompositionMap(matrix.n, 0)
    lp = to_standard_form(build_polytope(decomposed), np.zeros(decomposed.n))
    log.debug('embedding: %d x %d', *lp.shape)
    return Embedding(decomposed, mapping, lp)


class _Run(object):
    """
    Book-keeping shared by the outer loops: early rounding, trajectory.
    """
    def __init__(self, matrix, gamma, embedding, lp, scale, cfg):
        self.matrix = matrix
        self.gamma = gamma
        self.mapping = embedding.mapping
        self.lp = lp
        self.scale = scale
        self.cfg = cfg
        self.trajectory = [] if cfg.trace else None
        self.iterations = 0
        self.early = None

    def original(self, x):
        return self.mapping.project(x[:self.mapping.decomposed_n])

    def observe(self, iteration, x, gap):
        """
        Records the iterate; returns True when rounding found a codeword.
        """
        self.iterations = iteration
        if self.trajectory is not None:
            self.trajectory.append(TrajectoryPoint(
                iteration, self.lp.cost(x) * self.scale, gap,
                self.original(x).copy(),
            ))
        every = self.cfg.round_every
        if not every or not iteration or iteration % every:
            return False
        residual = np.max(np.abs(self.lp.primal_residual(x)), initial=0.0)
        if residual > EARLY_ROUNDING_FEASIBILITY * (
                1 + np.max(np.abs(self.lp.b), initial=0.0)):
            return False
        rounded = round_iterate(np.clip(self.original(x), 0.0, 1.0),
                                self.cfg.tau_round)
        if np.any(rounded == 0.5):
            return False
        word = rounded.astype(np.uint8)
        if is_codeword(self.matrix, word):
            self.early = word
            return True
        return False


def _run_affine(run, inner, short):
    """
    Stops when x keeps A x = b, the reduced cost s = c - A^T lam is dual
    feasible within eps_gap and <x, s> is within eps_gap of zero, so b^T lam
    certifies the cost.
    """
    lp, cfg = run.lp, run.cfg
    x = feasible_primal_start(lp)
    lam = None
    feasibility = _feasibility_tolerance(lp)
    c_scale = 1 + np.max(np.abs(lp.c), initial=0.0)
    budget = cfg.max_iter_short if short else cfg.max_iter
    for iteration in range(budget + 1):
        step = affine_scaling_step(lp, x, cfg, inner, short, lam0=lam)
        lam = step.dual
        cost = lp.cost(x)
        gap = float(x @ step.reduced_cost) / (1 + abs(cost))
        primal = np.max(np.abs(lp.primal_residual(x)), initial=0.0)
        dual = max(0.0, -float(np.min(step.reduced_cost, initial=0.0)))
        log.debug('affine %d: cost %.12g gap %.3e r_p %.3e r_d %.3e',
                  iteration, cost, gap, primal, dual)
        if run.observe(iteration, x, max(gap, 0.0)):
            return x, True
        if (primal <= feasibility and dual <= cfg.eps_gap * c_scale and
                gap <= cfg.eps_gap):
            return x, True
        if iteration == budget:
            break
        x = step.x
    return x, False


def _run_pdip(run, inner, feasible):
    lp, cfg = run.lp, run.cfg
    if feasible:
        lam, s = feasible_dual_start(lp)
        t = IterateTriple(feasible_primal_start(lp), lam, s)
    else:
        t = infeasible_start(lp)
    b_scale = 1 + np.max(np.abs(lp.b), initial=0.0)
    c_scale = 1 + np.max(np.abs(lp.c), initial=0.0)
    for iteration in range(cfg.max_iter + 1):
        r_p, r_d = t.residuals(lp)
        gap = t.gap / (1 + abs(lp.cost(t.x)))
        log.debug('pdip %d: cost %.12g gap %.3e r_p %.3e r_d %.3e',
                  iteration, lp.cost(t.x), gap,
                  np.max(np.abs(r_p), initial=0.0),
                  np.max(np.abs(r_d), initial=0.0))
        if run.observe(iteration, t.x, gap):
            return t.x, True
        if (gap <= cfg.eps_gap and
                np.max(np.abs(r_p), initial=0.0) <= cfg.eps_gap * b_scale and
                np.max(np.abs(r_d), initial=0.0) <= cfg.eps_gap * c_scale):
            return t.x, True
        if iteration == cfg.max_iter:
            break
        t = pdip_step(lp, t, cfg, inner, common_step=feasible)
    return t.x, False


def _verdict(run, x, inner):
    """
    Classifies a converged iterate.
    """
    cfg = run.cfg
    residual = np.max(np.abs(run.lp.primal_residual(x)), initial=0.0)
    if residual > EARLY_ROUNDING_FEASIBILITY * (
            1 + np.max(np.abs(run.lp.b), initial=0.0)):
        log.warning('final iterate violates A x = b by %.3e', residual)
        return DecodeResult(
            FAILURE, iterations=run.iterations,
            inner_stats=inner.statistics(), trajectory=run.trajectory,
            message='final iterate violates A x = b by {:.3e}'.format(
                residual
            ),
        )
    lp_cost = run.lp.cost(x) * run.scale
    unrounded = np.clip(run.original(x), 0.0, 1.0)
    rounded = round_iterate(unrounded, cfg.tau_round)
    if not np.any(rounded == 0.5):
        word = rounded.astype(np.uint8)
        if is_codeword(run.matrix, word) and \
                abs(float(run.gamma @ word) - lp_cost) <= \
                cfg.cert_tol * (1 + abs(lp_cost)):
            return DecodeResult(
                INTEGRAL, word, lp_cost, True, run.iterations,
                inner.statistics(), trajectory=run.trajectory,
            )
    output = round_iterate(unrounded, cfg.tau_fractional)
    message = None
    if not np.any(output == 0.5):
        # optimum off a vertex, e.g. the centre of an optimal face
        message = 'no coordinate rounds to 1/2; rounded word is not a ' \
                  'certified codeword'
    return DecodeResult(
        FRACTIONAL, output, lp_cost, False, run.iterations,
        inner.statistics(), unrounded=unrounded, trajectory=run.trajectory,
        message=message,
    )


def decode(matrix, gamma, cfg=None):
    """
    LP decoding of one received word.
    :param matrix: SparseBinaryMatrix
    :param gamma: LLR vector, positive values favor 0
    :param cfg: SolverConfig, defaults from app.config when None
    :return: DecodeResult
    """
    cfg = cfg or SolverConfig.from_config(app.config)
    gamma = as_llr_vector(gamma, matrix.n)
    inner = get_inner_solver(cfg)
    run = None
    try:
        embedding = build_embedding(matrix, cfg.max_check_degree)
        scale = float(np.max(np.abs(gamma))) if gamma.size else 0.0
        scale = scale or 1.0
        base = embedding.lp
        cost = np.zeros(base.shape[1])
        cost[:embedding.mapping.decomposed_n] = \
            embedding.mapping.extend_llr(gamma / scale)
        lp = base.with_cost(cost)
        run = _Run(matrix, gamma, embedding, lp, scale, cfg)
        if cfg.algorithm.startswith('affine'):
            x, converged = _run_affine(run, inner,
                                       cfg.algorithm == 'affine-short')
        else:
            x, converged = _run_pdip(run, inner, cfg.algorithm == 'pdip')
    except (LPDecoderError, np.linalg.LinAlgError) as error:
        log.warning('decode failed: %s', error)
        return DecodeResult(
            FAILURE, iterations=run.iterations if run else 0,
            inner_stats=inner.statistics(),
            trajectory=run.trajectory if run else None,
            message='{}: {}'.format(type(error).__name__, error),
        )

    if run.early is not None:
        result = DecodeResult(
            EARLY_ROUNDED, run.early, float(gamma @ run.early), False,
            run.iterations, inner.statistics(), trajectory=run.trajectory,
        )
    elif not converged:
        log.warning('decode did not converge in %d iterations',
                    cfg.iteration_budget)
        return DecodeResult(
            FAILURE, iterations=run.iterations,
            inner_stats=inner.statistics(), trajectory=run.trajectory,
            message='no convergence after {} iterations'.format(
                cfg.iteration_budget
            ),
        )
    else:
        result = _verdict(run, x, inner)
    log.info('decode: %s after %d iterations', result.status,
             result.iterations)
    return result


def write_trajectory_csv(trajectory, stream):
    """
    Writes iteration, cost, gap, x_0 ... x_{n-1} rows.
    :param trajectory: list of TrajectoryPoint
    :param stream: writable text file
    """
    writer = csv.writer(stream, lineterminator='\n')
    width = len(trajectory[0].x) if trajectory else 0
    writer.writerow(['iteration', 'cost', 'gap'] +
                    ['x_{}'.format(i) for i in range(width)])
    for point in trajectory:
        writer.writerow([point.iteration, repr(float(point.cost)),
                         repr(float(point.gap))] +
                        [repr(float(v)) for v in point.x])
