# -*- coding: utf-8 -*-
"""
Flask app initialization and decoder configuration defaults.
"""
import os.path
from flask import Flask


RUNTIME_DIR = os.path.join(os.path.dirname(__file__), '..', '..', 'runtime')

CODES_DIR = os.path.join(RUNTIME_DIR, 'data')
LOGGING_INI = os.path.join(RUNTIME_DIR, 'cli.ini')
ALIST_URL = None

app = Flask(__name__)  # pylint: disable=invalid-name

app.config.update(
    DEBUG=True,
    CODES_DIR=CODES_DIR,
    LOGGING_INI=LOGGING_INI,
    ALIST_URL=ALIST_URL,
    CACHE_SECONDS=600,
    SOLVER_ALGORITHM='pdip',
    SOLVER_INNER='cg',
    SOLVER_EPS_GAP=1e-8,
    SOLVER_MAX_ITER=200,
    SOLVER_MAX_ITER_SHORT=3000,
    SOLVER_BETA=0.66,
    SOLVER_SHORT_RADIUS=0.25,
    SOLVER_SIGMA=0.3,
    SOLVER_ETA=0.995,
    SOLVER_INNER_TOL_FLOOR=1e-10,
    SOLVER_INNER_TOL_FACTOR=0.01,
    SOLVER_ROUND_EVERY=1,
    SOLVER_TAU_ROUND=1e-9,
    SOLVER_TAU_FRACTIONAL=1e-4,
    SOLVER_CERT_TOL=1e-6,
    SOLVER_MAX_CHECK_DEGREE=None,
    GABP_DAMPING=0.3,
    GABP_MAX_SWEEPS=200,
    GABP_WARM_SWEEPS=1,
    ORACLE_MAX_BASES=50000,
)
