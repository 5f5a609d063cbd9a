# -*- coding: utf-8 -*-
"""
Helper functions used in views.
"""
import logging
import os

from functools import wraps
from json import dumps

import numpy as np
from flask import Response

from lp_decoder.cache import MemoryCache, cached
from lp_decoder.codes import parse_alist
from lp_decoder.exceptions import CodeNotFoundError, ConfigError
from lp_decoder.ipm import SolverConfig, decode
from lp_decoder.main import app

log = logging.getLogger(__name__)  # pylint: disable=invalid-name

cache_backend = MemoryCache()  # pylint: disable=invalid-name

ALIST_SUFFIX = '.alist'


def _to_json(value):
    """
    Serializes decoder results and numpy scalars for json.dumps.
    """
    if hasattr(value, 'to_dict'):
        return value.to_dict()
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError('{!r} is not JSON serializable'.format(value))


def jsonify(function):
    """
    Sends the view result as JSON. Objects with to_dict, such as
    DecodeResult, are sent in that form.
    :param function: view function
    :return: view returning a Response with mimetype application/json
    """
    @wraps(function)
    def inner(*args, **kwargs):
        return Response(
            dumps(function(*args, **kwargs), default=_to_json),
            mimetype='application/json'
        )
    return inner


def list_codes():
    """
    Names of the alist files in CODES_DIR, without the suffix.
    :return: sorted list of strings
    """
    directory = app.config['CODES_DIR']
    if not os.path.isdir(directory):
        log.debug('codes directory %s does not exist', directory)
        return []
    return sorted(
        name[:-len(ALIST_SUFFIX)] for name in os.listdir(directory)
        if name.endswith(ALIST_SUFFIX)
    )


@cached(cache_backend, lambda: app.config['CACHE_SECONDS'])
def get_code(name):
    """
    Loads a named code from CODES_DIR.
    :param name: file name without suffix
    :return: SparseBinaryMatrix
    """
    if name not in list_codes():
        log.debug('Code %s not found!', name)
        raise CodeNotFoundError('Code {} not found'.format(name))
    path = os.path.join(app.config['CODES_DIR'], name + ALIST_SUFFIX)
    with open(path) as alist:
        return parse_alist(alist.read())


def decode_payload(payload):
    """
    Decodes the LLR vector of a POST /decode body.
    :param payload: dict with "code" or "alist", "llr" and optional solver
                    settings named like SolverConfig fields
    :return: DecodeResult
    """
    if not isinstance(payload, dict):
        raise ConfigError('request body must be a JSON object')
    settings = dict(payload)
    name = settings.pop('code', None)
    text = settings.pop('alist', None)
    llr = settings.pop('llr', None)
    if (name is None) == (text is None):
        raise ConfigError('give exactly one of "code" and "alist"')
    if not isinstance(llr, list) or not all(
            isinstance(value, (int, float)) and not isinstance(value, bool)
            for value in llr):
        raise ConfigError('"llr" must be a list of numbers')
    matrix = get_code(name) if name is not None else parse_alist(text)
    cfg = SolverConfig.from_config(app.config, **settings)
    return decode(matrix, llr, cfg)
