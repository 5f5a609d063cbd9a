# -*- coding: utf-8 -*-
"""
Defines views.
"""

import logging

from flask import Blueprint, request
from flask import jsonify as jsonify_func

from lp_decoder.blueprints.api_v1.utils import (
    jsonify, list_codes, get_code, decode_payload,
)
from lp_decoder.exceptions import CodeNotFoundError, LPDecoderError
from lp_decoder.polytope import polytope_statistics

log = logging.getLogger(__name__)  # pylint: disable=invalid-name

api_v1 = Blueprint('api_v1', __name__)  # pylint: disable=C0103


@api_v1.errorhandler(CodeNotFoundError)
def code_not_found(error):
    """
    Returns 404 when CodeNotFoundError exception is thrown.
    """
    return jsonify_func(dict(success=False, message=str(error))), 404


@api_v1.errorhandler(LPDecoderError)
def bad_request(error):
    """
    Returns 400 for invalid codes, LLR vectors and solver settings.
    """
    log.debug('bad request: %s', error)
    return jsonify_func(dict(success=False, message=str(error))), 400


@api_v1.route('/codes', methods=['GET'])
@jsonify
def api_codes_view():
    """
    Codes available on the server.
    """
    return list_codes()


@api_v1.route('/codes/<name>', methods=['GET'])
@jsonify
def api_code_view(name):
    """
    Polytope statistics of one code.
    """
    return polytope_statistics(get_code(name))


@api_v1.route('/decode', methods=['POST'])
@jsonify
def api_decode_view():
    """
    Decodes one LLR vector, returns the DecodeResult.
    """
    return decode_payload(request.get_json(silent=True))
