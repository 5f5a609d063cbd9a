# -*- coding: utf-8 -*-
"""
Scripts used by cronjobs.
"""
import logging
import os.path
import sys

import requests

from lp_decoder.codes import parse_alist
from lp_decoder.exceptions import AlistFormatError
from lp_decoder.main import app

log = logging.getLogger(__name__)  # pylint: disable=invalid-name


def download_alist(argv=None):
    """
    Script for downloading an alist file into the codes directory. The URL
    is the first argument or ALIST_URL from the Flask app config. Files that
    do not parse are not stored.
    :return: path of the stored file or None
    """
    argv = sys.argv[1:] if argv is None else argv
    alist_url = argv[0] if argv else app.config['ALIST_URL']
    if not alist_url:
        log.error('no alist URL given')
        return None
    resp = requests.get(alist_url)
    if resp.status_code != 200:
        log.error('download of %s failed with status %d', alist_url,
                  resp.status_code)
        return None
    try:
        parse_alist(resp.text)
    except AlistFormatError as error:
        log.error('%s is not a valid alist file: %s', alist_url, error)
        return None
    name = os.path.basename(alist_url.rstrip('/').split('?')[0])
    if not name.endswith('.alist'):
        name += '.alist'
    alist_filename = os.path.join(app.config['CODES_DIR'], name)
    with open(alist_filename, 'w') as alist:
        alist.write(resp.text)
    return alist_filename
