# -*- coding: utf-8 -*-
"""
Development server of the LP decoder HTTP API.
"""
import os.path
import logging.config

from lp_decoder.main import RUNTIME_DIR, app

DEFAULT_PORT = 5000


def main():
    """
    Serves the API with the debug logging config. LP_DECODER_PORT
    overrides the port.
    """
    ini_filename = os.path.join(RUNTIME_DIR, 'debug.ini')
    logging.config.fileConfig(ini_filename, disable_existing_loggers=False)
    port = int(os.environ.get('LP_DECODER_PORT', DEFAULT_PORT))
    app.run(host='0.0.0.0', port=port)


if __name__ == "__main__":
    main()
