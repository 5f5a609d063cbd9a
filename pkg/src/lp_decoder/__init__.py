# -*- coding: utf-8 -*-
"""
LP decoder. Registering blueprints here, not in main.py to avoid circular
imports (main imports blueprints, blueprints dependencies import main etc.).
"""
from lp_decoder.main import app
from lp_decoder.blueprints.api_v1.views import api_v1

app.register_blueprint(api_v1, url_prefix='/api/v1')
