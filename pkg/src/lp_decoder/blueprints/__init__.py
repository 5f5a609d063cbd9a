"""
Blueprints module
"""
