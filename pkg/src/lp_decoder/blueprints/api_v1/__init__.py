"""
Api v1 blueprint. Contains endpoints listing codes and decoding LLR vectors.
"""
