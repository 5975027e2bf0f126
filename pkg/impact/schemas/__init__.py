"""
Schemas package.
"""
