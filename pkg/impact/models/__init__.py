"""
Models package.
"""
