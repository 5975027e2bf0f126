"""
Impact core package.
"""
