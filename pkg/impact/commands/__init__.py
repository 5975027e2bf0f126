"""
Commands package.
"""
