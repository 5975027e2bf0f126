"""
Test package for the rough-impact engine.
"""
