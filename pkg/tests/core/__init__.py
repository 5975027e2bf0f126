"""
Tests for core modules.
"""
