"""Parsing unit tests."""
