"""Coordination games on weighted directed graphs."""
