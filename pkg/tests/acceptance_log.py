"""Shared store for acceptance result lines (printed in the pytest summary)."""

LINES = []
