"""Outcome range bounds for linear programs with interval right-hand sides."""
