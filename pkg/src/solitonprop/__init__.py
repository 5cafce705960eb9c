"""Exact propagators for reflectionless N-soliton potentials."""
