"""Spectral Gromov-Wasserstein toolkit for graphs"""
# Do not delete this file, relative imports depend on it.
