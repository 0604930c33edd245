"""Entanglement generation on spin-s XX chains: two boundary-entangling
protocols (dimerized chain; boundary-field virtual coupling), closed and open
dynamics, disorder ensembles, and config-driven experiment drivers."""

__version__ = "1.0.0"
