"""Uniform interpolants of existentially quantified EUF constraints.

Two independent computations (a branching tableaux engine and a
Horn-clause saturation with conditional DAG extraction) plus a ground
congruence-closure oracle used to certify outputs.
"""
from __future__ import annotations

__version__ = "0.1.0"
