"""Numerical toolkit for rate-distortion-equivocation regions.

Evaluates and optimizes inner/outer bounds on the achievable
(channel uses, distortion, equivocation) triples for secure lossy
transmission over a broadcast channel with side information at both
receivers, classifies side-information orderings, and runs desk-scale
Monte Carlo simulations of the layered binning scheme.
"""

__version__ = "0.1.0"
