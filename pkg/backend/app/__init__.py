"""
Manifold Memorization Lab - Backend
Manifold geometry probe (MFTMA) + label-permutation memorization experiments
"""

__version__ = "1.0.0"
