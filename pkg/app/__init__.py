"""
N-Distance Lab

Tools for n-ary generalizations of metrics: axiom checks, best-constant
estimation for the simplex inequality, and the geometric and graph
distances that come with exact constants.
"""

__version__ = "1.0.0"
