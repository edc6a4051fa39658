"""grsklab: geometric RSK / gPNG combinatorics and log-gamma polymer
contour formulas, with brute-force and Monte Carlo cross-checks."""

__version__ = "0.1.0"
