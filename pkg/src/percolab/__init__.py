"""percolab: critical percolation interfaces, crossing formulas, and
chordal Loewner traces on the triangular lattice, with a Monte Carlo
harness that checks the predicted laws at desk scale."""

__version__ = "0.1.0"
