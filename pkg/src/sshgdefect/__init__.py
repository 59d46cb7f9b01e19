"""Type-II defect of the N=1 super sinh-Gordon model, verified numerically.

Modules build upward from :mod:`~sshgdefect.grassmann` (the anticommuting
coefficient algebra) to :mod:`~sshgdefect.sim` (lattice evolution through
the defect) and :mod:`~sshgdefect.cli` (command-line verification runs).
"""

__version__ = "0.1.0"
