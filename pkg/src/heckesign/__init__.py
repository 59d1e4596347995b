"""First sign changes of Hecke eigenvalues: limiting averages, measures and level-1 eigenform data."""

__version__ = "0.1.0"
