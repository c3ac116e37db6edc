"""Signal energies of linear recurrences with Gaussian weights at finite width."""

__version__ = "0.1.0"
