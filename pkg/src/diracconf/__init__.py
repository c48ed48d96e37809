"""Essential self-adjointness verdicts and certificates for Dirac operators confined to bounded domains."""

__version__ = "0.1.0"
