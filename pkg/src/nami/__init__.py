"""Natural minimal I-map inversion of Bayesian network structures."""

__version__ = "0.1.0"
