"""PU-learning based contaminant removal for binary-feature datasets."""

__version__ = "0.1.0"
