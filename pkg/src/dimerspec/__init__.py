"""dimerspec: rovibrational structure and precision-metrology engine for diatomics."""

__version__ = "0.1.0"
