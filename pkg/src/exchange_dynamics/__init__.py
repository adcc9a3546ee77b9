"""exchange-dynamics - money-driven inflation, business-cycle spectra, balanced-path regression"""

__version__ = "0.1.0"
__all__ = ["__version__"]
