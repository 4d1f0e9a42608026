"""Event-based synthetic aperture imaging toolkit."""

__version__ = "0.1.0"
