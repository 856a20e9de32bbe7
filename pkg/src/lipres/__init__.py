"""Resolution study testbed for visual-only viseme recognition."""

__author__ = "Nobody"
__version__ = "0.1.0"
