"""Phase-shift design and detection analysis for IRS-assisted device detection."""

__version__ = "0.1.0"
