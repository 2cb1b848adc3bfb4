"""Cross-lingual word-embedding alignment and alignability diagnostics."""

__version__ = "0.1.0"
