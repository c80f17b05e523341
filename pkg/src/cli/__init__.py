"""Command-line front-end: argument parsing, run directories and manifests."""

__version__ = "0.1.0"
