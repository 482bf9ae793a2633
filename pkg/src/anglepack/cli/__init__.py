"""Command-line surface: file formats, rendering, benchmarking."""
