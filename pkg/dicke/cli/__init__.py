"""Command-line interface for dicke-thermo."""
