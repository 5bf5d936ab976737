"""DEA benchmarking toolkit for air navigation service providers."""
