"""Cross-stage contracts: stage contract, run config, cache stamps, errors, logging."""
