"""Cross-cutting managers: logger, config, manifest, checkpoint."""
