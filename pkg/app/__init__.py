"""CodeSwitch-E2E: end-to-end code-switching speech recognition toolkit."""
