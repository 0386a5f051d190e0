"""Single-message shuffle model: randomizers, amplification bounds, exact oracle."""
