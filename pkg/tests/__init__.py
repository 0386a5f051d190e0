"""Test package markers for shared test utilities."""
