"""Test package for StegoVault."""
