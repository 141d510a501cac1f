"""Test module for polypcount."""
