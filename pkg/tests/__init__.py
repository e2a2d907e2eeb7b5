"""Unit tests for Furstenberg Lab."""
