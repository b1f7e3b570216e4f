"""Tests for Lab Notebook."""
