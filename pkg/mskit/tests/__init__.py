"""Test suite for mskit."""
