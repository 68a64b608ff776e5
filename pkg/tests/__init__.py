"""Tests for cocircular."""
