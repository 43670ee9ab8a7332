"""Tests for ML Environment Doctor."""
