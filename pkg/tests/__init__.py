"""Tests for tropdeg."""
