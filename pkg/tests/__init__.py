"""Test package for the CASE repurchase recommender."""
