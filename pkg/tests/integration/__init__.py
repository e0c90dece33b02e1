"""
Integration tests for the CASE repurchase recommender.

These tests train real models end to end on generated corpora and, when
available, a local TaFeng transaction file.
"""
