"""Command-line presentation layer"""
