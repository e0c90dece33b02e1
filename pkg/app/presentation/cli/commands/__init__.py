"""Subcommand modules; each exposes register(subparsers) and run(args) -> int"""
