"""Simulation command modules live here and are auto-discovered by the CLI."""

# ruff: noqa: N999
