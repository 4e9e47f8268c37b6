"""Harmonator package."""  # noqa: N999
