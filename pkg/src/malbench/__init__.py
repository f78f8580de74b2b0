"""Benchmark of multiagent learners in repeated strictly ordinal matrix games."""

__version__ = "0.1.0"
