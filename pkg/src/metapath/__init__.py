"""Diabetes-risk statistics pipeline with pathway enrichment of the predictors."""

__version__ = "0.1.0"
