"""Estimator efficiency for survey sampling and inventory cost models."""

__version__ = "0.1.0"
