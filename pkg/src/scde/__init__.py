"""Density-evolution engine for (l,r)-regular and spatially coupled LDPC
ensembles over BMS channels: BP thresholds, GEXIT curves, area thresholds,
coupled thresholds, and the closed-form bounds that frame them."""

__version__ = "0.1.0"
