"""Stutter-aware hyperproperty evaluation over lasso traces."""
