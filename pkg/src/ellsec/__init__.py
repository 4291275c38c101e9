"""Exact mod-p computation of the skew quadratic-form matrix attached to an
elliptic normal curve's secant varieties, the Klein matrix of linear forms,
and the Cremona pair they induce, with every defining identity verified
symbolically."""

from .field import ALT_PRIME, DEFAULT_PRIME, PrimeField
from .pipeline import PipelineConfig, run_pipeline

__all__ = ["ALT_PRIME", "DEFAULT_PRIME", "PrimeField", "PipelineConfig", "run_pipeline"]
