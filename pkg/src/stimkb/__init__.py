"""stimkb: knowledge-base engine for affectively annotated multimedia
stimulus metadata — taxonomy-based semantic similarity, ranked retrieval,
lift-curve evaluation, and stimulus sequence construction."""

__version__ = "0.1.0"
