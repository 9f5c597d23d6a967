"""Numerical workbench for regularity, canonical polar decompositions,
Moore-Penrose inverses, partial-isometry extension and the distance to the
closed-range elements, in matrix algebras and grid-discretized function
algebras."""

from . import errors, gallery, gridalg, harness, opcore, pipeline, regularity, serialize

__all__ = [
    "errors",
    "gallery",
    "gridalg",
    "harness",
    "opcore",
    "pipeline",
    "regularity",
    "serialize",
]

__version__ = "0.1.0"
