"""Exact construction and verification of flat 2-step nilpotent groups
defined by 3-vectors with isotropic support, and of their nearly
(para-)Kaehler structures."""

from .errors import (
    ConsistencyError,
    InputError,
    NilflatError,
    NotInConeError,
    RejectedError,
    StructureError,
)
from .exactlin import Matrix, ScalarProduct, Subspace
from .flatgroup import algebra_report, build_model, group_mul, lie_bracket, translation_ideal
from .lattice import centralizer_space, find_lattice
from .modelfile import emit_model, parse_model
from .multilinear import ThreeVector, classify_cone, contract, support
from .report import run
from .structures import derham_split, make_field, make_structure, nijenhuis, npk_report

__version__ = "0.1.0"
