"""Symmetry-adapted moment relaxations of noncommutative polynomial problems."""
from importlib import resources as _resources

from .algebra import Alphabet, Letter, Polynomial, SignedWord, adjoint, concat, grlex_compare
from .dsl import ProblemDefinition, ProblemError, format_problem, load_problem, parse_problem
from .evaluation import Canonicalizer, EvaluationRules, apply_cyclic, apply_transpose, canonical
from .export import write_sdpa_sparse, write_structured
from .pipeline import Build, Caps, build
from .relaxation import (BlockSDP, GeneratingBasis, MomentRelaxation, assemble_sdp,
                         build_relaxation, generating_monomials, split_order2)
from .rewrite import RewriteSystem, check_compatibility, check_confluence
from .solver import Solution, SolverOptions, check_psd, solve
from .symmetry import (GeneralizedPermutation, PermGroup, compose, enumerate_group,
                       signed_word_action, symmetry_subgroup)

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "Letter",
    "Polynomial",
    "SignedWord",
    "adjoint",
    "concat",
    "grlex_compare",
    "ProblemDefinition",
    "ProblemError",
    "format_problem",
    "load_problem",
    "parse_problem",
    "Canonicalizer",
    "EvaluationRules",
    "apply_cyclic",
    "apply_transpose",
    "canonical",
    "write_sdpa_sparse",
    "write_structured",
    "Build",
    "Caps",
    "build",
    "BlockSDP",
    "GeneratingBasis",
    "MomentRelaxation",
    "assemble_sdp",
    "build_relaxation",
    "generating_monomials",
    "split_order2",
    "RewriteSystem",
    "check_compatibility",
    "check_confluence",
    "Solution",
    "SolverOptions",
    "check_psd",
    "solve",
    "GeneralizedPermutation",
    "PermGroup",
    "compose",
    "enumerate_group",
    "signed_word_action",
    "symmetry_subgroup",
    "example_path",
]


def example_path(name: str):
    """Path of a bundled problem file, e.g. ``example_path("chsh.ncpop")``."""
    return _resources.files(__name__) / "problems" / name
