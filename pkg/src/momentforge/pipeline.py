"""From a parsed problem to assembled SDP data."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .dsl import ProblemDefinition
from .evaluation import DEFAULT_CLOSURE_CAP, Canonicalizer
from .relaxation import (DEFAULT_BASIS_CAP, BlockSDP, GeneratingBasis, MomentRelaxation,
                         RelaxationError, assemble_sdp, build_relaxation, generating_monomials,
                         split_order2)
from .symmetry import DEFAULT_GROUP_CAP, PermGroup, enumerate_group, symmetry_subgroup

SYM_MODES = ("none", "full", "split")


@dataclass
class Caps:
    group: int = DEFAULT_GROUP_CAP
    basis: int = DEFAULT_BASIS_CAP
    closure: int = DEFAULT_CLOSURE_CAP

    @classmethod
    def for_problem(cls, pd: ProblemDefinition, group=None, basis=None, closure=None) -> "Caps":
        """Explicit values win over problem options, which win over defaults."""
        def pick(explicit, name, default):
            if explicit is not None:
                return int(explicit)
            opt = pd.option(name)
            return int(opt) if opt is not None else default
        return cls(pick(group, "cap_group", DEFAULT_GROUP_CAP),
                   pick(basis, "cap_basis", DEFAULT_BASIS_CAP),
                   pick(closure, "cap_closure", DEFAULT_CLOSURE_CAP))


@dataclass
class Build:
    problem: ProblemDefinition
    mode: str
    ambient: PermGroup
    group: PermGroup
    basis: GeneratingBasis
    relaxation: MomentRelaxation
    sdp: BlockSDP


def ambient_group(pd: ProblemDefinition, caps: Caps = None) -> PermGroup:
    caps = caps or Caps()
    n = len(pd.alphabet)
    gens = list(pd.generator_perms.values())
    if not gens:
        return PermGroup.trivial(n)
    return enumerate_group(gens, cap=caps.group, n=n, rewrite=pd.rewrite)


def symmetry_group(pd: ProblemDefinition, caps: Caps = None,
                   ambient: Optional[PermGroup] = None) -> PermGroup:
    caps = caps or Caps()
    ambient = ambient or ambient_group(pd, caps)
    if ambient.order == 1:
        return ambient
    return symmetry_subgroup(ambient, pd.objective, pd.evaluation, pd.rewrite, cap=caps.closure)


def resolve_level(pd: ProblemDefinition, level: Optional[int]) -> int:
    level = level if level is not None else pd.level
    if level is None:
        raise RelaxationError("no relaxation level given")
    if level < 1:
        raise RelaxationError("relaxation level must be at least 1")
    return level


def build(pd: ProblemDefinition, level: Optional[int] = None, sym: str = "full",
          caps: Caps = None, ambient: Optional[PermGroup] = None,
          group: Optional[PermGroup] = None) -> Build:
    """Build the relaxation in one of the modes ``none``, ``full`` or ``split``."""
    if sym not in SYM_MODES:
        raise ValueError(f"unknown symmetry mode {sym!r}")
    caps = caps or Caps()
    level = resolve_level(pd, level)
    n = len(pd.alphabet)
    if sym == "none":
        ambient = ambient or PermGroup.trivial(n)
        group = PermGroup.trivial(n)
    else:
        ambient = ambient or ambient_group(pd, caps)
        group = group or symmetry_group(pd, caps, ambient)
    basis = generating_monomials(pd.rewrite, level, cap=caps.basis)
    canon = Canonicalizer(group, pd.evaluation, pd.rewrite, cap=caps.closure)
    relax = build_relaxation(basis, group, pd.evaluation, pd.rewrite, pd.objective, canon)
    sdp = assemble_sdp(relax)
    if sym == "split":
        g = pd.split_perm
        if g is None:
            raise RelaxationError("split mode needs a 'split' declaration in the problem")
        if g not in group:
            raise RelaxationError("split generator is not in the symmetry group of the objective")
        sdp = split_order2(sdp, g, basis, pd.rewrite)
    return Build(pd, sym, ambient, group, basis, relax, sdp)
