"""Gluing problems for destriction functors on finite p-groups.

Computes the kernel and cokernel of the detection map ``F(G) -> lim F`` by
three independent routes (a direct linear system, a bar complex over the
orbit category of sections, and a Steinberg-module complex over elementary
abelian subgroups) and evaluates closed-form obstruction formulas.
"""

from .catalog import CORPUS, catalog, load_group
from .engine import bar_complex, check_limit_iso, faithful_part, gluing_limit, obs_direct
from .errors import CapExceeded, GluingError, InputError
from .functors import (AtomicFunctor, BurnsideDual, ConstantFunctor, load_functor,
                       parse_functor, save_functor, validate_functor)
from .groups import FinGroup, group_from_generators
from .homalg import GF, QQ, ZZ, AbGroup, ChainComplex, SparseMatrix, cohomology
from .obstruction import cross_validate, obs_rhetorical, parse_table
from .oliver import oliver_complex, oliver_cohomology
from .sections import Section, sections

__version__ = "0.1.0"

__all__ = [
    "CORPUS", "catalog", "load_group", "bar_complex", "check_limit_iso", "faithful_part",
    "gluing_limit", "obs_direct", "CapExceeded", "GluingError", "InputError", "AtomicFunctor",
    "BurnsideDual", "ConstantFunctor", "load_functor", "parse_functor", "save_functor",
    "validate_functor", "FinGroup", "group_from_generators", "GF", "QQ", "ZZ", "AbGroup",
    "ChainComplex", "SparseMatrix", "cohomology", "cross_validate", "obs_rhetorical",
    "parse_table", "oliver_complex", "oliver_cohomology", "Section", "sections",
]
