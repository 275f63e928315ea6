"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class GluingError(Exception):
    """Base class for all errors raised by this package."""


class InputError(GluingError):
    """Malformed user input: bad group spec, bad functor file, unknown token."""


class CapExceeded(GluingError):
    """A configured size cap (elements, subgroups, chains, rank) was exceeded."""


# perm-core
class NotAPermutation(InputError):
    pass


class UnknownSpec(InputError):
    pass


class OrderBound(CapExceeded):
    pass


class NotASubgroup(InputError):
    pass


class NotNormal(InputError):
    pass


class NotAHomomorphism(InputError):
    pass


# section-cat
class RankTooSmall(GluingError):
    pass


# homalg
class NotAComplex(GluingError):
    pass


class NoSolution(GluingError):
    pass


# functor-engine
class CollectionTooSmall(GluingError):
    pass


class BarSizeBound(CapExceeded):
    pass


class UnsupportedValue(InputError):
    pass


# steinberg-oliver
class NotPGroup(GluingError):
    pass


class RankCap(CapExceeded):
    pass


class NotIndexP(GluingError):
    pass


class CoefficientScope(GluingError):
    pass


# obstruction
class TableIncomplete(GluingError):
    pass


class FormulaMismatch(GluingError):
    """Two computations that must agree produced different groups."""
