"""Named small groups as permutation groups.

Supported spec grammar::

    Cn            cyclic of order n
    EA(p,r)       elementary abelian (Z/p)^r
    D2n Q2n       dihedral / generalized quaternion of order 2n (Q needs 2n % 8 == 0 or 2n == 8)
    SD2n M2n      semidihedral / modular of order 2n (2n >= 16, a power of two)
    XS(p,+|-)     extraspecial of order p^3 (exponent p for odd p with '+')
    MC(m,k,s,r)   metacyclic <a,b | a^m, b^k = a^s, b a b^-1 = a^r>
    C4:C4         alias for MC(4,4,0,3)
    AxB, A^k      direct products (disjoint union of the factor actions)

Non-abelian metacyclic groups are realized by their left regular
representation; abelian products by cycles on disjoint point sets.
"""

from __future__ import annotations

import json
import os
import re
from functools import lru_cache

from .errors import InputError, UnknownSpec
from .groups import FinGroup, group_from_generators

# (generators as image lists, degree)
_Rep = tuple[list[list[int]], int]


def _cycle(n: int) -> _Rep:
    if n < 1:
        raise UnknownSpec(f"C{n}: order must be positive")
    if n == 1:
        return [], 1
    return [[(i + 1) % n for i in range(n)]], n


def _left_mult_perm(elements: list, op, g) -> list[int]:
    pos = {e: i for i, e in enumerate(elements)}
    return [pos[op(g, x)] for x in elements]


def _metacyclic(m: int, k: int, s: int, r: int) -> _Rep:
    r %= m
    s %= m
    if pow(r, k, m) != 1 % m or (r * s - s) % m:
        raise UnknownSpec(f"MC({m},{k},{s},{r}) violates the metacyclic consistency conditions")
    elements = [(i, j) for i in range(m) for j in range(k)]
    rpow = [pow(r, j, m) for j in range(k)]

    def op(x, y):
        i, j = x
        i2, j2 = y
        jj = j + j2
        ii = i + rpow[j] * i2 + (s if jj >= k else 0)
        return (ii % m, jj % k)

    gens = [_left_mult_perm(elements, op, (1, 0)), _left_mult_perm(elements, op, (0, 1 % k))]
    return gens, m * k


def _heisenberg(p: int) -> _Rep:
    elements = [(a, b, c) for a in range(p) for b in range(p) for c in range(p)]

    def op(x, y):
        return ((x[0] + y[0]) % p, (x[1] + y[1]) % p, (x[2] + y[2] + x[0] * y[1]) % p)

    gens = [_left_mult_perm(elements, op, (1, 0, 0)), _left_mult_perm(elements, op, (0, 1, 0))]
    return gens, p ** 3


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p ** 0.5) + 1))


def _product(reps: list[_Rep]) -> _Rep:
    gens: list[list[int]] = []
    degree = sum(d for _, d in reps)
    offset = 0
    for fgens, d in reps:
        for g in fgens:
            img = list(range(degree))
            for i, x in enumerate(g):
                img[offset + i] = offset + x
            gens.append(img)
        offset += d
    return gens, degree


def _split_product(spec: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in spec:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "x×" and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


_ATOM = [
    (re.compile(r"C(\d+)$"), lambda n: _cycle(int(n))),
    (re.compile(r"EA\((\d+),(\d+)\)$"), lambda p, r: _elementary(int(p), int(r))),
    (re.compile(r"D(\d+)$"), lambda n: _dihedral(int(n))),
    (re.compile(r"Q(\d+)$"), lambda n: _quaternion(int(n))),
    (re.compile(r"SD(\d+)$"), lambda n: _two_group_mc(int(n), "SD")),
    (re.compile(r"M(\d+)$"), lambda n: _two_group_mc(int(n), "M")),
    (re.compile(r"XS\((\d+),([+-])\)$"), lambda p, e: _extraspecial(int(p), e)),
    (re.compile(r"MC\((\d+),(\d+),(-?\d+),(-?\d+)\)$"),
     lambda m, k, s, r: _metacyclic(int(m), int(k), int(s), int(r))),
    (re.compile(r"C4:C4$"), lambda: _metacyclic(4, 4, 0, 3)),
]


def _elementary(p: int, r: int) -> _Rep:
    if not _is_prime(p):
        raise UnknownSpec(f"EA({p},{r}): {p} is not prime")
    return _product([_cycle(p)] * r) if r else ([], 1)


def _dihedral(n: int) -> _Rep:
    if n < 4 or n % 2:
        raise UnknownSpec(f"D{n}: order must be even and at least 4")
    return _metacyclic(n // 2, 2, 0, -1)


def _quaternion(n: int) -> _Rep:
    if n < 8 or n % 4:
        raise UnknownSpec(f"Q{n}: order must be a multiple of 4, at least 8")
    return _metacyclic(n // 2, 2, n // 4, -1)


def _two_group_mc(n: int, kind: str) -> _Rep:
    if not _is_power_of_two(n) or n < 16:
        raise UnknownSpec(f"{kind}{n}: order must be a power of two, at least 16")
    m = n // 2
    return _metacyclic(m, 2, 0, m // 2 - 1 if kind == "SD" else m // 2 + 1)


def _extraspecial(p: int, sign: str) -> _Rep:
    if not _is_prime(p):
        raise UnknownSpec(f"XS({p},{sign}): {p} is not prime")
    if p == 2:
        return _dihedral(8) if sign == "+" else _quaternion(8)
    if sign == "+":
        return _heisenberg(p)
    return _metacyclic(p * p, p, 0, 1 + p)


def _parse(spec: str) -> _Rep:
    spec = spec.strip()
    parts = _split_product(spec)
    if len(parts) > 1:
        return _product([_parse(x) for x in parts])
    m = re.fullmatch(r"(.+)\^(\d+)", spec)
    if m and not spec.startswith("EA"):
        return _product([_parse(m.group(1))] * int(m.group(2)))
    if spec.startswith("(") and spec.endswith(")"):
        return _parse(spec[1:-1])
    for pattern, build in _ATOM:
        hit = pattern.match(spec)
        if hit:
            return build(*hit.groups())
    raise UnknownSpec(f"unknown group spec {spec!r}")


@lru_cache(maxsize=None)
def catalog(name: str) -> FinGroup:
    """Permutation model of the named group; see the module docstring for the grammar."""
    gens, degree = _parse(name)
    G = group_from_generators(degree, gens, label=name.strip())
    expected = _expected_order(name.strip())
    if expected is not None and G.order != expected:
        raise UnknownSpec(f"{name}: built order {G.order}, expected {expected}")
    return G


def _expected_order(spec: str) -> int | None:
    parts = _split_product(spec)
    if len(parts) > 1:
        total = 1
        for x in parts:
            o = _expected_order(x)
            if o is None:
                return None
            total *= o
        return total
    m = re.fullmatch(r"(.+)\^(\d+)", spec)
    if m and not spec.startswith("EA"):
        o = _expected_order(m.group(1))
        return None if o is None else o ** int(m.group(2))
    if spec.startswith("(") and spec.endswith(")"):
        return _expected_order(spec[1:-1])
    for pat, fn in [
        (r"(?:C|D|Q|SD|M)(\d+)", lambda n: int(n)),
        (r"EA\((\d+),(\d+)\)", lambda p, r: int(p) ** int(r)),
        (r"XS\((\d+),[+-]\)", lambda p: int(p) ** 3),
        (r"MC\((\d+),(\d+),-?\d+,-?\d+\)", lambda m, k: int(m) * int(k)),
        (r"C4:C4", lambda: 16),
    ]:
        hit = re.fullmatch(pat, spec)
        if hit:
            return fn(*hit.groups())
    return None


def load_group(spec_or_path: str) -> FinGroup:
    """A catalog spec, or a path to a JSON group file."""
    if os.path.exists(spec_or_path):
        try:
            with open(spec_or_path) as fh:
                data = json.load(fh)
            return group_from_generators(int(data["degree"]), data["generators"],
                                         data.get("label", os.path.basename(spec_or_path)))
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError(f"bad group file {spec_or_path}: {exc}") from exc
    return catalog(spec_or_path)


# Groups used by the batch verifiers.  Orders <= 32 form the main corpus;
# the order-64 entries are only used for the B* gluing check.
CORPUS_SMALL = [
    "C2", "C4", "C8", "C16", "C32",
    "C2xC2", "C4xC2", "EA(2,3)", "D8", "Q8",
    "C4xC4", "C8xC2", "C4xC2xC2", "D8xC2", "Q8xC2",
    "D16", "Q16", "SD16", "M16", "C4:C4",
    "D32", "Q32", "SD32", "D8xC4", "Q8xC4",
    "C3", "C9", "C27", "C3xC3", "C9xC3", "XS(3,+)", "XS(3,-)", "EA(3,3)",
    "C5", "C25", "C5xC5", "C7",
]
CORPUS_64 = ["C64", "D64", "Q64", "SD64", "C8xC8", "C49", "C7xC7"]
CORPUS = CORPUS_SMALL + CORPUS_64
