"""Acceptance criteria 1-11, each checked at exact equality of abelian-group invariants.

Run under pytest, or directly with ``python3 tests/test_acceptance.py`` to get
one PASS/FAIL line per criterion.
"""

from __future__ import annotations

import sys
import time

import pytest

from gluing import catalog
from gluing.functors import BurnsideDual, ConstantFunctor
from gluing.homalg import AbGroup
from gluing.obstruction import constant_table, obs_rhetorical
from gluing.oliver import oliver_complex
from gluing.verify import (corpus_for, run_verifier, verify_cyclic, verify_dade_kernel,
                           verify_shape_d8)


def _sweep(theorem: str, groups: list[str] | None = None) -> tuple[bool, str]:
    specs = groups or corpus_for(theorem)
    bad = []
    for spec in specs:
        rep = run_verifier(theorem, spec)
        if not rep.ok:
            bad.append(f"{spec}: {rep.failures[0]}")
    if bad:
        return False, f"{len(bad)}/{len(specs)} groups fail; first: {bad[0]}"
    return True, f"{len(specs)} groups"


def criterion_1():
    rep = verify_shape_d8()
    G = catalog("D8")
    dims = oliver_complex(ConstantFunctor(G), 2).complex.dims
    ok = rep.ok and dims == [1, 3, 2]
    return ok, f"B* ranks {rep.details['dims']}, constant ranks {dims}"


def criterion_2():
    return _sweep("bstar")


def criterion_3():
    specs = ["C2", "C4", "C8", "C3", "C9", "C27", "C5", "C25", "C125"]
    bad, slow = [], []
    for spec in specs:
        t = time.perf_counter()
        rep = verify_cyclic(spec)
        if time.perf_counter() - t > 1.0:
            slow.append(spec)
        if not rep.ok:
            bad.append(f"{spec}: {rep.failures[0]}")
    if bad:
        return False, bad[0]
    return True, f"{len(specs)} cyclic groups" + (f" (over 1 s: {slow})" if slow else "")


def criterion_4():
    return _sweep("routes")


def criterion_5():
    return _sweep("reduction")


def criterion_6():
    return _sweep("rank-vanishing")


def criterion_7():
    return _sweep("constant-vanishing")


def criterion_8():
    return _sweep("elementary")


def criterion_9():
    ok_c, msg_c = _sweep("central-rank")
    ok_r, msg_r = _sweep("rhetorical")
    d8 = obs_rhetorical(catalog("D8"), 2, constant_table(AbGroup(1))).group
    xs = obs_rhetorical(catalog("XS(3,+)"), 3, constant_table(AbGroup(0, (2,)))).group
    spots = d8 == AbGroup(1) and xs == AbGroup(0, (2, 2, 2))
    return ok_c and ok_r and spots, f"central {msg_c}; rhetorical {msg_r}; D8 {d8}, XS(3,+) {xs}"


def criterion_10():
    return _sweep("h1")


def criterion_11():
    circle = verify_dade_kernel()
    ok, msg = _sweep("dade-kernel")
    return circle.ok and ok, f"circle kernel {circle.details['kernel']}; {msg}"


CRITERIA = {
    1: ("Oliver complex shape on D8", criterion_1),
    2: ("B* gluing, Ker = Z and Obs = 0, orders <= 64", criterion_2),
    3: ("cyclic groups, kernel spanned by the trivial-subgroup indicator", criterion_3),
    4: ("direct, bar and Oliver routes agree", criterion_4),
    5: ("collection reductions proper/e/c", criterion_5),
    6: ("vanishing from the p-rank up", criterion_6),
    7: ("constant coefficients over Q and F_p", criterion_7),
    8: ("elementary abelian groups", criterion_8),
    9: ("central-rank regime and the sum over S", criterion_9),
    10: ("H^1 by invariant cocycles and orbit cochains", criterion_10),
    11: ("mod-2 kernel on H^1", criterion_11),
}


def run(n: int) -> bool:
    name, fn = CRITERIA[n]
    t = time.perf_counter()
    ok, detail = fn()
    secs = time.perf_counter() - t
    print(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {name}: {detail} [{secs:.1f}s]",
          flush=True)
    return ok


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, capsys):
    with capsys.disabled():
        print()
        ok = run(n)
    assert ok


if __name__ == "__main__":
    chosen = [int(a) for a in sys.argv[1:]] or sorted(CRITERIA)
    results = [run(n) for n in chosen]
    sys.exit(0 if all(results) else 1)
