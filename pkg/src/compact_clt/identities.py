"""Randomized exact checks of the combinatorial identities.

Each check draws integer vectors (entries in ``[-20, 20]``, zero-sum where
required, with a share of degenerate vectors containing zeros and repeats)
and compares both sides with exact rational arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .combinatorics import (
    comp_coeff_sum,
    enumerate_trees,
    g_direct,
    g_subset_form,
    rotate_tree,
    rs_identity_sides,
    tree_max,
    u_tree_sum,
)

__all__ = ["IdentityResult", "IdentityReport", "run_identity_suite", "random_vector", "IDENTITY_NAMES"]

ENTRY_BOUND = 20

IDENTITY_NAMES = (
    "g_pair_equals_abs_k1",
    "g_pair_symmetrized",
    "g_vanishes",
    "g_direct_equals_subset_form",
    "g_permutation_invariant",
    "rs_identity",
    "u_tree_sum_vanishes",
    "u_tree_sum_single",
    "proposition_pairing",
    "rotation_identity",
    "composition_coefficient_sum",
)


def random_vector(rng: np.random.Generator, length: int, zero_sum: bool = True) -> tuple:
    """Integer vector with entries in ``[-20, 20]``; roughly one in five is degenerate."""
    degenerate = rng.random() < 0.2
    while True:
        if degenerate:
            pool = rng.integers(-ENTRY_BOUND // 4, ENTRY_BOUND // 4 + 1, size=2)
            v = [int(pool[i]) for i in rng.integers(0, 2, size=length)]
            v[int(rng.integers(0, length))] = 0
        else:
            v = [int(x) for x in rng.integers(-ENTRY_BOUND, ENTRY_BOUND + 1, size=length)]
        if not zero_sum:
            return tuple(v)
        last = -sum(v[:-1])
        if abs(last) <= ENTRY_BOUND:
            v[-1] = last
            return tuple(v)


@dataclass
class IdentityResult:
    name: str
    ell: int
    trials: int
    passed: bool
    counterexample: Optional[list] = None
    detail: Optional[str] = None


@dataclass
class IdentityReport:
    seed: int
    trials: int
    max_ell: int
    results: list = field(default_factory=list)
    g_pair_table: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed, "trials": self.trials, "max_ell": self.max_ell,
            "passed": self.passed, "results": [asdict(r) for r in self.results],
            "g_pair_table": self.g_pair_table,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)


def _fmt(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _run(name: str, ell: int, trials: int, gen: Callable, check: Callable) -> IdentityResult:
    for _ in range(trials):
        v = gen()
        ok, detail = check(v)
        if not ok:
            return IdentityResult(name, ell, trials, False, [_fmt(x) for x in v], detail)
    return IdentityResult(name, ell, trials, True)


def run_identity_suite(max_ell: int = 6, trials: int = 200, seed: int = 0,
                       names: Optional[tuple] = None) -> IdentityReport:
    """Run every identity for the orders its definition allows, up to ``max_ell``.

    ``names`` restricts to a subset of :data:`IDENTITY_NAMES`.  Order and
    random draws are fixed by ``seed``, so reports are reproducible.
    """
    if not 1 <= max_ell <= 6:
        raise ValueError("max_ell must be in 1..6")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    wanted = set(IDENTITY_NAMES if names is None else names)
    unknown = wanted - set(IDENTITY_NAMES)
    if unknown:
        raise ValueError(f"unknown identities {sorted(unknown)}")
    rng = np.random.default_rng(seed)
    rep = IdentityReport(seed=seed, trials=trials, max_ell=max_ell)
    res = rep.results

    def zs(length):
        return lambda: random_vector(rng, length)

    def free(length):
        return lambda: random_vector(rng, length, zero_sum=False)

    if max_ell >= 2:
        for a in range(0, 6):
            rep.g_pair_table.append({"k": [a, -a], "g": _fmt(g_direct((a, -a))), "abs_k1": a})
        if "g_pair_equals_abs_k1" in wanted:
            res.append(_run("g_pair_equals_abs_k1", 2, trials, zs(2),
                            lambda v: (g_direct(v) == abs(v[0]), f"g={_fmt(g_direct(v))}")))
        if "g_pair_symmetrized" in wanted:
            res.append(_run("g_pair_symmetrized", 2, trials, zs(2),
                            lambda v: (g_direct(v) + g_direct(tuple(-x for x in v)) == abs(v[0]), None)))
    for ell in range(3, max_ell + 1):
        if "g_vanishes" in wanted:
            res.append(_run("g_vanishes", ell, trials, zs(ell),
                            lambda v: (g_direct(v) == 0, f"g={_fmt(g_direct(v))}")))
    for ell in range(2, max_ell + 1):
        if "g_direct_equals_subset_form" in wanted:
            res.append(_run("g_direct_equals_subset_form", ell, trials, zs(ell),
                            lambda v: (g_direct(v) == g_subset_form(v), None)))
    for ell in range(2, max_ell + 1):
        if "g_permutation_invariant" in wanted:
            def perm_check(v):
                w = tuple(int(x) for x in rng.permutation(v))
                return g_direct(v) == g_direct(w), f"permuted={list(w)}"

            res.append(_run("g_permutation_invariant", ell, trials, zs(ell), perm_check))
    if "rs_identity" in wanted:
        for m in range(2, 8):
            res.append(_run("rs_identity", m, trials, zs(m), lambda v: (lambda s: (s[0] == s[1], str(s)))(
                tuple(_fmt(x) for x in rs_identity_sides(v)))))
    if "u_tree_sum_single" in wanted:
        res.append(_run("u_tree_sum_single", 1, trials, free(1),
                        lambda v: (u_tree_sum(v) == max(0, v[0]), None)))
    for ell in range(2, min(max_ell, 5) + 1):
        if "u_tree_sum_vanishes" in wanted:
            res.append(_run("u_tree_sum_vanishes", ell, trials, free(ell),
                            lambda v: (u_tree_sum(v) == 0, f"U={_fmt(u_tree_sum(v))}")))
    for ell in range(1, min(max_ell, 4) + 1):
        if "proposition_pairing" in wanted:
            def prop_check(v):
                k = v + (-sum(v),)
                neg = tuple(-x for x in k)
                lhs = u_tree_sum(v) + u_tree_sum(neg[:-1])
                rhs = g_direct(k) + g_direct(neg)
                return lhs == rhs, f"lhs={_fmt(lhs)} rhs={_fmt(rhs)}"

            res.append(_run("proposition_pairing", ell, trials, free(ell), prop_check))
    for ell in range(1, min(max_ell, 4) + 1):
        if "rotation_identity" in wanted:
            trees = list(enumerate_trees(ell + 1, top_not_full=True))

            def rot_check(v, trees=trees):
                neg = tuple(-x for x in v)
                for t in trees:
                    w = rotate_tree(t)
                    if tree_max(t, v) + tree_max(t, neg) != tree_max(w, v) + tree_max(w, neg):
                        return False, f"tree={[b.bits for b in t.branches]}"
                return True, None

            res.append(_run("rotation_identity", ell + 1, max(1, trials // 4), zs(ell + 1), rot_check))
    if "composition_coefficient_sum" in wanted:
        bad = [ell for ell in range(1, 13) if comp_coeff_sum(ell) != (1 if ell == 1 else 0)]
        res.append(IdentityResult("composition_coefficient_sum", 12, 12, not bad,
                                  [str(b) for b in bad] or None))
    return rep
