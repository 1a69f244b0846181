"""Exact combinatorial identities behind the cumulant asymptotics.

Everything here is exact: inputs are coerced to :class:`fractions.Fraction`,
scaled to a common integer denominator, and summed with Python / int64
integers.  No floating point is used anywhere in this module.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "ResourceError",
    "Branch",
    "Tree",
    "compositions",
    "set_partitions",
    "comp_coeff_sum",
    "comp_coefficients",
    "partition_sign_sum",
    "clamp_count",
    "g_direct",
    "g_subset_form",
    "rs_identity_sides",
    "enumerate_trees",
    "tree_max",
    "u_tree_sum",
    "rotate_tree",
]

MAX_G_LEN = 8
MAX_TREE_LEN = 6
MAX_COMP_LEN = 12


class ResourceError(RuntimeError):
    """Requested enumeration exceeds the configured size bound."""


# ---------------------------------------------------------------------------
# compositions and partitions


def compositions(total: int) -> Iterator[tuple[int, ...]]:
    """All ordered tuples of positive integers summing to ``total``.

    Generated by choosing cut points in ``1..total-1``; order is by number of
    parts, then lexicographic.
    """
    if total < 1:
        return
    for m in range(1, total + 1):
        for cuts in itertools.combinations(range(1, total), m - 1):
            edges = (0,) + cuts + (total,)
            yield tuple(b - a for a, b in zip(edges[:-1], edges[1:]))


def set_partitions(items: Sequence) -> Iterator[list[list]]:
    """All set partitions of ``items`` (restricted-growth enumeration)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def _multinomial(parts: Sequence[int]) -> int:
    out = math.factorial(sum(parts))
    for p in parts:
        out //= math.factorial(p)
    return out


@lru_cache(maxsize=None)
def comp_coefficients(ell: int) -> tuple[tuple[tuple[int, ...], Fraction], ...]:
    """``(composition, (-1)^(m-1)/m * ell!/prod(ell_i!))`` for every composition of ``ell``."""
    return tuple(
        (c, Fraction((-1) ** (len(c) - 1), len(c)) * _multinomial(c)) for c in compositions(ell)
    )


def comp_coeff_sum(ell: int) -> Fraction:
    """Sum of the cumulant weights over all compositions of ``ell``.

    Equals 1 for ``ell == 1`` and 0 otherwise, since the generating function
    is ``log(1 + (e^z - 1)) = z``.
    """
    if not 1 <= ell <= MAX_COMP_LEN:
        raise ResourceError(f"ell={ell} outside 1..{MAX_COMP_LEN}")
    return sum((w for _, w in comp_coefficients(ell)), Fraction(0))


def partition_sign_sum(s: int) -> int:
    """``sum over set partitions U of an s-set of (-1)^(|U|-1) (|U|-1)!`` by brute force."""
    total = 0
    for part in set_partitions(range(s)):
        r = len(part)
        total += (-1) ** (r - 1) * math.factorial(r - 1)
    return total


def clamp_count(n: int, partial_sums: Sequence[int]) -> int:
    """Number of ``u`` with ``0 <= u <= n-1`` and ``0 <= u + s <= n-1`` for every ``s``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    hi = max([0, *partial_sums])
    lo = max([0, *(-s for s in partial_sums)])
    return max(0, n - hi - lo)


# ---------------------------------------------------------------------------
# the function G and its subset form


def _to_scaled_ints(k: Sequence) -> tuple[list[int], int]:
    fr = [Fraction(x) for x in k]
    den = math.lcm(*(x.denominator for x in fr)) if fr else 1
    return [int(x * den) for x in fr], den


def _check_zero_sum(k: Sequence, max_len: int, what: str) -> None:
    if len(k) < 1:
        raise ValueError(f"{what} needs at least one entry")
    if sum(Fraction(x) for x in k) != 0:
        raise ValueError(f"{what} requires entries summing to zero")
    if len(k) > max_len:
        raise ResourceError(f"{what}: length {len(k)} exceeds {max_len}")


@lru_cache(maxsize=None)
def _g_tables(ell: int):
    perms = np.array(list(itertools.permutations(range(ell))), dtype=np.int64).reshape(-1, ell)
    comps = []
    weights = []
    for c in compositions(ell):
        m = len(c)
        cuts = list(itertools.accumulate(c))[:-1]
        mask = np.zeros(max(ell - 1, 1), dtype=bool)
        for x in cuts:
            mask[x - 1] = True
        comps.append(mask)
        den = m
        for p in c:
            den *= math.factorial(p)
        weights.append(Fraction((-1) ** m, den))
    return perms, np.array(comps), weights


def _masked_prefix_max(values: np.ndarray, masks: np.ndarray) -> np.ndarray:
    """``max(0, values[..., c] for c in mask)`` for every mask -> shape (..., n_masks)."""
    if values.dtype == object:
        out = np.empty(values.shape[:-1] + (len(masks),), dtype=object)
        for j, mk in enumerate(masks):
            sel = values[..., mk]
            out[..., j] = np.max(np.concatenate([np.zeros(sel.shape[:-1] + (1,), dtype=object), sel],
                                                axis=-1), axis=-1)
        return out
    neg = np.iinfo(np.int64).min // 4
    picked = np.where(masks[None, :, :], values[:, None, :], neg)
    return np.maximum(picked.max(axis=-1), 0)


def g_direct(k: Sequence) -> Fraction:
    """The piecewise-linear function ``G`` evaluated from its defining sum.

    ``sum_{sigma in S_l} sum_m (-1)^m/m sum_{compositions} 1/prod(l_i!) *
    max(0, composition partial sums of k_sigma)``, exactly.
    """
    _check_zero_sum(k, MAX_G_LEN, "g_direct")
    ell = len(k)
    if ell == 1:
        return Fraction(0)
    ints, den = _to_scaled_ints(k)
    perms, masks, weights = _g_tables(ell)
    big = max(abs(x) for x in ints) * ell > 2**40
    vec = np.array(ints, dtype=object if big else np.int64)
    colsums = np.zeros(len(masks), dtype=object)
    for start in range(0, len(perms), 2048):
        prefix = np.cumsum(vec[perms[start:start + 2048]], axis=1)[:, :-1]
        colsums = colsums + _masked_prefix_max(prefix, masks).sum(axis=0).astype(object)
    total = sum((w * int(s) for w, s in zip(weights, colsums)), Fraction(0))
    return total / den


def g_subset_form(k: Sequence) -> Fraction:
    """``G`` re-summed over subsets: ``1/4 sum_A c(|A|) c(l-|A|) |sum_{i in A} k_i|``.

    ``c(s)`` is the composition sum :func:`comp_coeff_sum`, which equals the
    signed set-partition count of an ``s``-set.
    """
    _check_zero_sum(k, MAX_G_LEN, "g_subset_form")
    fr = [Fraction(x) for x in k]
    ell = len(fr)
    total = Fraction(0)
    for r in range(1, ell):
        cr = comp_coeff_sum(r) * comp_coeff_sum(ell - r)
        if cr == 0:
            continue
        for A in itertools.combinations(range(ell), r):
            total += cr * abs(sum(fr[i] for i in A))
    return total / 4


def rs_identity_sides(v: Sequence) -> tuple[Fraction, Fraction]:
    """Both sides of the max-over-permutations / subset identity for zero-sum ``v``.

    LHS ``1/m sum_tau max(0, v_tau1, v_tau1 + v_tau2, ...)`` (partial sums up
    to ``m-1`` terms), RHS ``1/4 sum_F (|F|-1)! (m-|F|-1)! |sum_F v|`` over
    proper nonempty ``F``.
    """
    _check_zero_sum(v, MAX_G_LEN, "rs_identity_sides")
    m = len(v)
    if m < 2:
        raise ValueError("rs_identity_sides needs m >= 2")
    ints, den = _to_scaled_ints(v)
    lhs = 0
    for tau in itertools.permutations(ints):
        lhs += max(0, *itertools.accumulate(tau[:-1]))
    rhs = 0
    for r in range(1, m):
        w = math.factorial(r - 1) * math.factorial(m - r - 1)
        for F in itertools.combinations(ints, r):
            rhs += w * abs(sum(F))
    return Fraction(lhs, m * den), Fraction(rhs, 4 * den)


# ---------------------------------------------------------------------------
# branches and trees


@dataclass(frozen=True)
class Branch:
    """Nonzero 0/1 vector of fixed length."""

    bits: tuple[int, ...]

    def __post_init__(self):
        b = tuple(int(x) for x in self.bits)
        if any(x not in (0, 1) for x in b):
            raise ValueError("branch entries must be 0 or 1")
        if not any(b):
            raise ValueError("branch must be nonzero")
        object.__setattr__(self, "bits", b)

    def __len__(self):
        return len(self.bits)

    def __lt__(self, other: "Branch") -> bool:  # coordinatewise strict order
        return self.bits != other.bits and all(a <= b for a, b in zip(self.bits, other.bits))

    def __le__(self, other: "Branch") -> bool:
        return self == other or self < other

    def dot(self, k: Sequence) -> Fraction:
        return sum((Fraction(x) for a, x in zip(self.bits, k) if a), Fraction(0))

    @property
    def mask(self) -> int:
        return sum(1 << i for i, a in enumerate(self.bits) if a)


@dataclass(frozen=True)
class Tree:
    """Strictly increasing chain of branches of a common length."""

    branches: tuple[Branch, ...]

    def __post_init__(self):
        br = tuple(b if isinstance(b, Branch) else Branch(tuple(b)) for b in self.branches)
        if not br:
            raise ValueError("a tree has at least one branch")
        if len({len(b) for b in br}) != 1:
            raise ValueError("branches must share a length")
        for a, b in zip(br[:-1], br[1:]):
            if not a < b:
                raise ValueError(f"branches not strictly increasing: {a.bits} !< {b.bits}")
        object.__setattr__(self, "branches", br)

    @property
    def ell(self) -> int:
        return len(self.branches[0])

    def __len__(self):
        return len(self.branches)

    @property
    def top(self) -> Branch:
        return self.branches[-1]

    def key(self):
        return (len(self.branches), tuple(b.bits for b in self.branches))


def enumerate_trees(ell: int, *, max_size: int | None = None, top_not_full: bool = False,
                    top_last_zero: bool = False) -> Iterator[Tree]:
    """Every chain of nonzero 0/1 vectors of length ``ell``, ordered by (size, branch list).

    Filters: ``max_size`` keeps ``|T| <= max_size`` (pass ``ell - 1`` for the
    strict ``|T| < ell`` convention); ``top_not_full`` drops trees whose largest
    branch is all ones; ``top_last_zero`` keeps trees whose largest branch has
    last coordinate 0.
    """
    for bits in _tree_table(ell):
        t = Tree(tuple(Branch(b) for b in bits))
        if max_size is not None and len(t) > max_size:
            continue
        if top_not_full and all(t.top.bits):
            continue
        if top_last_zero and t.top.bits[-1] != 0:
            continue
        yield t


@lru_cache(maxsize=None)
def _tree_table(ell: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    if not 1 <= ell <= MAX_TREE_LEN:
        raise ResourceError(f"tree enumeration limited to 1 <= ell <= {MAX_TREE_LEN}")
    masks = range(1, 1 << ell)
    bits = {m: tuple((m >> i) & 1 for i in range(ell)) for m in masks}
    above = {m: [w for w in masks if w != m and (w & m) == m] for m in masks}

    chains: list[tuple] = []

    def extend(chain):
        chains.append(tuple(bits[c] for c in chain))
        for w in above[chain[-1]]:
            extend(chain + [w])

    for m in masks:
        extend([m])
    chains.sort(key=lambda c: (len(c), c))
    return tuple(chains)


@lru_cache(maxsize=None)
def _tree_masks(ell: int, max_size: int | None) -> tuple[np.ndarray, np.ndarray]:
    rows, signs = [], []
    for bits in _tree_table(ell):
        if max_size is not None and len(bits) > max_size:
            continue
        masks = [sum(1 << i for i, a in enumerate(b) if a) for b in bits]
        rows.append(masks + [0] * (ell - len(masks)))
        signs.append(1 if len(bits) % 2 == 1 else -1)
    return np.array(rows, dtype=np.int64).reshape(-1, ell), np.array(signs, dtype=np.int64)


def _subset_sums(ints: Sequence[int]) -> np.ndarray:
    ell = len(ints)
    out = np.zeros(1 << ell, dtype=object)
    for mask in range(1, 1 << ell):
        low = mask & -mask
        out[mask] = out[mask ^ low] + ints[low.bit_length() - 1]
    return out


def tree_max(tree: Tree, k: Sequence) -> Fraction:
    """``max(0, alpha . k for alpha in tree)``."""
    return max([Fraction(0)] + [b.dot(k) for b in tree.branches])


def u_tree_sum(k: Sequence, max_size: int | None = None) -> Fraction:
    """Alternating sum of tree maxima ``sum_T (-1)^(|T|-1) max(0, alpha.k | alpha in T)``.

    ``k`` need not sum to zero.  ``max_size`` restricts the trees (see
    :func:`enumerate_trees`); by default every chain is included.
    """
    ell = len(k)
    if not 1 <= ell <= MAX_TREE_LEN:
        raise ResourceError(f"u_tree_sum limited to 1 <= ell <= {MAX_TREE_LEN}")
    ints, den = _to_scaled_ints(k)
    sums = _subset_sums(ints)
    masks, signs = _tree_masks(ell, max_size)
    if len(masks) == 0:
        return Fraction(0)
    # padded mask 0 contributes the constant 0 inside the max
    vals = sums[masks]
    tmax = np.maximum(vals.max(axis=1), 0)
    total = int(np.dot(signs.astype(object), tmax))
    return Fraction(total, den)


def rotate_tree(tree: Tree) -> Tree:
    """``W(T) = (a2 - a1, ..., a_m - a1, D - a1)`` with ``D`` the all-ones branch."""
    if all(tree.top.bits):
        raise ValueError("rotation undefined: largest branch is the all-ones vector")
    a1 = tree.branches[0].bits
    diff = [tuple(x - y for x, y in zip(b.bits, a1)) for b in tree.branches[1:]]
    diff.append(tuple(1 - y for y in a1))
    return Tree(tuple(Branch(d) for d in diff))
