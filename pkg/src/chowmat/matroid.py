"""Matroids on small ground sets, with rank/closure oracles and the lattice of flats.

Ground sets are ``{0, 1, ..., n}`` and subsets are machine-word bitmasks, so
everything here is exact and exhaustive.  The hard cap on the ground set size
(:data:`MAX_GROUND`) keeps the ``2^|E|`` enumerations that back the flat
lattice at desk scale.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .errors import (
    EmptyBases,
    EmptyFlat,
    ExchangeAxiomViolation,
    GroundSetTooLarge,
    InvalidRank,
    NotComparable,
)

#: Largest supported ground set.  Flat enumeration is 2^|E|, so this is a
#: cost guard, not a correctness limit.
MAX_GROUND = 16


def popcount(x: int) -> int:
    return bin(x).count("1")


def bits(x: int) -> Iterable[int]:
    """Yield the set bit positions of ``x`` in increasing order."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << e
    return m


def set_of(mask: int) -> frozenset[int]:
    return frozenset(bits(mask))


class Matroid:
    """A matroid given by its set of bases over ``E = {0, ..., n}``.

    Immutable after construction; the rank memo fills in lazily but reads and
    writes of a CPython dict are atomic, so instances are safe to share.
    """

    __slots__ = ("n_elements", "full_mask", "bases", "rank_full", "_rank_cache", "_closure_cache", "_lattice")

    def __init__(self, n_elements: int, bases: Iterable[int], *, validate: bool = True):
        if not 1 <= n_elements <= MAX_GROUND:
            raise GroundSetTooLarge(f"ground set size {n_elements} outside 1..{MAX_GROUND}")
        basis_list = sorted(set(bases))
        if not basis_list:
            raise EmptyBases("a matroid needs at least one basis")
        self.n_elements = n_elements
        self.full_mask = (1 << n_elements) - 1
        for b in basis_list:
            if b & ~self.full_mask:
                raise ExchangeAxiomViolation(f"basis {b:b} not contained in the ground set")
        self.bases: tuple[int, ...] = tuple(basis_list)
        self.rank_full = popcount(basis_list[0])
        self._rank_cache: dict[int, int] = {}
        self._closure_cache: dict[int, int] = {}
        self._lattice: FlatLattice | None = None
        if validate:
            self._check_exchange()

    def _check_exchange(self) -> None:
        r = self.rank_full
        for b in self.bases:
            if popcount(b) != r:
                raise ExchangeAxiomViolation("bases of unequal cardinality")
        base_set = set(self.bases)
        for a, b in itertools.permutations(self.bases, 2):
            for e in bits(a & ~b):
                #  For every e in A\B some f in B\A must give A - e + f a basis.
                if not any((a ^ (1 << e)) | (1 << f) in base_set for f in bits(b & ~a)):
                    raise ExchangeAxiomViolation(
                        f"exchange fails for bases {sorted(bits(a))} and {sorted(bits(b))}"
                    )

    # -- oracles -----------------------------------------------------------

    def rank(self, subset: int) -> int:
        """Rank of a subset: the largest intersection with a basis."""
        cached = self._rank_cache.get(subset)
        if cached is not None:
            return cached
        r = max(popcount(b & subset) for b in self.bases)
        self._rank_cache[subset] = r
        return r

    def closure(self, subset: int) -> int:
        """The largest superset of ``subset`` with the same rank."""
        cached = self._closure_cache.get(subset)
        if cached is not None:
            return cached
        r = self.rank(subset)
        cl = subset
        rest = self.full_mask & ~subset
        for e in bits(rest):
            if self.rank(subset | (1 << e)) == r:
                cl |= 1 << e
        self._closure_cache[subset] = cl
        return cl

    def is_flat(self, subset: int) -> bool:
        return self.closure(subset) == subset

    def is_loopless(self) -> bool:
        """True iff every element lies in some basis."""
        covered = 0
        for b in self.bases:
            covered |= b
        return covered == self.full_mask

    def is_independent(self, subset: int) -> bool:
        return self.rank(subset) == popcount(subset)

    def is_spanning(self, subset: int) -> bool:
        return self.rank(subset) == self.rank_full

    def spanning_sets(self) -> list[int]:
        """All spanning subsets of the ground set."""
        return [s for s in range(1 << self.n_elements) if self.is_spanning(s)]

    def lattice(self) -> "FlatLattice":
        if self._lattice is None:
            self._lattice = FlatLattice(self)
        return self._lattice

    # -- dunder ------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Matroid)
            and self.n_elements == other.n_elements
            and self.bases == other.bases
        )

    def __hash__(self) -> int:
        return hash((self.n_elements, self.bases))

    def __repr__(self) -> str:
        shown = [sorted(bits(b)) for b in self.bases[:4]]
        more = "..." if len(self.bases) > 4 else ""
        return f"Matroid(n={self.n_elements}, rank={self.rank_full}, bases={shown}{more})"


class FlatLattice:
    """All flats of a matroid, graded by rank, with covers and Möbius values.

    Flats are enumerated by closing every subset of the ground set and
    deduplicating, which is the simplest correct method at ``2^|E|`` scale.
    """

    def __init__(self, matroid: Matroid):
        self.matroid = matroid
        seen: set[int] = set()
        for s in range(1 << matroid.n_elements):
            seen.add(matroid.closure(s))
        # Order flats by (rank, bitmask); this is the canonical order used
        # everywhere downstream.
        self.flats: tuple[int, ...] = tuple(sorted(seen, key=lambda f: (matroid.rank(f), f)))
        self.index: dict[int, int] = {f: i for i, f in enumerate(self.flats)}
        self.rank_of: tuple[int, ...] = tuple(matroid.rank(f) for f in self.flats)
        self.by_rank: list[list[int]] = [[] for _ in range(matroid.rank_full + 1)]
        for f in self.flats:
            self.by_rank[matroid.rank(f)].append(f)
        self.covers: dict[int, list[int]] = {
            f: [
                g
                for g in self.by_rank[self.matroid.rank(f) + 1]
                if f & ~g == 0
            ]
            for f in self.flats
            if self.matroid.rank(f) < matroid.rank_full
        }
        self._moebius: dict[tuple[int, int], int] = {}

    def interval(self, f: int, g: int) -> list[int]:
        """Flats h with f <= h <= g."""
        return [h for h in self.flats if f & ~h == 0 and h & ~g == 0]

    def moebius(self, f: int, g: int) -> int:
        """Möbius function of the lattice of flats, memoized."""
        if f & ~g:
            raise NotComparable(f"{sorted(bits(f))} is not below {sorted(bits(g))}")
        if f not in self.index or g not in self.index:
            raise NotComparable("arguments must be flats")
        key = (f, g)
        cached = self._moebius.get(key)
        if cached is not None:
            return cached
        if f == g:
            value = 1
        else:
            value = -sum(self.moebius(f, h) for h in self.interval(f, g) if h != g)
        self._moebius[key] = value
        return value

    def __len__(self) -> int:
        return len(self.flats)


# -- constructors ----------------------------------------------------------


def matroid_from_bases(n_elements: int, bases: Iterable[Iterable[int] | int]) -> Matroid:
    """Build a matroid from explicit bases, verifying the exchange axiom."""
    masks = [b if isinstance(b, int) else mask_of(b) for b in bases]
    if not masks:
        raise EmptyBases("a matroid needs at least one basis")
    return Matroid(n_elements, masks, validate=True)


def uniform(r: int, n_elements: int) -> Matroid:
    """The uniform matroid U_{r, n_elements}: every r-subset is a basis."""
    if not 0 <= r <= n_elements:
        raise InvalidRank(f"rank {r} outside 0..{n_elements}")
    bases = [mask_of(c) for c in itertools.combinations(range(n_elements), r)]
    return Matroid(n_elements, bases, validate=False)


def graphic(vertices: int, edges: list[tuple[int, int]]) -> Matroid:
    """The cycle matroid of a multigraph; ground set = edge indices.

    Bases are the maximal spanning forests, found by exhausting edge subsets.
    """
    if not edges:
        raise EmptyBases("need at least one edge")
    if len(edges) > MAX_GROUND:
        raise GroundSetTooLarge(f"{len(edges)} edges exceeds the cap {MAX_GROUND}")

    def forest_size(subset: int) -> int:
        parent = list(range(vertices))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        size = 0
        for i in bits(subset):
            u, v = edges[i]
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
                size += 1
        return size

    m = len(edges)
    max_rank = forest_size((1 << m) - 1)
    bases = [
        mask_of(c)
        for c in itertools.combinations(range(m), max_rank)
        if forest_size(mask_of(c)) == max_rank
    ]
    return Matroid(m, bases, validate=False)


def direct_sum(a: Matroid, b: Matroid) -> Matroid:
    """Direct sum; the second summand's elements are shifted past the first's."""
    n = a.n_elements + b.n_elements
    if n > MAX_GROUND:
        raise GroundSetTooLarge(f"direct sum has {n} elements, cap is {MAX_GROUND}")
    shift = a.n_elements
    bases = [ba | (bb << shift) for ba in a.bases for bb in b.bases]
    return Matroid(n, bases, validate=False)


def h_matroid(n_elements: int, subset: int) -> Matroid:
    """The corank-one matroid with bases ``{E \\ i : i in subset}``.

    Equals the direct sum of the Boolean matroid on the complement with the
    corank-one uniform matroid on ``subset``.
    """
    if subset == 0:
        raise EmptyFlat("subset must be nonempty")
    full = (1 << n_elements) - 1
    return Matroid(n_elements, [full ^ (1 << i) for i in bits(subset)], validate=False)


@dataclass
class RelabeledMatroid:
    """A minor together with the old-element -> new-element relabeling."""

    matroid: Matroid
    relabel: dict[int, int]

    def old_to_new_mask(self, subset: int) -> int:
        return mask_of(self.relabel[e] for e in bits(subset) if e in self.relabel)


def restrict(m: Matroid, subset: int) -> RelabeledMatroid:
    """Restriction M|S, relabeled onto {0, ..., |S|-1}."""
    elements = list(bits(subset))
    relabel = {e: i for i, e in enumerate(elements)}
    r = m.rank(subset)
    bases = []
    for c in itertools.combinations(elements, r):
        cand = mask_of(c)
        if m.rank(cand) == r:
            bases.append(mask_of(relabel[e] for e in c))
    return RelabeledMatroid(Matroid(max(len(elements), 1), bases, validate=False), relabel)


def contract(m: Matroid, subset: int) -> RelabeledMatroid:
    """Contraction M/S, relabeled onto {0, ..., |E\\S|-1}.

    The result is loopless whenever ``subset`` is a flat.
    """
    elements = [e for e in range(m.n_elements) if not subset & (1 << e)]
    relabel = {e: i for i, e in enumerate(elements)}
    r_s = m.rank(subset)
    r = m.rank_full - r_s
    bases = []
    for c in itertools.combinations(elements, r):
        cand = mask_of(c)
        if m.rank(cand | subset) == m.rank_full:
            bases.append(mask_of(relabel[e] for e in c))
    return RelabeledMatroid(Matroid(max(len(elements), 1), bases, validate=False), relabel)


# -- thin functional wrappers (operation names from the public surface) -----


def rank(m: Matroid, subset: int) -> int:
    return m.rank(subset)


def closure(m: Matroid, subset: int) -> int:
    return m.closure(subset)


def flat_lattice(m: Matroid) -> FlatLattice:
    return m.lattice()


def moebius(lattice: FlatLattice, f: int, g: int) -> int:
    return lattice.moebius(f, g)


def is_loopless(m: Matroid) -> bool:
    return m.is_loopless()
