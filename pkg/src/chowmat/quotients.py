"""Matroid quotients: principal truncations, intersections, Higgs factorizations,
and relative nested quotients.

A quotient ``f: M' <<- M`` is witnessed by every flat of ``M'`` being a flat
of ``M``.  The f-nullity ``n_f(S) = rk_M(S) - rk_M'(S)`` grades the quotient;
its minimal flats per nullity level (the f-cyclic flats) determine the
quotient, and quotients whose f-cyclic flats form a chain are exactly the
images of nested-basis monomials under the cap product.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EmptyFlat, GroundSetMismatch, InvalidRank, NotAFlat
from .matroid import Matroid, bits, popcount


@dataclass
class QuotientWitness:
    """Certifies that ``lower`` is a matroid quotient of ``upper``."""

    lower: Matroid
    upper: Matroid
    _nullity: dict[int, int] = field(default_factory=dict, repr=False)

    def nullity(self, subset: int) -> int:
        cached = self._nullity.get(subset)
        if cached is None:
            cached = self.upper.rank(subset) - self.lower.rank(subset)
            self._nullity[subset] = cached
        return cached

    @property
    def corank(self) -> int:
        return self.nullity(self.upper.full_mask)


@dataclass
class HiggsChain:
    """The canonical factorization of a quotient into elementary quotients.

    ``stages[0]`` is the lower matroid and ``stages[-1]`` the upper one; all
    stages live on the shared ambient ground set.  ``cuts[i]`` is the modular
    cut of ``stages[i+1]`` defining the step down to ``stages[i]``.
    """

    stages: list[Matroid]
    cuts: list[frozenset[int]]


def is_quotient(lower: Matroid, upper: Matroid) -> QuotientWitness | None:
    """Witness that every flat of ``lower`` is a flat of ``upper``, else None."""
    if lower.n_elements != upper.n_elements:
        raise GroundSetMismatch("quotients need a common ground set")
    for f in lower.lattice().flats:
        if not upper.is_flat(f):
            return None
    return QuotientWitness(lower, upper)


def principal_truncation(m: Matroid, flat: int) -> Matroid:
    """The elementary quotient T_F(M) of the interval modular cut [F, E].

    Bases are ``{B \\ f : B a basis of M, f in B & F}``; the result is
    loopless iff rk(F) > 1.
    """
    if flat == 0:
        raise EmptyFlat("cannot truncate along the empty flat")
    if not m.is_flat(flat):
        raise NotAFlat(f"{sorted(bits(flat))} is not a flat")
    new_bases = set()
    for b in m.bases:
        for f in bits(b & flat):
            new_bases.add(b ^ (1 << f))
    return Matroid(m.n_elements, new_bases, validate=False)


def truncate_by_subset(m: Matroid, subset: int) -> Matroid:
    """M wedge H_S for a nonempty subset S, via the direct basis description.

    Equals the principal truncation along cl(S).  The result may have loops
    (exactly when rk(S) = 1); loops then persist under further truncations.
    """
    if subset == 0:
        raise EmptyFlat("subset must be nonempty")
    new_bases = set()
    for b in m.bases:
        for f in bits(b & subset):
            new_bases.add(b ^ (1 << f))
    if not new_bases:
        # S consists of loops of m: every spanning-set intersection keeps rank.
        raise InvalidRank("subset consists of loops; intersection is not rank-decreasing")
    return Matroid(m.n_elements, new_bases, validate=False)


def matroid_intersection(a: Matroid, b: Matroid) -> Matroid:
    """The matroid whose spanning sets are pairwise intersections of spanning sets.

    Computed from the definition: minimal intersections are the bases.  The
    exchange axiom is re-checked, keeping this route independent of the
    principal-truncation shortcut it cross-validates.
    """
    if a.n_elements != b.n_elements:
        raise GroundSetMismatch("matroid intersection needs a common ground set")
    inter = {sa & sb for sa in a.spanning_sets() for sb in b.spanning_sets()}
    min_size = min(popcount(s) for s in inter)
    candidates = [s for s in inter if popcount(s) == min_size]
    return Matroid(a.n_elements, candidates, validate=True)


def f_cyclic_flats(w: QuotientWitness) -> list[int]:
    """Flats of the lower matroid minimal among those sharing their f-nullity."""
    flats = w.lower.lattice().flats
    result = []
    for f in flats:
        nf = w.nullity(f)
        if any(g != f and g & ~f == 0 and w.nullity(g) == nf for g in flats):
            continue
        result.append(f)
    return sorted(result, key=lambda f: (popcount(f), f))


def is_relative_nested(w: QuotientWitness) -> bool:
    """True iff the f-cyclic flats are totally ordered by inclusion."""
    cyc = f_cyclic_flats(w)
    for i, f in enumerate(cyc):
        for g in cyc[i + 1 :]:
            if f & ~g and g & ~f:
                return False
    return True


def higgs_factorization(w: QuotientWitness) -> HiggsChain:
    """Interpolate the quotient by its canonical chain of elementary quotients.

    Stage ``i`` has bases = subsets of size rk(M') + i that span the lower
    matroid and are independent in the upper one; the cut of each step
    collects the flats whose f-nullity is still at least the step index.
    """
    corank = w.corank
    lower, upper = w.lower, w.upper
    stages = [lower]
    for i in range(1, corank):
        size = lower.rank_full + i
        bases = [
            s
            for s in range(1 << upper.n_elements)
            if popcount(s) == size and lower.is_spanning(s) and upper.is_independent(s)
        ]
        stages.append(Matroid(upper.n_elements, bases, validate=False))
    if corank > 0:
        stages.append(upper)
    cuts = []
    for i in range(1, corank + 1):
        stage = stages[i]
        cuts.append(frozenset(g for g in stage.lattice().flats if w.nullity(g) >= i))
    return HiggsChain(stages, cuts)


def nested_exponent_chains(m: Matroid, corank: int) -> list[tuple[tuple[int, int], ...]]:
    """Chains ((F_1, a_1), ..., (F_k, a_k)) with sum a_i = corank satisfying
    the nested-basis constraints 1 <= a_i < rk(F_i) - rk(F_{i-1})."""
    if not 0 <= corank <= max(m.rank_full - 1, 0):
        raise InvalidRank(f"corank {corank} outside 0..{m.rank_full - 1}")
    lattice = m.lattice()
    chains: list[tuple[tuple[int, int], ...]] = []

    def extend(prefix: tuple[tuple[int, int], ...], last_flat: int, remaining: int) -> None:
        if remaining == 0:
            chains.append(prefix)
            return
        last_rank = m.rank(last_flat) if prefix else 0
        for f in lattice.flats:
            if f == 0 or (prefix and (last_flat & ~f or f == last_flat)):
                continue
            gap = m.rank(f) - last_rank
            for a in range(1, min(gap - 1, remaining) + 1):
                extend(prefix + ((f, a),), f, remaining - a)

    extend((), 0, corank)
    return sorted(chains)


def apply_exponent_chain(m: Matroid, chain: tuple[tuple[int, int], ...]) -> Matroid:
    """Iterated principal truncation, largest flat first with multiplicity."""
    current = m
    for f, a in reversed(chain):
        for _ in range(a):
            if not current.is_flat(f):
                raise NotAFlat("exponent constraints should keep each chain flat a flat")
            current = principal_truncation(current, f)
    return current


def enumerate_relative_nested(m: Matroid, corank: int) -> list[Matroid]:
    """All loopless relative nested quotients of the given corank.

    Generated by iterated principal truncations over nested exponent chains;
    distinct chains must give distinct matroids, so a collision is an error,
    not something to deduplicate silently.
    """
    results: list[Matroid] = []
    seen: dict[tuple[int, ...], tuple[tuple[int, int], ...]] = {}
    for chain in nested_exponent_chains(m, corank):
        quotient = apply_exponent_chain(m, chain)
        key = quotient.bases
        if key in seen:
            raise AssertionError(
                f"exponent chains {seen[key]} and {chain} produced the same quotient"
            )
        seen[key] = chain
        results.append(quotient)
    return results
