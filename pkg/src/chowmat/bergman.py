"""Bergman classes as Minkowski weights on the braid fan.

Cones of the braid fan are chains of nonempty proper subsets of the ground
set; a k-dimensional Minkowski weight assigns integers to k-chains subject to
the balancing condition at every (k-1)-chain.  Balancing is verified by exact
rational linear algebra in the lattice Z^E / Z*e_E.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import LoopyMatroid, NotAFlat, WrongDimension
from .matroid import Matroid, bits
from .quotients import principal_truncation

#: A cone of the braid fan: a strictly increasing chain of nonempty proper
#: subsets, stored as a tuple of bitmasks.
ChainCone = tuple[int, ...]


def is_chain(cone: ChainCone, full_mask: int) -> bool:
    prev = 0
    for s in cone:
        if s == 0 or s == full_mask:
            return False
        if prev and (prev & ~s or s == prev):
            return False
        prev = s
    return True


@dataclass
class MinkowskiWeight:
    """Sparse integer weighting of the k-chains; zero entries are omitted."""

    n_elements: int
    dim: int
    weights: dict[ChainCone, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        full = (1 << self.n_elements) - 1
        cleaned = {}
        for cone, value in self.weights.items():
            if len(cone) != self.dim:
                raise WrongDimension(f"cone {cone} is not a {self.dim}-chain")
            if not is_chain(cone, full):
                raise WrongDimension(f"{cone} is not a chain of nonempty proper subsets")
            if value:
                cleaned[cone] = value
        self.weights = cleaned

    def is_zero(self) -> bool:
        return not self.weights

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, MinkowskiWeight)
            and self.n_elements == other.n_elements
            and self.dim == other.dim
            and self.weights == other.weights
        )

    def scale(self, c: int) -> "MinkowskiWeight":
        return MinkowskiWeight(
            self.n_elements, self.dim, {cone: c * v for cone, v in self.weights.items()}
        )


def bergman_class(m: Matroid) -> MinkowskiWeight:
    """Weight 1 on every chain of d proper nonempty flats, 0 elsewhere."""
    if not m.is_loopless():
        raise LoopyMatroid("Bergman classes exist for loopless matroids only")
    d = m.rank_full - 1
    lattice = m.lattice()
    proper = [f for f in lattice.flats if f != 0 and f != m.full_mask]
    chains: list[ChainCone] = []

    def grow(prefix: tuple[int, ...], last: int) -> None:
        if len(prefix) == d:
            chains.append(prefix)
            return
        for f in proper:
            if f != last and last & ~f == 0:
                grow(prefix + (f,), f)

    grow((), 0)
    return MinkowskiWeight(m.n_elements, d, {c: 1 for c in chains})


def _solve_in_span(vectors: list[list[Fraction]], target: list[Fraction]) -> bool:
    """Exact membership of ``target`` in the rational span of ``vectors``."""
    cols = len(vectors)
    rows = len(target)
    # Augmented elimination over the columns.
    mat = [[vectors[c][r] for c in range(cols)] + [target[r]] for r in range(rows)]
    pivot_row = 0
    for col in range(cols):
        sel = next((r for r in range(pivot_row, rows) if mat[r][col]), None)
        if sel is None:
            continue
        mat[pivot_row], mat[sel] = mat[sel], mat[pivot_row]
        inv = mat[pivot_row][col]
        for r in range(rows):
            if r != pivot_row and mat[r][col]:
                factor = mat[r][col] / inv
                mat[r] = [a - factor * b for a, b in zip(mat[r], mat[pivot_row])]
        pivot_row += 1
    return all(mat[r][cols] == 0 for r in range(pivot_row, rows))


def check_balanced(w: MinkowskiWeight) -> bool:
    """Verify the balancing condition at every (dim-1)-chain.

    For each facet chain tau, the weighted sum of the inserted rays must lie
    in span{e_S : S in tau} + span{e_E}, checked exactly over the rationals.
    """
    if w.dim == 0:
        return True
    n = w.n_elements
    facets: dict[ChainCone, list[tuple[int, int]]] = {}
    for cone, value in w.weights.items():
        for i in range(w.dim):
            tau = cone[:i] + cone[i + 1 :]
            facets.setdefault(tau, []).append((cone[i], value))
    e_full = [Fraction(1)] * n
    for tau, contributions in facets.items():
        total = [Fraction(0)] * n
        for inserted, value in contributions:
            for e in bits(inserted):
                total[e] += value
        span = [e_full] + [
            [Fraction(1) if s & (1 << e) else Fraction(0) for e in range(n)] for s in tau
        ]
        if not _solve_in_span(span, total):
            return False
    return True


def cap_with_h(flat: int, source: Matroid) -> MinkowskiWeight:
    """Cap product of the simplicial generator of ``flat`` with the Bergman class.

    Realized through the matroid side: the principal truncation when the flat
    has rank > 1, the zero weight otherwise.
    """
    if not source.is_loopless():
        raise LoopyMatroid("cap products with Bergman classes need loopless input")
    if flat == 0 or not source.is_flat(flat):
        raise NotAFlat(f"{sorted(bits(flat))} is not a nonempty flat")
    d = source.rank_full - 1
    if source.rank(flat) <= 1:
        return MinkowskiWeight(source.n_elements, d - 1, {})
    return bergman_class(principal_truncation(source, flat))


def cap_weight_with_monomial(
    m: Matroid, chain: tuple[tuple[int, int], ...]
) -> MinkowskiWeight:
    """Iterated cap product of a nested monomial with the Bergman class of m.

    Applies the largest flat first, mirroring the iterated principal
    truncation reading of the monomial.
    """
    current = m
    steps = sum(a for _, a in chain)
    for f, a in reversed(chain):
        for _ in range(a):
            if current.rank(f) <= 1:
                return MinkowskiWeight(m.n_elements, m.rank_full - 1 - steps, {})
            current = principal_truncation(current, f)
    return bergman_class(current)


def degree_of_point(w: MinkowskiWeight) -> int:
    """The single value of a zero-dimensional weight (at the trivial chain)."""
    if w.dim != 0:
        raise WrongDimension(f"weight has dimension {w.dim}, expected 0")
    return w.weights.get((), 0)


def weight_vector(w: MinkowskiWeight, cones: list[ChainCone]) -> list[int]:
    """Flatten a weight over an explicit list of cones."""
    return [w.weights.get(c, 0) for c in cones]


def bergman_weight_space_dimension(m: Matroid) -> int:
    """dim MW_d(Sigma_M): weights on top chains of flats of m, balanced inside m.

    Solves the balancing conditions of the Bergman fan as one exact linear
    system; the Bergman class spans it, so the answer should be 1.
    """
    if not m.is_loopless():
        raise LoopyMatroid("Bergman fans exist for loopless matroids only")
    d = m.rank_full - 1
    top = sorted(bergman_class(m).weights)
    if d == 0:
        return 1
    index = {cone: i for i, cone in enumerate(top)}
    # Facet chains of the Bergman fan and their extensions within the fan.
    facets: dict[ChainCone, list[tuple[int, int]]] = {}
    for cone in top:
        for i in range(d):
            tau = cone[:i] + cone[i + 1 :]
            facets.setdefault(tau, []).append((cone[i], index[cone]))
    n = m.n_elements
    rows: list[list[Fraction]] = []
    for tau, contributions in facets.items():
        # Balancing modulo span{e_S : S in tau} + e_E: eliminate the span by
        # projecting onto coordinates of a complement, via elimination on the
        # stacked system per facet.
        span = [[Fraction(1)] * n] + [
            [Fraction(1) if s & (1 << e) else Fraction(0) for e in range(n)] for s in tau
        ]
        # Build the coefficient matrix of the linear map (weights) -> N_R /
        # span(tau): columns are inserted-ray vectors; then quotient by span.
        cols = {}
        for inserted, wi in contributions:
            vec = [Fraction(1) if inserted & (1 << e) else Fraction(0) for e in range(n)]
            cols[wi] = [a + b for a, b in zip(cols.get(wi, [Fraction(0)] * n), vec)]
        # Eliminate span vectors from each column, tracking the residual.
        basis: list[list[Fraction]] = []
        for v in span:
            v = v[:]
            for b in basis:
                lead = next((i for i, x in enumerate(b) if x), None)
                if lead is not None and v[lead]:
                    f = v[lead] / b[lead]
                    v = [a - f * c for a, c in zip(v, b)]
            if any(v):
                basis.append(v)
        residuals = {}
        for wi, vec in cols.items():
            v = vec[:]
            for b in basis:
                lead = next((i for i, x in enumerate(b) if x), None)
                if lead is not None and v[lead]:
                    f = v[lead] / b[lead]
                    v = [a - f * c for a, c in zip(v, b)]
            residuals[wi] = v
        for coord in range(n):
            row = [Fraction(0)] * len(top)
            nonzero = False
            for wi, v in residuals.items():
                if v[coord]:
                    row[wi] = v[coord]
                    nonzero = True
            if nonzero:
                rows.append(row)
    if not rows:
        return len(top)
    rank = _row_rank(rows)
    return len(top) - rank


def _row_rank(rows: list[list[Fraction]]) -> int:
    mat = [row[:] for row in rows]
    cols = len(mat[0])
    rank = 0
    for col in range(cols):
        sel = next((r for r in range(rank, len(mat)) if mat[r][col]), None)
        if sel is None:
            continue
        mat[rank], mat[sel] = mat[sel], mat[rank]
        inv = mat[rank][col]
        for r in range(len(mat)):
            if r != rank and mat[r][col]:
                f = mat[r][col] / inv
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[rank])]
        rank += 1
        if rank == len(mat):
            break
    return rank
