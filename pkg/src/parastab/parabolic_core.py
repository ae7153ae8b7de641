"""Weighted-flag numerology and slope stability for flagged vector spaces.

A weight system attaches to each marked point an increasing chain of rational
weights in [0, 1); a flagged space realises those weights on a strictly
decreasing chain of subspaces of a common fiber.  The derived quantities --
weight, degree, slope, normalised Hilbert polynomial -- are all exact
Fractions.  Substructures induced on a subspace and structures pushed to a
quotient may have repeated chain steps; levels with zero jump simply
contribute nothing to the weight.

Degree convention for derived objects: a subspace-induced sub- or quotient
structure carries degree 0 by default (it models a saturated degree-zero
subbundle of a trivialised fiber); callers may override.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import DimensionError, FieldMismatchError, PreconditionError
from .exactnum import (
    Matrix,
    PrimeField,
    Subspace,
    enumerate_subspace_arrays,
    gaussian_binomial,
    image,
    quotient_map,
    resolve_budget,
)
from .errors import BudgetError


def _as_fraction(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("floating point weights are not allowed")
    return Fraction(x)


class WeightSystem:
    """Per-puncture strictly increasing rational weights in [0, 1)."""

    def __init__(self, weights: Mapping[str, Sequence]):
        self.punctures = tuple(weights.keys())
        table = {}
        for x, ws in weights.items():
            ws = tuple(_as_fraction(w) for w in ws)
            if not ws:
                raise ValueError(f"puncture {x!r} needs at least one weight")
            prev = None
            for w in ws:
                if w < 0 or w >= 1:
                    raise ValueError(f"weight {w} at {x!r} outside [0, 1)")
                if prev is not None and w <= prev:
                    raise ValueError(f"weights at {x!r} not strictly increasing")
                prev = w
            table[x] = ws
        self._table = table

    def __getitem__(self, x) -> tuple:
        return self._table[x]

    def levels(self, x) -> int:
        return len(self._table[x])

    def items(self):
        return ((x, self._table[x]) for x in self.punctures)

    def all_weights(self):
        return [w for x in self.punctures for w in self._table[x]]

    def __eq__(self, other):
        return (
            isinstance(other, WeightSystem)
            and self.punctures == other.punctures
            and self._table == other._table
        )

    def __hash__(self):
        return hash((self.punctures, tuple(self._table[x] for x in self.punctures)))

    def __repr__(self):
        inner = ", ".join(f"{x}: {list(map(str, ws))}" for x, ws in self.items())
        return f"WeightSystem({{{inner}}})"


def _validate_dims_chain(dims, rank, levels, where, strict):
    if len(dims) != levels + 1:
        raise ValueError(f"{where}: chain needs {levels + 1} dims, got {len(dims)}")
    if dims[0] != rank:
        raise ValueError(f"{where}: chain must start at the full rank {rank}")
    if dims[-1] != 0:
        raise ValueError(f"{where}: chain must end at 0")
    for a, b in zip(dims, dims[1:]):
        if strict and b >= a:
            raise ValueError(f"{where}: chain dims must strictly decrease")
        if not strict and b > a:
            raise ValueError(f"{where}: chain dims must be non-increasing")


@dataclass(frozen=True)
class ParabolicNumerics:
    """Numerical flag data: rank, degree, genus, weights, and per-puncture
    chain dimensions dim E_{x,1} = r > dim E_{x,2} > ... > dim E_{x,l+1} = 0."""

    rank: int
    degree: int
    genus: int
    weights: WeightSystem
    flag_dims: Mapping[str, Sequence[int]]

    def __post_init__(self):
        if self.rank <= 0:
            raise ValueError("rank must be positive")
        if self.genus < 0:
            raise ValueError("genus must be >= 0")
        dims = {}
        for x in self.weights.punctures:
            if x not in self.flag_dims:
                raise ValueError(f"missing flag dims for puncture {x!r}")
            chain = tuple(int(d) for d in self.flag_dims[x])
            _validate_dims_chain(chain, self.rank, self.weights.levels(x), f"puncture {x!r}", strict=True)
            dims[x] = chain
        object.__setattr__(self, "flag_dims", dims)

    def jumps(self, x) -> tuple:
        """m_{x,i} = dim E_{x,i} - dim E_{x,i+1}; these sum to the rank."""
        chain = self.flag_dims[x]
        return tuple(a - b for a, b in zip(chain, chain[1:]))

    def owt_at(self, x) -> Fraction:
        return sum(
            (w * m for w, m in zip(self.weights[x], self.jumps(x))), Fraction(0)
        )

    def owt(self) -> Fraction:
        return sum((self.owt_at(x) for x in self.weights.punctures), Fraction(0))

    def pdeg(self) -> Fraction:
        return self.degree + self.owt()

    def pmu(self) -> Fraction:
        return self.pdeg() / self.rank

    def eta(self) -> Fraction:
        return self.owt() / self.rank

    def hilbert(self, m) -> Fraction:
        """Plain normalised Euler characteristic d + r(m + 1 - g)."""
        return Fraction(self.degree + self.rank * (m + 1 - self.genus))

    def par_hilbert(self, m) -> Fraction:
        """Weighted Hilbert polynomial d + r(m + 1 - g) + owt."""
        return self.hilbert(m) + self.owt()


class ParabolicSpace:
    """Concrete weighted flags in a fiber F^r over a chosen field.

    `flags` gives, per puncture, the proper chain members E_{x,2}, ...,
    E_{x,l_x} (the full space and 0 are implicit).  `strict=False` admits
    repeated steps and is used for induced/quotient structures.
    """

    def __init__(self, field, rank, degree, weights: WeightSystem, flags, strict=True):
        self.field = field
        self.rank = int(rank)
        self.degree = int(degree)
        self.weights = weights
        chains = {}
        for x in weights.punctures:
            middles = tuple(flags.get(x, ()))
            lx = weights.levels(x)
            if len(middles) != lx - 1:
                raise ValueError(
                    f"puncture {x!r}: needs {lx - 1} proper chain members, got {len(middles)}"
                )
            full = Subspace.full(field, self.rank)
            zero = Subspace.zero(field, self.rank)
            chain = (full,) + middles + (zero,)
            prev = full
            for s in chain[1:]:
                if s.field != field:
                    raise FieldMismatchError("flag subspace over a different field")
                if s.ambient_dim != self.rank:
                    raise DimensionError("flag subspace in wrong ambient dimension")
                if not prev.contains(s):
                    raise ValueError(f"puncture {x!r}: chain is not nested")
                if strict and s.dim >= prev.dim:
                    raise ValueError(f"puncture {x!r}: chain is not strictly nested")
                prev = s
            chains[x] = chain
        self.chains = chains
        self.strict = strict

    def chain(self, x):
        return self.chains[x]

    def flag_dims(self, x):
        return tuple(s.dim for s in self.chains[x])

    def numerics(self, genus=0) -> ParabolicNumerics:
        if not self.strict:
            raise PreconditionError("numerics requires a strict flag")
        return ParabolicNumerics(
            rank=self.rank,
            degree=self.degree,
            genus=genus,
            weights=self.weights,
            flag_dims={x: self.flag_dims(x) for x in self.weights.punctures},
        )

    def owt_at(self, x) -> Fraction:
        dims = self.flag_dims(x)
        return sum(
            (w * (a - b) for w, a, b in zip(self.weights[x], dims, dims[1:])),
            Fraction(0),
        )

    def owt(self) -> Fraction:
        return sum((self.owt_at(x) for x in self.weights.punctures), Fraction(0))

    def pdeg(self) -> Fraction:
        return self.degree + self.owt()

    def pmu(self) -> Fraction:
        return self.pdeg() / self.rank

    def eta(self) -> Fraction:
        return self.owt() / self.rank


# ---------------------------------------------------------------------------
# induced and quotient structures


def _per_puncture(space: ParabolicSpace, sub):
    """Normalise a subspace or a per-puncture family to (family, common dim)."""
    if isinstance(sub, Subspace):
        return {x: sub for x in space.weights.punctures}, sub.dim
    fam = dict(sub)
    dims = {fam[x].dim for x in space.weights.punctures}
    if len(dims) != 1:
        raise DimensionError("subspace family must have a common dimension")
    return fam, dims.pop()


def induced_substructure(space: ParabolicSpace, sub, degree: int = 0) -> ParabolicSpace:
    """Structure induced on a subspace family: level i becomes W cap E_{x,i},
    rewritten in W's own coordinates, keeping level i's weight.

    All fibers of the family must share one dimension (the sub-object's rank).
    """
    fam, s = _per_puncture(space, sub)
    if s == 0:
        raise PreconditionError("induced structure on the zero subspace")
    flags = {}
    for x in space.weights.punctures:
        w = fam[x]
        if w.ambient_dim != space.rank:
            raise DimensionError("subspace not in the fiber's ambient space")
        middles = [w.restrict_rows(w.intersect(e)) for e in space.chains[x][1:-1]]
        flags[x] = tuple(middles)
    return ParabolicSpace(space.field, s, degree, space.weights, flags, strict=False)


def quotient_structure(space: ParabolicSpace, sub, degree: int | None = None) -> ParabolicSpace:
    """Structure pushed to the quotient fiber: level i becomes the image of
    E_{x,i} under the canonical projection mod W.

    Default quotient degree is the space's own degree minus the (degree-0)
    subspace, i.e. `space.degree`.
    """
    fam, s = _per_puncture(space, sub)
    if s == space.rank:
        raise PreconditionError("quotient by the full space is empty")
    if degree is None:
        degree = space.degree
    flags = {}
    for x in space.weights.punctures:
        w = fam[x]
        proj, _ = quotient_map(w)
        middles = [image(proj, e) for e in space.chains[x][1:-1]]
        flags[x] = tuple(middles)
    return ParabolicSpace(space.field, space.rank - s, degree, space.weights, flags, strict=False)


def direct_sum(a: ParabolicSpace, b: ParabolicSpace) -> ParabolicSpace:
    """Block direct sum; both summands must carry the same weight system."""
    if a.field != b.field:
        raise FieldMismatchError("direct sum over different fields")
    if a.weights != b.weights:
        raise PreconditionError("direct sum requires identical weight systems")
    r = a.rank + b.rank
    flags = {}
    for x in a.weights.punctures:
        middles = []
        for ea, eb in zip(a.chains[x][1:-1], b.chains[x][1:-1]):
            rows = [row + [0] * b.rank for row in ea.basis_rows()]
            rows += [[0] * a.rank + row for row in eb.basis_rows()]
            middles.append(Subspace(a.field, r, rows))
        flags[x] = tuple(middles)
    return ParabolicSpace(
        a.field, r, a.degree + b.degree, a.weights, flags, strict=a.strict and b.strict
    )


# ---------------------------------------------------------------------------
# comparisons


class GiesekerOrder(Enum):
    PRECEDES_STRICTLY = "precedes_strictly"
    PRECEDES_EQ = "precedes_eq"
    EXCEEDS = "exceeds"


def gieseker_leq(f: ParabolicNumerics, e: ParabolicNumerics) -> GiesekerOrder:
    """Compare the rank-normalised weighted Hilbert polynomials of F and E.

    Both polynomials are linear in m with unit slope (same genus required), so
    the comparison is decided by the constant coefficient; it must and does
    agree with the sign of pmu(E) - pmu(F).
    """
    if f.genus != e.genus:
        raise PreconditionError("Gieseker comparison requires equal genus")
    d0 = f.par_hilbert(0) / f.rank - e.par_hilbert(0) / e.rank
    d1 = f.par_hilbert(1) / f.rank - e.par_hilbert(1) / e.rank
    if d0 != d1:
        raise AssertionError("normalised polynomials must differ by a constant")
    if d0 < 0:
        return GiesekerOrder.PRECEDES_STRICTLY
    if d0 == 0:
        return GiesekerOrder.PRECEDES_EQ
    return GiesekerOrder.EXCEEDS


def delta_gap(rank: int, weights: WeightSystem) -> Fraction:
    """Universal positive lower bound 1 / (r! * prod of weight denominators)
    for any nonzero difference of slope expressions built from these weights
    with ranks <= r."""
    denom = math.factorial(rank)
    for w in weights.all_weights():
        denom *= w.denominator
    return Fraction(1, denom)


def min_quotient_slope(space: ParabolicSpace, budget: int | None = None):
    """Minimum slope of a quotient structure of `space`, quantified over all
    proper subspaces W of the fiber (including W = 0, whose quotient is the
    space itself with degree 0), uniformly across punctures.

    Prime fields only (the subspace set over Q is infinite).  Returns
    (slope, witness W) with the lexicographically first witness.
    """
    if not isinstance(space.field, PrimeField):
        raise PreconditionError("exhaustive quotient slopes need a prime field")
    p = space.field.p
    n = space.rank
    budget = resolve_budget(budget)
    total = sum(gaussian_binomial(n, d, p) for d in range(n))
    if total > budget:
        raise BudgetError(total, budget)
    best = None
    best_witness = None
    for d in range(n):
        for arr in enumerate_subspace_arrays(p, n, d):
            w = Subspace._from_rref_array(space.field, arr)
            q = quotient_structure(space, w, degree=0)
            slope = q.pmu()
            if best is None or slope < best:
                best = slope
                best_witness = w
    return best, best_witness
