"""Exact dense linear algebra over Q and small prime fields.

Everything is immutable and canonical: a subspace is represented by the
reduced row echelon form of any spanning set, so two subspaces are equal iff
their representations are identical, and every witness emitted downstream is
reproducible.  Rationals use ``fractions.Fraction`` (arbitrary precision,
overflow-free); F_p data lives in int64 numpy arrays handled by the kernels
in :mod:`parastab.kernels`.

No floating point exists anywhere in this package.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import (
    BudgetError,
    DimensionError,
    FieldMismatchError,
    FieldReductionError,
)

DEFAULT_BUDGET = 10 ** 6

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31)


# ---------------------------------------------------------------------------
# fields


class Rationals:
    """The field Q. Singleton; scalars are fractions.Fraction."""

    name = "Q"

    def __repr__(self):
        return "Q"

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Q")

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def coerce(self, x):
        if isinstance(x, float):
            raise TypeError("floating point is not allowed; use Fraction or int")
        return Fraction(x)


class PrimeField:
    """F_p for a prime p <= 31; scalars are ints in [0, p)."""

    def __init__(self, p: int):
        if p not in _SMALL_PRIMES:
            raise ValueError(f"p must be a prime <= 31, got {p}")
        self.p = p
        self.name = str(p)

    def __repr__(self):
        return f"F_{self.p}"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def coerce(self, x):
        if isinstance(x, float):
            raise TypeError("floating point is not allowed; use Fraction or int")
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise FieldReductionError(
                    f"denominator of {x} vanishes mod {self.p}"
                )
            return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
        return int(x) % self.p


QQ = Rationals()


def _check_same_field(a, b):
    if a.field != b.field:
        raise FieldMismatchError(f"{a.field!r} vs {b.field!r}")


# ---------------------------------------------------------------------------
# Fraction-side echelon helpers


def _rref_frac(rows):
    """RREF over Q. Returns (rows as list of Fraction lists, rank, pivot cols)."""
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    piv = 0
    pivots = []
    for col in range(ncols):
        if piv >= nrows:
            break
        sel = None
        for r in range(piv, nrows):
            if m[r][col] != 0:
                sel = r
                break
        if sel is None:
            continue
        if sel != piv:
            m[piv], m[sel] = m[sel], m[piv]
        f = m[piv][col]
        if f != 1:
            m[piv] = [x / f for x in m[piv]]
        for r in range(nrows):
            if r != piv and m[r][col] != 0:
                g = m[r][col]
                m[r] = [x - g * y for x, y in zip(m[r], m[piv])]
        pivots.append(col)
        piv += 1
    return m, piv, pivots


def _pivot_cols(rows):
    """Pivot columns of an RREF row list (first nonzero entry per row)."""
    out = []
    for r in rows:
        for j, x in enumerate(r):
            if x != 0:
                out.append(j)
                break
    return out


# ---------------------------------------------------------------------------
# matrices


class Matrix:
    """Immutable exact matrix over Q or F_p."""

    __slots__ = ("field", "nrows", "ncols", "_data")

    def __init__(self, field, rows):
        self.field = field
        rows = [list(r) for r in rows]
        self.nrows = len(rows)
        self.ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != self.ncols:
                raise DimensionError("ragged matrix rows")
        if isinstance(field, PrimeField):
            arr = np.array(
                [[field.coerce(x) for x in r] for r in rows], dtype=np.int64
            ).reshape(self.nrows, self.ncols)
            arr.setflags(write=False)
            self._data = arr
        else:
            self._data = tuple(tuple(field.coerce(x) for x in r) for r in rows)

    # -- constructors

    @classmethod
    def identity(cls, field, n):
        if isinstance(field, PrimeField):
            return cls._from_array(field, np.eye(n, dtype=np.int64))
        one, zero = field.one, field.zero
        return cls(field, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, field, nrows, ncols):
        if isinstance(field, PrimeField):
            return cls._from_array(field, np.zeros((nrows, ncols), dtype=np.int64))
        zero = field.zero
        return cls(field, [[zero] * ncols for _ in range(nrows)])

    @classmethod
    def _from_array(cls, field, arr):
        arr = np.ascontiguousarray(arr % field.p, dtype=np.int64)
        arr.setflags(write=False)
        m = object.__new__(cls)
        m.field = field
        m.nrows, m.ncols = arr.shape
        m._data = arr
        return m

    # -- access

    @property
    def array(self):
        """int64 array view (prime fields only)."""
        return self._data

    def rows(self):
        if isinstance(self.field, PrimeField):
            return [[int(x) for x in r] for r in self._data]
        return [list(r) for r in self._data]

    def entry(self, i, j):
        if isinstance(self.field, PrimeField):
            return int(self._data[i, j])
        return self._data[i][j]

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def is_zero(self):
        if isinstance(self.field, PrimeField):
            return not self._data.any()
        return all(x == 0 for r in self._data for x in r)

    def is_square(self):
        return self.nrows == self.ncols

    # -- arithmetic

    def __matmul__(self, other):
        _check_same_field(self, other)
        if self.ncols != other.nrows:
            raise DimensionError(f"matmul {self.shape} @ {other.shape}")
        if isinstance(self.field, PrimeField):
            return Matrix._from_array(
                self.field, kernels.matmul_mod(self._data, other._data, self.field.p)
            )
        zero = self.field.zero
        ot = list(zip(*other._data)) if other._data else []
        out = [
            [sum((a * b for a, b in zip(row, col)), zero) for col in ot]
            for row in self._data
        ]
        return Matrix(self.field, out)

    def __add__(self, other):
        _check_same_field(self, other)
        if self.shape != other.shape:
            raise DimensionError(f"add {self.shape} + {other.shape}")
        if isinstance(self.field, PrimeField):
            return Matrix._from_array(self.field, self._data + other._data)
        return Matrix(
            self.field,
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self._data, other._data)],
        )

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        if isinstance(self.field, PrimeField):
            return Matrix._from_array(self.field, -self._data)
        return Matrix(self.field, [[-a for a in r] for r in self._data])

    def scale(self, c):
        c = self.field.coerce(c)
        if isinstance(self.field, PrimeField):
            return Matrix._from_array(self.field, self._data * c)
        return Matrix(self.field, [[c * a for a in r] for r in self._data])

    def transpose(self):
        if isinstance(self.field, PrimeField):
            return Matrix._from_array(self.field, self._data.T)
        return Matrix(self.field, [list(r) for r in zip(*self._data)] if self._data else [])

    @property
    def T(self):
        return self.transpose()

    def trace(self):
        if not self.is_square():
            raise DimensionError("trace of a non-square matrix")
        if isinstance(self.field, PrimeField):
            return int(np.trace(self._data) % self.field.p)
        return sum((self._data[i][i] for i in range(self.nrows)), self.field.zero)

    def __pow__(self, e):
        if not self.is_square() or e < 0:
            raise DimensionError("pow needs a square matrix and e >= 0")
        result = Matrix.identity(self.field, self.nrows)
        base = self
        while e > 0:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def apply(self, vec):
        """Matrix-vector product; vec is a sequence of scalars."""
        if len(vec) != self.ncols:
            raise DimensionError("vector length mismatch")
        if isinstance(self.field, PrimeField):
            v = np.array([self.field.coerce(x) for x in vec], dtype=np.int64)
            return tuple(int(x) for x in (self._data @ v) % self.field.p)
        vv = [self.field.coerce(x) for x in vec]
        zero = self.field.zero
        return tuple(sum((a * b for a, b in zip(r, vv)), zero) for r in self._data)

    # -- rank / characteristic polynomial

    def rank(self):
        if isinstance(self.field, PrimeField):
            return int(kernels.rank_mod(self._data, self.field.p))
        return _rref_frac(self._data)[1] if self.nrows else 0

    def charpoly(self):
        """Monic characteristic polynomial det(X*I - A), coefficients from the
        leading power down (length n+1). Division-free Berkowitz."""
        if not self.is_square():
            raise DimensionError("charpoly of a non-square matrix")
        n = self.nrows
        if n == 0:
            return (self.field.one,)
        if isinstance(self.field, PrimeField):
            lifted = [[int(x) for x in r] for r in self._data]
            coeffs = _berkowitz(lifted, 0, 1)
            return tuple(c % self.field.p for c in coeffs)
        return _berkowitz([list(r) for r in self._data], self.field.zero, self.field.one)

    def __eq__(self, other):
        if not isinstance(other, Matrix) or self.field != other.field:
            return False
        if isinstance(self.field, PrimeField):
            return self.shape == other.shape and np.array_equal(self._data, other._data)
        return self._data == other._data

    def __hash__(self):
        if isinstance(self.field, PrimeField):
            return hash((self.field, self._data.tobytes(), self.shape))
        return hash((self.field, self._data))

    def __repr__(self):
        return f"Matrix({self.field!r}, {self.rows()})"


def _berkowitz(rows, zero, one):
    n = len(rows)
    coeffs = [one, zero - rows[0][0]]
    for i in range(1, n):
        a = rows[i][i]
        r_row = rows[i][:i]
        c_col = [rows[k][i] for k in range(i)]
        m_sub = [r[:i] for r in rows[:i]]
        s = []
        v = list(c_col)
        for k in range(i):
            s.append(sum((r_row[j] * v[j] for j in range(i)), zero))
            if k < i - 1:
                v = [sum((m_sub[x][y] * v[y] for y in range(i)), zero) for x in range(i)]
        col_t = [one, zero - a] + [zero - x for x in s]
        new = []
        for j in range(i + 2):
            acc = zero
            for k in range(len(coeffs)):
                idx = j - k
                if 0 <= idx < len(col_t):
                    acc = acc + col_t[idx] * coeffs[k]
            new.append(acc)
        coeffs = new
    return tuple(coeffs)


# ---------------------------------------------------------------------------
# subspaces


class Subspace:
    """A linear subspace of F^n, stored as the unique RREF basis of its rows."""

    __slots__ = ("field", "ambient_dim", "_basis", "pivots")

    def __init__(self, field, ambient_dim, rows, _assume_rref=False):
        self.field = field
        self.ambient_dim = ambient_dim
        if isinstance(field, PrimeField):
            rows = list(rows)
            if rows:
                arr = np.array(
                    [[field.coerce(x) for x in r] for r in rows], dtype=np.int64
                )
                if arr.shape[1] != ambient_dim:
                    raise DimensionError("basis row length != ambient dim")
            else:
                arr = np.zeros((0, ambient_dim), dtype=np.int64)
            if len(arr) and not _assume_rref:
                red, rk = kernels.rref_mod(arr, field.p)
                arr = np.ascontiguousarray(red[:rk])
            arr.setflags(write=False)
            self._basis = arr
            self.pivots = tuple(
                int(np.argmax(row != 0)) for row in arr
            )
        else:
            rows = [[field.coerce(x) for x in r] for r in rows]
            for r in rows:
                if len(r) != ambient_dim:
                    raise DimensionError("basis row length != ambient dim")
            if rows and not _assume_rref:
                red, rk, piv = _rref_frac(rows)
                rows = red[:rk]
                self.pivots = tuple(piv)
            else:
                self.pivots = tuple(_pivot_cols(rows))
            self._basis = tuple(tuple(r) for r in rows)

    # -- constructors

    @classmethod
    def zero(cls, field, ambient_dim):
        return cls(field, ambient_dim, [])

    @classmethod
    def full(cls, field, ambient_dim):
        if isinstance(field, PrimeField):
            return cls._from_rref_array(field, np.eye(ambient_dim, dtype=np.int64))
        return cls(
            field,
            ambient_dim,
            Matrix.identity(field, ambient_dim).rows(),
            _assume_rref=True,
        )

    @classmethod
    def _from_rref_array(cls, field, arr):
        arr = np.ascontiguousarray(arr, dtype=np.int64)
        arr.setflags(write=False)
        s = object.__new__(cls)
        s.field = field
        s.ambient_dim = arr.shape[1]
        s._basis = arr
        s.pivots = tuple(int(np.argmax(row != 0)) for row in arr)
        return s

    # -- access

    @property
    def dim(self):
        return len(self._basis)

    def basis_rows(self):
        if isinstance(self.field, PrimeField):
            return [[int(x) for x in r] for r in self._basis]
        return [list(r) for r in self._basis]

    def basis_matrix(self):
        if isinstance(self.field, PrimeField):
            arr = np.asarray(self._basis).reshape(self.dim, self.ambient_dim)
            return Matrix._from_array(self.field, arr)
        return Matrix(self.field, self.basis_rows())

    @property
    def array(self):
        """int64 RREF basis array (prime fields only)."""
        return self._basis

    def is_zero(self):
        return self.dim == 0

    def is_full(self):
        return self.dim == self.ambient_dim

    def sort_key(self):
        """Canonical total order: (dim, flattened RREF entries)."""
        if isinstance(self.field, PrimeField):
            flat = tuple(int(x) for x in np.asarray(self._basis).ravel())
        else:
            flat = tuple(x for r in self._basis for x in r)
        return (self.dim, flat)

    # -- membership

    def contains_vector(self, vec):
        if len(vec) != self.ambient_dim:
            raise DimensionError("vector length != ambient dim")
        if isinstance(self.field, PrimeField):
            v = np.array([[self.field.coerce(x) for x in vec]], dtype=np.int64)
            return bool(kernels.rows_in_span_mod(np.asarray(self._basis), v, self.field.p))
        red = [self.field.coerce(x) for x in vec]
        for row, c in zip(self._basis, self.pivots):
            if red[c] != 0:
                f = red[c]
                red = [x - f * y for x, y in zip(red, row)]
        return all(x == 0 for x in red)

    def contains(self, other):
        _check_same_field(self, other)
        if other.ambient_dim != self.ambient_dim:
            raise DimensionError("ambient dimension mismatch")
        if isinstance(self.field, PrimeField):
            if other.dim == 0:
                return True
            return bool(
                kernels.rows_in_span_mod(
                    np.asarray(self._basis), np.asarray(other._basis), self.field.p
                )
            )
        return all(self.contains_vector(r) for r in other._basis)

    # -- lattice operations

    def __add__(self, other):
        """Sum of subspaces (span of the union)."""
        _check_same_field(self, other)
        if other.ambient_dim != self.ambient_dim:
            raise DimensionError("ambient dimension mismatch")
        return Subspace(
            self.field, self.ambient_dim, self.basis_rows() + other.basis_rows()
        )

    def intersect(self, other):
        """Intersection, via the left null space of the stacked bases."""
        _check_same_field(self, other)
        if other.ambient_dim != self.ambient_dim:
            raise DimensionError("ambient dimension mismatch")
        if self.is_zero() or other.is_zero():
            return Subspace.zero(self.field, self.ambient_dim)
        if self.is_full():
            return other
        if other.is_full():
            return self
        stacked = Matrix(self.field, self.basis_rows() + other.basis_rows())
        ln = kernel(stacked.T)  # rows (a, b) with a*U + b*W = 0
        k = self.dim
        rows = []
        basis = self.basis_rows()
        for coeffs in ln.basis_rows():
            a = coeffs[:k]
            vec = [
                sum((a[i] * basis[i][j] for i in range(k)), self.field.zero)
                for j in range(self.ambient_dim)
            ]
            rows.append(vec)
        return Subspace(self.field, self.ambient_dim, rows)

    def image_under(self, mat: Matrix):
        """Image of this subspace under the linear map `mat` (rows -> F^mat.nrows)."""
        return image(mat, self)

    def coords_in_basis(self, vec):
        """Coordinates of `vec` in the RREF basis; vec must lie in the subspace."""
        coords = [vec[c] for c in self.pivots]
        return tuple(coords)

    def restrict_rows(self, sub):
        """Express `sub` (contained in self) in this subspace's coordinates.

        Valid because the RREF basis has identity on its pivot columns, so the
        coefficient of basis row i in any member vector is its pivot-i entry.
        """
        rows = [[r[c] for c in self.pivots] for r in sub.basis_rows()]
        return Subspace(self.field, self.dim, rows)

    def __eq__(self, other):
        if not isinstance(other, Subspace) or self.field != other.field:
            return False
        if self.ambient_dim != other.ambient_dim:
            return False
        if isinstance(self.field, PrimeField):
            return np.array_equal(self._basis, other._basis)
        return self._basis == other._basis

    def __hash__(self):
        if isinstance(self.field, PrimeField):
            return hash((self.field, self.ambient_dim, np.asarray(self._basis).tobytes()))
        return hash((self.field, self.ambient_dim, self._basis))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, basis={self.basis_rows()})"


# ---------------------------------------------------------------------------
# maps between spaces


def image(mat: Matrix, sub: Subspace) -> Subspace:
    """Image of a subspace under a linear map. Ambient of the result = mat.nrows."""
    if mat.field != sub.field:
        raise FieldMismatchError(f"{mat.field!r} vs {sub.field!r}")
    if mat.ncols != sub.ambient_dim:
        raise DimensionError(
            f"map expects dimension {mat.ncols}, subspace lives in {sub.ambient_dim}"
        )
    if sub.dim == 0:
        return Subspace.zero(mat.field, mat.nrows)
    if isinstance(mat.field, PrimeField):
        rows = kernels.matmul_mod(np.asarray(sub._basis), mat._data.T.copy(), mat.field.p)
        return Subspace(mat.field, mat.nrows, rows)
    out = [mat.apply(r) for r in sub.basis_rows()]
    return Subspace(mat.field, mat.nrows, out)


def kernel(mat: Matrix) -> Subspace:
    """Right null space {x : mat @ x = 0} as a subspace of F^ncols."""
    n = mat.ncols
    if mat.nrows == 0:
        return Subspace.full(mat.field, n)
    if isinstance(mat.field, PrimeField):
        p = mat.field.p
        red, rk = kernels.rref_mod(np.asarray(mat._data), p)
        red = red[:rk]
        piv = [int(np.argmax(row != 0)) for row in red]
        free = [j for j in range(n) if j not in piv]
        rows = []
        for j in free:
            v = np.zeros(n, dtype=np.int64)
            v[j] = 1
            for r, c in enumerate(piv):
                v[c] = (-int(red[r, j])) % p
            rows.append(v)
        return Subspace(mat.field, n, np.array(rows, dtype=np.int64).reshape(len(rows), n))
    red, rk, piv = _rref_frac(mat._data)
    red = red[:rk]
    free = [j for j in range(n) if j not in piv]
    rows = []
    for j in free:
        v = [Fraction(0)] * n
        v[j] = Fraction(1)
        for r, c in enumerate(piv):
            v[c] = -red[r][j]
        rows.append(v)
    return Subspace(mat.field, n, rows)


def quotient_map(sub: Subspace):
    """Canonical projection F^n -> F^n / sub and its standard section.

    Returns (proj, lift): proj is (n-k) x n sending v to its coordinates in the
    basis {e_j + sub : j not a pivot column of sub}; lift is n x (n-k) with
    proj @ lift = identity.  Deterministic because the RREF basis is.
    """
    field, n, k = sub.field, sub.ambient_dim, sub.dim
    piv = set(sub.pivots)
    free = [j for j in range(n) if j not in piv]
    basis = sub.basis_rows()
    proj_rows = []
    for j in free:
        row = [field.zero] * n
        row[j] = field.one
        for r, c in enumerate(sub.pivots):
            row[c] = -basis[r][j]
        proj_rows.append(row)
    lift_rows = [[field.one if free[a] == i else field.zero for a in range(len(free))] for i in range(n)]
    proj = Matrix(field, proj_rows) if proj_rows else Matrix.zeros(field, 0, n)
    lift = Matrix(field, lift_rows) if n else Matrix.zeros(field, 0, 0)
    return proj, lift


# ---------------------------------------------------------------------------
# exhaustive subspace enumeration over F_p


def gaussian_binomial(n: int, d: int, q: int) -> int:
    """Number of d-dimensional subspaces of F_q^n (exact integer)."""
    if d < 0 or d > n:
        return 0
    num = 1
    den = 1
    for i in range(d):
        num *= q ** n - q ** i
        den *= q ** d - q ** i
    return num // den


def total_subspace_count(n: int, q: int) -> int:
    return sum(gaussian_binomial(n, d, q) for d in range(n + 1))


def enumerate_subspace_arrays(p: int, n: int, d: int) -> np.ndarray:
    """All d-dim subspaces of F_p^n as a stacked (N, d, n) array of RREF bases,
    ordered by ascending flattened-entry tuples."""
    if d == 0:
        return np.zeros((1, 0, n), dtype=np.int64)
    out = []
    for pivots in itertools.combinations(range(n), d):
        free_pos = [
            (i, j)
            for i in range(d)
            for j in range(n)
            if j > pivots[i] and j not in pivots
        ]
        base = np.zeros((d, n), dtype=np.int64)
        for i, c in enumerate(pivots):
            base[i, c] = 1
        for vals in itertools.product(range(p), repeat=len(free_pos)):
            b = base.copy()
            for (i, j), v in zip(free_pos, vals):
                b[i, j] = v
            out.append(b)
    arr = np.stack(out)
    keys = arr.reshape(len(out), d * n)
    order = np.lexsort(keys.T[::-1])
    return np.ascontiguousarray(arr[order])


def enumerate_subspaces(field: PrimeField, n: int, d: int, budget: int | None = None):
    """All d-dim subspaces of F_p^n, canonical RREF, lexicographic order.

    The count is checked against `budget` (default 10^6 visits, env
    PARASTAB_BUDGET) before any generation happens.
    """
    if not isinstance(field, PrimeField):
        raise PreconditionTypeError()
    if d > n or d < 0:
        raise DimensionError(f"need 0 <= d <= n, got d={d}, n={n}")
    budget = resolve_budget(budget)
    count = gaussian_binomial(n, d, field.p)
    if count > budget:
        raise BudgetError(count, budget)
    arr = enumerate_subspace_arrays(field.p, n, d)
    return [Subspace._from_rref_array(field, b) for b in arr]


class PreconditionTypeError(TypeError):
    def __init__(self):
        super().__init__("enumeration is only available over prime fields")


def resolve_budget(budget: int | None) -> int:
    if budget is not None:
        return budget
    import os

    env = os.environ.get("PARASTAB_BUDGET")
    return int(env) if env else DEFAULT_BUDGET
