"""Exact integer linear algebra and finitely generated abelian groups.

Every group is stored in Smith-normal-form coordinates: generators
``e_1, ..., e_n`` where the first ``k`` have orders ``d_1 | d_2 | ... | d_k``
(all ``>= 2``) and the rest are free.  Elements are integer vectors in these
coordinates with torsion entries reduced into ``[0, d_i)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import DimensionMismatch, InfiniteGroup, ParentMismatch


class IntMatrix:
    """Immutable dense matrix of Python integers."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, data: Iterable[Iterable[int]] = (), rows: int | None = None,
                 cols: int | None = None):
        tdata = tuple(tuple(int(x) for x in r) for r in data)
        if rows is None:
            rows = len(tdata)
        if cols is None:
            cols = len(tdata[0]) if tdata else 0
        if len(tdata) != rows or any(len(r) != cols for r in tdata):
            raise DimensionMismatch(f"entries do not form a {rows}x{cols} matrix")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "_data", tdata)

    def __setattr__(self, name, value):
        raise AttributeError("IntMatrix is immutable")

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(([int(i == j) for j in range(n)] for i in range(n)), n, n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(([0] * cols for _ in range(rows)), rows, cols)

    @classmethod
    def diag(cls, entries: Sequence[int], rows: int | None = None,
             cols: int | None = None) -> IntMatrix:
        rows = len(entries) if rows is None else rows
        cols = len(entries) if cols is None else cols
        out = [[0] * cols for _ in range(rows)]
        for i, d in enumerate(entries):
            out[i][i] = d
        return cls(out, rows, cols)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> IntMatrix:
        return cls(([c[i] for c in columns] for i in range(rows)), rows, len(columns))

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._data]

    def row(self, i: int) -> tuple[int, ...]:
        return self._data[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._data)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def __getitem__(self, ij):
        i, j = ij
        return self._data[i][j]

    @property
    def T(self) -> IntMatrix:
        return IntMatrix(zip(*self._data), self.cols, self.rows) if self.rows else \
            IntMatrix.zeros(self.cols, 0)

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        ocols = other.columns()
        return IntMatrix(([sum(a * b for a, b in zip(r, c)) for c in ocols]
                          for r in self._data), self.rows, other.cols)

    def apply(self, vec: Sequence[int]) -> tuple[int, ...]:
        if len(vec) != self.cols:
            raise DimensionMismatch(f"vector of length {len(vec)} for {self.shape} matrix")
        return tuple(sum(a * b for a, b in zip(r, vec)) for r in self._data)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._data for x in r)

    def hstack(self, other: IntMatrix) -> IntMatrix:
        if self.rows != other.rows:
            raise DimensionMismatch("hstack needs equal row counts")
        return IntMatrix((a + b for a, b in zip(self._data, other._data)),
                         self.rows, self.cols + other.cols)

    def vstack(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.cols:
            raise DimensionMismatch("vstack needs equal column counts")
        return IntMatrix(self._data + other._data, self.rows + other.rows, self.cols)

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self):
        return hash((self.shape, self._data))

    def __repr__(self):
        return f"IntMatrix({self.tolist()!r}, rows={self.rows}, cols={self.cols})"


def determinant(m: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = m.rows
    if n != m.cols:
        raise DimensionMismatch("determinant of a non-square matrix")
    if n == 0:
        return 1
    a = m.tolist()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            ri, rk = a[i], a[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * akk - aik * rk[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``g = gcd(a, b) >= 0`` and ``s*a + t*b = g``."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        return -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _nearest_quotient(v: int, p: int) -> int:
    if p > 0:
        return (2 * v + p) // (2 * p)
    return (-2 * v - p) // (-2 * p)


@dataclass(frozen=True)
class SmithForm:
    """Result of :func:`smith_normal_form`: ``U @ m @ V == D``."""

    D: IntMatrix
    U: IntMatrix
    V: IntMatrix
    V_inv: IntMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.D[i, i] for i in range(min(self.D.shape)))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


def _snf_lists(a, m, n):
    """In-place Smith reduction of the list-of-lists ``a``.

    Returns ``(a, U, VT, Vinv)`` where ``VT`` holds the columns of ``V`` as rows.
    """
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    VT = [[int(i == j) for j in range(n)] for i in range(n)]
    Vi = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_cols(j, k):
        if j == k:
            return
        for row in a:
            row[j], row[k] = row[k], row[j]
        VT[j], VT[k] = VT[k], VT[j]
        Vi[j], Vi[k] = Vi[k], Vi[j]

    def swap_rows(i, k):
        if i != k:
            a[i], a[k] = a[k], a[i]
            U[i], U[k] = U[k], U[i]

    t = 0
    r = min(m, n)
    while t < r:
        # minimal nonzero pivot in the trailing block
        best = 0
        bi = bj = -1
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                v = row[j]
                if v:
                    av = v if v > 0 else -v
                    if best == 0 or av < best:
                        best, bi, bj = av, i, j
                        if av == 1:
                            break
            if best == 1:
                break
        if best == 0:
            break
        swap_rows(t, bi)
        swap_cols(t, bj)
        while True:
            p = a[t][t]
            pivot_row = a[t]
            dirty = False
            for i in range(t + 1, m):
                v = a[i][t]
                if v:
                    q = _nearest_quotient(v, p)
                    if q:
                        ri = a[i]
                        a[i] = ri[:t] + [x - q * y for x, y in zip(ri[t:], pivot_row[t:])]
                        ui, ut = U[i], U[t]
                        U[i] = [x - q * y for x, y in zip(ui, ut)]
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                v = pivot_row[j]
                if v:
                    q = _nearest_quotient(v, p)
                    if q:
                        for i in range(t, m):
                            c = a[i][t]
                            if c:
                                a[i][j] -= q * c
                        VT[j] = [x - q * y for x, y in zip(VT[j], VT[t])]
                        Vi[t] = [x + q * y for x, y in zip(Vi[t], Vi[j])]
                    if pivot_row[j]:
                        dirty = True
            if not dirty:
                break
            # a smaller remainder now sits in row t or column t; make it the pivot
            best = abs(a[t][t])
            bi, bj = t, t
            for i in range(t + 1, m):
                v = abs(a[i][t])
                if v and v < best:
                    best, bi, bj = v, i, t
            for j in range(t + 1, n):
                v = abs(a[t][j])
                if v and v < best:
                    best, bi, bj = v, t, j
            swap_rows(t, bi)
            swap_cols(t, bj)
        t += 1

    rank = t
    for i in range(rank):
        if a[i][i] < 0:
            a[i][i] = -a[i][i]
            U[i] = [-x for x in U[i]]

    # enforce the divisibility chain with 2x2 unimodular moves
    for i in range(rank):
        for j in range(i + 1, rank):
            x, y = a[i][i], a[j][j]
            if y % x == 0:
                continue
            g, s, tt = xgcd(x, y)
            xg, yg = x // g, y // g
            ui, uj = U[i], U[j]
            U[i] = [s * p + tt * q for p, q in zip(ui, uj)]
            U[j] = [-yg * p + xg * q for p, q in zip(ui, uj)]
            vi, vj = VT[i], VT[j]
            VT[i] = [p + q for p, q in zip(vi, vj)]
            VT[j] = [-tt * yg * p + s * xg * q for p, q in zip(vi, vj)]
            wi, wj = Vi[i], Vi[j]
            Vi[i] = [s * xg * p + tt * yg * q for p, q in zip(wi, wj)]
            Vi[j] = [q - p for p, q in zip(wi, wj)]
            a[i][i] = g
            a[j][j] = x * yg
    return a, U, VT, Vi


def smith_normal_form(m: IntMatrix) -> SmithForm:
    """Smith normal form with unimodular certificates.

    Returns ``SmithForm(D, U, V, V_inv)`` with ``U @ m @ V == D``, ``D``
    diagonal, nonnegative, each nonzero diagonal entry dividing the next, zeros
    last.  ``V_inv`` is the exact inverse of ``V``.
    """
    rows, cols = m.shape
    a, U, VT, Vi = _snf_lists(m.tolist(), rows, cols)
    diag = [a[i][i] for i in range(min(rows, cols))]
    return SmithForm(
        D=IntMatrix.diag(diag, rows, cols),
        U=IntMatrix(U, rows, rows),
        V=IntMatrix(VT, cols, cols).T,
        V_inv=IntMatrix(Vi, cols, cols),
    )


def integer_kernel(m: IntMatrix) -> IntMatrix:
    """Basis of ``{x in Z^cols : m x = 0}`` as the columns of the result."""
    sf = smith_normal_form(m)
    r = sf.rank
    cols = [sf.V.column(j) for j in range(r, m.cols)]
    return IntMatrix.from_columns(cols, m.cols)


def solve_integer(m: IntMatrix, b: Sequence[int]) -> tuple[int, ...] | None:
    """Some integer ``x`` with ``m x = b``, or ``None`` when none exists.

    The solution returned has every free Smith coordinate set to zero, so it
    is a deterministic function of ``(m, b)``.
    """
    return _solve_with(smith_normal_form(m), m.cols, b)


def _solve_with(sf: SmithForm, ncols: int, b: Sequence[int]) -> tuple[int, ...] | None:
    ub = sf.U.apply(b)
    diag = sf.diagonal
    y = [0] * ncols
    for i, c in enumerate(ub):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if c != 0:
                return None
        else:
            if c % d:
                return None
            y[i] = c // d
    return sf.V.apply(y)


# ---------------------------------------------------------------------------
# groups


@dataclass(frozen=True, eq=False)
class FgAbGroup:
    """``Z/d_1 + ... + Z/d_k + Z^free_rank`` in canonical coordinates.

    When built from a presentation, ``to_canonical`` maps presentation
    generators to canonical coordinates and ``from_canonical`` gives a
    presentation-coordinate representative of each canonical generator.
    """

    invariant_factors: tuple[int, ...]
    free_rank: int
    presentation: IntMatrix | None = field(default=None, repr=False)
    snf_certificate: tuple[IntMatrix, IntMatrix] | None = field(default=None, repr=False)
    to_canonical: IntMatrix | None = field(default=None, repr=False)
    from_canonical: IntMatrix | None = field(default=None, repr=False)

    def __post_init__(self):
        prev = 1
        for d in self.invariant_factors:
            if d < 2 or d % prev:
                raise ValueError(f"bad invariant factors {self.invariant_factors}")
            prev = d
        if self.free_rank < 0:
            raise ValueError("negative free rank")

    @property
    def ngens(self) -> int:
        return len(self.invariant_factors) + self.free_rank

    @property
    def moduli(self) -> tuple[int, ...]:
        """Order of each canonical generator, ``0`` for free ones."""
        return self.invariant_factors + (0,) * self.free_rank

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def is_trivial(self) -> bool:
        return self.ngens == 0

    @property
    def order(self) -> int | None:
        return math.prod(self.invariant_factors) if self.is_finite else None

    @property
    def exponent(self) -> int:
        """Annihilator of the torsion part (``1`` if torsion-free)."""
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def key(self) -> tuple:
        return (self.invariant_factors, self.free_rank)

    def __eq__(self, other):
        if not isinstance(other, FgAbGroup):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"FgAbGroup({self})"

    def __str__(self):
        parts = [f"Z/{d}" for d in self.invariant_factors]
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"

    def reduce(self, coords: Sequence[int]) -> tuple[int, ...]:
        if len(coords) != self.ngens:
            raise DimensionMismatch(
                f"{len(coords)} coordinates for a group with {self.ngens} generators")
        return tuple(c % d if d else c for c, d in zip(coords, self.moduli))

    def element(self, coords: Sequence[int]) -> GroupElement:
        return GroupElement(self, tuple(coords))

    def zero(self) -> GroupElement:
        return GroupElement(self, (0,) * self.ngens)

    def gen(self, i: int) -> GroupElement:
        return GroupElement(self, tuple(int(i == j) for j in range(self.ngens)))

    def gens(self) -> list[GroupElement]:
        return [self.gen(i) for i in range(self.ngens)]

    def contains(self, x: GroupElement) -> bool:
        return x.parent == self

    def elements(self) -> Iterator[GroupElement]:
        """Each element exactly once, in lexicographic coordinate order."""
        if not self.is_finite:
            raise InfiniteGroup(f"{self} has free rank {self.free_rank}")
        for coords in itertools.product(*(range(d) for d in self.invariant_factors)):
            yield GroupElement(self, coords, _normalized=True)

    def from_presentation_coords(self, vec: Sequence[int]) -> GroupElement:
        """Image of a vector in presentation coordinates."""
        tc = self.to_canonical or IntMatrix.identity(self.ngens)
        return self.element(tc.apply(vec))


def cyclic(n: int) -> FgAbGroup:
    """``Z/n`` (``n = 0`` gives ``Z``, ``n = 1`` the trivial group)."""
    n = abs(n)
    if n == 0:
        return FgAbGroup((), 1)
    if n == 1:
        return FgAbGroup((), 0)
    return FgAbGroup((n,), 0)


def free(rank: int) -> FgAbGroup:
    return FgAbGroup((), rank)


def trivial() -> FgAbGroup:
    return FgAbGroup((), 0)


def abelian_group(invariant_factors: Sequence[int] = (), free_rank: int = 0) -> FgAbGroup:
    """Group from a list of cyclic orders in any order (factors of 1 are dropped)."""
    rels = [[0] * i + [d] + [0] * (len(invariant_factors) - i - 1 + free_rank)
            for i, d in enumerate(invariant_factors)]
    n = len(invariant_factors) + free_rank
    return group_from_presentation(IntMatrix(rels, len(rels), n), n)


@dataclass(frozen=True)
class GroupElement:
    parent: FgAbGroup
    coords: tuple[int, ...]
    _normalized: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        if not self._normalized:
            object.__setattr__(self, "coords", self.parent.reduce(self.coords))
            object.__setattr__(self, "_normalized", True)

    def _check(self, other: GroupElement):
        if not isinstance(other, GroupElement):
            raise TypeError(f"expected a group element, got {type(other).__name__}")
        if other.parent != self.parent:
            raise ParentMismatch(f"elements of {self.parent} and {other.parent}")

    def __add__(self, other: GroupElement) -> GroupElement:
        self._check(other)
        return GroupElement(self.parent, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: GroupElement) -> GroupElement:
        self._check(other)
        return GroupElement(self.parent, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> GroupElement:
        return GroupElement(self.parent, tuple(-a for a in self.coords))

    def __rmul__(self, k: int) -> GroupElement:
        if not isinstance(k, int):
            return NotImplemented
        return GroupElement(self.parent, tuple(k * a for a in self.coords))

    __mul__ = __rmul__

    def is_zero(self) -> bool:
        return not any(self.coords)

    def normalize(self) -> GroupElement:
        return GroupElement(self.parent, self.coords)

    def order(self) -> int:
        """Additive order, ``0`` for elements of infinite order."""
        o = 1
        for c, d in zip(self.coords, self.parent.moduli):
            if c:
                if d == 0:
                    return 0
                o = math.lcm(o, d // math.gcd(c, d))
        return o

    def __repr__(self):
        return f"{list(self.coords)} in {self.parent}"


def group_from_presentation(relations: IntMatrix, ngens: int) -> FgAbGroup:
    """The group ``Z^ngens / rowspan(relations)`` in canonical form."""
    if relations.cols != ngens:
        raise DimensionMismatch(
            f"relation matrix has {relations.cols} columns but {ngens} generators")
    sf = smith_normal_form(relations)
    diag = list(sf.diagonal) + [0] * (ngens - len(sf.diagonal))
    keep_t = [i for i, d in enumerate(diag) if d > 1]
    keep_f = [i for i, d in enumerate(diag) if d == 0]
    keep = keep_t + keep_f
    # a row vector x maps to x V, i.e. the column vector x maps to V^T x
    vt = sf.V.T
    to_can = IntMatrix((vt.row(i) for i in keep), len(keep), ngens)
    from_can = IntMatrix.from_columns([sf.V_inv.row(i) for i in keep], ngens)
    inv = tuple(diag[i] for i in keep_t)
    to_can = IntMatrix(([x % d for x in r] if d else r
                        for r, d in zip(to_can.tolist(), inv + (0,) * len(keep_f))),
                       len(keep), ngens)
    return FgAbGroup(inv, len(keep_f), relations, (sf.U, sf.V), to_can, from_can)


def direct_sum(g: FgAbGroup, h: FgAbGroup):
    """``g + h`` with its inclusions and projections (see :func:`direct_sum_many`)."""
    s, incs, projs = direct_sum_many([g, h])
    return s, incs, projs


def direct_sum_many(groups: Sequence[FgAbGroup]):
    """Biproduct of ``groups`` as ``(S, inclusions, projections)``.

    Inclusions and projections are :class:`ksix.homalg.GroupHom` values.
    """
    from .homalg import GroupHom

    n = sum(g.ngens for g in groups)
    rels = []
    offset = 0
    for g in groups:
        for i, d in enumerate(g.moduli):
            if d:
                row = [0] * n
                row[offset + i] = d
                rels.append(row)
        offset += g.ngens
    s = group_from_presentation(IntMatrix(rels, len(rels), n), n)
    tc, fc = s.to_canonical, s.from_canonical
    incs, projs = [], []
    offset = 0
    for g in groups:
        k = g.ngens
        incs.append(GroupHom(g, s, IntMatrix.from_columns(
            [tc.column(offset + j) for j in range(k)], s.ngens)))
        projs.append(GroupHom(s, g, IntMatrix(
            (fc.row(offset + i) for i in range(k)), k, s.ngens)))
        offset += k
    return s, incs, projs
