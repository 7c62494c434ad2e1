"""Ordered K0 data, the unital invariants built on six-term sequences, and isomorphism search.

Every decision here is three-valued.  ``Yes`` and ``No`` are always backed by
an exact certificate (a coefficient vector, an exhaustive enumeration, or an
integral separating functional); ``Unknown`` means the candidate budget ran
out first.
"""

from __future__ import annotations

import enum
import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .abgroup import (
    FgAbGroup,
    GroupElement,
    IntMatrix,
    abelian_group,
    determinant,
    free,
    smith_normal_form,
    solve_integer,
)
from .errors import ParentMismatch, PreconditionViolated, SoundnessFailure, UnitIncompatible
from .homalg import GroupHom, ShortExactSeq, Subgroup, pointed_hom_group, subgroup_generated
from .sixterm import SixTermSequence, congruence_witness

DEFAULT_BOUND = 10_000


class Verdict(str, enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Decision:
    verdict: Verdict
    witness: object = None
    detail: str = ""

    @property
    def yes(self) -> bool:
        return self.verdict is Verdict.YES

    @property
    def no(self) -> bool:
        return self.verdict is Verdict.NO


YES = Decision(Verdict.YES)
UNKNOWN = Decision(Verdict.UNKNOWN)


def _no(detail: str) -> Decision:
    return Decision(Verdict.NO, detail=detail)


def all_of(decisions) -> Decision:
    """Conjunction, short-circuiting on the first ``No``."""
    unknown = None
    for d in decisions:
        if d.no:
            return d
        if d.verdict is Verdict.UNKNOWN and unknown is None:
            unknown = d
    return unknown or YES


def any_of(decisions) -> Decision:
    """Disjunction, short-circuiting on the first ``Yes``."""
    unknown = None
    for d in decisions:
        if d.yes:
            return d
        if d.verdict is Verdict.UNKNOWN and unknown is None:
            unknown = d
    return unknown or _no("no alternative holds")


class Budget:
    """Shared counter of candidate evaluations."""

    def __init__(self, bound: int):
        self.left = max(0, int(bound))
        self.exhausted = False

    def spend(self, n: int = 1) -> bool:
        if self.left < n:
            self.exhausted = True
            self.left = 0
            return False
        self.left -= n
        return True


# ---------------------------------------------------------------------------
# ordered groups


@dataclass(frozen=True)
class FullCone:
    """Scale equal to the whole positive cone."""


@dataclass(frozen=True)
class IntervalBelow:
    unit: GroupElement


@dataclass(frozen=True)
class ExplicitGens:
    """Scale ``{x : 0 <= x <= s for some listed s}``."""

    gens: tuple[GroupElement, ...]


Scale = FullCone | IntervalBelow | ExplicitGens


@dataclass(frozen=True, eq=False)
class OrderedGroup:
    """A group with a finitely generated positive cone and a scale.

    Zero cone generators are dropped; an empty list gives the cone ``{0}``.
    """

    group: FgAbGroup
    cone_gens: tuple[GroupElement, ...]
    scale: Scale = FullCone()

    def __post_init__(self):
        gens = tuple(x for x in self.cone_gens if not x.is_zero())
        for x in gens:
            if x.parent != self.group:
                raise ParentMismatch(f"cone generator {x} is not in {self.group}")
        object.__setattr__(self, "cone_gens", gens)
        for s in self.scale_tops():
            if s.parent != self.group:
                raise ParentMismatch(f"scale element {s} is not in {self.group}")

    @classmethod
    def standard(cls, group: FgAbGroup, scale: Scale = FullCone()) -> OrderedGroup:
        """Cone spanned by the canonical generators (``N^r`` plus all torsion)."""
        return cls(group, tuple(group.gens()), scale)

    @classmethod
    def full(cls, group: FgAbGroup, scale: Scale = FullCone()) -> OrderedGroup:
        """Every element positive."""
        return cls(group, tuple(group.gens()) + tuple(-x for x in group.gens()), scale)

    def scale_tops(self) -> tuple[GroupElement, ...]:
        if isinstance(self.scale, IntervalBelow):
            return (self.scale.unit,)
        if isinstance(self.scale, ExplicitGens):
            return tuple(self.scale.gens)
        return ()

    @functools.cached_property
    def _generator_map(self) -> GroupHom:
        return GroupHom.from_images(free(len(self.cone_gens)), self.group, list(self.cone_gens))


def cone_contains(og: OrderedGroup, x: GroupElement, bound: int = DEFAULT_BOUND) -> Decision:
    """Decide whether ``x`` is a nonnegative integer combination of the cone generators.

    A ``Yes`` carries the coefficient tuple as witness.
    """
    g = og.group
    if x.parent != g:
        raise ParentMismatch(f"{x} is not in {g}")
    gens = og.cone_gens
    m = len(gens)
    if x.is_zero():
        return Decision(Verdict.YES, (0,) * m)
    if m == 0:
        return _no("the cone is {0}")
    combo = og._generator_map.preimage(x)
    if combo is None:
        return _no("not in the subgroup generated by the cone")
    if g.is_finite:
        # every generator has finite order, so the monoid is the subgroup
        return Decision(Verdict.YES, tuple(c % v.order() for c, v in zip(combo.coords, gens)))
    return _infinite_cone_contains(og, x, bound)


def _free_part(g: FgAbGroup, x: GroupElement) -> tuple[int, ...]:
    return x.coords[len(g.invariant_factors):]


def _infinite_cone_contains(og: OrderedGroup, x: GroupElement, bound: int) -> Decision:
    g = og.group
    gens = og.cone_gens
    fparts = [_free_part(g, v) for v in gens]
    xf = _free_part(g, x)
    moving = [i for i, f in enumerate(fparts) if any(f)]
    still = [gens[i] for i, f in enumerate(fparts) if not any(f)]
    # torsion generators span a finite subgroup that the monoid contains entirely
    _, tincl = subgroup_generated(g, [v.coords for v in still])
    torsion_part = Subgroup(tincl)

    def finish(coeffs: dict[int, int]) -> Decision:
        rest = x
        for i, c in coeffs.items():
            rest = rest - c * gens[i]
        if not torsion_part.contains(rest):
            return _no("residue outside the torsion span")
        full_coeffs = [coeffs.get(i, 0) for i in range(len(gens))]
        if still:
            sol = GroupHom.from_images(free(len(still)), g, still).lift(rest)
            for j, i in enumerate(i for i, f in enumerate(fparts) if not any(f)):
                full_coeffs[i] = sol.coords[j] % gens[i].order()
        return Decision(Verdict.YES, tuple(full_coeffs))

    if not moving:
        if any(xf):
            return _no("free part is nonzero but every generator is torsion")
        return finish({})

    cols = [fparts[i] for i in moving]
    if _column_rank(cols) == len(cols):
        # simplicial: the free part determines the coefficients
        sol = solve_integer(IntMatrix.from_columns(cols, len(xf)), xf)
        if sol is None:
            return _no("no integral solution for the free part")
        if any(c < 0 for c in sol):
            return _no("the unique solution has a negative coefficient")
        return finish(dict(zip(moving, sol)))

    sep = _separating_functional(cols, xf)
    if sep is not None:
        return _no(f"separated by the functional {list(sep)}")

    budget = Budget(bound)
    lineal = _lineality(cols)
    weight = None if lineal is None else _strict_functional(cols, lineal[0])
    if weight is not None:
        lin_cols, rel = lineal
        lin_idx = [moving[i] for i in lin_cols]
        rel = {moving[i]: r for i, r in zip(lin_cols, rel)}
        # the relation vanishes on free parts; clear what it leaves in the torsion
        residue = g.zero()
        for i, r in rel.items():
            residue = residue + r * gens[i]
        rel = {i: r * residue.order() for i, r in rel.items()}
        rest_idx = [i for i, f in enumerate(fparts) if not any(f)] + lin_idx
        pointed = [j for j in range(len(cols)) if j not in lin_cols]
        lineal_group = Subgroup(subgroup_generated(g, [gens[i].coords for i in rest_idx])[1])

        def finish_lineal(coeffs: dict[int, int]) -> Decision:
            rest = x
            for i, c in coeffs.items():
                rest = rest - c * gens[i]
            if not lineal_group.contains(rest):
                return _no("residue outside the lineality group")
            full_coeffs = [coeffs.get(i, 0) for i in range(len(gens))]
            if rest_idx:
                sol = GroupHom.from_images(free(len(rest_idx)), g,
                                           [gens[i] for i in rest_idx]).lift(rest)
                for i, z in zip(rest_idx, sol.coords):
                    full_coeffs[i] = z % gens[i].order() if i not in rel else z
                # lift the lineality coefficients with a positive relation
                k = max([0] + [-(full_coeffs[i] // rel[i]) for i in lin_idx])
                for i in lin_idx:
                    full_coeffs[i] += k * rel[i]
            total = g.zero()
            for c, v in zip(full_coeffs, gens):
                total = total + c * v
            if total != x or any(c < 0 for c in full_coeffs):
                raise SoundnessFailure("cone witness does not reproduce the element")
            return Decision(Verdict.YES, tuple(full_coeffs))

        # the weight vanishes on the lineality space, so sum_i c_i w_i = <weight, xf>
        p_cols = [cols[j] for j in pointed]
        w = [sum(a * b for a, b in zip(weight, c)) for c in p_cols]
        total = sum(a * b for a, b in zip(weight, xf))
        if total < 0:
            return _no("the functional is negative on the element")
        found = _bounded_search(p_cols, xf, w, total, budget, finish_lineal,
                                [moving[j] for j in pointed], check_sum=False)
        if found is not None:
            return found
        if budget.exhausted:
            return Decision(Verdict.UNKNOWN, detail="coefficient search exceeded the bound")
        return _no("exhaustive coefficient search failed")

    # no certified functional; search by increasing total coefficient
    for total in itertools.count(1):
        found = _bounded_search(cols, xf, [1] * len(cols), total, budget, finish, moving,
                                exact_weight=False)
        if found is not None:
            return found
        if budget.exhausted:
            return Decision(Verdict.UNKNOWN, detail="coefficient search exceeded the bound")


def _bounded_search(cols, xf, w, total, budget, finish, moving, exact_weight=True,
                    check_sum=True):
    n = len(cols)
    r = len(xf)
    coeffs = [0] * n

    def rec(i, left, acc):
        if i == n:
            if (exact_weight and left != 0) or (not exact_weight and left < 0):
                return None
            if not budget.spend():
                return None
            if check_sum and tuple(acc) != tuple(xf):
                return None
            d = finish(dict(zip(moving, coeffs)))
            return d if d.yes else None
        c = 0
        while c * w[i] <= left:
            coeffs[i] = c
            nxt = [a + c * b for a, b in zip(acc, cols[i])]
            res = rec(i + 1, left - c * w[i], nxt)
            if res is not None or budget.exhausted:
                return res
            c += 1
        coeffs[i] = 0
        return None

    return rec(0, total, [0] * r)


def _column_rank(cols: Sequence[Sequence[int]]) -> int:
    if not cols:
        return 0
    return smith_normal_form(IntMatrix.from_columns(cols, len(cols[0]))).rank


def _rationalize(vec) -> list[int] | None:
    fr = [Fraction(float(v)).limit_denominator(1000) for v in vec]
    den = 1
    for f in fr:
        den = den * f.denominator // math.gcd(den, f.denominator)
    return [int(f * den) for f in fr]


def _lp_feasible(a_ub, b_ub, dim, a_eq=None, b_eq=None):
    from scipy.optimize import linprog
    res = linprog([0.0] * dim, A_ub=a_ub or None, b_ub=b_ub or None, A_eq=a_eq, b_eq=b_eq,
                  bounds=[(None, None)] * dim, method="highs")
    return res.x if res.status == 0 else None


def _strict_functional(cols, zero_on=()) -> list[int] | None:
    """Integral ``y`` with ``<y, c> = 0`` on ``zero_on`` and ``>= 1`` elsewhere, verified exactly."""
    dim = len(cols[0])
    zero_on = set(zero_on)
    pos = [c for j, c in enumerate(cols) if j not in zero_on]
    zero = [c for j, c in enumerate(cols) if j in zero_on]
    for scale in (1, 10):
        y = _lp_feasible([[-scale * v for v in c] for c in pos], [-1.0] * len(pos), dim,
                         a_eq=[list(map(float, c)) for c in zero] or None,
                         b_eq=[0.0] * len(zero) or None)
        if y is None:
            return None
        yi = _rationalize(y)
        if (all(sum(a * b for a, b in zip(yi, c)) >= 1 for c in pos)
                and all(sum(a * b for a, b in zip(yi, c)) == 0 for c in zero)):
            return yi
    return None


def _lineality(cols) -> tuple[list[int], list[int]] | None:
    """Columns lying in a strictly positive relation, with one integral relation covering them.

    These columns span the largest subspace inside the cone.  Returns
    ``(indices, coefficients)`` with every coefficient >= 1 and
    ``sum coefficients[k] * cols[indices[k]] == 0``, or ``None`` if the
    floating point answer could not be certified.
    """
    from scipy.optimize import linprog
    n, dim = len(cols), len(cols[0])
    a_eq = [[float(c[k]) for c in cols] for k in range(dim)]
    total = [0] * n
    for i in range(n):
        if total[i]:
            continue
        bounds = [(0, None)] * n
        bounds[i] = (1, None)
        res = linprog([1.0] * n, A_eq=a_eq, b_eq=[0.0] * dim, bounds=bounds, method="highs")
        if res.status == 2:
            continue
        if res.status != 0:
            return None
        lam = _rationalize(res.x)
        if (any(v < 0 for v in lam) or lam[i] <= 0
                or any(sum(lam[j] * cols[j][k] for j in range(n)) for k in range(dim))):
            return None
        total = [a + b for a, b in zip(total, lam)]
    idx = [i for i in range(n) if total[i]]
    return idx, [total[i] for i in idx]


def _separating_functional(cols, xf) -> list[int] | None:
    """Integral ``y`` with ``<y, c> >= 0`` on columns and ``<y, xf> < 0``."""
    dim = len(xf)
    a_ub = [[-v for v in c] for c in cols] + [list(xf)]
    b_ub = [0.0] * len(cols) + [-1.0]
    y = _lp_feasible(a_ub, b_ub, dim)
    if y is None:
        return None
    yi = _rationalize(y)
    if (all(sum(a * b for a, b in zip(yi, c)) >= 0 for c in cols)
            and sum(a * b for a, b in zip(yi, xf)) < 0):
        return yi
    return None


def scale_contains(og: OrderedGroup, x: GroupElement, bound: int = DEFAULT_BOUND) -> Decision:
    if isinstance(og.scale, FullCone):
        return cone_contains(og, x, bound)
    return any_of(all_of([cone_contains(og, x, bound), cone_contains(og, s - x, bound)])
                  for s in og.scale_tops())


def _finite_scale_set(og: OrderedGroup) -> frozenset:
    cone = {x for x in og.group.elements() if cone_contains(og, x).yes}
    if isinstance(og.scale, FullCone):
        return frozenset(x.coords for x in cone)
    return frozenset(x.coords for x in cone
                     if any((s - x) in cone for s in og.scale_tops()))


def _effective_tops(og: OrderedGroup, bound: int):
    """Scale tops lying in the cone; a top outside the cone spans an empty interval."""
    tops = []
    for s in og.scale_tops():
        d = cone_contains(og, s, bound)
        if d.verdict is Verdict.UNKNOWN:
            return d
        if d.yes:
            tops.append(s)
    return tops


def _scale_match(f: GroupHom, fi: GroupHom, og1: OrderedGroup, og2: OrderedGroup,
                 bound: int) -> Decision:
    full1 = isinstance(og1.scale, FullCone)
    full2 = isinstance(og2.scale, FullCone)
    if full1 and full2:
        return YES
    if not full1 and not full2:
        tops1, tops2 = _effective_tops(og1, bound), _effective_tops(og2, bound)
        if isinstance(tops1, Decision):
            return tops1
        if isinstance(tops2, Decision):
            return tops2
        return all_of(itertools.chain(
            (scale_contains(og2, f(s), bound) for s in tops1),
            (scale_contains(og1, fi(t), bound) for t in tops2)))
    if og1.group.is_finite:
        image = frozenset(f(og1.group.element(c)).coords for c in _finite_scale_set(og1))
        return YES if image == _finite_scale_set(og2) else _no("scales differ")
    return Decision(Verdict.UNKNOWN, detail="full versus bounded scale on an infinite group")


def is_order_unit_iso(f: GroupHom, og1: OrderedGroup, og2: OrderedGroup,
                      units: tuple[GroupElement, GroupElement] | None = None,
                      bound: int = DEFAULT_BOUND) -> Decision:
    """Whether ``f`` is an isomorphism of ordered, scaled (and pointed) groups."""
    if f.source != og1.group or f.target != og2.group:
        return _no("map does not connect the two groups")
    if not f.is_isomorphism():
        return _no("not a group isomorphism")
    if units is not None and f(units[0]) != units[1]:
        return _no("unit not preserved")
    fi = f.inverse()
    return all_of(itertools.chain(
        (cone_contains(og2, f(v), bound) for v in og1.cone_gens),
        (cone_contains(og1, fi(v), bound) for v in og2.cone_gens),
        iter([_scale_match(f, fi, og1, og2, bound)])))


# ---------------------------------------------------------------------------
# invariants


def transport(s: SixTermSequence, phi: tuple[GroupHom, GroupHom],
              psi: tuple[GroupHom, GroupHom]) -> SixTermSequence:
    """Relabel the ends of ``s`` along isomorphisms ``phi`` (quotient side) and ``psi`` (ideal side)."""
    phi0, phi1 = phi
    psi0, psi1 = psi
    for name, f, src in (("phi0", phi0, s.K0A), ("phi1", phi1, s.K1A),
                         ("psi0", psi0, s.K0B), ("psi1", psi1, s.K1B)):
        if f.source != src:
            raise ParentMismatch(f"{name} must start at {src}")
        if not f.is_isomorphism():
            raise PreconditionViolated(f"{name} is not an isomorphism")
    phi0i, phi1i = phi0.inverse(), phi1.inverse()
    psi0i, psi1i = psi0.inverse(), psi1.inverse()
    return SixTermSequence(
        psi0.target, s.K0E, phi0.target, psi1.target, s.K1E, phi1.target,
        s.iota0 @ psi0i, phi0 @ s.pi0, psi1 @ s.delta0 @ phi0i,
        s.iota1 @ psi1i, phi1 @ s.pi1, psi0 @ s.delta1 @ phi1i,
        s.unitE, phi0(s.unitA) if s.has_units else None)


@dataclass(frozen=True, eq=False)
class UnitalKSixInvariant:
    seq: SixTermSequence
    orderB: OrderedGroup
    orderE: OrderedGroup
    orderA: OrderedGroup

    def __post_init__(self):
        s = self.seq
        if not s.has_units:
            raise UnitIncompatible("the ordered invariant needs units")
        for og, g, name in ((self.orderB, s.K0B, "orderB"), (self.orderE, s.K0E, "orderE"),
                            (self.orderA, s.K0A, "orderA")):
            if og.group != g:
                raise ParentMismatch(f"{name} lives on {og.group}, expected {g}")
        for f, src, tgt, name in ((s.iota0, self.orderB, self.orderE, "iota0"),
                                  (s.pi0, self.orderE, self.orderA, "pi0")):
            for v in src.cone_gens:
                if cone_contains(tgt, f(v)).no:
                    raise PreconditionViolated(f"{name} is not positive on {v}")


@dataclass(frozen=True, eq=False)
class KTildeInvariant:
    """A unital invariant plus the row ``0 -> K0B -> K0(D) -> Z -> 0`` and ``j0: K0(D) -> K0E``."""

    base: UnitalKSixInvariant
    dgroup: OrderedGroup
    unit_D: GroupElement
    d_inj: GroupHom
    d_surj: GroupHom
    j0: GroupHom

    def __post_init__(self):
        s = self.base.seq
        d = self.dgroup.group
        if self.d_inj.source != s.K0B or self.d_inj.target != d:
            raise ParentMismatch("d_inj must map K0B into the D-group")
        if self.d_surj.source != d or self.d_surj.target != free(1):
            raise ParentMismatch("d_surj must map the D-group onto Z")
        if self.j0.source != d or self.j0.target != s.K0E:
            raise ParentMismatch("j0 must map the D-group into K0E")
        if self.unit_D.parent != d:
            raise ParentMismatch("unit_D is not in the D-group")
        ShortExactSeq(s.K0B, d, free(1), self.d_inj, self.d_surj)
        if self.j0 @ self.d_inj != s.iota0:
            raise PreconditionViolated("j0 o d_inj differs from iota0")
        unit_map = GroupHom.from_images(free(1), s.K0A, [s.unitA])
        if s.pi0 @ self.j0 != unit_map @ self.d_surj:
            raise PreconditionViolated("pi0 o j0 differs from the unit embedding o d_surj")
        if self.d_surj(self.unit_D) != free(1).gen(0):
            raise UnitIncompatible("d_surj(unit_D) must be 1")
        if self.j0(self.unit_D) != s.unitE:
            raise UnitIncompatible("j0(unit_D) must be unitE")


@dataclass(frozen=True, eq=False)
class IsoWitness:
    phi0: GroupHom
    phi1: GroupHom
    psi0: GroupHom
    psi1: GroupHom
    rho0: GroupHom
    rho1: GroupHom
    theta: GroupHom | None = None

    def maps(self) -> dict[str, GroupHom]:
        out = {k: getattr(self, k) for k in ("phi0", "phi1", "psi0", "psi1", "rho0", "rho1")}
        if self.theta is not None:
            out["theta"] = self.theta
        return out

    def inverse(self) -> IsoWitness:
        return IsoWitness(**{k: f.inverse() for k, f in self.maps().items()})


def verify_witness(i1: UnitalKSixInvariant, i2: UnitalKSixInvariant, w: IsoWitness,
                   bound: int = DEFAULT_BOUND) -> bool:
    """Independent check that ``w`` is an isomorphism of ordered unital invariants."""
    s, t = i1.seq, i2.seq
    try:
        squares = (
            t.iota0 @ w.psi0 == w.rho0 @ s.iota0,
            t.pi0 @ w.rho0 == w.phi0 @ s.pi0,
            t.delta0 @ w.phi0 == w.psi1 @ s.delta0,
            t.iota1 @ w.psi1 == w.rho1 @ s.iota1,
            t.pi1 @ w.rho1 == w.phi1 @ s.pi1,
            t.delta1 @ w.phi1 == w.psi0 @ s.delta1,
        )
    except ParentMismatch:
        return False
    if not all(squares) or not all(f.is_isomorphism() for f in w.maps().values()):
        return False
    return all_of([
        is_order_unit_iso(w.phi0, i1.orderA, i2.orderA, (s.unitA, t.unitA), bound),
        is_order_unit_iso(w.psi0, i1.orderB, i2.orderB, None, bound),
        is_order_unit_iso(w.rho0, i1.orderE, i2.orderE, (s.unitE, t.unitE), bound),
    ]).yes


def verify_tilde_witness(k1: KTildeInvariant, k2: KTildeInvariant, w: IsoWitness,
                         bound: int = DEFAULT_BOUND) -> bool:
    th = w.theta
    if th is None or not verify_witness(k1.base, k2.base, w, bound):
        return False
    return (th @ k1.d_inj == k2.d_inj @ w.psi0 and k2.d_surj @ th == k1.d_surj
            and th(k1.unit_D) == k2.unit_D and w.rho0 @ k1.j0 == k2.j0 @ th
            and is_order_unit_iso(th, k1.dgroup, k2.dgroup, (k1.unit_D, k2.unit_D),
                                  bound).yes)


# ---------------------------------------------------------------------------
# enumeration of automorphisms


@functools.lru_cache(maxsize=256)
def _torsion_automorphisms(mods: tuple[int, ...]) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """All automorphisms of ``+ Z/d_i`` as tuples of generator images, lexicographically."""
    t = abelian_group(mods, 0)
    by_order: dict[int, list[tuple[int, ...]]] = {}
    elems = sorted(x.coords for x in t.elements())
    for d in set(mods):
        by_order[d] = [c for c in elems if t.element(c).order() == d]
    out = []
    for images in itertools.product(*(by_order[d] for d in mods)):
        f = GroupHom.from_images(t, t, [t.element(c) for c in images])
        if f.is_isomorphism():
            out.append(images)
    return tuple(out)


def _gl_matrices(r: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """``GL_r(Z)`` by increasing entry radius, then lexicographically (columns)."""
    if r == 0:
        yield ()
        return
    for radius in itertools.count(1):
        for entries in itertools.product(range(-radius, radius + 1), repeat=r * r):
            if max(abs(e) for e in entries) != radius:
                continue
            cols = tuple(tuple(entries[j * r:(j + 1) * r]) for j in range(r))
            if abs(determinant(IntMatrix.from_columns(cols, r))) == 1:
                yield cols
        if r == 1:
            return


def automorphisms(g: FgAbGroup) -> Iterator[GroupHom]:
    """Automorphisms of ``g`` in a fixed order; finite exactly when the free rank is at most 1.

    Torsion generators go to torsion (an automorphism of the torsion part),
    free generators to an arbitrary torsion part plus a column of ``GL_r(Z)``.
    """
    mods = g.invariant_factors
    t = len(mods)
    r = g.free_rank
    tors_elems = sorted(x.coords[:t] for x in _torsion_subgroup_elements(mods))
    for gl in _gl_matrices(r):
        for taut in _torsion_automorphisms(mods):
            for tf in itertools.product(tors_elems, repeat=r):
                images = [g.element(list(c) + [0] * r) for c in taut]
                images += [g.element(list(tf[j]) + list(gl[j])) for j in range(r)]
                yield GroupHom.from_images(g, g, images)


def _torsion_subgroup_elements(mods):
    return abelian_group(mods, 0).elements()


def _elements_by_radius(g: FgAbGroup) -> Iterator[GroupElement]:
    """Every element once: finite groups directly, otherwise by growing free radius."""
    if g.is_finite:
        yield from sorted(g.elements(), key=lambda x: x.coords)
        return
    t = len(g.invariant_factors)
    tors = sorted(x.coords[:t] for x in _torsion_subgroup_elements(g.invariant_factors))
    for radius in itertools.count(0):
        for fr in itertools.product(range(-radius, radius + 1), repeat=g.free_rank):
            if max((abs(v) for v in fr), default=0) != radius:
                continue
            for tc in tors:
                yield g.element(list(tc) + list(fr))
        if g.free_rank == 0:
            return


# ---------------------------------------------------------------------------
# isomorphism search


def _cheap_mismatch(s: SixTermSequence, t: SixTermSequence) -> str | None:
    for name in ("K0B", "K0E", "K0A", "K1B", "K1E", "K1A"):
        if getattr(s, name) != getattr(t, name):
            return f"{name} groups differ ({getattr(s, name)} vs {getattr(t, name)})"
    if s.unitA.order() != t.unitA.order():
        return "quotient units have different orders"
    if s.unitE.order() != t.unitE.order():
        return "middle units have different orders"
    if s.delta0.is_zero() != t.delta0.is_zero() or s.delta1.is_zero() != t.delta1.is_zero():
        return "boundary maps differ in vanishing"
    return None


class _Search:
    def __init__(self, i1: UnitalKSixInvariant, i2: UnitalKSixInvariant, bound: int):
        self.i1, self.i2 = i1, i2
        self.budget = Budget(bound)
        self.incomplete = False
        self.unknown = False

    def _note(self, d: Decision) -> bool:
        if d.verdict is Verdict.UNKNOWN:
            self.unknown = True
        return d.yes

    def _autos(self, g: FgAbGroup) -> Iterator[GroupHom]:
        if g.free_rank > 1:
            self.incomplete = True
        for f in automorphisms(g):
            if not self.budget.spend():
                return
            yield f

    def witnesses(self) -> Iterator[IsoWitness]:
        s, t = self.i1.seq, self.i2.seq
        i1, i2 = self.i1, self.i2
        bound = self.budget.left
        for phi0 in self._autos(s.K0A):
            if phi0(s.unitA) != t.unitA:
                continue
            if not self._note(is_order_unit_iso(phi0, i1.orderA, i2.orderA,
                                                (s.unitA, t.unitA), bound)):
                continue
            for psi1 in self._autos(s.K1B):
                if psi1 @ s.delta0 != t.delta0 @ phi0:
                    continue
                for phi1 in self._autos(s.K1A):
                    for psi0 in self._autos(s.K0B):
                        if psi0 @ s.delta1 != t.delta1 @ phi1:
                            continue
                        if not self._note(is_order_unit_iso(psi0, i1.orderB, i2.orderB,
                                                            None, bound)):
                            continue
                        moved = transport(s, (phi0, phi1), (psi0, psi1))
                        base = congruence_witness(moved, t)
                        if base is None:
                            continue
                        for rho0 in self._rho_family(moved, t, base[0]):
                            if self._note(is_order_unit_iso(rho0, i1.orderE, i2.orderE,
                                                            (s.unitE, t.unitE), bound)):
                                yield IsoWitness(phi0, phi1, psi0, psi1, rho0, base[1])
                        if self.budget.exhausted:
                            return
                    if self.budget.exhausted:
                        return
                if self.budget.exhausted:
                    return
            if self.budget.exhausted:
                return

    def _rho_family(self, s: SixTermSequence, t: SixTermSequence, rho0: GroupHom):
        """All degree-0 middle maps of congruences ``s -> t``: ``rho0 + inj o phi o surj``."""
        e1, e2 = s.degree0_extension, t.degree0_extension
        homs = pointed_hom_group(e1.right, e1.point, e1.left)
        if not homs.carrier.is_finite:
            self.incomplete = True
        for x in _elements_by_radius(homs.carrier):
            if not self.budget.spend():
                return
            yield rho0 + e2.inj @ homs.realize(x) @ e1.surj

    def verdict(self) -> Decision:
        if self.budget.exhausted or self.incomplete or self.unknown:
            return Decision(Verdict.UNKNOWN, detail="search not exhaustive within the bound")
        return _no("exhaustive search found no isomorphism")


def isomorphic(i1: UnitalKSixInvariant, i2: UnitalKSixInvariant,
               bound: int = DEFAULT_BOUND) -> Decision:
    """Decide isomorphism of ordered unital invariants; ``Yes`` carries an :class:`IsoWitness`."""
    why = _cheap_mismatch(i1.seq, i2.seq)
    if why:
        return _no(why)
    search = _Search(i1, i2, bound)
    for w in search.witnesses():
        if not verify_witness(i1, i2, w, bound):
            raise SoundnessFailure("isomorphism witness failed independent verification")
        return Decision(Verdict.YES, w)
    return search.verdict()


def forced_theta(k1: KTildeInvariant, k2: KTildeInvariant, psi0: GroupHom) -> GroupHom | None:
    """The only candidate ``theta`` given ``psi0``: ``K0(D) = d_inj(K0B) + Z unit_D``."""
    d1, d2 = k1.dgroup.group, k2.dgroup.group
    images = []
    for e in d1.gens():
        n = k1.d_surj(e).coords[0]
        b = k1.d_inj.lift(e - n * k1.unit_D)
        images.append(k2.d_inj(psi0(b)) + n * k2.unit_D)
    return GroupHom.from_images(d1, d2, images)


def isomorphic_tilde(k1: KTildeInvariant, k2: KTildeInvariant,
                     bound: int = DEFAULT_BOUND) -> Decision:
    """Decide isomorphism of the refined invariants, searching jointly over base witnesses."""
    why = _cheap_mismatch(k1.base.seq, k2.base.seq)
    if why:
        return _no(why)
    if k1.dgroup.group != k2.dgroup.group:
        return _no("D-groups differ")
    search = _Search(k1.base, k2.base, bound)
    for w in search.witnesses():
        th = forced_theta(k1, k2, w.psi0)
        if w.rho0 @ k1.j0 != k2.j0 @ th:
            continue
        d = is_order_unit_iso(th, k1.dgroup, k2.dgroup, (k1.unit_D, k2.unit_D), bound)
        if d.verdict is Verdict.UNKNOWN:
            search.unknown = True
        if not d.yes:
            continue
        full = IsoWitness(w.phi0, w.phi1, w.psi0, w.psi1, w.rho0, w.rho1, th)
        if not verify_tilde_witness(k1, k2, full, bound):
            raise SoundnessFailure("refined witness failed independent verification")
        return Decision(Verdict.YES, full)
    return search.verdict()
