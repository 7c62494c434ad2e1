"""Homomorphisms, kernels and cokernels, Hom/Ext groups and extension classes.

All constructions go through the canonical free resolution of a group
``H = Z/d_1 + ... + Z/d_k + Z^r``::

    0 -> F1 = Z^k --(e_j -> d_j e_j)--> F0 = Z^(k+r) --> H -> 0

so ``Ext(H, K)`` is the cokernel of restriction ``Hom(F0, K) -> Hom(F1, K)``,
i.e. ``K^(k+r) -> K^k`` with components ``d_j``.  A pointed extension adds one
more coordinate recording where the distinguished element sits relative to a
lift of the resolution (see :func:`pointed_ext_group`).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .abgroup import (
    FgAbGroup,
    GroupElement,
    IntMatrix,
    _solve_with,
    direct_sum_many,
    free,
    group_from_presentation,
    integer_kernel,
    smith_normal_form,
)
from .errors import (
    DimensionMismatch,
    NotExact,
    NotInImage,
    NotWellDefined,
    ParentMismatch,
)


@dataclass(frozen=True, eq=False)
class GroupHom:
    """Homomorphism given by its matrix on canonical generators.

    Column ``j`` holds the target coordinates of ``f(e_j)``.  Construction
    fails with :class:`NotWellDefined` unless ``d_j * f(e_j) == 0`` for every
    torsion generator of the source.
    """

    source: FgAbGroup
    target: FgAbGroup
    matrix: IntMatrix

    def __post_init__(self):
        m = self.matrix
        if not isinstance(m, IntMatrix):
            m = IntMatrix(m, self.target.ngens, self.source.ngens)
        if m.shape != (self.target.ngens, self.source.ngens):
            raise DimensionMismatch(
                f"matrix of shape {m.shape} for a map {self.source} -> {self.target}")
        tmod = self.target.moduli
        for j, d in enumerate(self.source.moduli):
            if d:
                for i, t in enumerate(tmod):
                    v = d * m[i, j]
                    if (v % t if t else v) != 0:
                        raise NotWellDefined(
                            f"generator {j} has order {d} in {self.source} but its image "
                            f"{list(m.column(j))} does not have order dividing {d} in "
                            f"{self.target}")
        m = IntMatrix(([x % t for x in r] if t else r for r, t in zip(m.tolist(), tmod)),
                      m.rows, m.cols)
        object.__setattr__(self, "matrix", m)

    # construction helpers

    @classmethod
    def identity(cls, g: FgAbGroup) -> GroupHom:
        return cls(g, g, IntMatrix.identity(g.ngens))

    @classmethod
    def zero(cls, g: FgAbGroup, h: FgAbGroup) -> GroupHom:
        return cls(g, h, IntMatrix.zeros(h.ngens, g.ngens))

    @classmethod
    def from_images(cls, g: FgAbGroup, h: FgAbGroup,
                    images: Sequence[GroupElement]) -> GroupHom:
        if len(images) != g.ngens:
            raise DimensionMismatch(f"{len(images)} images for {g.ngens} generators")
        for x in images:
            if x.parent != h:
                raise ParentMismatch(f"image {x} is not in {h}")
        return cls(g, h, IntMatrix.from_columns([x.coords for x in images], h.ngens))

    @classmethod
    def scalar(cls, g: FgAbGroup, k: int) -> GroupHom:
        return cls(g, g, IntMatrix.diag([k] * g.ngens))

    # algebra

    def __call__(self, x: GroupElement) -> GroupElement:
        if x.parent != self.source:
            raise ParentMismatch(f"{x} is not in the source {self.source}")
        return GroupElement(self.target, self.matrix.apply(x.coords))

    def __matmul__(self, other: GroupHom) -> GroupHom:
        """Composition ``self o other``."""
        if other.target != self.source:
            raise ParentMismatch(f"cannot compose {other.target} -> ... with {self.source} -> ...")
        return GroupHom(other.source, self.target, self.matrix @ other.matrix)

    def _same_ends(self, other: GroupHom):
        if self.source != other.source or self.target != other.target:
            raise ParentMismatch("homomorphisms with different ends")

    def __add__(self, other: GroupHom) -> GroupHom:
        self._same_ends(other)
        return GroupHom(self.source, self.target, IntMatrix(
            ([a + b for a, b in zip(r, s)] for r, s in
             zip(self.matrix.tolist(), other.matrix.tolist())),
            self.matrix.rows, self.matrix.cols))

    def __neg__(self) -> GroupHom:
        return GroupHom(self.source, self.target, IntMatrix(
            ([-a for a in r] for r in self.matrix.tolist()), self.matrix.rows, self.matrix.cols))

    def __sub__(self, other: GroupHom) -> GroupHom:
        return self + (-other)

    def __rmul__(self, k: int) -> GroupHom:
        return GroupHom(self.source, self.target, IntMatrix(
            ([k * a for a in r] for r in self.matrix.tolist()), self.matrix.rows, self.matrix.cols))

    def __eq__(self, other):
        if not isinstance(other, GroupHom):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.matrix == other.matrix)

    def __hash__(self):
        return hash((self.source, self.target, self.matrix))

    def __repr__(self):
        return f"GroupHom({self.source} -> {self.target}, {self.matrix.tolist()})"

    def is_zero(self) -> bool:
        return self.matrix.is_zero()

    def images(self) -> list[GroupElement]:
        return [GroupElement(self.target, self.matrix.column(j)) for j in range(self.source.ngens)]

    # solving

    @cached_property
    def _solver(self):
        tors = [i for i, d in enumerate(self.target.moduli) if d]
        block = IntMatrix.from_columns(
            [[self.target.moduli[i] if k == i else 0 for k in range(self.target.ngens)]
             for i in tors], self.target.ngens)
        a = self.matrix.hstack(block)
        return smith_normal_form(a), a.cols

    def preimage(self, y: GroupElement) -> GroupElement | None:
        """A deterministic ``x`` with ``f(x) == y``, or ``None``."""
        if y.parent != self.target:
            raise ParentMismatch(f"{y} is not in the target {self.target}")
        sf, ncols = self._solver
        w = _solve_with(sf, ncols, y.coords)
        if w is None:
            return None
        return GroupElement(self.source, w[:self.source.ngens])

    def lift(self, y: GroupElement) -> GroupElement:
        x = self.preimage(y)
        if x is None:
            raise NotInImage(f"{y} is not in the image of {self}")
        return x

    def in_image(self, y: GroupElement) -> bool:
        return self.preimage(y) is not None

    def is_surjective(self) -> bool:
        return all(self.in_image(e) for e in self.target.gens())

    def is_injective(self) -> bool:
        return kernel(self)[0].is_trivial

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def inverse(self) -> GroupHom:
        if not self.is_isomorphism():
            raise NotInImage(f"{self} is not an isomorphism")
        return GroupHom.from_images(self.target, self.source,
                                    [self.lift(e) for e in self.target.gens()])


def factor_through_injection(f: GroupHom, incl: GroupHom) -> GroupHom:
    """The unique ``g`` with ``incl o g == f`` (``incl`` injective)."""
    if f.target != incl.target:
        raise ParentMismatch("factorisation through a map with a different target")
    return GroupHom.from_images(f.source, incl.source, [incl.lift(y) for y in f.images()])


def factor_through_surjection(q: GroupHom, f: GroupHom) -> GroupHom:
    """The unique ``g`` with ``g o q == f`` (``q`` surjective, ``f`` kills ``ker q``)."""
    if f.source != q.source:
        raise ParentMismatch("factorisation through a map with a different source")
    g = GroupHom.from_images(q.target, f.target, [f(q.lift(e)) for e in q.target.gens()])
    kincl = kernel(q)[1]
    if not (f @ kincl).is_zero():
        raise NotWellDefined("map does not vanish on the kernel of the quotient")
    return g


# ---------------------------------------------------------------------------
# kernels, images, cokernels


def _torsion_columns(g: FgAbGroup) -> list[list[int]]:
    return [[d if k == i else 0 for k in range(g.ngens)]
            for i, d in enumerate(g.moduli) if d]


def subgroup_generated(g: FgAbGroup, vectors: Sequence[Sequence[int]]):
    """``(S, incl)`` for the subgroup of ``g`` generated by coordinate vectors."""
    s = len(vectors)
    n = g.ngens
    p = IntMatrix.from_columns([list(v) for v in vectors], n)
    a = p.hstack(IntMatrix.from_columns(_torsion_columns(g), n))
    ker = integer_kernel(a)
    rels = IntMatrix((ker.column(j)[:s] for j in range(ker.cols)), ker.cols, s)
    sub = group_from_presentation(rels, s)
    incl_m = p @ sub.from_canonical
    return sub, GroupHom(sub, g, incl_m)


def kernel(f: GroupHom):
    """``(ker f, inclusion)``."""
    cached = f.__dict__.get("_kernel")
    if cached is not None:
        return cached
    g, h = f.source, f.target
    a = f.matrix.hstack(IntMatrix.from_columns(_torsion_columns(h), h.ngens))
    ker = integer_kernel(a)
    vecs = [ker.column(j)[:g.ngens] for j in range(ker.cols)]
    res = subgroup_generated(g, vecs)
    f.__dict__["_kernel"] = res
    return res


def image(f: GroupHom):
    """``(im f, inclusion into the target)``."""
    return subgroup_generated(f.target, f.matrix.columns())


def cokernel(f: GroupHom):
    """``(coker f, projection from the target)``."""
    h = f.target
    rels = [list(c) for c in f.matrix.columns()] + _torsion_columns(h)
    q = group_from_presentation(IntMatrix(rels, len(rels), h.ngens), h.ngens)
    return q, GroupHom(h, q, q.to_canonical)


def is_exact_at(f: GroupHom, g: GroupHom) -> bool:
    """``im f == ker g`` for ``A --f--> B --g--> C``."""
    if f.target != g.source:
        raise ParentMismatch("maps do not compose")
    if not (g @ f).is_zero():
        return False
    _, kincl = kernel(g)
    return all(f.in_image(y) for y in kincl.images())


@dataclass(frozen=True, eq=False)
class Subgroup:
    """A subgroup, always carried as an injective homomorphism."""

    incl: GroupHom

    @property
    def group(self) -> FgAbGroup:
        return self.incl.source

    @property
    def ambient(self) -> FgAbGroup:
        return self.incl.target

    def contains(self, x: GroupElement) -> bool:
        return self.incl.in_image(x)

    __contains__ = contains

    def generators(self) -> list[GroupElement]:
        return self.incl.images()

    def issubset(self, other: Subgroup) -> bool:
        return all(other.contains(x) for x in self.generators())

    def __eq__(self, other):
        if not isinstance(other, Subgroup):
            return NotImplemented
        return (self.ambient == other.ambient and self.issubset(other)
                and other.issubset(self))

    __hash__ = None

    @cached_property
    def _quotient(self):
        return cokernel(self.incl)

    def quotient(self):
        """``(ambient / self, projection)``."""
        return self._quotient

    def index(self) -> int | None:
        q = self._quotient[0]
        return q.order


# ---------------------------------------------------------------------------
# limits and colimits


def pullback(f: GroupHom, g: GroupHom):
    """``P = {(a, b) : f(a) == g(b)}`` with its two projections."""
    if f.target != g.target:
        raise ParentMismatch("pullback of maps with different targets")
    s, (ia, ib), (pa, pb) = direct_sum_many([f.source, g.source])
    diff = f @ pa - g @ pb
    p, incl = kernel(diff)
    return p, pa @ incl, pb @ incl


def pushout(f: GroupHom, g: GroupHom):
    """``P = (A + B) / {(f(c), -g(c))}`` with its two coprojections."""
    if f.source != g.source:
        raise ParentMismatch("pushout of maps with different sources")
    s, (ia, ib), (pa, pb) = direct_sum_many([f.target, g.target])
    p, q = cokernel(ia @ f - ib @ g)
    return p, q @ ia, q @ ib


def pushout_map(f: GroupHom, g: GroupHom, a: GroupHom, b: GroupHom) -> GroupHom:
    """Mediating map out of ``pushout(f, g)`` for a cocone ``a o f == b o g``."""
    if not (a @ f == b @ g):
        raise NotWellDefined("maps do not form a cocone")
    s, (ia, ib), (pa, pb) = direct_sum_many([f.target, g.target])
    p, q = cokernel(ia @ f - ib @ g)
    return factor_through_surjection(q, a @ pa + b @ pb)


def pullback_map(f: GroupHom, g: GroupHom, a: GroupHom, b: GroupHom) -> GroupHom:
    """Mediating map into ``pullback(f, g)`` for a cone ``f o a == g o b``."""
    if not (f @ a == g @ b):
        raise NotWellDefined("maps do not form a cone")
    s, (ia, ib), (pa, pb) = direct_sum_many([f.source, g.source])
    p, incl = kernel(f @ pa - g @ pb)
    return factor_through_injection(ia @ a + ib @ b, incl)


# ---------------------------------------------------------------------------
# short exact sequences


@dataclass(frozen=True, eq=False)
class ShortExactSeq:
    """``0 -> left --inj--> mid --surj--> right -> 0``, optionally pointed.

    ``distinguished`` is ``(g, h)`` with ``g`` in ``mid`` and ``surj(g) == h``.
    """

    left: FgAbGroup
    mid: FgAbGroup
    right: FgAbGroup
    inj: GroupHom
    surj: GroupHom
    distinguished: tuple[GroupElement, GroupElement] | None = None

    def __post_init__(self):
        if (self.inj.source != self.left or self.inj.target != self.mid
                or self.surj.source != self.mid or self.surj.target != self.right):
            raise ParentMismatch("maps do not match the groups of the sequence")
        if not self.inj.is_injective():
            raise NotExact("left", "first map is not injective")
        if not self.surj.is_surjective():
            raise NotExact("right", "second map is not surjective")
        if not is_exact_at(self.inj, self.surj):
            raise NotExact("mid", "image of the first map differs from the kernel of the second")
        if self.distinguished is not None:
            g, h = self.distinguished
            if g.parent != self.mid or h.parent != self.right:
                raise ParentMismatch("distinguished elements in the wrong groups")
            if self.surj(g) != h:
                raise NotExact("mid", "distinguished element does not map to the point")

    @classmethod
    def split(cls, k: FgAbGroup, h: FgAbGroup, point: GroupElement | None = None,
              offset: GroupElement | None = None) -> ShortExactSeq:
        """``0 -> K -> K + H -> H -> 0``; pointed at ``(offset, point)`` if given."""
        s, (ik, ih), (pk, ph) = direct_sum_many([k, h])
        dist = None
        if point is not None:
            off = offset if offset is not None else k.zero()
            dist = (ik(off) + ih(point), point)
        return cls(k, s, h, ik, ph, dist)

    @property
    def point(self) -> GroupElement | None:
        return None if self.distinguished is None else self.distinguished[1]


def free_resolution(h: FgAbGroup) -> ShortExactSeq:
    """The canonical ``0 -> Z^k -> Z^n -> h -> 0`` with ``e_j -> d_j e_j``."""
    k = len(h.invariant_factors)
    n = h.ngens
    f0 = free(n)
    f1 = free(k)
    m1 = IntMatrix.from_columns(
        [[d if i == j else 0 for i in range(n)] for j, d in enumerate(h.invariant_factors)], n)
    return ShortExactSeq(f1, f0, h, GroupHom(f1, f0, m1),
                         GroupHom(f0, h, IntMatrix.identity(n)))


# ---------------------------------------------------------------------------
# Hom groups


@dataclass(frozen=True, eq=False)
class HomGroup:
    """``Hom(source, target)`` as a subgroup of ``target^n``."""

    source: FgAbGroup
    target: FgAbGroup
    carrier: FgAbGroup
    incl: GroupHom
    incs: tuple[GroupHom, ...] = field(repr=False)
    projs: tuple[GroupHom, ...] = field(repr=False)

    def realize(self, x: GroupElement) -> GroupHom:
        if x.parent != self.carrier:
            raise ParentMismatch(f"{x} is not in {self.carrier}")
        y = self.incl(x)
        return GroupHom.from_images(self.source, self.target, [p(y) for p in self.projs])

    def element_of(self, f: GroupHom) -> GroupElement:
        if f.source != self.source or f.target != self.target:
            raise ParentMismatch("homomorphism has the wrong ends")
        total = self.incl.target.zero()
        for inc, img in zip(self.incs, f.images()):
            total = total + inc(img)
        return self.incl.lift(total)

    def evaluation(self, x: GroupElement) -> GroupHom:
        """``carrier -> target``, ``phi -> phi(x)``."""
        if x.parent != self.source:
            raise ParentMismatch(f"{x} is not in {self.source}")
        return GroupHom.from_images(self.carrier, self.target,
                                    [self.realize(e)(x) for e in self.carrier.gens()])

    def elements(self):
        for x in self.carrier.elements():
            yield self.realize(x)


@functools.lru_cache(maxsize=4096)
def hom_group(g: FgAbGroup, h: FgAbGroup) -> HomGroup:
    n = g.ngens
    s, incs, projs = direct_sum_many([h] * n)
    phi = GroupHom.zero(s, s)
    for inc, pr, d in zip(incs, projs, g.moduli):
        if d:
            phi = phi + d * (inc @ pr)
    carrier, incl = kernel(phi)
    return HomGroup(g, h, carrier, incl, tuple(incs), tuple(projs))


@dataclass(frozen=True, eq=False)
class PointedHomGroup:
    """``Hom((H, h), K)``: homomorphisms killing the point ``h``."""

    homs: HomGroup
    point: GroupElement
    carrier: FgAbGroup
    incl: GroupHom

    def realize(self, x: GroupElement) -> GroupHom:
        return self.homs.realize(self.incl(x))

    def element_of(self, f: GroupHom) -> GroupElement:
        return self.incl.lift(self.homs.element_of(f))


@functools.lru_cache(maxsize=4096)
def pointed_hom_group(h: FgAbGroup, point: GroupElement, k: FgAbGroup) -> PointedHomGroup:
    if point.parent != h:
        raise ParentMismatch(f"{point} is not in {h}")
    homs = hom_group(h, k)
    carrier, incl = kernel(homs.evaluation(point))
    return PointedHomGroup(homs, point, carrier, incl)


def gamma(k0a: FgAbGroup, unit: GroupElement, k0b: FgAbGroup) -> Subgroup:
    """``{psi(unit) : psi in Hom(k0a, k0b)}`` as a subgroup of ``k0b``."""
    if unit.parent != k0a:
        raise ParentMismatch(f"{unit} is not in {k0a}")
    ev = hom_group(k0a, k0b).evaluation(unit)
    return Subgroup(image(ev)[1])


def gamma_delta(delta0: GroupHom, delta1: GroupHom, unit: GroupElement) -> Subgroup:
    """The subgroup ``q^-1({phi(unit) : phi in Hom(ker delta0, coker delta1)})``.

    ``delta0: K0(A) -> K1(B)``, ``delta1: K1(A) -> K0(B)`` and ``q`` is the
    projection ``K0(B) -> coker delta1``.  Requires ``delta0(unit) == 0``.
    """
    if unit.parent != delta0.source:
        raise ParentMismatch(f"{unit} is not in {delta0.source}")
    if not delta0(unit).is_zero():
        raise NotInImage("the unit class does not lie in the kernel of delta0")
    kgrp, kincl = kernel(delta0)
    c, q = cokernel(delta1)
    u = kincl.lift(unit)
    s = gamma(kgrp, u, c)
    qq = s.quotient()[1]
    return Subgroup(kernel(qq @ q)[1])


# ---------------------------------------------------------------------------
# Ext groups


def _restriction(h: FgAbGroup, k: FgAbGroup, point: GroupElement | None):
    """``Hom(F0, K) -> Hom(F1, K) (+ K)`` for the canonical resolution of ``h``."""
    n = h.ngens
    t = len(h.invariant_factors)
    src, s_incs, s_projs = direct_sum_many([k] * n)
    slots = t + (1 if point is not None else 0)
    tgt, t_incs, t_projs = direct_sum_many([k] * slots)
    r = GroupHom.zero(src, tgt)
    for j in range(t):
        r = r + h.invariant_factors[j] * (t_incs[j] @ s_projs[j])
    if point is not None:
        for j, c in enumerate(point.coords):
            if c:
                r = r - c * (t_incs[t] @ s_projs[j])
    return r, tuple(t_incs), tuple(t_projs)


@dataclass(frozen=True, eq=False)
class ExtClassGroup:
    """``Ext(H, K)`` computed from the canonical resolution of ``H``.

    ``cocycles`` is ``Hom(F1, K) = K^k``; ``proj`` sends a cocycle to its
    class and ``restriction`` is the coboundary map from ``Hom(F0, K)``.
    """

    quotient_group: FgAbGroup
    coefficients: FgAbGroup
    carrier: FgAbGroup
    proj: GroupHom
    restriction: GroupHom
    slot_incs: tuple[GroupHom, ...] = field(repr=False)

    @property
    def cocycles(self) -> FgAbGroup:
        return self.restriction.target

    def class_of_cocycle(self, values: Sequence[GroupElement]) -> GroupElement:
        if len(values) != len(self.slot_incs):
            raise DimensionMismatch("cocycle has the wrong number of components")
        total = self.cocycles.zero()
        for inc, v in zip(self.slot_incs, values):
            total = total + inc(v)
        return self.proj(total)


@functools.lru_cache(maxsize=4096)
def ext_group(h: FgAbGroup, k: FgAbGroup) -> ExtClassGroup:
    r, incs, _ = _restriction(h, k, None)
    carrier, q = cokernel(r)
    return ExtClassGroup(h, k, carrier, q, r, incs)


@dataclass(frozen=True, eq=False)
class PointedExtClassGroup:
    """``Ext((H, h), K)`` with its structural short exact sequence.

    Cocycle data is ``(c, k0)`` in ``Hom(F1, K) + K``; ``structural_seq`` is
    ``0 -> K/{psi(h)} -> carrier -> Ext(H, K) -> 0``.
    """

    quotient_group: FgAbGroup
    point: GroupElement
    coefficients: FgAbGroup
    carrier: FgAbGroup
    proj: GroupHom
    restriction: GroupHom
    slot_incs: tuple[GroupHom, ...] = field(repr=False)
    ext: ExtClassGroup = field(repr=False)
    gamma: Subgroup = field(repr=False)
    structural_seq: ShortExactSeq = field(repr=False)
    unit_shift: GroupHom = field(repr=False)

    def class_of_cocycle(self, values: Sequence[GroupElement],
                         offset: GroupElement) -> GroupElement:
        t = len(self.slot_incs) - 1
        if len(values) != t:
            raise DimensionMismatch("cocycle has the wrong number of components")
        total = self.slot_incs[t](offset)
        for inc, v in zip(self.slot_incs, values):
            total = total + inc(v)
        return self.proj(total)


@functools.lru_cache(maxsize=4096)
def pointed_ext_group(h: FgAbGroup, point: GroupElement, k: FgAbGroup) -> PointedExtClassGroup:
    if point.parent != h:
        raise ParentMismatch(f"{point} is not in {h}")
    r, incs, projs = _restriction(h, k, point)
    carrier, q = cokernel(r)
    ext = ext_group(h, k)
    t = len(h.invariant_factors)
    # forget the offset coordinate
    drop = GroupHom.zero(r.target, ext.cocycles)
    for j in range(t):
        drop = drop + ext.slot_incs[j] @ projs[j]
    to_ext = factor_through_surjection(q, ext.proj @ drop)
    shift = q @ incs[t]
    gam = gamma(h, point, k)
    kq, kqproj = gam.quotient()
    from_k = factor_through_surjection(kqproj, shift)
    seq = ShortExactSeq(kq, carrier, ext.carrier, from_k, to_ext)
    return PointedExtClassGroup(h, point, k, carrier, q, r, incs, ext, gam, seq, shift)


# ---------------------------------------------------------------------------
# classes of concrete extensions


def _resolution_lift(s: ShortExactSeq):
    """Preimages in ``mid`` of the canonical generators of ``right``, and the cocycle."""
    h = s.right
    lifts = [s.surj.lift(e) for e in h.gens()]
    cocycle = []
    for j, d in enumerate(h.invariant_factors):
        cocycle.append(s.inj.lift(d * lifts[j]))
    return lifts, cocycle


def ext_class(s: ShortExactSeq) -> GroupElement:
    """Class of ``s`` in ``Ext(s.right, s.left)``."""
    _, cocycle = _resolution_lift(s)
    return ext_group(s.right, s.left).class_of_cocycle(cocycle)


def pointed_ext_class(s: ShortExactSeq) -> GroupElement:
    """Class of the pointed sequence ``s`` in ``Ext((s.right, h), s.left)``."""
    if s.distinguished is None:
        raise ValueError("sequence carries no distinguished elements")
    g, h = s.distinguished
    lifts, cocycle = _resolution_lift(s)
    base = s.mid.zero()
    for c, m in zip(h.coords, lifts):
        base = base + c * m
    offset = s.inj.lift(g - base)
    return pointed_ext_group(s.right, h, s.left).class_of_cocycle(cocycle, offset)


def extension_isomorphism(s1: ShortExactSeq, s2: ShortExactSeq) -> GroupHom | None:
    """A congruence ``mid1 -> mid2`` fixing both ends (and the points), or ``None``.

    The lifts ``m_j`` of the resolution generators are sent to ``m'_j + a_j``
    where ``a`` solves ``restriction(a) = cocycle1 - cocycle2``.
    """
    if s1.left != s2.left or s1.right != s2.right:
        raise ParentMismatch("extensions with different ends")
    pointed = s1.distinguished is not None
    if pointed != (s2.distinguished is not None):
        raise ParentMismatch("comparing a pointed and an unpointed extension")
    h, k = s1.right, s1.left
    if pointed:
        if s1.point != s2.point:
            return None
        grp = pointed_ext_group(h, s1.point, k)
    else:
        grp = ext_group(h, k)

    def cocycle_vector(s):
        lifts, coc = _resolution_lift(s)
        vals = list(coc)
        if pointed:
            base = s.mid.zero()
            for c, m in zip(s.point.coords, lifts):
                base = base + c * m
            vals.append(s.inj.lift(s.distinguished[0] - base))
        total = grp.restriction.target.zero()
        for inc, v in zip(grp.slot_incs, vals):
            total = total + inc(v)
        return lifts, total

    lifts1, v1 = cocycle_vector(s1)
    lifts2, v2 = cocycle_vector(s2)
    a = grp.restriction.preimage(v1 - v2)
    if a is None:
        return None
    _, _, projs = direct_sum_many([k] * h.ngens)
    targets = [m + s2.inj(p(a)) for m, p in zip(lifts2, projs)]
    images = []
    for e in s1.mid.gens():
        n = s1.surj(e).coords
        base = s1.mid.zero()
        img = s2.mid.zero()
        for c, m1, t in zip(n, lifts1, targets):
            base = base + c * m1
            img = img + c * t
        images.append(s2.inj(s1.inj.lift(e - base)) + img)
    return GroupHom.from_images(s1.mid, s2.mid, images)


def extension_from_cocycle(h: FgAbGroup, k: FgAbGroup, cocycle: Sequence[GroupElement],
                           point: GroupElement | None = None,
                           offset: GroupElement | None = None) -> ShortExactSeq:
    """An explicit extension realising a cocycle: the pushout of the resolution.

    ``mid = (K + F0) / {(c(v), -f1(v))}``; when ``point`` is given the
    distinguished element is the class of ``(offset, point coordinates)``.
    """
    res = free_resolution(h)
    c = GroupHom.from_images(res.left, k, list(cocycle))
    mid, ik, i0 = pushout(c, res.inj)
    surj = pushout_map(c, res.inj, GroupHom.zero(k, h), res.surj)
    dist = None
    if point is not None:
        off = offset if offset is not None else k.zero()
        g = ik(off) + i0(res.mid.element(point.coords))
        dist = (g, point)
    return ShortExactSeq(k, mid, h, ik, surj, dist)


def baer_sum(s1: ShortExactSeq, s2: ShortExactSeq) -> ShortExactSeq:
    """Baer sum: pullback over the quotient, then kill the antidiagonal."""
    if s1.left != s2.left or s1.right != s2.right:
        raise ParentMismatch("Baer sum of extensions with different ends")
    pointed = s1.distinguished is not None and s2.distinguished is not None
    if (s1.distinguished is None) != (s2.distinguished is None):
        raise ParentMismatch("Baer sum of a pointed and an unpointed extension")
    if pointed and s1.point != s2.point:
        raise ParentMismatch("pointed extensions over different points")
    s, (i1, i2), (pr1, pr2) = direct_sum_many([s1.mid, s2.mid])
    _, pincl = kernel(s1.surj @ pr1 - s2.surj @ pr2)
    p1 = pr1 @ pincl
    anti = factor_through_injection(i1 @ s1.inj - i2 @ s2.inj, pincl)
    q_grp, q = cokernel(anti)
    inj = q @ factor_through_injection(i1 @ s1.inj, pincl)
    surj = factor_through_surjection(q, s1.surj @ p1)
    dist = None
    if pointed:
        g = q(pincl.lift(i1(s1.distinguished[0]) + i2(s2.distinguished[0])))
        dist = (g, s1.point)
    return ShortExactSeq(s1.left, q_grp, s1.right, inj, surj, dist)


# ---------------------------------------------------------------------------
# the push-out lift used to realise unit shifts


@dataclass(frozen=True, eq=False)
class PushoutLift:
    group: FgAbGroup
    into: GroupHom
    onto: GroupHom
    phi: GroupHom
    resolution: ShortExactSeq = field(repr=False)
    psi0: GroupHom = field(repr=False)
    psi1: GroupHom = field(repr=False)


def resolve_pushout_lift(delta1: GroupHom, psi: GroupHom, coker_proj: GroupHom | None = None
                         ) -> PushoutLift:
    """Build ``0 -> K1(A) -> G -> K0(A) -> 0`` and ``phi: G -> K0(B)``.

    ``delta1: K1(A) -> K0(B)``; ``psi: K0(A) -> coker delta1``.  With the
    canonical resolution ``F1 -> F0 -> K0(A)`` the map ``psi`` lifts to
    ``psi0: F0 -> K0(B)`` and ``psi1: F1 -> K1(A)``; ``G`` is the pushout of
    ``psi1`` and ``F1 -> F0`` and ``phi`` is induced by ``(delta1, psi0)``.
    """
    c, q = cokernel(delta1) if coker_proj is None else (coker_proj.target, coker_proj)
    if psi.target != c:
        raise ParentMismatch(f"psi must land in coker delta1 = {c}")
    k0a = psi.source
    res = free_resolution(k0a)
    psi0 = GroupHom.from_images(res.mid, delta1.target,
                                [q.lift(psi(res.surj(e))) for e in res.mid.gens()])
    psi1 = GroupHom.from_images(res.left, delta1.source,
                                [delta1.lift(psi0(res.inj(e))) for e in res.left.gens()])
    g, into, tpsi0 = pushout(psi1, res.inj)
    onto = pushout_map(psi1, res.inj, GroupHom.zero(delta1.source, k0a), res.surj)
    phi = pushout_map(psi1, res.inj, delta1, psi0)
    return PushoutLift(g, into, onto, phi, res, psi0, psi1)
