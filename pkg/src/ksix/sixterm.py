"""Six-term exact sequences with distinguished units and their congruence.

Layout and naming follow the K-theory of an extension ``0 -> B -> E -> A -> 0``::

    K0B --iota0--> K0E --pi0--> K0A
     ^                            |
   delta1                       delta0
     |                            v
    K1A <--pi1--- K1E <--iota1-- K1B
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

from .abgroup import FgAbGroup, GroupElement, direct_sum_many
from .errors import (
    NotExact,
    ParentMismatch,
    PreconditionViolated,
    SoundnessFailure,
    UnitIncompatible,
)
from .homalg import (
    GroupHom,
    ShortExactSeq,
    cokernel,
    ext_class,
    extension_isomorphism,
    factor_through_injection,
    factor_through_surjection,
    gamma_delta,
    hom_group,
    is_exact_at,
    kernel,
    pointed_ext_class,
)

SPOTS = ("K0B", "K0E", "K0A", "K1B", "K1E", "K1A")


@dataclass(frozen=True, eq=False)
class SixTermSequence:
    K0B: FgAbGroup
    K0E: FgAbGroup
    K0A: FgAbGroup
    K1B: FgAbGroup
    K1E: FgAbGroup
    K1A: FgAbGroup
    iota0: GroupHom
    pi0: GroupHom
    delta0: GroupHom
    iota1: GroupHom
    pi1: GroupHom
    delta1: GroupHom
    unitE: GroupElement | None = None
    unitA: GroupElement | None = None

    def __post_init__(self):
        ends = {
            "iota0": (self.K0B, self.K0E), "pi0": (self.K0E, self.K0A),
            "delta0": (self.K0A, self.K1B), "iota1": (self.K1B, self.K1E),
            "pi1": (self.K1E, self.K1A), "delta1": (self.K1A, self.K0B),
        }
        for name, (src, tgt) in ends.items():
            f = getattr(self, name)
            if f.source != src or f.target != tgt:
                raise ParentMismatch(f"{name} must map {src} -> {tgt}, got {f.source} -> {f.target}")
        cycle = [self.delta1, self.iota0, self.pi0, self.delta0, self.iota1, self.pi1,
                 self.delta1]
        for spot, f, g in zip(SPOTS, cycle, cycle[1:]):
            if not is_exact_at(f, g):
                raise NotExact(spot)
        if (self.unitE is None) != (self.unitA is None):
            raise UnitIncompatible("give both units or neither")
        if self.unitE is not None:
            if self.unitE.parent != self.K0E or self.unitA.parent != self.K0A:
                raise UnitIncompatible("units lie in the wrong groups")
            if self.pi0(self.unitE) != self.unitA:
                raise UnitIncompatible("pi0(unitE) differs from unitA")

    @property
    def has_units(self) -> bool:
        return self.unitE is not None

    def groups(self) -> dict[str, FgAbGroup]:
        return {name: getattr(self, name) for name in SPOTS}

    def maps(self) -> dict[str, GroupHom]:
        return {name: getattr(self, name)
                for name in ("iota0", "pi0", "delta0", "iota1", "pi1", "delta1")}

    def replace(self, **changes) -> SixTermSequence:
        kw = {**self.groups(), **self.maps(), "unitE": self.unitE, "unitA": self.unitA}
        kw.update(changes)
        return SixTermSequence(**kw)

    def same_boundary_data(self, other: SixTermSequence) -> bool:
        return (self.K0B == other.K0B and self.K0A == other.K0A and self.K1B == other.K1B
                and self.K1A == other.K1A and self.delta0 == other.delta0
                and self.delta1 == other.delta1 and self.has_units == other.has_units
                and (not self.has_units or self.unitA == other.unitA))

    # the two short exact sequences that classify the middle groups

    @cached_property
    def degree0_extension(self) -> ShortExactSeq:
        """``0 -> coker delta1 -> K0E -> ker delta0 -> 0``, pointed at the units."""
        c, q = cokernel(self.delta1)
        n, nincl = kernel(self.delta0)
        inj = factor_through_surjection(q, self.iota0)
        surj = factor_through_injection(self.pi0, nincl)
        dist = None
        if self.has_units:
            dist = (self.unitE, nincl.lift(self.unitA))
        return ShortExactSeq(c, self.K0E, n, inj, surj, dist)

    @cached_property
    def degree1_extension(self) -> ShortExactSeq:
        """``0 -> coker delta0 -> K1E -> ker delta1 -> 0``."""
        c, q = cokernel(self.delta0)
        n, nincl = kernel(self.delta1)
        inj = factor_through_surjection(q, self.iota1)
        surj = factor_through_injection(self.pi1, nincl)
        return ShortExactSeq(c, self.K1E, n, inj, surj)

    @cached_property
    def classes(self) -> tuple[GroupElement, GroupElement]:
        d0 = self.degree0_extension
        c0 = pointed_ext_class(d0) if self.has_units else ext_class(d0)
        return c0, ext_class(self.degree1_extension)


def build(groups: dict, maps: dict, units: tuple | None = None) -> SixTermSequence:
    """Validated constructor from name-keyed dictionaries."""
    unitE, unitA = units if units is not None else (None, None)
    return SixTermSequence(**groups, **maps, unitE=unitE, unitA=unitA)


def congruent(s1: SixTermSequence, s2: SixTermSequence) -> bool:
    """Whether some ``(id, rho, id)`` maps ``s1`` to ``s2`` preserving units.

    End groups, boundary maps and ``unitA`` must agree literally; the middles
    are then compared through the (pointed) Ext classes of the two induced
    short exact sequences, which classify them exactly.
    """
    if not s1.same_boundary_data(s2):
        return False
    return s1.classes == s2.classes


def congruence_witness(s1: SixTermSequence, s2: SixTermSequence
                       ) -> tuple[GroupHom, GroupHom] | None:
    """Middle isomorphisms ``(rho0, rho1)`` realising a congruence, or ``None``."""
    if not s1.same_boundary_data(s2):
        return None
    rho0 = extension_isomorphism(s1.degree0_extension, s2.degree0_extension)
    rho1 = extension_isomorphism(s1.degree1_extension, s2.degree1_extension)
    if rho0 is None or rho1 is None:
        return None
    if not is_congruence(s1, s2, rho0, rho1):
        raise SoundnessFailure("constructed congruence fails verification")
    return rho0, rho1


def is_congruence(s1: SixTermSequence, s2: SixTermSequence,
                  rho0: GroupHom, rho1: GroupHom) -> bool:
    """Check directly that ``(id, rho, id)`` is an isomorphism ``s1 -> s2``."""
    return (s1.same_boundary_data(s2)
            and rho0.source == s1.K0E and rho0.target == s2.K0E
            and rho1.source == s1.K1E and rho1.target == s2.K1E
            and rho0 @ s1.iota0 == s2.iota0 and s2.pi0 @ rho0 == s1.pi0
            and rho1 @ s1.iota1 == s2.iota1 and s2.pi1 @ rho1 == s1.pi1
            and (not s1.has_units or rho0(s1.unitE) == s2.unitE)
            and rho0.is_isomorphism() and rho1.is_isomorphism())


def shift_unit(s: SixTermSequence, x: GroupElement) -> SixTermSequence:
    """Replace ``unitE`` by ``unitE + iota0(x)`` for ``x`` in ``K0B``."""
    if not s.has_units:
        raise UnitIncompatible("sequence carries no units")
    if x.parent != s.K0B:
        raise ParentMismatch(f"{x} is not in K0B = {s.K0B}")
    return s.replace(unitE=s.unitE + s.iota0(x))


def _sum_degree(iota1_, pi1_, iota2, pi2):
    """Pullback of the two middles over the quotient, modulo the antidiagonal."""
    s, (i1, i2), (pr1, pr2) = direct_sum_many([iota1_.target, iota2.target])
    _, pincl = kernel(pi1_ @ pr1 - pi2 @ pr2)
    anti = factor_through_injection(i1 @ iota1_ - i2 @ iota2, pincl)
    mid, q = cokernel(anti)
    iota = q @ factor_through_injection(i1 @ iota1_, pincl)
    pi = factor_through_surjection(q, pi1_ @ pr1 @ pincl)

    def point(a, b):
        return q(pincl.lift(i1(a) + i2(b)))

    return mid, iota, pi, point


def cuntz_sum(s1: SixTermSequence, s2: SixTermSequence) -> SixTermSequence:
    """Six-term sequence of a sum of extensions when the second has zero boundary maps."""
    if not (s2.delta0.is_zero() and s2.delta1.is_zero()):
        raise PreconditionViolated("delta2_nonzero: the second summand must have vanishing "
                                   "boundary maps")
    for name in ("K0B", "K0A", "K1B", "K1A"):
        if getattr(s1, name) != getattr(s2, name):
            raise ParentMismatch(f"end group {name} differs between the summands")
    if s1.has_units != s2.has_units or (s1.has_units and s1.unitA != s2.unitA):
        raise ParentMismatch("summands carry different quotient units")
    e0, iota0, pi0, pt0 = _sum_degree(s1.iota0, s1.pi0, s2.iota0, s2.pi0)
    e1, iota1, pi1, _ = _sum_degree(s1.iota1, s1.pi1, s2.iota1, s2.pi1)
    unitE = pt0(s1.unitE, s2.unitE) if s1.has_units else None
    return SixTermSequence(
        s1.K0B, e0, s1.K0A, s1.K1B, e1, s1.K1A,
        iota0, pi0, s1.delta0, iota1, pi1, s1.delta1,
        unitE, s1.unitA if s1.has_units else None)


def split_sequence(K0B, K0A, K1B, K1A, unitA=None, offset=None) -> SixTermSequence:
    """Sequence with vanishing boundary maps and direct-sum middles.

    ``unitE = offset + unitA`` in ``K0B + K0A`` (``offset`` defaults to 0).
    """
    e0, (ib0, ia0), (pb0, pa0) = direct_sum_many([K0B, K0A])
    e1, (ib1, ia1), (pb1, pa1) = direct_sum_many([K1B, K1A])
    unitE = None
    if unitA is not None:
        off = offset if offset is not None else K0B.zero()
        unitE = ib0(off) + ia0(unitA)
    return SixTermSequence(
        K0B, e0, K0A, K1B, e1, K1A,
        ib0, pa0, GroupHom.zero(K0A, K1B), ib1, pa1, GroupHom.zero(K1A, K0B),
        unitE, unitA)


# ---------------------------------------------------------------------------
# sufficient conditions for the two gamma sets to agree


@dataclass(frozen=True)
class ConditionReport:
    c1: bool
    c2: bool
    c3: bool
    c4: bool
    c5: bool
    c6: bool
    gamma_equal: bool

    @property
    def flagged(self) -> list[str]:
        return [n for n in ("c1", "c2", "c3", "c4", "c5", "c6") if getattr(self, n)]

    @property
    def violations(self) -> list[str]:
        """Conditions reported true although the gamma sets differ."""
        return [] if self.gamma_equal else self.flagged

    def as_dict(self) -> dict:
        return {"c1": self.c1, "c2": self.c2, "c3": self.c3, "c4": self.c4,
                "c5": self.c5, "c6": self.c6, "gamma_equal": self.gamma_equal}


def is_direct_summand(incl: GroupHom) -> bool:
    """Whether the injective ``incl: N -> G`` admits a retraction ``r o incl == id``."""
    n, g = incl.source, incl.target
    homs_gn = hom_group(g, n)
    homs_nn = hom_group(n, n)
    restrict = GroupHom.from_images(
        homs_gn.carrier, homs_nn.carrier,
        [homs_nn.element_of(homs_gn.realize(e) @ incl) for e in homs_gn.carrier.gens()])
    return restrict.in_image(homs_nn.element_of(GroupHom.identity(n)))


def check_unit_conditions(s: SixTermSequence) -> ConditionReport:
    if not s.has_units:
        raise UnitIncompatible("conditions concern the unit class; sequence has no units")
    u = s.unitA
    c1 = u.is_zero()
    c2 = s.delta0.is_injective()
    c3 = s.delta1.is_surjective()
    free_coords = u.coords[len(s.K0A.invariant_factors):]
    c4 = math.gcd(*free_coords) == 1 if free_coords else False
    c5 = is_direct_summand(kernel(s.delta0)[1])
    c6 = s.K0E.is_trivial
    full = gamma_delta(s.delta0, s.delta1, u)
    partial = gamma_delta(GroupHom.zero(s.K0A, s.K1B), s.delta1, u)
    return ConditionReport(c1, c2, c3, c4, c5, c6, full == partial)
