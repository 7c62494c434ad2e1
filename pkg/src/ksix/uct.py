"""The unital universal coefficient diagram over K-theoretic input data.

Only the left column and the right-hand Hom corner are computed.  The strong
and weak unital Ext groups in the middle column are kept as formal nodes:
their end groups are known, but the extension gluing them is not, so only
their cardinality (when finite) is recorded.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .abgroup import FgAbGroup, GroupElement, direct_sum_many
from .errors import KSixError, ParentMismatch
from .homalg import (
    ExtClassGroup,
    GroupHom,
    PointedExtClassGroup,
    ShortExactSeq,
    Subgroup,
    ext_group,
    factor_through_surjection,
    gamma,
    hom_group,
    pointed_ext_group,
    pointed_hom_group,
)


@dataclass(frozen=True)
class FormalNode:
    """An uncomputed group known only as an extension of ``quotient`` by ``sub``."""

    label: str
    sub: FgAbGroup
    quotient: FgAbGroup

    @property
    def order(self) -> int | None:
        a, b = self.sub.order, self.quotient.order
        return None if a is None or b is None else a * b


@dataclass(frozen=True, eq=False)
class UCTDiagram:
    k0A: FgAbGroup
    unitA: GroupElement
    k1A: FgAbGroup
    k0B: FgAbGroup
    k1B: FgAbGroup
    gamma: Subgroup
    K0B_mod_Gamma: FgAbGroup
    gamma_proj: GroupHom
    pointed_ext0: PointedExtClassGroup = field(repr=False)
    ext0: ExtClassGroup = field(repr=False)
    ext1: ExtClassGroup = field(repr=False)
    pointed_ext: FgAbGroup = field(repr=False)
    plain_ext: FgAbGroup = field(repr=False)
    pointed_hom: FgAbGroup = field(repr=False)
    left_inj: GroupHom = field(repr=False)
    left_surj: GroupHom = field(repr=False)
    pointed_split: tuple = field(repr=False)
    plain_split: tuple = field(repr=False)
    ext_us: FormalNode = field(repr=False)
    ext_uw: FormalNode = field(repr=False)

    def corners(self) -> dict[str, FgAbGroup]:
        return {"K0B_mod_Gamma": self.K0B_mod_Gamma, "pointed_ext": self.pointed_ext,
                "plain_ext": self.plain_ext, "pointed_hom": self.pointed_hom}


def assemble_uct(k0A: FgAbGroup, unitA: GroupElement, k1A: FgAbGroup, k0B: FgAbGroup,
                 k1B: FgAbGroup) -> UCTDiagram:
    if unitA.parent != k0A:
        raise ParentMismatch(f"{unitA} is not in {k0A}")
    gam = gamma(k0A, unitA, k0B)
    quot, qproj = gam.quotient()
    p0 = pointed_ext_group(k0A, unitA, k0B)
    e0 = ext_group(k0A, k0B)
    e1 = ext_group(k1A, k1B)
    pext, p_incs, p_projs = direct_sum_many([p0.carrier, e1.carrier])
    eext, e_incs, e_projs = direct_sum_many([e0.carrier, e1.carrier])
    homs, _, _ = direct_sum_many([pointed_hom_group(k0A, unitA, k1B).carrier,
                                  hom_group(k1A, k0B).carrier])
    structural = p0.structural_seq
    left_inj = p_incs[0] @ structural.inj
    left_surj = e_incs[0] @ structural.surj @ p_projs[0] + e_incs[1] @ p_projs[1]
    ShortExactSeq(quot, pext, eext, left_inj, left_surj)
    return UCTDiagram(
        k0A, unitA, k1A, k0B, k1B, gam, quot, qproj, p0, e0, e1, pext, eext, homs,
        left_inj, left_surj, (p_incs, p_projs), (e_incs, e_projs),
        FormalNode("Ext_us", pext, homs), FormalNode("Ext_uw", eext, homs))


# ---------------------------------------------------------------------------
# induced maps between diagrams


def _lift_to_resolution(alpha: GroupHom):
    """Lifts of ``alpha: H' -> H`` to ``F0' -> F0`` (matrix) and ``F1' -> F1`` (columns)."""
    src, tgt = alpha.source, alpha.target
    t = len(tgt.invariant_factors)
    a0 = [list(alpha.matrix.column(j)) for j in range(src.ngens)]
    a1 = []
    for j, dj in enumerate(src.invariant_factors):
        v = [dj * x for x in a0[j]]
        col = []
        for i, d in enumerate(tgt.invariant_factors):
            col.append(v[i] // d)
        if any(v[t:]):
            raise KSixError("torsion generator lifted outside the relation lattice")
        a1.append(col)
    return a0, a1


def _plain_pullback(e: ExtClassGroup, e_src: ExtClassGroup, a1) -> GroupHom:
    """``alpha^*: Ext(H, K) -> Ext(H', K)`` for the F1-level lift columns ``a1``."""
    k = e.coefficients
    coc, coc_src = e.cocycles, e_src.cocycles
    _, _, projs = direct_sum_many([k] * len(e.slot_incs))
    images = []
    for x in coc.gens():
        comps = [p(x) for p in projs]
        vals = []
        for col in a1:
            y = k.zero()
            for ci, v in zip(col, comps):
                y = y + ci * v
            vals.append(y)
        total = coc_src.zero()
        for inc, v in zip(e_src.slot_incs, vals):
            total = total + inc(v)
        images.append(total)
    m = GroupHom.from_images(coc, coc_src, images)
    return factor_through_surjection(e.proj, e_src.proj @ m)


def _pointed_pullback(p: PointedExtClassGroup, p_src: PointedExtClassGroup,
                      alpha: GroupHom) -> GroupHom:
    """``alpha^*`` on pointed Ext: ``(c, k0) -> (c o a1, k0 - c(w))``.

    ``w`` in ``F1`` satisfies ``f1(w) = a0(h') - h`` with ``h, h'`` the point coordinates.
    """
    k = p.coefficients
    h = p.quotient_group
    a0, a1 = _lift_to_resolution(alpha)
    hp = p_src.point.coords
    lifted = [sum(a0[j][i] * hp[j] for j in range(len(hp))) for i in range(h.ngens)]
    diff = [x - y for x, y in zip(lifted, p.point.coords)]
    t = len(h.invariant_factors)
    if any(diff[t:]) or any(diff[i] % d for i, d in enumerate(h.invariant_factors)):
        raise KSixError("alpha does not carry the source point to the target point")
    w = [diff[i] // d for i, d in enumerate(h.invariant_factors)]
    coc = p.restriction.target
    coc_src = p_src.restriction.target
    slots = len(p.slot_incs)
    _, _, projs = direct_sum_many([k] * slots)
    images = []
    for x in coc.gens():
        comps = [pr(x) for pr in projs]
        c, k0 = comps[:-1], comps[-1]
        vals = []
        for col in a1:
            y = k.zero()
            for ci, v in zip(col, c):
                y = y + ci * v
            vals.append(y)
        cw = k.zero()
        for wi, v in zip(w, c):
            cw = cw + wi * v
        vals.append(k0 - cw)
        total = coc_src.zero()
        for inc, v in zip(p_src.slot_incs, vals):
            total = total + inc(v)
        images.append(total)
    m = GroupHom.from_images(coc, coc_src, images)
    return factor_through_surjection(p.proj, p_src.proj @ m)


def _pushforward(proj: GroupHom, proj_tgt: GroupHom, slot_incs, slot_incs_tgt,
                 psi: GroupHom) -> GroupHom:
    """``psi_*`` applied slotwise on cocycles, then descended to classes."""
    src_coc, tgt_coc = proj.source, proj_tgt.source
    _, _, projs = direct_sum_many([psi.source] * len(slot_incs))
    images = []
    for x in src_coc.gens():
        total = tgt_coc.zero()
        for pr, inc in zip(projs, slot_incs_tgt):
            total = total + inc(psi(pr(x)))
        images.append(total)
    m = GroupHom.from_images(src_coc, tgt_coc, images)
    return factor_through_surjection(proj, proj_tgt @ m)


def _block(split_src, split_tgt, f0, f1) -> GroupHom:
    incs_t, _ = split_tgt
    _, projs_s = split_src
    return incs_t[0] @ f0 @ projs_s[0] + incs_t[1] @ f1 @ projs_s[1]


@dataclass(frozen=True)
class UCTReport:
    checks: dict[str, bool]
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_uct(d: UCTDiagram, first_variable: tuple | None = None,
               second_variable: tuple | None = None) -> UCTReport:
    """Re-check a diagram and optionally its naturality squares.

    ``first_variable = (d_src, (alpha0, alpha1))`` with ``alpha0: (K0A', u') -> (K0A, u)``
    and ``alpha1: K1A' -> K1A`` compares ``d_src`` (over ``A'``) with ``d``.
    ``second_variable = (d_tgt, (psi0, psi1))`` with ``psi_i: K_iB -> K_iB'`` compares
    ``d`` with ``d_tgt``.
    """
    checks: dict[str, bool] = {}
    failures: list[str] = []

    def record(name: str, fn):
        try:
            ok = bool(fn())
            detail = ""
        except KSixError as exc:
            ok, detail = False, f": {exc}"
        checks[name] = ok
        if not ok:
            failures.append(name + detail)

    record("left_column_exact",
           lambda: ShortExactSeq(d.K0B_mod_Gamma, d.pointed_ext, d.plain_ext,
                                 d.left_inj, d.left_surj) is not None)
    record("structural_sequence_exact",
           lambda: ShortExactSeq(d.pointed_ext0.structural_seq.left,
                                 d.pointed_ext0.structural_seq.mid,
                                 d.pointed_ext0.structural_seq.right,
                                 d.pointed_ext0.structural_seq.inj,
                                 d.pointed_ext0.structural_seq.surj) is not None)
    if all(g.is_finite for g in d.corners().values()):
        record("cardinality",
               lambda: d.pointed_ext.order == d.K0B_mod_Gamma.order * d.plain_ext.order
               and d.ext_us.order == d.K0B_mod_Gamma.order * d.ext_uw.order)
    if first_variable is not None:
        src, (alpha0, alpha1) = first_variable
        record("naturality_first_variable", lambda: _first_variable_squares(src, d, alpha0, alpha1))
    if second_variable is not None:
        tgt, (psi0, psi1) = second_variable
        record("naturality_second_variable", lambda: _second_variable_squares(d, tgt, psi0, psi1))
    return UCTReport(checks, tuple(failures))


def _first_variable_squares(src: UCTDiagram, d: UCTDiagram, alpha0: GroupHom,
                            alpha1: GroupHom) -> bool:
    if (alpha0.source != src.k0A or alpha0.target != d.k0A or alpha1.source != src.k1A
            or alpha1.target != d.k1A or src.k0B != d.k0B or src.k1B != d.k1B):
        raise ParentMismatch("naturality maps do not connect the two diagrams")
    if alpha0(src.unitA) != d.unitA:
        raise ParentMismatch("alpha0 is not unital")
    top = factor_through_surjection(d.gamma_proj, src.gamma_proj)
    p0 = _pointed_pullback(d.pointed_ext0, src.pointed_ext0, alpha0)
    _, a1_deg0 = _lift_to_resolution(alpha0)
    _, a1_deg1 = _lift_to_resolution(alpha1)
    e0 = _plain_pullback(d.ext0, src.ext0, a1_deg0)
    e1 = _plain_pullback(d.ext1, src.ext1, a1_deg1)
    mid = _block(d.pointed_split, src.pointed_split, p0, e1)
    bottom = _block(d.plain_split, src.plain_split, e0, e1)
    return src.left_inj @ top == mid @ d.left_inj and src.left_surj @ mid == bottom @ d.left_surj


def _second_variable_squares(d: UCTDiagram, tgt: UCTDiagram, psi0: GroupHom,
                             psi1: GroupHom) -> bool:
    if (psi0.source != d.k0B or psi0.target != tgt.k0B or psi1.source != d.k1B
            or psi1.target != tgt.k1B or d.k0A != tgt.k0A or d.k1A != tgt.k1A
            or d.unitA != tgt.unitA):
        raise ParentMismatch("naturality maps do not connect the two diagrams")
    top = factor_through_surjection(d.gamma_proj, tgt.gamma_proj @ psi0)
    pe, te = d.pointed_ext0, tgt.pointed_ext0
    p0 = _pushforward(pe.proj, te.proj, pe.slot_incs, te.slot_incs, psi0)
    e0 = _pushforward(d.ext0.proj, tgt.ext0.proj, d.ext0.slot_incs, tgt.ext0.slot_incs, psi0)
    e1 = _pushforward(d.ext1.proj, tgt.ext1.proj, d.ext1.slot_incs, tgt.ext1.slot_incs, psi1)
    mid = _block(d.pointed_split, tgt.pointed_split, p0, e1)
    bottom = _block(d.plain_split, tgt.plain_split, e0, e1)
    return tgt.left_inj @ top == mid @ d.left_inj and tgt.left_surj @ mid == bottom @ d.left_surj
