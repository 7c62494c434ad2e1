"""JSON documents of named groups, elements, maps, sequences and invariants.

Integers travel as decimal strings so that arbitrarily large values survive
any JSON parser.  Plain JSON integers are accepted on input as well.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .abgroup import FgAbGroup, GroupElement, IntMatrix, abelian_group, free, group_from_presentation
from .errors import KSixError
from .homalg import GroupHom, ShortExactSeq
from .invariants import (
    ExplicitGens,
    FullCone,
    IntervalBelow,
    KTildeInvariant,
    OrderedGroup,
    UnitalKSixInvariant,
)
from .sixterm import SPOTS, SixTermSequence

SCHEMA_VERSION = "1"
MAP_NAMES = ("iota0", "pi0", "delta0", "iota1", "pi1", "delta1")
SECTIONS = ("groups", "elements", "homs", "sequences", "sixterm", "ordered", "invariants",
            "tilde")
TOP_KEYS = {"schema_version", "query", "command", "result", "verdict", *SECTIONS}


class InputError(KSixError, ValueError):
    """Malformed or invalid input document."""


def _int(v, where: str) -> int:
    if isinstance(v, bool):
        raise InputError(f"{where}: expected an integer, got {v!r}")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        try:
            return int(v.strip(), 10)
        except ValueError:
            pass
    raise InputError(f"{where}: expected an integer as a decimal string, got {v!r}")


def _ints(vs, where: str) -> list[int]:
    if not isinstance(vs, list):
        raise InputError(f"{where}: expected a list")
    return [_int(v, f"{where}[{i}]") for i, v in enumerate(vs)]


def _obj(v, where: str) -> dict:
    if not isinstance(v, dict):
        raise InputError(f"{where}: expected an object")
    return v


def _s(n: int) -> str:
    return str(n)


@dataclass
class Document:
    """Resolved contents of a document; every entry has passed its constructor."""

    raw: dict
    groups: dict[str, FgAbGroup] = field(default_factory=dict)
    elements: dict[str, GroupElement] = field(default_factory=dict)
    homs: dict[str, GroupHom] = field(default_factory=dict)
    sequences: dict[str, ShortExactSeq] = field(default_factory=dict)
    sixterm: dict[str, SixTermSequence] = field(default_factory=dict)
    ordered: dict[str, OrderedGroup] = field(default_factory=dict)
    invariants: dict[str, UnitalKSixInvariant] = field(default_factory=dict)
    tilde: dict[str, KTildeInvariant] = field(default_factory=dict)
    command: str | None = None

    @property
    def query(self) -> dict:
        """The query object; a sub-object keyed by the active command takes precedence."""
        q = self.raw.get("query", {})
        if not isinstance(q, dict):
            raise InputError("query: expected an object")
        if self.command is not None and isinstance(q.get(self.command), dict):
            return q[self.command]
        return q

    def lookup(self, section: str, name, where: str):
        table = getattr(self, section)
        if not isinstance(name, str) or name not in table:
            raise InputError(f"{where}: unknown {section} reference {name!r}")
        return table[name]

    def element_in(self, ref, group: FgAbGroup, where: str) -> GroupElement:
        """An element given by name or as an inline coordinate list."""
        if isinstance(ref, list):
            coords = _ints(ref, where)
            if len(coords) != group.ngens:
                raise InputError(f"{where}: expected {group.ngens} coordinates for {group}")
            return group.element(coords)
        x = self.lookup("elements", ref, where)
        if x.parent != group:
            raise InputError(f"{where}: element {ref!r} lies in {x.parent}, expected {group}")
        return x


def parse_text(text: str) -> Document:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"parse error at line {exc.lineno} column {exc.colno}: {exc.msg}")
    return build_document(raw)


def build_document(raw) -> Document:
    raw = _obj(raw, "document")
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        raise InputError(f"schema_version must be {SCHEMA_VERSION!r}, got {version!r}")
    extra = set(raw) - TOP_KEYS
    if extra:
        raise InputError(f"unknown top-level keys: {sorted(extra)}")
    doc = Document(raw)
    try:
        for name, spec in _obj(raw.get("groups", {}), "groups").items():
            doc.groups[name] = _parse_group(spec, f"groups.{name}")
        for name, spec in _obj(raw.get("elements", {}), "elements").items():
            where = f"elements.{name}"
            spec = _obj(spec, where)
            g = doc.lookup("groups", spec.get("group"), where + ".group")
            doc.elements[name] = doc.element_in(spec.get("coords"), g, where + ".coords")
        for name, spec in _obj(raw.get("homs", {}), "homs").items():
            doc.homs[name] = _parse_hom(doc, spec, f"homs.{name}")
        for name, spec in _obj(raw.get("sequences", {}), "sequences").items():
            doc.sequences[name] = _parse_ses(doc, spec, f"sequences.{name}")
        for name, spec in _obj(raw.get("sixterm", {}), "sixterm").items():
            doc.sixterm[name] = _parse_sixterm(doc, spec, f"sixterm.{name}")
        for name, spec in _obj(raw.get("ordered", {}), "ordered").items():
            doc.ordered[name] = _parse_ordered(doc, spec, f"ordered.{name}")
        for name, spec in _obj(raw.get("invariants", {}), "invariants").items():
            doc.invariants[name] = _parse_invariant(doc, spec, f"invariants.{name}")
        for name, spec in _obj(raw.get("tilde", {}), "tilde").items():
            doc.tilde[name] = _parse_tilde(doc, spec, f"tilde.{name}")
    except InputError:
        raise
    except KSixError as exc:
        raise InputError(f"validation failed ({type(exc).__name__}): {exc}") from exc
    return doc


def _parse_group(spec, where: str) -> FgAbGroup:
    spec = _obj(spec, where)
    if "relations" in spec:
        n = _int(spec.get("ngens"), where + ".ngens")
        rows = spec["relations"]
        if not isinstance(rows, list):
            raise InputError(f"{where}.relations: expected a list of rows")
        rel = [_ints(r, f"{where}.relations[{i}]") for i, r in enumerate(rows)]
        for i, r in enumerate(rel):
            if len(r) != n:
                raise InputError(f"{where}.relations[{i}]: expected {n} entries")
        return group_from_presentation(IntMatrix(rel, len(rel), n), n)
    factors = _ints(spec.get("invariant_factors", []), where + ".invariant_factors")
    rank = _int(spec.get("free_rank", 0), where + ".free_rank")
    if rank < 0 or any(d < 0 for d in factors):
        raise InputError(f"{where}: negative invariant factor or rank")
    cyclics = [d for d in factors if d != 1]
    rank += sum(1 for d in cyclics if d == 0)
    cyclics = [d for d in cyclics if d]
    ok = all(b % a == 0 for a, b in zip(cyclics, cyclics[1:]))
    if ok:
        return abelian_group(cyclics, rank)
    n = len(cyclics)
    return group_from_presentation(IntMatrix.diag(cyclics, n, n + rank), n + rank) if n else free(rank)


def _parse_hom(doc: Document, spec, where: str) -> GroupHom:
    spec = _obj(spec, where)
    src = doc.lookup("groups", spec.get("source"), where + ".source")
    tgt = doc.lookup("groups", spec.get("target"), where + ".target")
    if "images" in spec:
        imgs = spec["images"]
        if not isinstance(imgs, list):
            raise InputError(f"{where}.images: expected a list")
        return GroupHom.from_images(
            src, tgt, [doc.element_in(v, tgt, f"{where}.images[{i}]") for i, v in enumerate(imgs)])
    rows = spec.get("matrix")
    if not isinstance(rows, list):
        raise InputError(f"{where}: give either 'matrix' or 'images'")
    m = [_ints(r, f"{where}.matrix[{i}]") for i, r in enumerate(rows)]
    if len(m) != tgt.ngens or any(len(r) != src.ngens for r in m):
        raise InputError(f"{where}.matrix: expected {tgt.ngens} rows of {src.ngens} entries")
    return GroupHom(src, tgt, IntMatrix(m, tgt.ngens, src.ngens))


def _parse_ses(doc: Document, spec, where: str) -> ShortExactSeq:
    spec = _obj(spec, where)
    inj = doc.lookup("homs", spec.get("inj"), where + ".inj")
    surj = doc.lookup("homs", spec.get("surj"), where + ".surj")
    dist = None
    if spec.get("distinguished") is not None:
        pair = spec["distinguished"]
        if not isinstance(pair, list) or len(pair) != 2:
            raise InputError(f"{where}.distinguished: expected [mid element, right element]")
        dist = (doc.element_in(pair[0], inj.target, where + ".distinguished[0]"),
                doc.element_in(pair[1], surj.target, where + ".distinguished[1]"))
    return ShortExactSeq(inj.source, inj.target, surj.target, inj, surj, dist)


def _parse_sixterm(doc: Document, spec, where: str) -> SixTermSequence:
    spec = _obj(spec, where)
    maps_spec = _obj(spec.get("maps"), where + ".maps")
    maps = {k: doc.lookup("homs", maps_spec.get(k), f"{where}.maps.{k}") for k in MAP_NAMES}
    groups = {"K0B": maps["iota0"].source, "K0E": maps["pi0"].source,
              "K0A": maps["delta0"].source, "K1B": maps["iota1"].source,
              "K1E": maps["pi1"].source, "K1A": maps["delta1"].source}
    units = spec.get("units")
    unitE = unitA = None
    if units is not None:
        units = _obj(units, where + ".units")
        unitE = doc.element_in(units.get("unitE"), groups["K0E"], where + ".units.unitE")
        unitA = doc.element_in(units.get("unitA"), groups["K0A"], where + ".units.unitA")
    return SixTermSequence(**groups, **maps, unitE=unitE, unitA=unitA)


def _parse_ordered(doc: Document, spec, where: str) -> OrderedGroup:
    spec = _obj(spec, where)
    g = doc.lookup("groups", spec.get("group"), where + ".group")
    cone = spec.get("cone", [])
    if cone == "standard":
        gens = tuple(g.gens())
    else:
        if not isinstance(cone, list):
            raise InputError(f"{where}.cone: expected a list of elements or 'standard'")
        gens = tuple(doc.element_in(v, g, f"{where}.cone[{i}]") for i, v in enumerate(cone))
    sc = _obj(spec.get("scale", {"kind": "full"}), where + ".scale")
    kind = sc.get("kind")
    if kind == "full":
        scale = FullCone()
    elif kind == "interval":
        scale = IntervalBelow(doc.element_in(sc.get("unit"), g, where + ".scale.unit"))
    elif kind == "gens":
        vals = sc.get("gens")
        if not isinstance(vals, list):
            raise InputError(f"{where}.scale.gens: expected a list")
        scale = ExplicitGens(tuple(doc.element_in(v, g, f"{where}.scale.gens[{i}]")
                                   for i, v in enumerate(vals)))
    else:
        raise InputError(f"{where}.scale.kind must be 'full', 'interval' or 'gens'")
    return OrderedGroup(g, gens, scale)


def _parse_invariant(doc: Document, spec, where: str) -> UnitalKSixInvariant:
    spec = _obj(spec, where)
    seq = doc.lookup("sixterm", spec.get("sequence"), where + ".sequence")
    return UnitalKSixInvariant(
        seq, *(doc.lookup("ordered", spec.get(k), f"{where}.{k}")
               for k in ("orderB", "orderE", "orderA")))


def _parse_tilde(doc: Document, spec, where: str) -> KTildeInvariant:
    spec = _obj(spec, where)
    base = doc.lookup("invariants", spec.get("base"), where + ".base")
    dg = doc.lookup("ordered", spec.get("dgroup"), where + ".dgroup")
    unit = doc.element_in(spec.get("unit_D"), dg.group, where + ".unit_D")
    maps = [doc.lookup("homs", spec.get(k), f"{where}.{k}") for k in ("d_inj", "d_surj", "j0")]
    return KTildeInvariant(base, dg, unit, *maps)


# ---------------------------------------------------------------------------
# output


class Writer:
    """Accumulates named result objects into a document that parses back."""

    def __init__(self, prefix: str = "result"):
        self.prefix = prefix
        self.sections: dict[str, dict[str, Any]] = {k: {} for k in SECTIONS}
        self._group_names: dict[tuple, str] = {}

    def _fresh(self, section: str, hint: str) -> str:
        name = f"{self.prefix}.{hint}"
        i = 1
        while name in self.sections[section]:
            i += 1
            name = f"{self.prefix}.{hint}{i}"
        return name

    def group(self, g: FgAbGroup, hint: str = "group") -> str:
        key = g.key()
        if key in self._group_names:
            return self._group_names[key]
        name = self._fresh("groups", hint)
        self.sections["groups"][name] = group_spec(g)
        self._group_names[key] = name
        return name

    def element(self, x: GroupElement, hint: str = "element") -> str:
        gname = self.group(x.parent)
        name = self._fresh("elements", hint)
        self.sections["elements"][name] = {"group": gname, "coords": [_s(c) for c in x.coords]}
        return name

    def hom(self, f: GroupHom, hint: str = "hom") -> str:
        s, t = self.group(f.source), self.group(f.target)
        name = self._fresh("homs", hint)
        self.sections["homs"][name] = {"source": s, "target": t,
                                       "matrix": [[_s(v) for v in r] for r in f.matrix.tolist()]}
        return name

    def ses(self, s: ShortExactSeq, hint: str = "sequence") -> str:
        spec = {"inj": self.hom(s.inj, hint + ".inj"), "surj": self.hom(s.surj, hint + ".surj")}
        if s.distinguished is not None:
            spec["distinguished"] = [[_s(c) for c in s.distinguished[0].coords],
                                     [_s(c) for c in s.distinguished[1].coords]]
        name = self._fresh("sequences", hint)
        self.sections["sequences"][name] = spec
        return name

    def sixterm(self, s: SixTermSequence, hint: str = "sixterm") -> str:
        spec: dict[str, Any] = {"maps": {k: self.hom(getattr(s, k), f"{hint}.{k}")
                                         for k in MAP_NAMES}}
        if s.has_units:
            spec["units"] = {"unitE": [_s(c) for c in s.unitE.coords],
                             "unitA": [_s(c) for c in s.unitA.coords]}
        name = self._fresh("sixterm", hint)
        self.sections["sixterm"][name] = spec
        return name

    def document(self, **top) -> dict:
        out = {"schema_version": SCHEMA_VERSION}
        for k, v in self.sections.items():
            if v:
                out[k] = v
        out.update(top)
        return out


def group_spec(g: FgAbGroup) -> dict:
    return {"invariant_factors": [_s(d) for d in g.invariant_factors],
            "free_rank": _s(g.free_rank)}


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=True) + "\n"


__all__ = ["Document", "InputError", "SCHEMA_VERSION", "SPOTS", "Writer", "build_document",
           "dumps", "group_spec", "parse_text"]
