"""Command-line batch interface.

Usage::

    ksix COMMAND INPUT.json [--bound N] [--out FILE]

Exit codes: 0 yes/success, 1 no, 2 unknown, 3 input error, 4 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Callable

from . import homalg, invariants, sixterm, uct
from .document import Document, InputError, Writer, dumps, parse_text
from .errors import KSixError, SoundnessFailure
from .invariants import DEFAULT_BOUND, Verdict

EXIT = {"yes": 0, "success": 0, "no": 1, "unknown": 2, "input_error": 3, "internal_error": 4}


class Outcome:
    def __init__(self, verdict: str, result: dict, writer: Writer):
        self.verdict = verdict
        self.result = result
        self.writer = writer


def _q(doc: Document, key: str):
    if key not in doc.query:
        raise InputError(f"query.{key} is required")
    return doc.query[key]


def _group(doc, key):
    return doc.lookup("groups", _q(doc, key), f"query.{key}")


def _elem(doc, key, group):
    return doc.element_in(_q(doc, key), group, f"query.{key}")


def _hom(doc, key):
    return doc.lookup("homs", _q(doc, key), f"query.{key}")


def _seq(doc, key):
    return doc.lookup("sequences", _q(doc, key), f"query.{key}")


def _six(doc, key):
    return doc.lookup("sixterm", _q(doc, key), f"query.{key}")


def _coords(x) -> list[str]:
    return [str(c) for c in x.coords]


# ---------------------------------------------------------------------------
# commands


def cmd_ext(doc: Document, bound: int) -> Outcome:
    w = Writer()
    e = homalg.ext_group(_group(doc, "H"), _group(doc, "K"))
    return Outcome("success", {"group": w.group(e.carrier, "ext"),
                               "order": _order(e.carrier)}, w)


def cmd_hom(doc: Document, bound: int) -> Outcome:
    w = Writer()
    h = homalg.hom_group(_group(doc, "G"), _group(doc, "H"))
    return Outcome("success", {"group": w.group(h.carrier, "hom"),
                               "order": _order(h.carrier)}, w)


def cmd_pointed_ext(doc: Document, bound: int) -> Outcome:
    w = Writer()
    h = _group(doc, "H")
    p = homalg.pointed_ext_group(h, _elem(doc, "point", h), _group(doc, "K"))
    st = p.structural_seq
    return Outcome("success", {
        "group": w.group(p.carrier, "pointed_ext"), "order": _order(p.carrier),
        "K_mod_Gamma": w.group(st.left, "K_mod_Gamma"), "ext": w.group(st.right, "ext"),
        "structural_inj": w.hom(st.inj, "structural_inj"),
        "structural_surj": w.hom(st.surj, "structural_surj")}, w)


def cmd_ext_class(doc: Document, bound: int) -> Outcome:
    w = Writer()
    s = _seq(doc, "sequence")
    if s.distinguished is not None:
        c = homalg.pointed_ext_class(s)
        kind = "pointed"
    else:
        c = homalg.ext_class(s)
        kind = "plain"
    return Outcome("success", {"kind": kind, "group": w.group(c.parent, "ext"),
                               "class": _coords(c), "split": c.is_zero()}, w)


def cmd_baer_sum(doc: Document, bound: int) -> Outcome:
    w = Writer()
    s = homalg.baer_sum(_seq(doc, "first"), _seq(doc, "second"))
    c = homalg.pointed_ext_class(s) if s.distinguished is not None else homalg.ext_class(s)
    return Outcome("success", {"sequence": w.ses(s, "baer_sum"),
                               "mid": w.group(s.mid, "mid"),
                               "class": _coords(c), "class_group": w.group(c.parent, "ext")}, w)


def cmd_gamma(doc: Document, bound: int) -> Outcome:
    w = Writer()
    k0a = _group(doc, "k0A")
    sub = homalg.gamma(k0a, _elem(doc, "unitA", k0a), _group(doc, "k0B"))
    quot, _ = sub.quotient()
    return Outcome("success", {
        "generators": [_coords(x) for x in sub.generators()],
        "subgroup": w.group(sub.group, "gamma"), "quotient": w.group(quot, "K0B_mod_Gamma")}, w)


def cmd_gamma_member(doc: Document, bound: int) -> Outcome:
    w = Writer()
    d0, d1 = _hom(doc, "delta0"), _hom(doc, "delta1")
    sub = homalg.gamma_delta(d0, d1, _elem(doc, "unitA", d0.source))
    x = _elem(doc, "x", d1.target)
    member = sub.contains(x)
    return Outcome("yes" if member else "no", {
        "member": member, "generators": [_coords(g) for g in sub.generators()]}, w)


def cmd_congruent(doc: Document, bound: int) -> Outcome:
    w = Writer()
    s1, s2 = _six(doc, "first"), _six(doc, "second")
    wit = sixterm.congruence_witness(s1, s2)
    if sixterm.congruent(s1, s2) != (wit is not None):
        raise SoundnessFailure("class comparison and explicit witness disagree")
    result = {"congruent": wit is not None}
    if wit is not None:
        result["rho0"] = w.hom(wit[0], "rho0")
        result["rho1"] = w.hom(wit[1], "rho1")
    return Outcome("yes" if wit is not None else "no", result, w)


def cmd_shift_unit(doc: Document, bound: int) -> Outcome:
    w = Writer()
    s = _six(doc, "sequence")
    t = sixterm.shift_unit(s, _elem(doc, "x", s.K0B))
    return Outcome("success", {"sequence": w.sixterm(t, "shifted"),
                               "unitE": _coords(t.unitE)}, w)


def cmd_cuntz_sum(doc: Document, bound: int) -> Outcome:
    w = Writer()
    t = sixterm.cuntz_sum(_six(doc, "first"), _six(doc, "second"))
    result = {"sequence": w.sixterm(t, "cuntz_sum"), "K0E": w.group(t.K0E, "K0E"),
              "K1E": w.group(t.K1E, "K1E")}
    if t.has_units:
        result["unitE"] = _coords(t.unitE)
    return Outcome("success", result, w)


def cmd_conditions(doc: Document, bound: int) -> Outcome:
    w = Writer()
    r = sixterm.check_unit_conditions(_six(doc, "sequence"))
    result = {**r.as_dict(), "violations": r.violations}
    if r.violations:
        raise _Violation(result, w)
    return Outcome("success", result, w)


class _Violation(Exception):
    def __init__(self, result, writer):
        self.result = result
        self.writer = writer


def _uct_inputs(doc: Document, prefix: str = ""):
    k0a = _group(doc, prefix + "k0A")
    return (k0a, _elem(doc, prefix + "unitA", k0a), _group(doc, prefix + "k1A"),
            _group(doc, prefix + "k0B"), _group(doc, prefix + "k1B"))


def _uct_result(d: uct.UCTDiagram, w: Writer) -> dict:
    return {
        "K0B_mod_Gamma": w.group(d.K0B_mod_Gamma, "K0B_mod_Gamma"),
        "pointed_ext": w.group(d.pointed_ext, "pointed_ext"),
        "plain_ext": w.group(d.plain_ext, "plain_ext"),
        "pointed_hom": w.group(d.pointed_hom, "pointed_hom"),
        "left_inj": w.hom(d.left_inj, "left_inj"),
        "left_surj": w.hom(d.left_surj, "left_surj"),
        "formal_nodes": {n.label: {"sub": w.group(n.sub), "quotient": w.group(n.quotient),
                                   "order": None if n.order is None else str(n.order)}
                         for n in (d.ext_us, d.ext_uw)},
    }


def cmd_uct_assemble(doc: Document, bound: int) -> Outcome:
    w = Writer()
    return Outcome("success", _uct_result(uct.assemble_uct(*_uct_inputs(doc)), w), w)


def cmd_uct_verify(doc: Document, bound: int) -> Outcome:
    w = Writer()
    d = uct.assemble_uct(*_uct_inputs(doc))
    first = second = None
    if "first_variable" in doc.query:
        fv = doc.query["first_variable"]
        if not isinstance(fv, dict):
            raise InputError("query.first_variable: expected an object")
        k0a = doc.lookup("groups", fv.get("k0A"), "query.first_variable.k0A")
        src = uct.assemble_uct(
            k0a, doc.element_in(fv.get("unitA"), k0a, "query.first_variable.unitA"),
            doc.lookup("groups", fv.get("k1A"), "query.first_variable.k1A"), d.k0B, d.k1B)
        first = (src, (doc.lookup("homs", fv.get("alpha0"), "query.first_variable.alpha0"),
                       doc.lookup("homs", fv.get("alpha1"), "query.first_variable.alpha1")))
    if "second_variable" in doc.query:
        sv = doc.query["second_variable"]
        if not isinstance(sv, dict):
            raise InputError("query.second_variable: expected an object")
        tgt = uct.assemble_uct(
            d.k0A, d.unitA, d.k1A,
            doc.lookup("groups", sv.get("k0B"), "query.second_variable.k0B"),
            doc.lookup("groups", sv.get("k1B"), "query.second_variable.k1B"))
        second = (tgt, (doc.lookup("homs", sv.get("psi0"), "query.second_variable.psi0"),
                        doc.lookup("homs", sv.get("psi1"), "query.second_variable.psi1")))
    rep = uct.verify_uct(d, first, second)
    result = {"checks": rep.checks, "failures": list(rep.failures)}
    intrinsic = [f for f in rep.failures if not f.startswith("naturality")]
    if intrinsic:
        raise _Violation(result, w)
    return Outcome("yes" if rep.ok else "no", result, w)


def _iso_result(dec: invariants.Decision, w: Writer) -> Outcome:
    result = {"verdict": dec.verdict.value, "detail": dec.detail}
    if dec.verdict is Verdict.YES:
        result["witness"] = {k: w.hom(f, k) for k, f in dec.witness.maps().items()}
    return Outcome(dec.verdict.value, result, w)


def cmd_iso(doc: Document, bound: int) -> Outcome:
    i1 = doc.lookup("invariants", _q(doc, "first"), "query.first")
    i2 = doc.lookup("invariants", _q(doc, "second"), "query.second")
    return _iso_result(invariants.isomorphic(i1, i2, bound), Writer())


def cmd_iso_tilde(doc: Document, bound: int) -> Outcome:
    k1 = doc.lookup("tilde", _q(doc, "first"), "query.first")
    k2 = doc.lookup("tilde", _q(doc, "second"), "query.second")
    return _iso_result(invariants.isomorphic_tilde(k1, k2, bound), Writer())


COMMANDS: dict[str, Callable[[Document, int], Outcome]] = {
    "ext": cmd_ext,
    "hom": cmd_hom,
    "pointed-ext": cmd_pointed_ext,
    "ext-class": cmd_ext_class,
    "baer-sum": cmd_baer_sum,
    "gamma": cmd_gamma,
    "gamma-member": cmd_gamma_member,
    "congruent": cmd_congruent,
    "shift-unit": cmd_shift_unit,
    "cuntz-sum": cmd_cuntz_sum,
    "conditions": cmd_conditions,
    "uct-assemble": cmd_uct_assemble,
    "uct-verify": cmd_uct_verify,
    "iso": cmd_iso,
    "iso-tilde": cmd_iso_tilde,
}


def _order(g) -> str | None:
    return None if g.order is None else str(g.order)


def default_bound() -> int:
    env = os.environ.get("KSIX_BOUND")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            pass
    return DEFAULT_BOUND


def run(command: str, text: str, bound: int | None = None) -> tuple[int, str]:
    """Execute one command on a document; returns ``(exit code, output text)``."""
    bound = default_bound() if bound is None else bound
    query = None
    try:
        if command not in COMMANDS:
            raise InputError(f"unknown command {command!r}")
        doc = parse_text(text)
        doc.command = command
        query = doc.query
        out = COMMANDS[command](doc, bound)
        status, result, writer = out.verdict, out.result, out.writer
    except _Violation as v:
        status, result, writer = "internal_error", v.result, v.writer
    except InputError as exc:
        status, result, writer = "input_error", {"error": str(exc)}, Writer()
    except SoundnessFailure as exc:
        status, result, writer = "internal_error", {"error": str(exc)}, Writer()
    except KSixError as exc:
        status, result, writer = "input_error", {
            "error": f"{type(exc).__name__}: {exc}"}, Writer()
    except Exception as exc:  # any other failure is a bug, reported as such
        status, result, writer = "internal_error", {
            "error": f"{type(exc).__name__}: {exc}"}, Writer()
    body = writer.document(command=command, query=query if query is not None else {},
                           result=result, verdict=status)
    return EXIT[status], dumps(body)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="ksix", description=__doc__.split("\n\n")[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("input", help="input document (JSON); '-' reads standard input")
    parser.add_argument("--bound", type=int, default=None,
                        help="candidate budget for searches (default 10000 or $KSIX_BOUND)")
    parser.add_argument("--out", help="write the result document here instead of stdout")
    args = parser.parse_args(argv)
    try:
        if args.input == "-":
            text = sys.stdin.read()
        else:
            with open(args.input, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        print(f"ksix: cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT["input_error"]
    code, out = run(args.command, text, args.bound)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
