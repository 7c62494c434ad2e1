import json
import subprocess
import sys
from pathlib import Path

import pytest

from ksix.cli import main, run
from ksix.document import parse_text

FIXTURE = Path(__file__).parent / "fixtures" / "ktilde_pair.json"

GROUPS = {
    "Z": {"invariant_factors": [], "free_rank": "1"},
    "Z2": {"invariant_factors": ["2"]},
    "Z4": {"invariant_factors": ["4"]},
    "Z6": {"invariant_factors": ["6"]},
    "ZZ": {"free_rank": "2"},
    "0": {},
}

HOMS = {
    "double": {"source": "Z", "target": "Z", "matrix": [["2"]]},
    "mod2": {"source": "Z", "target": "Z2", "matrix": [["1"]]},
    "zero_Z_0": {"source": "Z", "target": "0", "matrix": []},
    "zero_0_Z": {"source": "0", "target": "Z", "matrix": [[]]},
    "zero_0_0": {"source": "0", "target": "0", "matrix": []},
    "incl1": {"source": "Z", "target": "ZZ", "matrix": [["1"], ["0"]]},
    "proj2": {"source": "ZZ", "target": "Z", "matrix": [["0", "1"]]},
    "zero_Z_Z": {"source": "Z", "target": "Z", "matrix": [["0"]]},
}

SPLIT_MAPS = {"iota0": "incl1", "pi0": "proj2", "delta0": "zero_Z_0",
              "iota1": "zero_0_0", "pi1": "zero_0_0", "delta1": "zero_0_Z"}


def doc(query, **sections):
    body = {"schema_version": "1", "groups": GROUPS, "homs": HOMS, "query": query}
    body.update(sections)
    return json.dumps(body)


def split(unitE, unitA):
    return {"maps": SPLIT_MAPS, "units": {"unitE": unitE, "unitA": unitA}}


def call(command, text, bound=None):
    code, out = run(command, text, bound)
    return code, json.loads(out)


class TestGroupCommands:
    def test_ext(self):
        code, out = call("ext", doc({"H": "Z6", "K": "Z"}))
        assert code == 0 and out["verdict"] == "success"
        g = out["groups"][out["result"]["group"]]
        assert g["invariant_factors"] == ["6"] and out["result"]["order"] == "6"

    def test_hom(self):
        code, out = call("hom", doc({"G": "Z4", "H": "Z6"}))
        assert code == 0 and out["result"]["order"] == "2"

    def test_pointed_ext(self):
        code, out = call("pointed-ext", doc({"H": "Z", "point": ["0"], "K": "Z"}))
        assert code == 0 and out["result"]["order"] is None
        g = out["groups"][out["result"]["group"]]
        assert g["free_rank"] == "1"

    def test_ext_class(self):
        seqs = {"s": {"inj": "double", "surj": "mod2"}}
        code, out = call("ext-class", doc({"sequence": "s"}, sequences=seqs))
        assert code == 0 and out["result"]["class"] == ["1"] and not out["result"]["split"]

    def test_baer_sum(self):
        seqs = {"s": {"inj": "double", "surj": "mod2"}}
        code, out = call("baer-sum", doc({"first": "s", "second": "s"}, sequences=seqs))
        assert code == 0 and out["result"]["class"] == ["0"]

    def test_gamma(self):
        code, out = call("gamma", doc({"k0A": "Z", "unitA": ["2"], "k0B": "Z"}))
        assert code == 0 and out["result"]["generators"] in ([["2"]], [["-2"]])

    def test_gamma_member(self):
        q = {"delta0": "zero_Z_0", "delta1": "double", "unitA": ["1"], "x": ["1"]}
        assert call("gamma-member", doc(q))[0] == 0
        q = {"delta0": "zero_Z_0", "delta1": "zero_Z_Z", "unitA": ["2"], "x": ["1"]}
        assert call("gamma-member", doc(q))[0] == 1


class TestSequenceCommands:
    def six(self):
        return {"S0": split(["0", "1"], ["1"]), "S3": split(["3", "1"], ["1"]),
                "T0": split(["0", "2"], ["2"]), "T1": split(["1", "2"], ["2"])}

    def test_congruent(self):
        code, out = call("congruent", doc({"first": "S0", "second": "S3"}, sixterm=self.six()))
        assert code == 0 and out["result"]["congruent"]
        rho0 = out["homs"][out["result"]["rho0"]]
        assert rho0["matrix"] == [["1", "3"], ["0", "1"]]

    def test_not_congruent(self):
        code, out = call("congruent", doc({"first": "T0", "second": "T1"}, sixterm=self.six()))
        assert code == 1 and out["verdict"] == "no"

    def test_identical(self):
        assert call("congruent", doc({"first": "S0", "second": "S0"}, sixterm=self.six()))[0] == 0

    def test_shift_unit(self):
        code, out = call("shift-unit", doc({"sequence": "S0", "x": ["5"]}, sixterm=self.six()))
        assert code == 0 and out["result"]["unitE"] == ["5", "1"]

    def test_cuntz_sum(self):
        code, out = call("cuntz-sum", doc({"first": "S3", "second": "S3"}, sixterm=self.six()))
        assert code == 0
        shifted = parse_text(json.dumps(out)).sixterm[out["result"]["sequence"]]
        assert shifted.unitA.coords == (1,)

    def test_conditions(self):
        code, out = call("conditions", doc({"sequence": "S0"}, sixterm=self.six()))
        assert code == 0
        assert out["result"]["c4"] and out["result"]["gamma_equal"]
        assert out["result"]["violations"] == []


class TestUCTCommands:
    def test_assemble(self):
        q = {"k0A": "Z2", "unitA": ["1"], "k1A": "0", "k0B": "Z", "k1B": "0"}
        code, out = call("uct-assemble", doc(q))
        assert code == 0
        r = out["result"]
        assert out["groups"][r["K0B_mod_Gamma"]]["free_rank"] == "1"
        assert out["groups"][r["plain_ext"]]["invariant_factors"] == ["2"]

    def test_verify_with_naturality(self):
        q = {"k0A": "Z", "unitA": ["2"], "k1A": "0", "k0B": "Z", "k1B": "0",
             "second_variable": {"k0B": "Z", "k1B": "0", "psi0": "double", "psi1": "zero_0_0"}}
        code, out = call("uct-verify", doc(q))
        assert code == 0 and out["result"]["failures"] == []

    def test_naturality_failure(self):
        q = {"k0A": "Z", "unitA": ["1"], "k1A": "0", "k0B": "Z", "k1B": "0",
             "first_variable": {"k0A": "Z", "unitA": ["1"], "k1A": "0",
                                "alpha0": "double", "alpha1": "zero_0_0"}}
        code, out = call("uct-verify", doc(q))
        assert code == 1


class TestIsoCommands:
    def test_fixture(self):
        text = FIXTURE.read_text()
        assert call("congruent", text)[0] == 0
        assert call("iso", text)[0] == 0
        code, out = call("iso-tilde", text)
        assert code == 1 and out["result"]["verdict"] == "no"

    def test_bound_zero_free_ends(self):
        # K0B = K1B = K1A = 0 and K0E = K0A = Z^2
        homs = dict(HOMS, idZZ={"source": "ZZ", "target": "ZZ", "matrix": [["1", "0"], ["0", "1"]]},
                    zZZ0={"source": "ZZ", "target": "0", "matrix": []},
                    z0ZZ={"source": "0", "target": "ZZ", "matrix": [[], []]})
        six = {"S": {"maps": {"iota0": "z0ZZ", "pi0": "idZZ", "delta0": "zZZ0",
                              "iota1": "zero_0_0", "pi1": "zero_0_0", "delta1": "zero_0_0"},
                     "units": {"unitE": ["1", "1"], "unitA": ["1", "1"]}}}
        ordered = {"B": {"group": "0"}, "E": {"group": "ZZ", "cone": "standard"},
                   "A": {"group": "ZZ", "cone": "standard"}}
        inv = {"I": {"sequence": "S", "orderB": "B", "orderE": "E", "orderA": "A"}}
        text = doc({"first": "I", "second": "I"}, homs=homs, sixterm=six, ordered=ordered,
                   invariants=inv)
        assert call("iso", text, bound=0)[0] == 2
        assert call("iso", text)[0] == 0

class TestErrors:
    def test_parse_error_location(self):
        code, out = call("ext", '{"schema_version": "1",\n  "groups": {,}}')
        assert code == 3
        assert "line 2 column" in out["result"]["error"]

    def test_missing_query_key(self):
        code, out = call("ext", doc({"H": "Z6"}))
        assert code == 3 and "query.K" in out["result"]["error"]

    def test_unknown_reference(self):
        assert call("ext", doc({"H": "nope", "K": "Z"}))[0] == 3

    def test_bad_schema_version(self):
        assert call("ext", json.dumps({"schema_version": "2"}))[0] == 3

    def test_invalid_sequence(self):
        seqs = {"s": {"inj": "double", "surj": "mod2"}}
        bad = dict(HOMS, double={"source": "Z", "target": "Z", "matrix": [["4"]]})
        text = json.dumps({"schema_version": "1", "groups": GROUPS, "homs": bad,
                           "sequences": seqs, "query": {"sequence": "s"}})
        code, out = call("ext-class", text)
        assert code == 3 and "NotExact" in out["result"]["error"]

    def test_cuntz_precondition(self):
        homs = dict(HOMS, idZ={"source": "Z", "target": "Z", "matrix": [["1"]]},
                    z2_0={"source": "Z2", "target": "0", "matrix": []})
        six = {
            # K0B = Z, K1A = Z, everything else split
            "P": {"maps": {"iota0": "idZ", "pi0": "zero_Z_0", "delta0": "zero_0_0",
                           "iota1": "zero_0_Z", "pi1": "idZ", "delta1": "zero_Z_Z"}},
            # same ends, index map doubling
            "Q": {"maps": {"iota0": "mod2", "pi0": "z2_0", "delta0": "zero_0_0",
                           "iota1": "zero_0_0", "pi1": "zero_0_Z", "delta1": "double"}},
        }
        code, out = call("cuntz-sum", doc({"first": "P", "second": "Q"}, sixterm=six, homs=homs))
        assert code == 3 and "delta2_nonzero" in out["result"]["error"]
        assert call("cuntz-sum", doc({"first": "Q", "second": "P"}, sixterm=six, homs=homs))[0] == 0

    def test_unknown_command(self):
        assert run("frobnicate", doc({}))[0] == 3


class TestOutput:
    def test_round_trip(self):
        for command, q in (("ext", {"H": "Z6", "K": "Z"}), ("hom", {"G": "Z4", "H": "Z6"}),
                           ("pointed-ext", {"H": "Z2", "point": ["1"], "K": "Z2"})):
            _, out = run(command, doc(q))
            again = parse_text(out)
            assert again.raw["command"] == command
            names = set(again.groups) | set(again.homs)
            assert names >= {v for v in json.loads(out)["result"].values()
                             if isinstance(v, str) and v.startswith("result.")}

    def test_deterministic(self):
        text = FIXTURE.read_text()
        assert run("iso", text)[1] == run("iso", text)[1]
        assert run("congruent", text)[1] == run("congruent", text)[1]

    def test_integers_are_strings(self):
        _, out = call("ext", doc({"H": "Z6", "K": "Z"}))

        def walk(v):
            if isinstance(v, dict):
                for x in v.values():
                    walk(x)
            elif isinstance(v, list):
                for x in v:
                    walk(x)
            else:
                assert not isinstance(v, int) or isinstance(v, bool)

        walk(out)


class TestMain:
    def test_out_file(self, tmp_path):
        src = tmp_path / "in.json"
        src.write_text(doc({"H": "Z6", "K": "Z"}))
        dest = tmp_path / "out.json"
        assert main(["ext", str(src), "--out", str(dest)]) == 0
        assert json.loads(dest.read_text())["verdict"] == "success"

    def test_env_bound(self, monkeypatch, tmp_path):
        monkeypatch.setenv("KSIX_BOUND", "0")
        src = tmp_path / "in.json"
        src.write_text(FIXTURE.read_text())
        # a zero budget cannot enumerate a single automorphism
        assert main(["iso", str(src), "--out", str(tmp_path / "o.json")]) == 2
        assert main(["iso", str(src), "--bound", "10000", "--out", str(tmp_path / "o.json")]) == 0

    def test_missing_file(self, tmp_path, capsys):
        assert main(["ext", str(tmp_path / "missing.json")]) == 3

    def test_subprocess_stdin(self):
        proc = subprocess.run([sys.executable, "-m", "ksix.cli", "ext", "-"],
                              input=doc({"H": "Z6", "K": "Z"}), capture_output=True, text=True)
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["result"]["order"] == "6"

    def test_bad_command_exits_nonzero(self):
        with pytest.raises(SystemExit):
            main(["frobnicate", "x.json"])
