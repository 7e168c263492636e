import io
import json
import math
import subprocess
import sys
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ruelle_torsion.cli import EXIT_CHECK, EXIT_INPUT, EXIT_OK, run
from ruelle_torsion.flow_model import builtin_text
from ruelle_torsion.report import (
    ComplexLiteralError,
    emit_report,
    format_complex,
    format_value,
    parse_complex,
    parse_machine,
)


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def table_rows(text):
    return text.splitlines()[2:]


class TestComplexLiterals:
    @pytest.mark.parametrize(
        "text, z",
        [("1+0i", 1), ("1.5-2i", 1.5 - 2j), ("-3", -3), ("2.5i", 2.5j), ("i", 1j), ("-i", -1j), ("1e-3+4E2i", 0.001 + 400j), (".5-.25i", 0.5 - 0.25j)],
    )
    def test_parse(self, text, z):
        assert parse_complex(text) == z

    @pytest.mark.parametrize("text", ["", "1+x", "1++2i", "ii", "1+2j", "1/2", "abc"])
    def test_malformed(self, text):
        with pytest.raises(ComplexLiteralError):
            parse_complex(text)

    @given(st.complex_numbers(allow_nan=False, allow_infinity=False))
    def test_round_trip(self, z):
        assert parse_complex(format_complex(z)) == z


class TestEmitReport:
    def test_empty_table_is_header_only(self):
        text = emit_report([], "table", ["a", "b"])
        assert text.splitlines()[0].split() == ["a", "b"]
        assert len(text.splitlines()) == 2
        assert emit_report([], "machine", ["a", "b"]) == ""

    def test_rational_verbatim(self):
        row = [{"nu": Fraction(1, 12)}]
        assert "1/12" in emit_report(row, "table")
        assert '"1/12"' in emit_report(row, "machine")

    def test_machine_round_trip(self):
        rows = [
            {"nu": Fraction(-7, 12), "z": 0.1 - 2.5e-17j, "x": math.pi, "k": 3, "ok": True, "dims": [1, 0, 2], "label": "U(o,j=0,p=1)"},
            {"nu": Fraction(3), "z": complex(-0.0, 1e300), "x": -1e-300, "k": -1, "ok": False, "dims": [], "label": "1+2i label"},
        ]
        back = parse_machine(emit_report(rows, "machine"))
        assert back == rows

    def test_machine_keys_follow_columns(self):
        text = emit_report([{"b": 1, "a": 2}], "machine", ["a", "b"])
        assert list(json.loads(text)) == ["a", "b"]

    def test_determinism_1000_rows(self):
        rows = [{"i": i, "nu": Fraction(i, 7), "v": complex(math.sin(i), math.cos(i)), "f": math.exp(-i / 50)} for i in range(1000)]
        for fmt in ("table", "machine"):
            a = emit_report(rows, fmt).encode()
            b = emit_report([dict(r) for r in rows], fmt).encode()
            assert a == b
        assert len(emit_report(rows, "machine").splitlines()) == 1000

    def test_format_value(self):
        assert format_value(True) == "yes"
        assert format_value(None) == "-"
        assert format_value(1 + 0.0497870683678639j) == "1+0.049787i"
        assert format_value(2.5e-9) == "2.50000e-09"
        assert format_value([1, Fraction(1, 2)]) == "1,1/2"

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            emit_report([{"a": 1}], "xml")


class TestCommands:
    def test_spectrum_six_rows(self):
        code, out, _ = cli("spectrum", "--spec", "ex-c.json", "--window", "1")
        assert code == EXIT_OK
        rows = table_rows(out)
        assert len(rows) == 6
        assert rows[3].split()[0] == "1/12"

    def test_spectrum_machine(self):
        code, out, _ = cli("spectrum", "--spec", "ex-c.json", "--window", "1", "--format", "machine")
        recs = parse_machine(out)
        assert code == EXIT_OK and len(recs) == 6
        assert recs[3]["nu"] == Fraction(1, 12)
        assert recs[3]["dim"] == [1, 1] and recs[3]["kernel_dim"] == [1, 0]
        assert '"1/12"' in out

    def test_morse(self):
        code, out, _ = cli("morse", "--spec", "ex-a.json")
        rows = table_rows(out)
        assert code == EXIT_OK and len(rows) == 3
        assert rows[-1].split()[2] == "="
        assert all(r.split()[2] == ">=" for r in rows[:-1])

    def test_koszul(self):
        code, out, _ = cli("koszul", "--spec", "ex-b.json", "--format", "machine")
        assert code == EXIT_OK
        assert [r["homology_dim"] for r in parse_machine(out)] == [1, 2, 1]

    def test_zfun_zrs(self):
        code, out, _ = cli("zfun", "--spec", "ex-c.json", "--at", "1+0i", "--what", "zrs")
        assert code == EXIT_OK
        assert "1+0.049787i" in table_rows(out)[0].split()

    def test_zfun_all_both_methods(self):
        code, out, _ = cli("zfun", "--spec", "ex-d.json", "--at", "1+1i", "--s", "2", "--what", "all", "--method", "both", "--format", "machine")
        assert code == EXIT_OK
        for rec in parse_machine(out):
            if rec["discrepancy"] is not None:
                assert rec["discrepancy"] < 1e-8

    def test_zfun_left_half_plane(self):
        code, _, err = cli("zfun", "--spec", "ex-c.json", "--at=-1+0i", "--what", "zeta_rs")
        assert code == EXIT_INPUT and "Re z" in err

    def test_zeta(self):
        code, out, _ = cli("zeta", "--spec", "ex-c.json", "--s", "2", "--format", "machine")
        recs = {r["quantity"]: r["value"] for r in parse_machine(out)}
        assert code == EXIT_OK
        assert recs["residue"] == pytest.approx(3 / math.pi, rel=1e-15)
        assert recs["regularized_torsion"] == pytest.approx(math.sqrt(2), rel=1e-15)

    def test_torsion_trials_deterministic(self):
        argv = ("torsion", "--spec", "ex-d.json", "--nu", "4/3", "--trials", "20", "--format", "machine")
        code, a, _ = cli(*argv)
        assert code == EXIT_OK
        assert cli(*argv)[1] == a
        assert all(r["passed"] for r in parse_machine(a))

    def test_torsion_circle(self):
        code, out, _ = cli("torsion", "--circle", "0+1i", "--format", "machine")
        assert code == EXIT_OK
        assert parse_machine(out)[0]["torsion"] == pytest.approx(math.sqrt(2), rel=1e-14)

    def test_fuller(self):
        code, out, _ = cli("fuller", "--spec", "ex-d.json", "--t0", "2", "--sigma", "0.15", "--cutoff", "20", "--horizon", "40")
        assert code == EXIT_OK and out.splitlines()[-1].endswith("yes")

    def test_fuller_bad_support(self):
        code, _, err = cli("fuller", "--spec", "ex-c.json", "--t0", "1", "--sigma", "0.2", "--cutoff", "10", "--horizon", "30")
        assert code == EXIT_INPUT and "6 sigma" in err

    def test_validate_failure_exits_one(self, tmp_path):
        doc = json.loads(builtin_text("ex-b.json"))
        doc["smale_order"] = [["saddle1", "saddle2"], ["saddle2", "saddle1"]]
        path = tmp_path / "cycle.json"
        path.write_text(json.dumps(doc))
        code, out, _ = cli("validate", "--spec", str(path))
        assert code == EXIT_CHECK
        assert "order not acyclic" in out

    def test_examples_dump(self):
        code, out, _ = cli("examples", "--dump", "s1-rotation")
        assert code == EXIT_OK and out == builtin_text("ex-c.json")


class TestErrors:
    def test_unknown_command(self):
        assert cli("frobnicate")[0] == EXIT_INPUT

    def test_malformed_literal(self):
        code, out, err = cli("zfun", "--spec", "ex-c.json", "--at", "1+x")
        assert code == EXIT_INPUT and out == ""
        assert "malformed complex literal" in err

    def test_missing_spec_file(self, tmp_path):
        code, out, _ = cli("morse", "--spec", str(tmp_path / "nope.json"))
        assert code == EXIT_INPUT and out == ""

    def test_invalid_spec_no_partial_table(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"format_version": 1}')
        code, out, _ = cli("spectrum", "--spec", str(path), "--window", "1")
        assert code == EXIT_INPUT and out == ""

    def test_bad_window(self):
        assert cli("spectrum", "--spec", "ex-c.json", "--window", "-1")[0] == EXIT_INPUT
        assert cli("spectrum", "--spec", "ex-c.json", "--window", "one")[0] == EXIT_INPUT

    def test_nu_zero(self):
        assert cli("torsion", "--spec", "ex-c.json", "--nu", "0")[0] == EXIT_INPUT

    def test_morse_without_betti(self, tmp_path):
        doc = json.loads(builtin_text("ex-d.json"))
        doc.pop("betti", None)
        path = tmp_path / "nob.json"
        path.write_text(json.dumps(doc))
        assert cli("morse", "--spec", str(path))[0] == EXIT_INPUT


def test_precision_env_override():
    code = (
        "import io, os; from ruelle_torsion.cli import _policy, build_parser;"
        "a = build_parser().parse_args(['zeta', '--spec', 'ex-c.json']);"
        "print(_policy(a).em_terms)"
    )
    env = {"RT_PRECISION_TERMS": "40", "PATH": "/usr/bin:/bin"}
    got = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env, check=True)
    assert got.stdout.strip() == "40"


def test_console_entry_point():
    got = subprocess.run([sys.executable, "-m", "ruelle_torsion", "morse", "--spec", "ex-a.json", "--format", "machine"], capture_output=True, text=True)
    assert got.returncode == 0
    assert len(parse_machine(got.stdout)) == 3
