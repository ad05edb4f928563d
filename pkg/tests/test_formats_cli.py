import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from lpmajor import formats
from lpmajor.cli import run
from lpmajor.formats import InputError
from lpmajor.majorization import majorizes
from lpmajor.preserver import build_preserver, replication_spec
from lpmajor.stochastic import WindowOperator, validate
from lpmajor.vectors import SparseVec


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def structured(capsys, argv):
    code = run(argv + ["--format", "structured"])
    return code, json.loads(capsys.readouterr().out)


class TestFormats:
    def test_vector_round_trip(self):
        f = SparseVec({"a": F(1, 3), 7: -2})
        assert formats.vector_from_json(formats.vector_to_json(f)) == f

    def test_vector_rejects_stored_zero_and_float(self):
        with pytest.raises(InputError, match=r"\['b'\]"):
            formats.vector_from_json({"a": "1", "b": "0"})
        with pytest.raises(InputError):
            formats.vector_from_json({"a": 0.5})

    def test_operator_round_trip(self):
        op = WindowOperator("ab", "ab", [[F(1, 3), F(2, 3)], [F(2, 3), F(1, 3)]])
        assert formats.operator_from_json(formats.operator_to_json(op)) == op

    def test_operator_shape_error_names_row(self):
        with pytest.raises(InputError, match=r"block\[1\]"):
            formats.operator_from_json({"rows": ["a", "b"], "cols": ["a", "b"], "block": [["1", "0"], ["1"]]})

    def test_certificate_round_trip(self):
        for f, g in [({"a": "1/2", "b": "1/2"}, {"a": "1"}), ({"a": "2"}, {"a": "1", "b": "1"}), ({"a": "1"}, {"a": "2"})]:
            cert = majorizes(formats.vector_from_json(f), formats.vector_from_json(g))
            back = formats.certificate_from_json(formats.certificate_to_json(cert))
            assert formats.certificate_to_json(back) == formats.certificate_to_json(cert)

    def test_spec_round_trip(self):
        spec = replication_spec(3)
        assert formats.spec_from_json(formats.spec_to_json(spec)) == spec

    def test_injection_map(self):
        (s,) = formats.injections_from_json({"injections": [{"map": {"a": "b"}}]})
        assert s("a") == "b"
        with pytest.raises(InputError):
            formats.injection_from_json({"shift": 1})


class TestCli:
    def test_check_majorized(self, tmp_path, capsys):
        f = write(tmp_path, "f.json", {"a": "1/2", "b": "1/2"})
        g = write(tmp_path, "g.json", {"a": "1"})
        code, out = structured(capsys, ["check", f, g])
        assert code == 0 and out["verdict"] == "majorized"
        assert out["witness"]["block"] == [["1/2", "1/2"], ["1/2", "1/2"]]
        # re-validate the emitted witness
        assert validate(formats.operator_from_json(out["witness"])).is_doubly_stochastic

    def test_check_self_identity(self, tmp_path, capsys):
        f = write(tmp_path, "f.json", {"a": "3", "b": "-1"})
        code, out = structured(capsys, ["check", f, f])
        w = formats.operator_from_json(out["witness"])
        assert code == 0 and w.same_as(WindowOperator.identity())

    def test_check_refuted(self, tmp_path, capsys):
        f = write(tmp_path, "f.json", {"a": "2"})
        g = write(tmp_path, "g.json", {"a": "1", "b": "1"})
        code, out = structured(capsys, ["check", f, g])
        assert code == 1
        assert out["refutation"] == {"kind": "convex_gap", "side": "upper", "c": "1", "lhs": "1", "rhs": "0"}

    def test_bad_input_exit_two(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code = run(["check", str(bad), str(bad)])
        err = capsys.readouterr().err
        assert code == 2 and "bad.json:1:2" in err
        code = run(["check", str(tmp_path / "missing.json"), str(bad)])
        assert code == 2

    def test_equiv(self, tmp_path, capsys):
        f = write(tmp_path, "f.json", {"2": "1/2", "3": "1/4"})
        g = write(tmp_path, "g.json", {"1": "1/2", "2": "1/4"})
        code, out = structured(capsys, ["equiv", f, g])
        assert code == 0 and out["bijection"] == {"1": "2", "2": "3"}
        h = write(tmp_path, "h.json", {"x": "2"})
        code, out = structured(capsys, ["equiv", f, h])
        assert code == 1 and out == {"equivalent": False, "bijection": None}

    def test_ds_validate_and_build(self, tmp_path, capsys):
        op = write(tmp_path, "op.json", {"rows": ["a"], "cols": ["a", "b"], "block": [["1/2", "1/2"]], "tail": "zero"})
        code, out = structured(capsys, ["ds-validate", op])
        assert code == 1 and out["row_stochastic"] and not out["column_stochastic"]
        bad = write(tmp_path, "c.json", {"rows": ["a", "b"], "cols": ["a", "b"], "block": [["2/3", "1/3"], ["1/3", "1/3"]]})
        assert run(["ds-build", bad]) == 2
        assert "ColSumError" in capsys.readouterr().err

    def test_compose_and_dtilde(self, tmp_path, capsys):
        u = write(tmp_path, "u.json", {"rows": ["1", "2"], "cols": ["1", "2"], "block": [["1/2", "1/2"], ["1/2", "1/2"]]})
        code, out = structured(capsys, ["ds-compose", u, u])
        assert code == 0 and out["block"] == [["1/2", "1/2"], ["1/2", "1/2"]]
        inj = write(tmp_path, "s.json", [{"affine": {"k": 2, "c": 0}}])
        code, out = structured(capsys, ["dtilde", u, inj])
        assert code == 0 and out["rows"] == ["2", "4"]

    def test_preserver_pipeline(self, tmp_path, capsys):
        spec = write(tmp_path, "spec.json", formats.spec_to_json(replication_spec(2)))
        code, out = structured(capsys, ["preserver-build", spec, "1..3", "--p", "2"])
        assert code == 0 and out["columns"]["1"] == {"2": "1", "3": "1"}
        assert out["norm"]["approximate"] and float(out["norm"]["column_norm"]) == pytest.approx(2 ** 0.5)
        columns = write(tmp_path, "cols.json", {"columns": out["columns"]})
        code, out = structured(capsys, ["preserver-check", columns])
        assert code == 0 and out == {"row_structure": None, "columns_equivalent": None}
        code, out = structured(capsys, ["preserver-decompose", columns])
        assert code == 0 and [t["sigma"]["affine"] for t in out["spec"]["terms"]] == [{"k": 2, "c": 0}, {"k": 2, "c": 1}]
        f = write(tmp_path, "f.json", {"1": "1"})
        code, out = structured(capsys, ["preserver-apply", columns, f])
        assert code == 0 and out == {"2": "1", "3": "1"}

    def test_decompose_reports_violation(self, tmp_path, capsys):
        columns = write(tmp_path, "c.json", {"columns": {"1": {"1": "1", "2": "1"}, "2": {"2": "1", "4": "1"}}})
        code, out = structured(capsys, ["preserver-decompose", columns])
        assert code == 1 and out["violation"]["labels"] == ["2", "1", "2"]

    def test_overlap_exit_two(self, tmp_path, capsys):
        spec = write(tmp_path, "spec.json", {"terms": [{"alpha": "1", "sigma": {"affine": {"k": 2}}},
                                                       {"alpha": "1", "sigma": {"affine": {"k": 1}}}]})
        assert run(["preserver-build", spec, "1,2"]) == 2

    def test_demo_sum(self, capsys):
        code, out = structured(capsys, ["demo", "sum-of-preservers"])
        assert code == 0
        assert out["row_structure"] == {"kind": "RowWithTwoEntries", "labels": ["2", "1", "2"],
                                        "details": "<Te_1, e_2> = 1, <Te_2, e_2> = 1"}
        assert out["sample_preserved"] is False

    def test_demo_text_mentions_violation(self, capsys):
        assert run(["demo", "sum-of-preservers"]) == 0
        assert "RowWithTwoEntries" in capsys.readouterr().out

    def test_demo_shift_depth(self, capsys):
        code, out = structured(capsys, ["demo", "shift-truncation", "--depth", "4"])
        assert out["bijection"] == {str(n): str(n + 1) for n in range(1, 5)}
        assert out["f_majorized_by_g"] and out["g_majorized_by_f"]
        assert not out["shift_operator_verdict"]["doubly_stochastic"]

    def test_demo_l1(self, capsys):
        code, out = structured(capsys, ["demo", "l1-trace"])
        assert out["samples_preserved"] and out["row_structure"]["kind"] == "RowWithTwoEntries"

    def test_deterministic_subprocess(self, tmp_path):
        f = write(tmp_path, "f.json", {"a": "2", "b": "1", "c": "1"})
        g = write(tmp_path, "g.json", {"a": "3", "b": "1"})
        cmd = [sys.executable, "-m", "lpmajor.cli", "check", f, g, "--format", "structured"]
        a = subprocess.run(cmd, capture_output=True)
        b = subprocess.run(cmd, capture_output=True)
        assert a.returncode == 0 and a.stdout == b.stdout and a.stdout

    def test_spec_window_text_norm(self, tmp_path, capsys):
        T = build_preserver(replication_spec(3), [1])
        assert T.column(1) == SparseVec({3: 1, 4: 1, 5: 1})
        spec = write(tmp_path, "spec.json", formats.spec_to_json(replication_spec(3, 1)))
        assert run(["preserver-build", spec, "1"]) == 0
        assert "||T e_j||_1 = 3" in capsys.readouterr().out
