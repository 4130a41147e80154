import json
import subprocess
import sys

import pytest

from weylwit.cli import UsageError, main, parse_factors


def run(*argv):
    return main([str(a) for a in argv])


def load(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    assert doc["schema"] == "v1"
    return doc


@pytest.fixture
def iso_file(tmp_path):
    path = tmp_path / "iso.json"
    assert run("build-iso", "--a", "5,1", "--b", "3,1", "-o", path) == 0
    return path


@pytest.fixture
def twisted_file(tmp_path):
    path = tmp_path / "tw.json"
    assert run("build-twisted", "--b", "4,2", "-o", path) == 0
    return path


class TestIsoCommands:
    def test_build_output(self, iso_file):
        doc = load(iso_file)
        assert doc["command"] == "build-iso" and doc["report"]["ok"]

    def test_validate_and_normalize(self, iso_file, tmp_path):
        out = tmp_path / "v.json"
        assert run("validate", iso_file, "-o", out) == 0
        assert load(out)["report"]["ok"]
        assert run("normalize", iso_file, "-o", out) == 0
        assert load(out)["table_mismatches"] == []

    def test_isotropy_and_component(self, iso_file, tmp_path):
        out = tmp_path / "i.json"
        assert run("isotropy", iso_file, "-o", out) == 0
        assert load(out)["ok"]
        assert run("component", iso_file, "-o", out) == 0
        assert load(out)["same_as_reference"]

    def test_transport_to_itself(self, iso_file, tmp_path):
        out = tmp_path / "t.json"
        assert run("transport", iso_file, iso_file, "-o", out) == 0
        assert load(out)["ok"]

    def test_sl_refine_rejects_iso(self, iso_file):
        assert run("sl-refine", iso_file) == 2


class TestTwistedCommands:
    def test_pipeline(self, twisted_file, tmp_path):
        out = tmp_path / "o.json"
        for cmd in ("validate", "normalize", "isotropy"):
            assert run(cmd, twisted_file, "-o", out) == 0, cmd
        assert run("sl-refine", twisted_file, "-o", out) == 0
        doc = load(out)
        assert doc["ok"] and doc["class_count"] == 2
        assert run("transport", twisted_file, twisted_file, "-o", out) == 0

    def test_component_rejects_twisted(self, twisted_file):
        assert run("component", twisted_file) == 2

    def test_mixed_transport(self, twisted_file, iso_file):
        assert run("transport", twisted_file, iso_file) == 2


class TestFailures:
    def test_broken_witness_exits_one(self, iso_file, tmp_path):
        doc = load(iso_file)
        w = doc["witness"]
        w["lines"][0] = [w["lines"][1][i] for i in range(len(w["lines"][0]))]
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc), encoding="utf-8")
        assert run("validate", bad) == 1

    def test_usage_errors(self, capsys):
        assert run("no-such-command") == 2
        assert run("build-iso", "--a", "2", "--b", "1") == 2
        assert run("build-twisted", "--a", "x") == 2
        assert run("weyl", "find", "--type", "E9", "--factors", "2") == 2
        assert run("weyl", "find", "--type", "G2", "--factors", "Phi4^2") == 2

    def test_missing_file(self, tmp_path):
        assert run("validate", tmp_path / "missing.json") == 3

    def test_unwritable_output(self, tmp_path):
        assert run("build-iso", "--a", "1", "-o", tmp_path / "no" / "dir.json") == 3

    def test_help_exits_zero(self, capsys):
        assert run("--help") == 0


class TestWeylCommands:
    def test_find(self, tmp_path):
        out = tmp_path / "f.json"
        assert run("weyl", "find", "--type", "G2", "--factors", "Phi6", "-o", out) == 0
        doc = load(out)
        assert doc["found"] and doc["element"]["length"] == 2

    def test_verify_table(self, tmp_path):
        out = tmp_path / "v.json"
        assert run("weyl", "verify-table", "--type", "G2", "-o", out) == 0
        assert load(out)["ok"]


@pytest.mark.parametrize("text,expect", [
    ("Phi6^4", {6: 4}), ("2^2*14", {2: 2, 14: 1}), ("2:2,14", {2: 2, 14: 1}),
    ("phi_3 phi_3", {3: 2}),
])
def test_parse_factors(text, expect):
    assert parse_factors(text) == expect


@pytest.mark.parametrize("text", ["", "Psi6", "6^"])
def test_parse_factors_rejects(text):
    with pytest.raises(UsageError):
        parse_factors(text)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "weylwit.cli", "build-iso", "--a", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["witness"]
