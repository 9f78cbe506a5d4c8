from __future__ import annotations

import json
import subprocess
import sys

import pytest

from germcat.cli import COMMANDS, Flags, gallery, main, run
from germcat.docformat import parse_document

GALLERY = gallery()
NAMES = [name for name, _, _ in GALLERY]


def test_gallery_size_and_listing(capsys):
    assert len(GALLERY) >= 8
    assert main(["gallery"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert [line.split()[0] for line in out] == NAMES
    assert all(prov for _, _, prov in GALLERY)


@pytest.mark.parametrize("name", NAMES)
def test_every_gallery_document_validates(name, capsys):
    assert main(["run", "validate", name]) == 0
    assert capsys.readouterr().out.rstrip().endswith("suites pass")


def test_records_format(capsys):
    assert main(["run", "validate", "finset2", "--format", "records"]) == 0
    lines = capsys.readouterr().out.splitlines()
    recs = [json.loads(line) for line in lines]
    assert recs and all({"suite", "check", "status"} <= set(r) for r in recs)
    assert {r["status"] for r in recs} <= {"pass", "skipped"}


def test_quotient_and_model_pipelines(capsys):
    assert main(["run", "quotient", "chain3", "principal-collapse"]) == 0
    assert main(["run", "model-check", "transfer"]) == 0
    out = capsys.readouterr().out
    assert out.index("# quotient chain3") < out.index("# quotient principal-collapse")


def test_product_pipeline(capsys):
    assert main(["run", "product", "product-frechet-shadow"]) == 0


def test_sset_demo_window_flag(capsys):
    assert main(["run", "sset-demo", "dn", "--window", "20"]) == 0
    out = capsys.readouterr().out
    assert "d = 0 0 1 1 2 2 3 3 4 4 5" in out


def test_window_bound_is_a_resource_error(capsys):
    assert main(["run", "sset-demo", "dn", "--window", "1000"]) == 3
    assert "resource bound" in capsys.readouterr().out


def test_max_size_is_a_resource_error(capsys):
    assert main(["run", "validate", "transfer", "--max-size", "20"]) == 3


def test_missing_document(capsys):
    assert main(["run", "validate", "no-such-doc"]) == 2
    assert "no such document" in capsys.readouterr().out


def test_parse_error_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.doc"
    p.write_text("[category V]\nbuiltin = finset(2)\ncolour = red\n")
    assert main(["run", "validate", str(p)]) == 2
    assert f"{p}:3:1: error:" in capsys.readouterr().out


def test_bad_filter_flag(capsys):
    assert main(["run", "quotient", "chain3", "--filter", "principal:7"]) == 2


def test_failing_check_exit_code(tmp_path, capsys):
    p = tmp_path / "fail.doc"
    p.write_text(
        "[category F]\nbuiltin = finset(2)\n"
        "[model broken]\ncategory = F\ncofibrations = all\nfibrations = all\nweak = monos\n"
    )
    assert main(["run", "model-check", str(p)]) == 1
    assert "# FAIL" in capsys.readouterr().out


def test_worst_exit_code_wins(tmp_path, capsys):
    assert main(["run", "validate", "finset2", "no-such-doc"]) == 2


def test_seed_flag_is_deterministic():
    doc = parse_document("[random-filters r]\ncount = 50\n")

    def detail(seed):
        return run("validate", doc, Flags(seed=seed))[0].checks[0].detail

    assert detail(1) == detail(1)
    assert detail(1).endswith("non-filters")


def test_unknown_command():
    with pytest.raises(ValueError):
        run("bake", parse_document(""))
    assert "report" in COMMANDS


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "germcat.cli", "gallery"], capture_output=True, text=True)
    assert out.returncode == 0 and "finset2" in out.stdout
