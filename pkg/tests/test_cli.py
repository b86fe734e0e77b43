import json
import math

import pytest

from virtsrc.cli import _wavenumber, build_parser, main
from virtsrc.experiments import read_csv


def test_wavenumber_parsing():
    assert _wavenumber("4pi") == pytest.approx(4 * math.pi)
    assert _wavenumber("8*pi") == pytest.approx(8 * math.pi)
    assert _wavenumber("pi") == pytest.approx(math.pi)
    assert _wavenumber("3.5") == 3.5


def test_parser_defaults():
    args = build_parser().parse_args(["solve"])
    assert args.k == pytest.approx(4 * math.pi)
    assert (args.nlambda, args.pade_terms, args.pade_angle) == (12.0, 4, pytest.approx(math.pi / 2))
    assert (args.tol, args.max_iter, args.format, args.node_rule) == (1e-10, 500, "csv", "parameter")


def test_solve_writes_outputs(tmp_path, capsys):
    out, hist, dens = tmp_path / "s.csv", tmp_path / "h.csv", tmp_path / "d.csv"
    assert main(["solve", "--nlambda", "8", "--out", str(out), "--history", str(hist), "--density", str(dens)]) == 0
    summary = json.loads(capsys.readouterr().out)
    row = read_csv(out)[0]
    assert row["rel_error"] == summary["rel_error"]
    assert len(read_csv(hist)) == row["gmres_iters"] + 1
    assert len(read_csv(dens)) == row["N"]


def test_solve_planewave_json(tmp_path, capsys):
    out = tmp_path / "p.json"
    assert main(["solve", "--geometry", "circle:1", "--nlambda", "8", "--format", "json", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["summary"]["kind"] == "planewave"
    assert len(data["density"]["re"]) == data["summary"]["N"]


def test_spectrum_and_table(tmp_path, capsys):
    eig = tmp_path / "e.csv"
    assert main(["spectrum", "--nlambda", "6", "--operator", "A", "--out", str(eig)]) == 0
    rows = read_csv(eig)
    assert {"re", "im", "abs", "cond"} <= set(rows[0])
    table = tmp_path / "t.json"
    assert main(["table", "--nlambdas", "6", "--betas", "0", "1", "--no-spectra", "--format", "json",
                 "--out", str(table)]) == 0
    assert len(json.loads(table.read_text())) == 2


def test_mie_compare_grid_csv(tmp_path, capsys):
    out = tmp_path / "f.csv"
    assert main(["mie-compare", "--geometry", "circle:1", "--nlambda", "6", "--points", "7", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert {"x", "y", "re_u", "im_u", "abs_u"} <= set(rows[0])


def test_errors_exit_nonzero(capsys):
    assert main(["solve", "--beta", "3"]) == 1
    assert "beta" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["launch"])
