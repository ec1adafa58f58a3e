"""CLI behaviour: JSON I/O, exit codes, determinism, cross-check failures."""

import json

import pytest

from abeldim.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_check_single_vertex(tmp_path, capsys):
    g = write(tmp_path, "g.json", {"vertices": [{"id": "v", "e": -2}], "edges": []})
    code, out, _ = run_cli(capsys, "check", "--graph", g)
    assert code == 0
    data = json.loads(out)
    assert data["valid"] is True
    assert data["det"] == 2
    assert data["Z_K"] == {}
    assert data["Z_min"] == {"v": 1}


def test_check_rejects_indefinite(tmp_path, capsys):
    g = write(tmp_path, "g.json", {"vertices": [{"id": "v", "e": 0}], "edges": []})
    code, out, err = run_cli(capsys, "check", "--graph", g)
    assert code == 1
    assert "NotNegativeDefinite" in err


def test_check_ex56_builtin(capsys):
    code, out, _ = run_cli(capsys, "check", "--example", "ex56", "--b", "30")
    assert code == 0
    data = json.loads(out)
    assert data["det"] == 28
    assert data["Z_min"]["v0"] == 1
    assert data["chi_Z_min"] == -3


def test_dim_zero_chern(tmp_path, capsys):
    g = write(tmp_path, "g.json", {"vertices": [{"id": "v", "e": -2}], "edges": []})
    lp = write(tmp_path, "lp.json", {})
    z = write(tmp_path, "z.json", {"v": 2})
    code, out, _ = run_cli(capsys, "dim", "--graph", g, "--Z", z, "--lprime", lp)
    assert code == 0
    data = json.loads(out)
    assert data["d"] == 0
    assert data["methods"] == {m: 0 for m in ("direct", "form3", "first", "second")}


def test_dim_rejects_negative_chern(tmp_path, capsys):
    g = write(tmp_path, "g.json", {"vertices": [{"id": "v", "e": -2}], "edges": []})
    lp = write(tmp_path, "lp.json", {"v": -1})
    code, _, err = run_cli(capsys, "dim", "--graph", g, "--Z-auto", "--lprime", lp)
    assert code == 1
    assert "NotInLipmanCone" in err


def test_dim_ex56_codim_with_witness(capsys):
    code, out, _ = run_cli(capsys, "dim", "--example", "ex56", "--b", "30",
                           "--Z-auto", "--lprime-zmin", "--method", "form3")
    assert code == 0
    data = json.loads(out)
    assert data["codim"] >= 4
    assert data["d"] + data["codim"] == data["h1"] == 6
    assert data["witness_Z1"]
    assert data["dominant"] is False


def test_dim_deterministic_bytes(capsys):
    _, out1, _ = run_cli(capsys, "dim", "--example", "ex56", "--b", "21",
                         "--Z-auto", "--lprime-zmin", "--method", "form3")
    _, out2, _ = run_cli(capsys, "dim", "--example", "ex56", "--b", "21",
                         "--Z-auto", "--lprime-zmin", "--method", "form3")
    assert out1 == out2


def test_bounds_dominant_instance(tmp_path, capsys):
    g = write(tmp_path, "g.json", {"vertices": [{"id": "v", "e": -2}], "edges": []})
    lp = write(tmp_path, "lp.json", {"v": 1})
    z = write(tmp_path, "z.json", {"v": 2})
    code, out, _ = run_cli(capsys, "bounds", "--graph", g, "--Z", z, "--lprime", lp)
    assert code == 0
    data = json.loads(out)
    assert data["dominant"] is True
    assert data["T"] == data["t"] == data["t_Z"] == data["codim"] == 0


def test_bounds_ex56(capsys):
    code, out, _ = run_cli(capsys, "bounds", "--example", "ex56", "--b", "30",
                           "--Z-auto", "--lprime-zmin")
    assert code == 0
    data = json.loads(out)
    assert data["recipe"] == {"a": True, "b": True}
    assert data["t"] == data["t_Z"] >= 4
    assert data["twisted_h1_lower_bound"] == 7
    assert data["p_g_generic"] == 6


def test_superisolated_command(capsys):
    code, out, _ = run_cli(capsys, "superisolated", "--d", "5", "--k", "3")
    assert code == 0
    data = json.loads(out)
    assert data["dim"] == 7
    assert data["engine_dim"] == 7

    code, out, _ = run_cli(capsys, "superisolated", "--d", "4", "--k", "0")
    assert json.loads(out)["dim"] == 0

    code, out, _ = run_cli(capsys, "superisolated", "--d", "5", "--k", "2",
                           "--k0", "2")
    data = json.loads(out)
    assert data["twisted_dim"] == 3
    assert data["engine_twisted_dim"] == 3


def test_examples_listing(capsys):
    code, out, _ = run_cli(capsys, "examples")
    assert code == 0
    assert "ex56" in json.loads(out)["examples"]


def test_cross_check_failure_exits_2(monkeypatch, tmp_path, capsys):
    # force a method disagreement: a mathematical inconsistency must be loud
    import abeldim.cli as cli_mod

    real = cli_mod.d_generic

    def broken(G, Z, lp, method="direct", **kw):
        v = real(G, Z, lp, method=method, **kw)
        return v + 1 if method == "direct" else v

    monkeypatch.setattr(cli_mod, "d_generic", broken)
    code, _, err = run_cli(capsys, "dim", "--example", "d4", "--Z-auto",
                           "--lprime-zmin", "--method", "all")
    assert code == 2
    assert "InconsistentOracle" in err


def test_timing_flag_only_when_requested(capsys):
    _, out, _ = run_cli(capsys, "check", "--example", "single")
    assert "timing_sec" not in json.loads(out)
    _, out, _ = run_cli(capsys, "check", "--example", "single", "--timing")
    assert "timing_sec" in json.loads(out)
