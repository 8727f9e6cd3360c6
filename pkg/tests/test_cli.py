import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from oracles import AMI49_STANDIN_TOTAL_AREA, LATTICE_2X2_OPTIMUM
from rlsa_floorplan.cli import main
from rlsa_floorplan.results import read_results, read_summary

FAST = ["--sa-steps", "200", "--r-steps", "5", "--s-steps", "200"]


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def last_json(out):
    return json.loads(out.strip().splitlines()[-1])


def test_pack_lattice(capsys, tmp_path):
    code, out, _ = run(capsys, "pack", "--lattice", 2, "--out", tmp_path)
    assert code == 0
    d = last_json(out)
    assert d["wirelength"] >= LATTICE_2X2_OPTIMUM and d["total"] == d["wirelength"]
    ET.parse(tmp_path / "pack.svg")
    assert set(json.loads((tmp_path / "pack_sp.json").read_text())) == {"gamma_plus", "gamma_minus"}


def test_pack_given_pair(capsys, tmp_path):
    sp = tmp_path / "sp.json"
    sp.write_text(json.dumps({"gamma_plus": [2, 3, 0, 1], "gamma_minus": [0, 1, 2, 3]}))
    code, out, _ = run(capsys, "pack", "--lattice", 2, "--sp-file", sp, "--out", tmp_path)
    assert code == 0 and last_json(out)["total"] == LATTICE_2X2_OPTIMUM


def test_pack_bad_pair(capsys, tmp_path):
    sp = tmp_path / "sp.json"
    sp.write_text(json.dumps({"gamma_plus": [0, 1], "gamma_minus": [0, 1]}))
    code, _, err = run(capsys, "pack", "--lattice", 2, "--sp-file", sp, "--out", tmp_path)
    assert code == 1 and "error" in err


def test_pack_ami49_area_bound(capsys, tmp_path):
    code, out, _ = run(capsys, "pack", "--ami49", "--out", tmp_path)
    assert code == 0 and last_json(out)["area"] >= AMI49_STANDIN_TOTAL_AREA


def test_ami49_env_override(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("RLSA_AMI49", str(tmp_path / "absent.yal"))
    code, _, err = run(capsys, "pack", "--ami49", "--out", tmp_path)
    assert code == 1 and "absent.yal" in err


def test_missing_yal(capsys, tmp_path):
    code, _, err = run(capsys, "sa", "--yal", tmp_path / "nope.yal", "--out", tmp_path)
    assert code == 1 and "not found" in err


def test_bad_yal(capsys, tmp_path):
    bad = tmp_path / "bad.yal"
    bad.write_text("MODULE a;\n TYPE GENERAL;\n DIMENSIONS 0 0 q;\nENDMODULE;\n")
    code, _, err = run(capsys, "pack", "--yal", bad, "--out", tmp_path)
    assert code == 1 and "line 3" in err


def test_needs_exactly_one_instance(capsys, tmp_path):
    assert run(capsys, "pack", "--out", tmp_path)[0] == 1
    assert run(capsys, "pack", "--lattice", 2, "--ami49", "--out", tmp_path)[0] == 1


def test_sa_one_step(capsys, tmp_path):
    code, out, _ = run(capsys, "sa", "--lattice", 3, "--sa-steps", 1, "--out", tmp_path)
    assert code == 0
    rec = read_results(tmp_path / "sa_results")[0]
    assert len(rec.trace) == 1 and rec.method == "random_init"
    assert len((tmp_path / "sa_trace.csv").read_text().strip().splitlines()) == 2
    ET.parse(tmp_path / "sa_final.svg")


def test_sa_deterministic(capsys, tmp_path):
    for d in ("a", "b"):
        assert run(capsys, "sa", "--ami49", "--sa-steps", 500, "--seed", 3, "--out", tmp_path / d)[0] == 0
    a = read_results(tmp_path / "a" / "sa_results")[0]
    b = read_results(tmp_path / "b" / "sa_results")[0]
    assert a.final == b.final and a.trace == b.trace and a.meta == b.meta
    assert a.unit == "mm2" and a.reported_cost == pytest.approx(a.final.total * 1e-6)


def test_sa_explicit_temperatures(capsys, tmp_path):
    code, _, _ = run(capsys, "sa", "--lattice", 4, "--sa-steps", 50, "--t-max", 5, "--t-min", 0.1,
                     "--out", tmp_path)
    assert code == 0
    meta = read_results(tmp_path / "sa_results")[0].meta
    assert (meta["t_max"], meta["t_min"]) == (5.0, 0.1)
    assert run(capsys, "sa", "--lattice", 4, "--t-max", 5, "--out", tmp_path)[0] == 1


def test_sa_fixed_blocks(capsys, tmp_path):
    from rlsa_floorplan.bench import example_fixed_config_path
    code, out, _ = run(capsys, "sa", "--ami49", "--fixed", example_fixed_config_path(),
                       "--sa-steps", 300, "--out", tmp_path)
    assert code == 0 and last_json(out)["instance"].endswith("+fixed")
    svg = ET.parse(tmp_path / "sa_final.svg").getroot()
    assert sum(r.get("class") == "fixed" for r in svg.iter("{http://www.w3.org/2000/svg}rect")) == 3


def test_train_zero_epochs(capsys, tmp_path):
    code, out, _ = run(capsys, "train", "--lattice", 3, "--epochs", 0, "--out", tmp_path)
    assert code == 0 and last_json(out)["epochs_completed"] == 0
    assert json.loads((tmp_path / "train_report.json").read_text())["records"] == []
    assert (tmp_path / "policy.json").is_file()


def test_train_resume_and_compare(capsys, tmp_path):
    net = tmp_path / "net.json"
    code, _, err = run(capsys, "train", "--lattice", 3, "--epochs", 1, *FAST, "--network", net,
                       "--out", tmp_path)
    assert code == 0 and "epoch 0" in err
    code, out, err = run(capsys, "train", "--lattice", 3, "--epochs", 1, *FAST, "--resume", net,
                         "--network", net, "--out", tmp_path)
    assert code == 0 and "epoch 1" in err and last_json(out)["epochs_completed"] == 2

    code, out, _ = run(capsys, "compare", "--lattice", 3, "--network", net, "--runs", 1, *FAST,
                       "--out", tmp_path)
    assert code == 0
    rows = read_summary(tmp_path / "compare")
    assert [r["method"] for r in rows] == ["rl_init", "random_init"]
    assert all(r["std_cost"] == 0.0 and r["n_runs"] == 1 for r in rows)
    sign = json.loads((tmp_path / "compare_sign.json").read_text())
    assert sign["paired_fair"] and sign["runs"] == 1
    for m in ("rl_init", "random_init"):
        ET.parse(tmp_path / f"compare_{m}.svg")


def test_compare_wrong_instance(capsys, tmp_path):
    net = tmp_path / "net.json"
    assert run(capsys, "train", "--lattice", 3, "--epochs", 0, "--network", net, "--out", tmp_path)[0] == 0
    code, _, err = run(capsys, "compare", "--lattice", 4, "--network", net, "--out", tmp_path)
    assert code == 1 and "free blocks" in err
    assert run(capsys, "compare", "--lattice", 4, "--out", tmp_path)[0] == 1


def test_spec_file(capsys, tmp_path):
    spec = tmp_path / "exp.json"
    spec.write_text(json.dumps({"lattice": 3, "runs": 2, "out": str(tmp_path / "o"),
                                "sa": {"steps": 100, "seed": 5},
                                "rl": {"epochs": 1, "r_steps": 4, "s_steps": 100, "hidden": 16}}))
    assert run(capsys, "train", "--spec", spec)[0] == 0
    assert run(capsys, "compare", "--spec", spec, "--network", tmp_path / "o" / "policy.json")[0] == 0
    assert read_summary(tmp_path / "o" / "compare")[0]["n_runs"] == 2
    # flags override the file
    assert run(capsys, "sa", "--spec", spec, "--sa-steps", 3)[0] == 0
    assert read_results(tmp_path / "o" / "sa_results")[0].sa_steps == 3


def test_render(capsys, tmp_path):
    sp = tmp_path / "sp.json"
    sp.write_text(json.dumps({"gamma_plus": [0, 1, 2, 3], "gamma_minus": [0, 1, 2, 3]}))
    code, out, _ = run(capsys, "render", "--lattice", 2, "--sp-file", sp, "--svg", tmp_path / "r.svg",
                       "--title", "strip")
    assert code == 0 and out.strip().endswith("r.svg")
    assert run(capsys, "render", "--lattice", 2, "--out", tmp_path)[0] == 1


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "rlsa_floorplan.cli", "pack", "--lattice", "2",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["instance"] == "lattice2x2"
