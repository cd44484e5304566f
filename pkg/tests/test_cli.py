import json
import math
import subprocess
import sys

import pytest

from rotset.cli import main


@pytest.fixture
def files(tmp_path):
    def write(name, doc):
        path = tmp_path / name
        path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
        return str(path)

    return {
        "gm": write("gm.json", {"alphabet": 2, "transitions": [[1, 1], [1, 0]]}),
        "full2": write("full2.json", {"alphabet": 2, "transitions": "full"}),
        "ind1": write("ind1.json", {"kind": "table", "m": 1, "k": 1,
                                    "entries": {"0": [0], "1": [1]}}),
        "pair": write("pair.json", {"kind": "table", "m": 2, "k": 2,
                                    "entries": {"00": [1, "1/8"], "01": [0, 0], "10": [0, 0],
                                                "11": ["1/4", 1]}}),
        "circle": write("circle.json", {"type": "circle", "center": [0, 0],
                                        "radius": 1 / (2 * math.pi)}),
        "broken": write("broken.json", "{not json"),
        "missing": write("missing.json", {"kind": "table", "m": 1, "k": 2,
                                          "entries": {"00": [1], "01": [0]}}),
        "dir": tmp_path,
    }


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_rotset_interval(files, capsys):
    code, out, _ = run(["rotset", "--system", files["gm"], "--potential", files["ind1"]], capsys)
    assert code == 0 and out == "0\n0.5\n"


def test_entropy_closed_form(files, capsys):
    code, out, _ = run(["entropy", "--system", files["full2"], "--potential", files["ind1"],
                        "--w", "0.9"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["H"] == pytest.approx(-0.9 * math.log(0.9) - 0.1 * math.log(0.1), abs=1e-9)
    assert doc["T"][0] == pytest.approx(math.log(9), abs=1e-6)


def test_support_and_pressure(files, capsys):
    code, out, _ = run(["support", "--system", files["gm"], "--potential", files["ind1"],
                        "--u", "1", "--u", "-1"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "u1,value,witness" and lines[1].startswith("1,0.5,")
    assert lines[2] == "-1,0,0"
    code, out, _ = run(["pressure", "--system", files["full2"], "--potential", files["ind1"],
                        "--T", "0"], capsys)
    assert json.loads(out)["Q"] == pytest.approx(math.log(2))


def test_profile_and_levels(files, capsys, tmp_path):
    code, out, _ = run(["profile", "--system", files["full2"], "--potential", files["ind1"],
                        "--grid", "0.1:0.9:9"], capsys)
    rows = out.splitlines()
    assert code == 0 and rows[0] == "w1,H,T1,iterations" and len(rows) == 10
    code, out, _ = run(["levels", "--system", files["full2"], "--potential", files["pair"],
                        "--R", "2,5", "--samples", "16", "--out", str(tmp_path / "lv")], capsys)
    assert code == 0 and len(out.splitlines()) == 33
    assert (tmp_path / "lv" / "levels.svg").read_text().startswith("<svg")


def test_perorbit_commands(files, capsys):
    base = ["perorbit", "--system", files["full2"], "--potential", files["ind1"]]
    code, out, _ = run(base[:1] + ["census"] + base[1:] + ["--n", "4"], capsys)
    assert code == 0 and out.splitlines()[1:] == ["0,1", "0.25,4", "0.5,6", "0.75,4", "1,1"]
    code, out, _ = run(base[:1] + ["ball"] + base[1:] + ["--n", "4", "--w", "0.5", "--r", "0.1"],
                       capsys)
    assert json.loads(out)["lower"] == 6
    code, out, _ = run(base[:1] + ["growth"] + base[1:] + ["--n", "14", "--w", "0", "--r", "0.01",
                                                          "--estimator", "word"], capsys)
    assert code == 0 and out.splitlines()[1].startswith("1,1,")


def test_construct_and_gallery(files, capsys, tmp_path):
    out_dir = tmp_path / "c"
    code, out, _ = run(["construct", "--boundary", files["circle"], "--stages", "2",
                        "--out", str(out_dir)], capsys)
    certs = json.loads(out)
    assert code == 0 and len(certs) == 2 and all(c["ok"] for c in certs)
    spec = json.loads((out_dir / "stage1_potential.json").read_text())
    assert spec["kind"] == "table" and spec["k"] == 3
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert set(manifest["artifacts"]) == {"certificates.json", "stage1_potential.json",
                                          "construct.svg"}
    code, out, _ = run(["gallery", "example2", "--K", "5", "--n-max", "8", "--R", "1",
                        "--samples", "8"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["states"] == 6 ** 4 and rep["per_counts_ok"]


def test_domain_errors(files, capsys, tmp_path):
    code, _, err = run(["rotset", "--system", files["gm"], "--potential", files["missing"],
                        "--out", str(tmp_path / "e")], capsys)
    doc = json.loads(err)
    assert code == 1 and doc["error"] == "MissingWord" and doc["details"]["word"] == "10"
    assert json.loads((tmp_path / "e" / "error.json").read_text()) == doc
    code, _, err = run(["entropy", "--system", files["full2"], "--potential", files["ind1"],
                        "--w", "1.5"], capsys)
    assert code == 1 and json.loads(err)["error"] == "NotInterior"
    code, _, err = run(["rotset", "--system", files["broken"], "--potential", files["ind1"]],
                       capsys)
    assert code == 1 and json.loads(err)["error"] == "InputError"
    code, _, err = run(["rotset", "--system", str(tmp_path / "nope.json"),
                        "--potential", files["ind1"]], capsys)
    assert code == 1 and "operation" in json.loads(err)


@pytest.mark.parametrize("argv", [[], ["bogus"], ["rotset", "--system", "x"],
                                  ["perorbit", "ball", "--system", "a", "--potential", "b",
                                   "--n", "3"],
                                  ["entropy", "--system", "a", "--potential", "b", "--w", "x"]])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_determinism(files, capsys, tmp_path):
    outs = []
    for name in ("a", "b"):
        d = tmp_path / name
        run(["rotset", "--system", files["full2"], "--potential", files["pair"],
             "--out", str(d)], capsys)
        outs.append(d)
    for f in ("rotset.csv", "rotset.json", "rotset.svg"):
        assert (outs[0] / f).read_bytes() == (outs[1] / f).read_bytes()
    ma, mb = (json.loads((d / "manifest.json").read_text()) for d in outs)
    assert ma["artifacts"] == mb["artifacts"]


def test_verify_subset(capsys):
    code, out, _ = run(["verify", "--quick", "--only", "1,8"], capsys)
    assert code == 0 and "2/2 criteria passed" in out


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "rotset", "rotset", "--system", files["gm"],
                           "--potential", files["ind1"]], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "0\n0.5\n"
