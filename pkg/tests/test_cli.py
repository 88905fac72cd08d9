import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from rotwall import cli
from rotwall.errors import EXIT_CODES


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), stream=out)
    return code, out.getvalue()


def test_wall_n2():
    code, text = run("wall", "--molecule", "N2")
    cols, rows = cli.read_csv(text)
    assert code == 0 and cols == ["molecule", "D_over_B", "j_anderson", "j_anderson_rounded"]
    assert rows[0][3] == 35


def test_wall_ocs_and_listing():
    _, text = run("wall", "--molecule", "OCS")
    assert abs(cli.read_csv(text)[1][0][2] - 80) < 6
    code, text = run("wall")
    assert code == 0 and len(cli.read_csv(text)[1]) == 8


def test_wall_inline_rigid():
    code, text = run("wall", "--B", "2.0", "--D", "0")
    assert code == 0 and "no Anderson wall" in text


def test_unknown_molecule_exit_code(capsys):
    code, _ = run("wall", "--molecule", "XeF2")
    assert code == EXIT_CODES["UnknownMoleculeError"]
    assert "N2" in capsys.readouterr().err


def test_floquet_rigid_unkicked():
    _, text = run("floquet", "--B", "2.0", "--D", "0", "--P", "0", "--jmax", "30")
    cols, rows = cli.read_csv(text)
    assert cols == ["state_index", "quasienergy", "peak_J", "participation_ratio", "localization_length", "label"]
    assert all(r[1] == 0.0 for r in rows) and len(rows) == 31


def test_floquet_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run("floquet", "--molecule", "N2", "--P", "3", "--jmax", "120", "--out", str(a))
    run("floquet", "--molecule", "N2", "--P", "3", "--jmax", "120", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()
    _, rows = cli.read_csv(a.read_text())
    labels = {r[5] for r in rows}
    assert {"extended", "localized"} <= labels


def test_evolve_zero_pulses():
    _, text = run("evolve", "--molecule", "N2", "--P", "3", "--pulses", "0", "--j0", "2")
    cols, rows = cli.read_csv(text)
    assert cols == ["n", "mean_j", "alignment", "energy"]
    assert len(rows) == 1 and rows[0][1] == 2.0


def test_evolve_csv_round_trip(tmp_path):
    from rotwall import PulseTrainSpec, evolve_pure, get_molecule

    out = tmp_path / "run.csv"
    code, _ = run("evolve", "--molecule", "N2", "--P", "3", "--pulses", "6", "--out", str(out))
    assert code == 0
    ref = evolve_pure(get_molecule("N2"), PulseTrainSpec(3.0, 6), 0)
    _, rows = cli.read_csv(out.read_text())
    assert [r[1] for r in rows] == list(ref.mean_j)
    assert [r[2] for r in rows] == list(ref.alignment)
    _, dist = cli.read_csv((tmp_path / "run_distribution.csv").read_text())
    p = np.array([r[2] for r in dist]).reshape(7, -1)
    assert np.array_equal(p, ref.distributions)


def test_evolve_json(tmp_path):
    out = tmp_path / "run.json"
    run("evolve", "--molecule", "N2", "--P", "1", "--pulses", "2", "--format", "json", "--out", str(out))
    doc = json.loads(out.read_text())
    assert doc["metadata"]["version"] and doc["metadata"]["config"]["P"] == 1.0
    assert doc["metadata"]["j_max_rule"].startswith("auto")
    assert doc["tables"]["summary"]["columns"] == ["n", "mean_j", "alignment", "energy"]
    assert len(doc["tables"]["summary"]["rows"]) == 3


def test_evolve_thermal():
    _, text = run("evolve", "--molecule", "N2", "--P", "1", "--pulses", "2", "--temperature", "30")
    _, rows = cli.read_csv(text)
    assert rows[0][2] == pytest.approx(1 / 3, abs=1e-9)


def test_semiclassical_table():
    _, text = run("semiclassical", "--molecule", "N2", "--P", "3", "--pulses", "16")
    cols, rows = cli.read_csv(text)
    assert cols == ["n", "k", "J", "H"]
    H = np.array([r[3] for r in rows])
    assert np.max(np.abs(H - H[0])) / 1.5 < 1e-8
    J = np.array([r[2] for r in rows])
    assert J.max() == pytest.approx(19.65, abs=0.05)
    assert rows[int(np.argmax(J))][0] == pytest.approx(7.6, abs=0.1)


def test_semiclassical_p_zero():
    _, text = run("semiclassical", "--molecule", "N2", "--P", "0", "--pulses", "4", "--j0", "5")
    assert {r[2] for r in cli.read_csv(text)[1]} == {5.0}


def test_leak_exit_code():
    code, _ = run("evolve", "--B", "2", "--D", "0", "--P", "3", "--pulses", "30", "--jmax", "40")
    assert code == EXIT_CODES["TruncationLeakError"]


def test_drift_exit_code():
    code, _ = run("semiclassical", "--molecule", "N2", "--P", "3", "--pulses", "8", "--step", "0.5")
    assert code == EXIT_CODES["HamiltonianDriftError"]


def test_config_errors():
    code, _ = run("evolve", "--molecule", "N2", "--P", "-1")
    assert code == EXIT_CODES["ConfigError"]
    code, _ = run("evolve", "--molecule", "N2", "--j0", "1", "--temperature", "100")
    assert code == EXIT_CODES["ConfigError"]


def test_exit_codes_distinct_and_documented():
    codes = list(EXIT_CODES.values())
    assert len(set(codes)) == len(codes) and 0 not in codes
    helptext = cli.build_parser().format_help()
    for name, code in EXIT_CODES.items():
        assert f"{code:<2} {name}" in helptext


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("molecule: N2\nP: 3.0\npulses: 4\nj0: 0\n")
    _, a = run("evolve", "--config", str(cfg))
    _, b = run("evolve", "--config", str(cfg), "--P", "1")
    assert len(cli.read_csv(a)[1]) == 5
    assert a != b
    cfg.write_text("molecule: N2\nbogus: 1\n")
    code, _ = run("evolve", "--config", str(cfg))
    assert code == EXIT_CODES["ConfigError"]


def test_run_subcommand(tmp_path):
    cfg = tmp_path / "run.yaml"
    out = tmp_path / "out"
    cfg.write_text(
        f"molecule: N2\nP: 3.0\npulses: 4\njmax: 80\nout: {out}\n"
        "outputs: [alignment, energy, floquet, semiclassical, wall]\n"
    )
    code, _ = run("run", "--config", str(cfg))
    assert code == 0
    assert sorted(p.name for p in out.iterdir()) == sorted(
        ["alignment.csv", "energy.csv", "floquet.csv", "semiclassical.csv", "wall.csv"]
    )


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "rotwall.cli", "wall", "--molecule", "N2"], capture_output=True, text=True)
    assert res.returncode == 0 and "35" in res.stdout


def test_json_nan_is_null():
    assert cli._jsonable(math.nan) is None
