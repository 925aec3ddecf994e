import csv
import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from sagin import cli
from sagin import scenario as scn

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"
OUTPUT_SCHEMA = scn.load_schema("output.schema.json")


def run(args, capsys):
    code = cli.run(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def read_csv(text):
    return list(csv.reader(text.splitlines()))


def test_xsection_default_grid(capsys):
    code, out, _ = run(["xsection"], capsys)
    assert code == 0
    rows = read_csv(out)
    assert rows[0] == ["frequency_hz", "radius_m", "alpha", "regime", "q_ext", "sigma_ext_m2"]
    assert len(rows) == 7
    regimes = {(float(r[0]), float(r[1])): r[3] for r in rows[1:]}
    assert regimes[(2e10, 2e-5)] == "Rayleigh"
    assert regimes[(3e11, 2e-3)] == "Mie"


def test_xsection_single_cell(capsys):
    code, out, _ = run(["xsection", "--freqs", "3e11", "--radii", "1e-3"], capsys)
    assert code == 0 and len(read_csv(out)) == 2


def test_xsection_empty_radius_list_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        cli.run(["xsection", "--radii", ""])
    assert info.value.code == 2


def test_xsection_json_validates(capsys):
    code, out, _ = run(["xsection", "--format", "json"], capsys)
    jsonschema.validate(json.loads(out), OUTPUT_SCHEMA)


def test_budget_default_scenario(capsys):
    code, out, _ = run(["budget"], capsys)
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, OUTPUT_SCHEMA)
    fspl = [r["per_factor_db"]["FSPL"] for r in doc["results"]]
    assert fspl == pytest.approx([184.5, 208.0, 264.2], abs=1.0)
    for r in doc["results"]:
        assert r["layer_share_percent"]["Troposphere"] > 79


def test_budget_csv_flags_sub_threshold(capsys):
    code, out, _ = run(["budget", "--format", "csv"], capsys)
    rows = read_csv(out)
    assert rows[0] == ["band", "weather", "factor", "loss_db", "flag"]
    flagged = {(r[0], r[2]) for r in rows[1:] if r[4] == "<0.1"}
    assert ("THz", "Ionosphere") in flagged and ("THz", "FSPL") not in flagged


def test_budget_clear_sky_weather_rows_zero(capsys):
    code, out, _ = run(["budget", "--scenario", str(CONFIGS / "clear_sky.json")], capsys)
    for r in json.loads(out)["results"]:
        assert r["per_factor_db"]["Rain"] == r["per_factor_db"]["Fog"] == r["per_factor_db"]["Cloud"] == 0.0


def test_capacity_weather_sweep_table(capsys):
    code, out, _ = run(["capacity", "--weather-sweep", "--format", "csv", "--jobs", "3"], capsys)
    rows = read_csv(out)
    assert rows[0][:4] == ["band", "clear_bps_hz", "rain_bps_hz", "fog_bps_hz"]
    table = {r[0]: [float(v) for v in r[1:]] for r in rows[1:]}
    for col in range(len(rows[0]) - 1):
        assert table["THz"][col] == max(t[col] for t in table.values())


def test_capacity_zero_bandwidth_is_validation_error(tmp_path, capsys):
    d = scn.default_scenario_document()
    d["bands"][0]["bandwidth_hz"] = 0
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(d))
    code, _, err = run(["capacity", "--scenario", str(path)], capsys)
    assert code == 2 and "bands/0/bandwidth_hz" in err


def test_missing_scenario_file(capsys):
    code, _, err = run(["budget", "--scenario", "/nonexistent/s.json"], capsys)
    assert code == 2


def test_layers_command(capsys):
    code, out, _ = run(["layers", "--format", "csv"], capsys)
    rows = read_csv(out)
    assert rows[0] == ["band", "weather", "layer", "loss_db", "share_percent"]
    assert len(rows) == 1 + 3 * 3


def test_outputs_written_with_both_formats(tmp_path, capsys):
    code, _, _ = run(["budget", "--out", str(tmp_path / "fig3"), "--format", "both"], capsys)
    assert code == 0
    assert (tmp_path / "fig3.json").exists() and (tmp_path / "fig3.csv").exists()
    raw = (tmp_path / "fig3.csv").read_bytes()
    assert b"\r\n" not in raw


def test_byte_identical_reruns(tmp_path, capsys):
    for name in ("a", "b"):
        assert cli.run(["capacity", "--weather-sweep", "--format", "both", "--jobs", "4", "--out", str(tmp_path / name)]) == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_waveform_fmcw_papr_is_zero(capsys):
    code, out, _ = run(["waveform", "--spec", str(CONFIGS / "papr_fmcw.json")], capsys)
    doc = json.loads(out)
    jsonschema.validate(doc, OUTPUT_SCHEMA)
    assert doc["papr"]["percentiles_db"]["99"] == pytest.approx(0.0, abs=1e-12)


def test_waveform_paired_papr_report(tmp_path, capsys):
    spec = json.loads((CONFIGS / "papr_ofdm_vs_dfts.json").read_text())
    spec["n_frames"] = 2000
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec))
    code, out, _ = run(["waveform", "--spec", str(path)], capsys)
    doc = json.loads(out)
    assert doc["comparison"]["lower_p99"] == "DFTS_OFDM"
    assert doc["comparison"]["p99_difference_db"] >= 2.0


def test_waveform_ambiguity_echo_peak(tmp_path, capsys):
    code, _, _ = run(["waveform", "--spec", str(CONFIGS / "ambiguity_echo.json"), "--format", "both",
                      "--out", str(tmp_path / "amb")], capsys)
    assert code == 0
    doc = json.loads((tmp_path / "amb.json").read_text())
    jsonschema.validate(doc, OUTPUT_SCHEMA)
    spec = json.loads((CONFIGS / "ambiguity_echo.json").read_text())
    assert doc["peak"]["delay_s"] == pytest.approx(spec["echo"]["delay_s"], abs=1e-12)
    assert doc["peak"]["doppler_hz"] == pytest.approx(spec["echo"]["doppler_hz"], abs=1e-6)
    rows = read_csv((tmp_path / "amb.csv").read_text())
    assert rows[0][0] == "delay_s\\doppler_hz"
    assert len(rows) == 1 + len(doc["delay_axis_s"]) and len(rows[0]) == 1 + len(doc["doppler_axis_hz"])


def test_waveform_unknown_family_is_usage_error(tmp_path, capsys):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps({"family": "GFDM"}))
    code, _, err = run(["waveform", "--spec", str(path)], capsys)
    assert code == 2 and "family" in err


def test_seed_flag_overrides_spec(tmp_path, capsys):
    spec = {"family": "OFDM", "metric": "papr", "n_frames": 50, "params": {"n_subcarriers": 64}, "seed": 1}
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec))
    _, a, _ = run(["waveform", "--spec", str(path)], capsys)
    _, b, _ = run(["--seed", "2", "waveform", "--spec", str(path)], capsys)
    _, c, _ = run(["waveform", "--spec", str(path), "--seed", "1"], capsys)
    assert json.loads(a)["seed"] == 1 and json.loads(b)["seed"] == 2
    assert a == c and a != b


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sagin", "xsection", "--freqs", "2e10", "--radii", "2e-5"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1].split(",")[3] == "Rayleigh"
