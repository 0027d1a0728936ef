import csv
import json

import numpy as np
import pytest

from sbs_hybrid.cli import load_config, build_parser, main
from sbs_hybrid.sim import REFERENCE_AZIMUTHS_DEG


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_beampattern_outputs(tmp_path):
    assert main(["--command", "beampattern", "--out-dir", str(tmp_path)]) == 0
    for scheme in ("digital", "sbs", "hybrid"):
        rows = _read(tmp_path / f"beampattern_{scheme}.csv")
        assert rows[0][:2] == ["azimuth_deg", "magnitude_db"]
        assert len(rows) == 722
    assert (tmp_path / "beampattern.png").stat().st_size > 0
    meta = json.loads((tmp_path / "beampattern.json").read_text())
    assert meta["config"]["rf_chains"] == 3


def test_beampattern_digital_has_lobes_near_users(tmp_path):
    main(["--command", "beampattern", "--out-dir", str(tmp_path), "--no-plots"])
    rows = np.array(_read(tmp_path / "beampattern_digital.csv")[1:], dtype=float)
    az, db = rows[:, 0], rows[:, 1]
    peaks = az[1:-1][(db[1:-1] > db[:-2]) & (db[1:-1] > db[2:])]
    # patch elements pull lobes towards boresight and close users can share a
    # lobe, so each user must sit inside the mainlobe of some local maximum
    u_peaks = -np.cos(np.radians(peaks))
    for phi in REFERENCE_AZIMUTHS_DEG:
        assert np.min(np.abs(u_peaks + np.cos(np.radians(phi)))) < 2 / 16
    assert not (tmp_path / "beampattern.png").exists()


def test_sbs_pattern_tracks_digital(tmp_path):
    main(["--command", "beampattern", "--out-dir", str(tmp_path), "--no-plots"])
    dig = np.array(_read(tmp_path / "beampattern_digital.csv")[1:], dtype=float)[:, 1]
    sbs = np.array(_read(tmp_path / "beampattern_sbs.csv")[1:], dtype=float)[:, 1]
    hyb = np.array(_read(tmp_path / "beampattern_hybrid.csv")[1:], dtype=float)[:, 1]
    gap = np.mean(np.abs(sbs - dig))
    # pilot run: 1.565 dB for SbS, 6.22 dB for the 3-user standard hybrid
    assert gap < 1.7
    assert gap < np.mean(np.abs(hyb - dig))


def test_custom_users(tmp_path):
    rc = main(["--command", "beampattern", "--out-dir", str(tmp_path), "--no-plots",
               "--azimuths-deg", "60,120", "--qpsk-symbols", "1,-1j", "--rf-chains", "2"])
    assert rc == 0
    assert len(_read(tmp_path / "beampattern_sbs.csv")) == 722


def test_mismatched_custom_users(tmp_path, capsys):
    rc = main(["--command", "beampattern", "--out-dir", str(tmp_path),
               "--azimuths-deg", "60,120", "--qpsk-symbols", "1"])
    assert rc == 2
    assert "configuration error" in capsys.readouterr().err


def test_verify_passes(capsys):
    assert main(["--command", "verify", "--seeds", "3"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 3


def test_verify_detects_injected_fault(capsys):
    assert main(["--command", "verify", "--suites", "phase-opt", "--seeds", "3",
                 "--inject-fault", "0.3"]) == 1
    assert "FAIL phase-opt" in capsys.readouterr().out


def test_verify_empty_suite_list(capsys):
    assert main(["--command", "verify", "--suites", ""]) == 0
    assert "nothing to verify" in capsys.readouterr().out


def test_verify_unknown_suite():
    assert main(["--command", "verify", "--suites", "nope"]) == 2


def test_bench_zero_repeats(tmp_path, capsys):
    assert main(["--command", "bench", "--out-dir", str(tmp_path), "--bench-repeats", "0"]) == 0
    assert _read(tmp_path / "bench.csv") == [["kind", "N", "Q", "l", "seconds"]]
    assert "empty benchmark report" in capsys.readouterr().out


def test_bench_small(tmp_path):
    rc = main(["--command", "bench", "--out-dir", str(tmp_path), "--bench-repeats", "2",
               "--n-values", "64,128", "--q-values", "2,8", "--n-antennas", "32",
               "--rf-chains", "3"])
    assert rc == 0
    rows = _read(tmp_path / "bench.csv")[1:]
    assert [r[0] for r in rows].count("phase_search") == 4
    assert [r[0] for r in rows].count("omp_iteration") == 3


def test_sidr_sweep_cli(tmp_path):
    rc = main(["--command", "sidr-sweep", "--out-dir", str(tmp_path), "--realizations", "2",
               "--n-antennas", "8", "--users", "3", "--l-values", "1..4", "--q-values", "2,8",
               "--symbols", "16"])
    assert rc == 0
    rows = _read(tmp_path / "SIDRvsRFC.csv")
    assert rows[0] == ["RFC", "digital", "hybrid", "SbS_2", "SbS_8"]
    assert len(rows) == 5
    assert len(_read(tmp_path / "SIDRvsRFC_stderr.csv")) == 5
    assert (tmp_path / "SIDRvsRFC.png").exists()


def test_sumrate_sweep_cli(tmp_path):
    rc = main(["--command", "sumrate-sweep", "--out-dir", str(tmp_path), "--realizations", "2",
               "--k-values", "1..3", "--symbols", "32", "--no-plots"])
    assert rc == 0
    rows = _read(tmp_path / "SRvsUSERS.csv")
    assert rows[0] == ["Nusers", "digital", "hybrid", "SbS"]
    assert [r[0] for r in rows[1:]] == ["1", "2", "3"]


def test_config_file_layering(tmp_path):
    cfg_file = tmp_path / "run.yaml"
    cfg_file.write_text("command: sidr-sweep\nrealizations: 7\nn-antennas: 32\nseed: 3\n")
    args = build_parser().parse_args(["--config", str(cfg_file), "--seed", "5"])
    cfg = load_config(args)
    assert cfg.command == "sidr-sweep"
    assert cfg.realizations == 7
    assert cfg.n_antennas == 32
    assert cfg.seed == 5
    assert cfg.rf_chains == 13


def test_json_config(tmp_path):
    cfg_file = tmp_path / "run.json"
    cfg_file.write_text(json.dumps({"command": "verify", "seeds": 2}))
    cfg = load_config(build_parser().parse_args(["--config", str(cfg_file)]))
    assert cfg.seeds == 2


@pytest.mark.parametrize("text", ["realizations: 0\n", "bogus_key: 1\n", "n_antennas: 5000\n",
                                  "- a list\n", "command: [unclosed\n"])
def test_bad_config_exit_code(tmp_path, text):
    cfg_file = tmp_path / "bad.yaml"
    cfg_file.write_text(text)
    assert main(["--config", str(cfg_file)]) == 2


def test_missing_config_file(tmp_path):
    assert main(["--config", str(tmp_path / "absent.yaml")]) == 2


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["--command", "bench", "--out-dir", str(blocker / "sub"),
                 "--bench-repeats", "0"]) == 2
