import csv

import numpy as np
import pytest

from ridgekit.cli import main
from ridgekit.verify import inclusion_suite


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_generate_row_count_and_determinism(tmp_path):
    out1 = tmp_path / "c1.csv"
    out2 = tmp_path / "c2.csv"
    args = ["generate", "--shape", "circle", "--m", "200", "--sigma", "0.1",
            "--seed", "7"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert len(read_rows(out1)) == 200
    assert out1.read_bytes() == out2.read_bytes()


def test_generate_rejects_negative_sigma(tmp_path, capsys):
    code = main(["generate", "--shape", "circle", "--m", "10", "--sigma", "-1",
                 "--out", str(tmp_path / "x.csv")])
    assert code == 2
    assert "--sigma" in capsys.readouterr().err


def test_generate_unknown_flag_exits_2(tmp_path):
    with pytest.raises(SystemExit) as err:
        main(["generate", "--shape", "circle", "--frobnicate", "1",
              "--out", str(tmp_path / "x.csv")])
    assert err.value.code == 2


def test_estimate_circle_metrics_line(tmp_path, capsys):
    cloud = tmp_path / "cloud.csv"
    main(["generate", "--shape", "circle", "--m", "200", "--sigma", "0.1",
          "--seed", "7", "--out", str(cloud)])
    out = tmp_path / "res.csv"
    code = main(["estimate", "--input", str(cloud), "--out", str(out),
                 "--method", "score", "--q", "0", "--h", "0.3", "--d", "1",
                 "--reference", "circle:1"])
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    metric_line = [ln for ln in lines if ln.startswith("marg=")][0]
    marg = float(metric_line.split()[0].split("=")[1])
    assert marg < 0.05
    rows = read_rows(out)
    assert len(rows) == 200
    assert set(rows[0]) == {"x0", "x1", "iterations", "converged", "final_align"}


def test_estimate_l_score_full_neighbors_matches_score(tmp_path):
    cloud = tmp_path / "cloud.csv"
    main(["generate", "--shape", "circle", "--m", "80", "--sigma", "0.08",
          "--seed", "3", "--out", str(cloud)])
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    base = ["--input", str(cloud), "--q", "0", "--h", "0.3", "--d", "1"]
    assert main(["estimate", *base, "--method", "score", "--out", str(out_a)]) == 0
    assert main(["estimate", *base, "--method", "l-score", "--neighbors", "80",
                 "--out", str(out_b)]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()


def test_estimate_mfit_ii_smoke(tmp_path, capsys):
    cloud = tmp_path / "cloud.csv"
    main(["generate", "--shape", "circle", "--m", "150", "--sigma", "0.08",
          "--seed", "5", "--out", str(cloud)])
    out = tmp_path / "res.csv"
    code = main(["estimate", "--input", str(cloud), "--out", str(out),
                 "--method", "mfit-ii", "--radius", "0.3", "--d", "1"])
    assert code == 0
    rows = read_rows(out)
    converged = sum(int(r["converged"]) for r in rows)
    assert converged / len(rows) >= 0.95


def test_estimate_missing_input_exits_3(tmp_path):
    assert main(["estimate", "--input", str(tmp_path / "nope.csv"),
                 "--out", str(tmp_path / "out.csv"), "--method", "score",
                 "--h", "0.3"]) == 3


def test_sweep_table_shape_and_determinism(tmp_path):
    out1 = tmp_path / "s1.csv"
    out2 = tmp_path / "s2.csv"
    args = ["sweep", "--shape", "circle", "--m", "60", "--sigma", "0.1",
            "--seed", "2", "--methods", "l-score,mfit-i,mfit-ii",
            "--q-list", "0,-5,-10", "--neighbors", "20",
            "--h-grid", "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9",
            "--max-iters", "120"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    rows = read_rows(out1)
    assert len(rows) == 45  # 9 h x (3 q for l-score + mfit-i + mfit-ii)
    assert out1.read_bytes() == out2.read_bytes()
    assert all(r["status"] == "ok" for r in rows)


def test_sweep_single_cell_matches_estimate(tmp_path, capsys):
    cloud = tmp_path / "cloud.csv"
    main(["generate", "--shape", "circle", "--m", "80", "--sigma", "0.1",
          "--seed", "4", "--out", str(cloud)])
    capsys.readouterr()
    assert main(["estimate", "--input", str(cloud), "--out", str(tmp_path / "e.csv"),
                 "--method", "l-score", "--neighbors", "25", "--q", "0",
                 "--h", "0.3", "--d", "1", "--reference", "circle:1"]) == 0
    line = [ln for ln in capsys.readouterr().out.splitlines() if ln.startswith("marg=")][0]
    marg = float(line.split()[0].split("=")[1])
    haus = float(line.split()[1].split("=")[1])

    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--shape", "circle", "--m", "80", "--sigma", "0.1",
                 "--seed", "4", "--methods", "l-score", "--q-list", "0",
                 "--neighbors", "25", "--h-grid", "0.3", "--out", str(out)]) == 0
    row = read_rows(out)[0]
    assert float(row["marg"]) == marg
    assert float(row["haus"]) == haus


def test_field_outputs(tmp_path):
    cloud = tmp_path / "line.csv"
    ts = np.linspace(-2.0, 2.0, 120)
    with open(cloud, "w") as fh:
        fh.write("x0,x1\n")
        for t in ts:
            fh.write(f"{float(t)!r},0.0\n")
    assert main(["field", "--input", str(cloud), "--h", "0.4",
                 "--q-list", "0", "--box=-1:1", "--resolution", "21",
                 "--out-prefix", str(tmp_path / "field_")]) == 0
    rows = read_rows(tmp_path / "field_0.csv")
    assert len(rows) == 441
    for row in rows:
        u = np.array([float(row["u0"]), float(row["u1"])])
        assert np.linalg.norm(u) == pytest.approx(1.0, abs=1e-12)
    on_axis = [r for r in rows if abs(float(r["x1"])) < 1e-12
               and abs(float(r["x0"])) < 0.9 and r["s"] != ""]
    assert on_axis
    assert all(float(r["s"]) > 1 - 1e-3 for r in on_axis)


def test_field_zero_gradient_node_has_empty_s(tmp_path):
    # two symmetric samples: the mean shift vanishes at the midpoint node
    cloud = tmp_path / "pair.csv"
    cloud.write_text("x0,x1\n-1.0,0.0\n1.0,0.0\n")
    assert main(["field", "--input", str(cloud), "--h", "0.8",
                 "--q-list", "1", "--box=-1:1", "--resolution", "3",
                 "--out-prefix", str(tmp_path / "f_")]) == 0
    rows = read_rows(tmp_path / "f_1.csv")
    center = [r for r in rows if float(r["x0"]) == 0.0 and float(r["x1"]) == 0.0][0]
    assert center["s"] == ""


def test_verify_all_exit_zero(capsys):
    assert main(["verify", "--suite", "all", "--trials", "200"]) == 0
    out = capsys.readouterr().out
    assert "lemma1: pass" in out
    assert "monotonicity: pass" in out


def test_verify_single_suite_with_trials(capsys):
    assert main(["verify", "--suite", "lemma1", "--trials", "5000"]) == 0
    assert "5000/5000" in capsys.readouterr().out


def test_verify_detects_corrupted_rank_one_term():
    result = inclusion_suite(rank_one_sign=-1.0)
    assert not result.passed
    assert result.counterexample is not None
    assert "node" in result.counterexample


def test_denoise_identity_zero_noise(tmp_path, capsys):
    cloud = tmp_path / "clean.csv"
    main(["generate", "--shape", "circle", "--m", "60", "--sigma", "0",
          "--seed", "1", "--out", str(cloud)])
    capsys.readouterr()
    assert main(["denoise", "--input", str(cloud), "--k", "2", "--sigma", "0",
                 "--method", "identity"]) == 0
    line = [ln for ln in capsys.readouterr().out.splitlines() if ln.startswith("mse=")][0]
    assert float(line.split()[0].split("=")[1]) == 0.0


def _embedded_curve_csv(path, m=220, dim=20, seed=12):
    rng = np.random.default_rng(seed)
    ts = np.linspace(0.0, 4.0 * np.pi, m)
    curve = np.stack([np.cos(ts), np.sin(ts), 0.25 * ts], axis=1)
    basis, _ = np.linalg.qr(rng.normal(size=(dim, 3)))
    ambient = curve @ basis.T
    with open(path, "w") as fh:
        fh.write(",".join(f"x{i}" for i in range(dim)) + "\n")
        for row in ambient:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def test_denoise_improves_over_corruption(tmp_path, capsys):
    clean = tmp_path / "curve.csv"
    _embedded_curve_csv(clean)
    args = ["denoise", "--input", str(clean), "--k", "3", "--sigma", "0.2",
            "--seed", "9", "--method", "l-score", "--q", "0.8",
            "--neighbors", "16", "--h", "0.45", "--d", "1"]
    assert main(args) == 0
    line = [ln for ln in capsys.readouterr().out.splitlines() if ln.startswith("mse=")][0]
    mse = float(line.split()[0].split("=")[1])
    baseline = float(line.split()[1].split("=")[1])
    assert mse < baseline
    # repeated run is byte-identical on stdout
    assert main(args) == 0
    line2 = [ln for ln in capsys.readouterr().out.splitlines() if ln.startswith("mse=")][0]
    assert line2 == line


def test_config_file_with_flag_override(tmp_path):
    config = tmp_path / "gen.cfg"
    config.write_text("shape = circle\nm = 50\nsigma = 0.05\nseed = 21\n")
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert main(["generate", "--config", str(config), "--out", str(out1)]) == 0
    assert len(read_rows(out1)) == 50
    # flag overrides the config value
    assert main(["generate", "--config", str(config), "--m", "10",
                 "--out", str(out2)]) == 0
    assert len(read_rows(out2)) == 10


def test_config_file_rejects_unknown_key(tmp_path, capsys):
    config = tmp_path / "bad.cfg"
    config.write_text("shforbidden = 1\n")
    code = main(["generate", "--config", str(config), "--shape", "circle",
                 "--out", str(tmp_path / "x.csv")])
    assert code == 2
