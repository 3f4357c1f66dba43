"""End-to-end command behavior through main(argv)."""

import json

import numpy as np
import pytest

from planarmrf import brute_force_solve, evaluate
from planarmrf.cli import main
from planarmrf.formats import load_clusters, load_labels, load_model


def gen_model(tmp_path, name="model.json", h=3, w=3, labels=2, low=0, high=10, seed=0):
    path = tmp_path / name
    code = main(
        [
            "gen", "grid",
            "--height", str(h), "--width", str(w),
            "--labels", str(labels),
            "--low", str(low), "--high", str(high),
            "--seed", str(seed),
            "--out", str(path),
        ]
    )
    assert code == 0
    return path


def test_solve_round_trip(tmp_path, capsys):
    model = gen_model(tmp_path)
    out = tmp_path / "labels.json"
    code = main(["solve", str(model), "--out", str(out), "--epsilon", "0.5"])
    assert code == 0
    stdout = capsys.readouterr().out
    assert "ptas score" in stdout
    labels = load_labels(out)
    inst = load_model(model)
    assert labels.shape == (inst.graph.num_vertices,)
    assert labels.min() >= 1 and labels.max() <= inst.num_labels


def test_solve_exact_matches_oracle(tmp_path):
    model = gen_model(tmp_path, labels=2, h=3, w=3, seed=4)
    out = tmp_path / "labels.json"
    assert main(["solve", str(model), "--exact", "--out", str(out)]) == 0
    inst = load_model(model)
    _, oracle = brute_force_solve(inst)
    assert evaluate(inst, load_labels(out)) == oracle


def test_negative_model_needs_shift_flag(tmp_path, capsys):
    model = gen_model(tmp_path, low=-5, high=5, seed=9)
    out = tmp_path / "labels.json"
    code = main(["solve", str(model), "--out", str(out)])
    assert code == 2
    assert "--shift" in capsys.readouterr().err
    assert main(["solve", str(model), "--shift", "--out", str(out)]) == 0


def test_shifted_solve_reports_original_scale(tmp_path, capsys):
    model = gen_model(tmp_path, low=-5, high=5, seed=12)
    out = tmp_path / "labels.json"
    assert main(["solve", str(model), "--shift", "--exact", "--out", str(out)]) == 0
    stdout = capsys.readouterr().out
    inst = load_model(model)
    _, oracle = brute_force_solve(inst)
    reported = float(stdout.split("exact score ")[1].split()[0])
    assert reported == pytest.approx(oracle)


def test_dump_decomp_requires_exact(tmp_path, capsys):
    model = gen_model(tmp_path)
    out = tmp_path / "labels.json"
    dump = tmp_path / "decomp.json"
    code = main(
        ["solve", str(model), "--out", str(out), "--dump-decomp", str(dump)]
    )
    assert code == 2
    assert not dump.exists()


def test_dump_decomp_writes_tree(tmp_path):
    model = gen_model(tmp_path)
    out = tmp_path / "labels.json"
    dump = tmp_path / "decomp.json"
    code = main(
        ["solve", str(model), "--exact", "--out", str(out), "--dump-decomp", str(dump)]
    )
    assert code == 0
    doc = json.loads(dump.read_text())
    assert {"root", "parent", "leaf_edge"} <= set(doc)
    inst = load_model(model)
    assert sorted(int(e) for e in doc["leaf_edge"].values()) == list(
        range(inst.graph.num_edges)
    )


def test_bad_model_file_exits_two(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["solve", str(bad), "--out", str(tmp_path / "x.json")]) == 2


def test_missing_model_file_exits_two(tmp_path):
    assert main(["solve", str(tmp_path / "nope.json"), "--out", str(tmp_path / "x.json")]) == 2


def test_ragged_model_contents_exit_two(tmp_path, capsys):
    doc = json.loads(gen_model(tmp_path, seed=0).read_text())
    doc["phi"][1] = [1.0]  # ragged row
    bad = tmp_path / "invalid.json"
    bad.write_text(json.dumps(doc))
    code = main(["solve", str(bad), "--out", str(tmp_path / "x.json")])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_non_finite_model_contents_exit_two(tmp_path, capsys):
    doc = json.loads(gen_model(tmp_path, seed=0).read_text())
    doc["psi"][0][0] = float("nan")
    bad = tmp_path / "nan.json"
    bad.write_text(json.dumps(doc))
    code = main(["solve", str(bad), "--out", str(tmp_path / "x.json")])
    assert code == 2
    assert "edge 0" in capsys.readouterr().err


def test_epsilon_out_of_range_exits_two(tmp_path):
    model = gen_model(tmp_path)
    code = main(
        ["solve", str(model), "--out", str(tmp_path / "x.json"), "--epsilon", "2.0"]
    )
    assert code == 2


def test_solve_accepts_fraction_epsilon(tmp_path, capsys):
    model = gen_model(tmp_path)
    code = main(
        ["solve", str(model), "--out", str(tmp_path / "f.json"), "--epsilon", "1/3"]
    )
    assert code == 0
    assert " k 3 " in capsys.readouterr().out
    with pytest.raises(SystemExit) as ei:
        main(
            ["solve", str(model), "--out", str(tmp_path / "g.json"),
             "--epsilon", "one third"]
        )
    assert ei.value.code == 2


def gen_scene(tmp_path, h=8, w=16, labels=4, seed=0):
    paths = {
        "left": tmp_path / "left.ppm",
        "right": tmp_path / "right.ppm",
        "truth": tmp_path / "truth.pgm",
    }
    code = main(
        [
            "gen", "scene",
            "--height", str(h), "--width", str(w),
            "--labels", str(labels), "--seed", str(seed),
            "--out-left", str(paths["left"]),
            "--out-right", str(paths["right"]),
            "--out-truth", str(paths["truth"]),
        ]
    )
    assert code == 0
    return paths


def test_stereo_writes_pgm_and_reports_rate(tmp_path, capsys):
    paths = gen_scene(tmp_path)
    out = tmp_path / "disp.pgm"
    code = main(
        [
            "stereo", str(paths["left"]), str(paths["right"]),
            "--out", str(out),
            "--truth", str(paths["truth"]),
        ]
    )
    assert code == 0
    stdout = capsys.readouterr().out
    assert "stereo score" in stdout
    assert "mislabel_rate" in stdout
    assert out.read_bytes().startswith(b"P5\n16 8\n255\n")


def test_stereo_output_is_byte_identical_across_runs(tmp_path):
    paths = gen_scene(tmp_path, seed=3)
    out1 = tmp_path / "a.pgm"
    out2 = tmp_path / "b.pgm"
    args = ["stereo", str(paths["left"]), str(paths["right"])]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_stereo_identical_images_come_back_all_label_one(tmp_path):
    from planarmrf.netpbm import write_ppm

    img = np.full((6, 12, 3), 77, dtype=np.uint8)
    left = tmp_path / "l.ppm"
    right = tmp_path / "r.ppm"
    write_ppm(left, img)
    write_ppm(right, img)
    out = tmp_path / "d.pgm"
    assert main(["stereo", str(left), str(right), "--out", str(out)]) == 0
    from planarmrf.netpbm import read_pgm

    assert np.all(read_pgm(out) == 0)  # label 1 renders as gray 0


def write_cc(tmp_path, doc, name="cc.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def test_cc_single_difference_edge(tmp_path, capsys):
    path = write_cc(
        tmp_path,
        {"num_vertices": 2, "edges": [{"u": 0, "v": 1, "p": 1, "w": 5.0}]},
    )
    out = tmp_path / "clusters.json"
    assert main(["cc", str(path), "--out", str(out)]) == 0
    stdout = capsys.readouterr().out
    assert "cc value 5.000000 clusters 2" in stdout
    assert list(load_clusters(out)) == [0, 1]


def test_cc_triangle_equality_edges_one_cluster(tmp_path, capsys):
    path = write_cc(
        tmp_path,
        {
            "num_vertices": 3,
            "edges": [
                {"u": 0, "v": 1, "p": 0, "w": 1.0},
                {"u": 1, "v": 2, "p": 0, "w": 1.0},
                {"u": 0, "v": 2, "p": 0, "w": 1.0},
            ],
        },
    )
    out = tmp_path / "clusters.json"
    assert main(["cc", str(path), "--out", str(out)]) == 0
    stdout = capsys.readouterr().out
    assert "cc value 3.000000 clusters 1" in stdout
    assert list(load_clusters(out)) == [0, 0, 0]


def test_cc_verify_on_random_planar_instance(tmp_path, capsys):
    cc_path = tmp_path / "cc.json"
    assert (
        main(
            [
                "gen", "cc",
                "--height", "2", "--width", "4",
                "--seed", "5", "--out", str(cc_path),
            ]
        )
        == 0
    )
    out = tmp_path / "clusters.json"
    assert main(["cc", str(cc_path), "--out", str(out), "--verify"]) == 0
    assert "OK" in capsys.readouterr().out


def test_sweep_csv_and_ratio_lines(tmp_path, capsys):
    model = gen_model(tmp_path, h=4, w=4, labels=2, seed=1)
    csv_path = tmp_path / "sweep.csv"
    code = main(
        [
            "sweep", "--model", str(model),
            "--epsilons", "1/2,1/3",
            "--csv", str(csv_path),
        ]
    )
    assert code == 0
    stdout = capsys.readouterr().out
    assert "ratio 0.5->0.333333" in stdout
    lines = csv_path.read_text().strip().split("\n")
    assert lines[0] == "epsilon,k,score,wall_ms,max_width"
    assert len(lines) == 3
    for line in lines[1:]:
        eps, k, score, ms, width = line.split(",")
        float(eps), int(k), float(score), float(ms), int(width)


def test_sweep_predicted_ratio_formula():
    """With 16 labels the predicted step from k=2 to k=3 is
    (3*16^3)/(2*16^2) = 24."""
    L = 16
    predicted = (3 * L**3) / (2 * L**2)
    assert predicted == 24.0


def test_sweep_prints_predicted_ratio_from_label_count(tmp_path, capsys):
    model = gen_model(tmp_path, h=1, w=2, labels=16, seed=2, high=3)
    code = main(["sweep", "--model", str(model), "--epsilons", "1/2,1/3"])
    assert code == 0
    assert "predicted 24.00" in capsys.readouterr().out


def test_sweep_rejects_bad_epsilon_list(tmp_path):
    model = gen_model(tmp_path)
    assert main(["sweep", "--model", str(model), "--epsilons", "a,b"]) == 2
    assert main(["sweep", "--model", str(model), "--epsilons", ","]) == 2


def test_sweep_needs_an_input(tmp_path):
    assert main(["sweep", "--epsilons", "0.5"]) == 2


def test_sweep_rejects_negative_model(tmp_path):
    model = gen_model(tmp_path, low=-3, high=3, seed=8)
    assert main(["sweep", "--model", str(model), "--epsilons", "0.5"]) == 2


def test_gen_is_deterministic(tmp_path):
    a = gen_model(tmp_path, name="a.json", seed=7)
    b = gen_model(tmp_path, name="b.json", seed=7)
    assert a.read_bytes() == b.read_bytes()


def test_gen_maxcut_cycle_solves_to_four(tmp_path):
    model = tmp_path / "mc.json"
    assert main(["gen", "maxcut", "--graph", "cycle", "--n", "5", "--out", str(model)]) == 0
    out = tmp_path / "labels.json"
    assert main(["solve", str(model), "--exact", "--out", str(out)]) == 0
    inst = load_model(model)
    assert evaluate(inst, load_labels(out)) == 4.0


def test_gen_coloring_k4_solves_to_minus_one(tmp_path, capsys):
    model = tmp_path / "col.json"
    assert (
        main(["gen", "coloring", "--graph", "complete", "--n", "4", "--out", str(model)])
        == 0
    )
    out = tmp_path / "labels.json"
    assert main(["solve", str(model), "--exact", "--out", str(out)]) == 0
    stdout = capsys.readouterr().out
    assert "exact score -1.000000" in stdout
    inst = load_model(model)
    assert evaluate(inst, load_labels(out)) == -1.0
