import json
import re

import numpy as np
import pytest

from agufs.cli import RunRecord, main
from agufs.data import Dataset, load_csv, save_csv, standardize
from agufs.errors import DegenerateSolutionWarning, ParseError
from agufs.synthetic import make_blobs


def write(path, text):
    path.write_text(text)
    return str(path)


def blob_csv(tmp_path, seed=7):
    x, labels, informative = make_blobs(seed=seed)
    names = [f"f{i}" for i in range(x.shape[0])]
    ds = Dataset(x=x, feature_names=names, labels=labels, source_path="")
    path = tmp_path / "blobs.csv"
    save_csv(ds, str(path))
    return str(path), informative


def test_load_labeled_three_liner(tmp_path):
    path = write(tmp_path / "t.csv", "1,2,a\n3,4,a\n5,6,b\n")
    ds = load_csv(path, label_column="last")
    assert ds.x.shape == (2, 3)
    assert list(ds.labels) == [0, 0, 1]
    assert np.allclose(ds.x, [[1.0, 3.0, 5.0], [2.0, 4.0, 6.0]])


def test_load_empty_file_is_parse_error(tmp_path):
    path = write(tmp_path / "e.csv", "")
    with pytest.raises(ParseError):
        load_csv(path)


def test_load_header_names_features(tmp_path):
    path = write(tmp_path / "h.csv", "alpha,beta\n1,2\n3,4\n")
    ds = load_csv(path, has_header=True)
    assert ds.feature_names == ["alpha", "beta"]
    assert ds.x.shape == (2, 2)


def test_load_ragged_row_reports_file_line(tmp_path):
    path = write(tmp_path / "r.csv", "1,2\n3,4,5\n")
    with pytest.raises(ParseError, match="line 2"):
        load_csv(path)


def test_load_non_numeric_cell_reports_position(tmp_path):
    path = write(tmp_path / "n.csv", "1,2\n3,oops\n")
    with pytest.raises(ParseError, match="oops"):
        load_csv(path)


def test_load_label_column_out_of_range(tmp_path):
    path = write(tmp_path / "o.csv", "1,2\n3,4\n")
    with pytest.raises(ParseError):
        load_csv(path, label_column=5)


def test_load_integer_label_column(tmp_path):
    path = write(tmp_path / "i.csv", "x,1,2\ny,3,4\nx,5,6\n")
    ds = load_csv(path, label_column=0)
    assert list(ds.labels) == [0, 1, 0]
    assert ds.x.shape == (2, 3)


def test_standardize_two_point_feature():
    ds = Dataset(
        x=np.array([[1.0, 3.0]]), feature_names=None, labels=None, source_path=""
    )
    out = standardize(ds)
    assert np.allclose(out.x, [[-1.0, 1.0]])


def test_standardize_constant_feature_zeros_with_warning():
    ds = Dataset(
        x=np.array([[2.0, 2.0, 2.0], [1.0, 2.0, 3.0]]),
        feature_names=None,
        labels=None,
        source_path="",
    )
    with pytest.warns(DegenerateSolutionWarning):
        out = standardize(ds)
    assert np.abs(out.x[0]).max() == 0.0
    assert abs(out.x[1].std()) - 1.0 <= 1e-10


def test_standardize_random_moments():
    rng = np.random.default_rng(0)
    ds = Dataset(
        x=rng.standard_normal((6, 40)) * 3 + 1,
        feature_names=None,
        labels=None,
        source_path="",
    )
    out = standardize(ds)
    assert np.abs(out.x.mean(axis=1)).max() <= 1e-12
    assert np.abs(out.x.var(axis=1) - 1.0).max() <= 1e-10


def test_standardize_modes():
    ds = Dataset(
        x=np.array([[1.0, 2.0]]), feature_names=None, labels=None, source_path=""
    )
    assert standardize(ds, mode="none") is ds
    with pytest.raises(ValueError):
        standardize(ds, mode="minmax")


def test_save_load_round_trip_is_exact(tmp_path):
    rng = np.random.default_rng(1)
    x = rng.standard_normal((5, 9)) * np.pi
    labels = rng.integers(0, 3, size=9)
    ds = Dataset(
        x=x, feature_names=[f"c{i}" for i in range(5)], labels=labels, source_path=""
    )
    path = tmp_path / "rt.csv"
    save_csv(ds, str(path))
    back = load_csv(str(path), has_header=True, label_column="last")
    assert np.array_equal(back.x, x)
    # loading re-indexes class ids by first appearance, so compare the
    # induced partitions rather than the raw ids
    same_a = labels[:, None] == labels[None, :]
    same_b = back.labels[:, None] == back.labels[None, :]
    assert np.array_equal(same_a, same_b)
    assert back.feature_names == ds.feature_names


def run_cli(tmp_path, data_path, out_name, extra=()):
    out_dir = tmp_path / out_name
    argv = [
        "run",
        "--data", data_path,
        "--label-column", "last",
        "--has-header",
        "--alpha", "1",
        "--lambda", "1",
        "--k", "5",
        "--clusters", "3",
        "--top", "10",
        "--seed", "7",
        "--restarts", "5",
        "--out", str(out_dir),
        *extra,
    ]
    assert main(argv) == 0
    return out_dir


def test_cli_run_writes_outputs_and_evaluates(tmp_path, capsys):
    data_path, informative = blob_csv(tmp_path)
    out_dir = run_cli(tmp_path, data_path, "run1")
    captured = capsys.readouterr()
    assert "selected features:" in captured.out
    for name in ("record.json", "trace.csv", "scores.csv"):
        assert (out_dir / name).exists()

    record = json.loads((out_dir / "record.json").read_text())
    assert record["eval_report"]["restarts"] == 5
    assert 0.0 <= record["eval_report"]["acc_mean"] <= 1.0
    assert len(record["ranking"]["selected"]) == 10

    scores = (out_dir / "scores.csv").read_text().strip().splitlines()
    assert scores[0] == "feature,score,rank,selected"
    assert len(scores) == 51
    # every cell must be a plain parseable number, not a numpy repr
    ranks = []
    for line in scores[1:]:
        feature, score, rank, selected = line.split(",")
        int(feature)
        assert float(score) >= 0.0
        ranks.append(int(rank))
        assert selected in ("0", "1")
    assert sorted(ranks) == list(range(1, 51))


def test_cli_same_seed_byte_identical_except_timestamp(tmp_path):
    data_path, _ = blob_csv(tmp_path)
    out1 = run_cli(tmp_path, data_path, "run1")
    out2 = run_cli(tmp_path, data_path, "run2")
    pat = re.compile(r'"timestamp": "[^"]*"')
    a = pat.sub('"timestamp": "T"', (out1 / "record.json").read_text())
    b = pat.sub('"timestamp": "T"', (out2 / "record.json").read_text())
    assert a == b
    assert (out1 / "trace.csv").read_text().splitlines()[0] == (
        "iteration,objective,frozen_prev_objective,w_residual,"
        "f_residual,s_rowsum_dev,wall_time"
    )


def test_cli_record_round_trips(tmp_path):
    data_path, _ = blob_csv(tmp_path)
    out_dir = run_cli(tmp_path, data_path, "run1")
    payload = json.loads((out_dir / "record.json").read_text())
    rebuilt = RunRecord.from_json_dict(payload).to_json_dict()
    assert rebuilt == payload


def test_cli_trace_objective_descends_under_frozen_column(tmp_path):
    data_path, _ = blob_csv(tmp_path)
    out_dir = run_cli(tmp_path, data_path, "run1")
    rows = (out_dir / "trace.csv").read_text().strip().splitlines()[1:]
    for row in rows:
        cells = row.split(",")
        obj, frozen = float(cells[1]), float(cells[2])
        assert obj <= frozen + 1e-9 * max(1.0, abs(frozen))


def test_cli_select_skips_evaluation(tmp_path):
    data_path, _ = blob_csv(tmp_path)
    out_dir = tmp_path / "sel"
    argv = [
        "select",
        "--data", data_path,
        "--label-column", "last",
        "--has-header",
        "--alpha", "1",
        "--lambda", "1",
        "--k", "5",
        "--clusters", "3",
        "--top", "10",
        "--out", str(out_dir),
    ]
    assert main(argv) == 0
    record = json.loads((out_dir / "record.json").read_text())
    assert record["eval_report"] is None


def test_cli_eval_reports_metrics(tmp_path, capsys):
    data_path, informative = blob_csv(tmp_path)
    argv = [
        "eval",
        "--data", data_path,
        "--label-column", "last",
        "--has-header",
        "--features", ",".join(str(i) for i in informative),
        "--clusters", "3",
        "--restarts", "5",
    ]
    assert main(argv) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["acc_mean"] >= 0.9
    assert report["restarts"] == 5


def test_cli_version_prints_version(capsys):
    import agufs

    assert main(["version"]) == 0
    assert agufs.__version__ in capsys.readouterr().out


def test_cli_missing_data_flag_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["run", "--clusters", "3", "--top", "5", "--out", "x"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_cli_missing_file_exits_three(tmp_path, capsys):
    argv = [
        "run",
        "--data", str(tmp_path / "absent.csv"),
        "--clusters", "3",
        "--top", "5",
        "--out", str(tmp_path / "o"),
    ]
    assert main(argv) == 3
    assert "absent.csv" in capsys.readouterr().err


def test_cli_ragged_file_exits_three(tmp_path, capsys):
    path = write(tmp_path / "bad.csv", "1,2\n3\n")
    argv = [
        "run",
        "--data", path,
        "--clusters", "2",
        "--top", "1",
        "--out", str(tmp_path / "o"),
    ]
    assert main(argv) == 3
    assert "line 2" in capsys.readouterr().err


def test_cli_non_finite_data_exits_four(tmp_path, capsys):
    path = write(tmp_path / "nan.csv", "1,2,0\n3,nan,0\n4,5,1\n6,7,1\n")
    argv = [
        "run",
        "--data", path,
        "--label-column", "last",
        "--standardize", "none",
        "--clusters", "2",
        "--k", "1",
        "--top", "1",
        "--out", str(tmp_path / "o"),
    ]
    assert main(argv) == 4
    assert "NaN" in capsys.readouterr().err


def test_cli_bad_semantics_exits_two(tmp_path, capsys):
    data_path, _ = blob_csv(tmp_path)
    argv = [
        "run",
        "--data", data_path,
        "--label-column", "last",
        "--has-header",
        "--clusters", "3",
        "--top", "999",
        "--out", str(tmp_path / "o"),
    ]
    assert main(argv) == 2
