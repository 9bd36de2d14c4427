import json
import re

import pytest

from bandit_forge.cli import RunManifest, main, render_svg
from bandit_forge.datasets import serialize_xc, synthetic_multilabel


@pytest.fixture
def dataset(tmp_path):
    path = tmp_path / "data.txt"
    path.write_text(serialize_xc(synthetic_multilabel(150, 6, 5, seed=0)))
    return path


def data_sections(directory):
    return {p.name: p.read_text().split("\n", 1)[1] for p in sorted(directory.glob("*.csv"))}


def test_simulate_writes_run_and_averaged_files(dataset, tmp_path):
    out = tmp_path / "out"
    code = main(["simulate", "--dataset", str(dataset), "--policy", "bootstrapped-ucb",
                 "--resamples", "10", "--ucb-percentile", "80", "--runs", "3", "--seed", "7",
                 "-o", str(out)])
    assert code == 0
    names = sorted(p.name for p in out.glob("*.csv"))
    assert names == ["averaged.csv"] + [f"bootstrapped-ucb_run{i:03d}.csv" for i in range(3)]
    lines = (out / "bootstrapped-ucb_run000.csv").read_text().splitlines()
    assert lines[0].startswith("# bandit-forge") and "seed=7" in lines[0]
    assert lines[1] == "round,cumulative_mean_reward,arm,reward"
    assert len(lines) == 2 + 150
    config = json.loads(lines[0].split("config=", 1)[1])
    assert config["policies"][0]["params"]["n_resamples"] == 10
    assert config["policies"][0]["params"]["percentile"] == 80
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "simulate"


def test_epsilon_flags_are_recorded(dataset, tmp_path):
    out = tmp_path / "o"
    assert main(["simulate", "--dataset", str(dataset), "--policy", "epsilon-greedy",
                 "--epsilon", "0.2", "--decay", "0.9999", "--runs", "1", "-o", str(out)]) == 0
    params = json.loads((out / "manifest.json").read_text())["policies"][0]["params"]
    assert params == {"explore_prob": 0.2, "decay": 0.9999}


def test_unknown_policy_exits_2_and_lists_names(dataset, capsys):
    assert main(["simulate", "--dataset", str(dataset), "--policy", "nope"]) == 2
    err = capsys.readouterr().err
    assert "nope" in err and "bootstrapped-ucb" in err and "adaptive-greedy" in err


def test_bad_values_exit_2_naming_the_key(dataset, tmp_path, capsys):
    assert main(["simulate", "--dataset", str(dataset), "--policy", "random",
                 "--runs", "0", "-o", str(tmp_path)]) == 2
    assert "n_runs" in capsys.readouterr().err


@pytest.mark.parametrize("text", ["2 3 2\n0 0:1.0\n", "1 3 2\n0 5:1.0\n", "bogus\n"])
def test_unparsable_dataset_exits_3(tmp_path, text):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    assert main(["simulate", "--dataset", str(path), "--policy", "random"]) == 3


def test_missing_dataset_exits_3(tmp_path):
    assert main(["simulate", "--dataset", str(tmp_path / "none.txt"), "--policy", "random"]) == 3


def test_identical_manifests_give_identical_data_across_job_counts(dataset, tmp_path):
    args = ["simulate", "--dataset", str(dataset), "--policy", "bootstrapped-ts",
            "--policy", "adaptive-greedy", "--runs", "3", "--seed", "4", "--refit-every", "20"]
    assert main(args + ["-o", str(tmp_path / "a"), "--jobs", "1"]) == 0
    assert main(args + ["-o", str(tmp_path / "b"), "--jobs", "8"]) == 0
    assert data_sections(tmp_path / "a") == data_sections(tmp_path / "b")
    assert main(["rerun", str(tmp_path / "a" / "manifest.json"), "-o", str(tmp_path / "c")]) == 0
    assert data_sections(tmp_path / "a") == data_sections(tmp_path / "c")


def test_seed_falls_back_to_environment(dataset, tmp_path, monkeypatch):
    monkeypatch.setenv("BANDIT_FORGE_SEED", "31")
    assert main(["simulate", "--dataset", str(dataset), "--policy", "random", "--runs", "1",
                 "-o", str(tmp_path / "e")]) == 0
    assert "seed=31" in (tmp_path / "e" / "averaged.csv").read_text().splitlines()[0]


def test_numbers_use_plain_decimal_points(dataset, tmp_path):
    assert main(["simulate", "--dataset", str(dataset), "--policy", "random", "--runs", "2",
                 "-o", str(tmp_path / "n")]) == 0
    body = (tmp_path / "n" / "averaged.csv").read_text().splitlines()[2:]
    for line in body:
        assert re.fullmatch(r"random,\d+,\d+\.\d+(e-\d+)?", line), line


def test_coverage_command(tmp_path, capsys):
    out = tmp_path / "cov.csv"
    assert main(["coverage", "--schemes", "gamma11,bootstrap", "--sizes", "20,40",
                 "--n-samples", "3", "--resamples", "4", "--n-test", "50", "-o", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# bandit-forge")
    assert lines[1] == "sample_size,scheme,mean_pct,std_pct"
    assert [ln.split(",")[1] for ln in lines[2:]] == ["bootstrap", "gamma11"] * 2


def test_coverage_defaults_cover_full_grid():
    from bandit_forge.cli import _coverage_manifest, build_parser
    args = build_parser().parse_args(["coverage"])
    m = _coverage_manifest(args, 0)
    assert len(m.coverage["sample_sizes"]) == 16 and len(m.coverage["schemes"]) == 5
    assert (m.coverage["n_samples"], m.coverage["n_resamples"], m.coverage["n_test"]) == (100, 10, 1000)


@pytest.mark.parametrize("flags", [["--n-samples", "0"], ["--schemes", "nope"],
                                   ["--sizes", "1,5"], ["--generator", "cubic"]])
def test_coverage_config_errors_exit_2(flags):
    assert main(["coverage"] + flags) == 2


def test_svg_of_constant_series_is_horizontal(tmp_path):
    csv = tmp_path / "c.csv"
    csv.write_text("# header\npolicy,round,cumulative_mean_reward\n"
                   + "".join(f"flat,{t},0.5\n" for t in range(1, 101)))
    svg = tmp_path / "c.svg"
    assert render_svg(csv, svg) == 0
    text = svg.read_text()
    pts = re.search(r'<polyline class="series"[^>]*points="([^"]+)"', text).group(1)
    ys = {p.split(",")[1] for p in pts.split()}
    assert len(ys) == 1
    assert ">0.5<" in text


def test_svg_legend_has_one_entry_per_policy(tmp_path):
    csv = tmp_path / "two.csv"
    csv.write_text("policy,round,cumulative_mean_reward\n"
                   "alpha,1,0.1\nalpha,2,0.2\nbeta,1,0.3\nbeta,2,0.25\n")
    assert main(["plot", str(csv), str(tmp_path / "two.svg")]) == 0
    legend = re.findall(r'<text class="legend"[^>]*>([^<]+)<', (tmp_path / "two.svg").read_text())
    assert legend == ["alpha", "beta"]


@pytest.mark.parametrize("body", ["policy,round,cumulative_mean_reward\n", "",
                                  "policy,round,cumulative_mean_reward\np,one,0.1\n",
                                  "a,b\n1,2\n"])
def test_malformed_csv_exits_3(tmp_path, body):
    csv = tmp_path / "bad.csv"
    csv.write_text(body)
    assert render_svg(csv, tmp_path / "bad.svg") == 3


def test_svg_from_simulate_run(dataset, tmp_path):
    out = tmp_path / "s"
    assert main(["simulate", "--dataset", str(dataset), "--policy", "random", "--policy",
                 "best-arm-mab", "--runs", "1", "-o", str(out), "--svg", str(out / "a.svg")]) == 0
    assert (out / "a.svg").read_text().count('class="series"') == 2


def test_dataset_info(dataset, capsys):
    assert main(["dataset-info", "--dataset", str(dataset)]) == 0
    assert "n_rows: 150" in capsys.readouterr().out


def test_manifest_round_trip():
    m = RunManifest("coverage", seed=3, coverage={"n_samples": 5})
    assert RunManifest.from_json(m.to_json()) == m
