import json
import os
from pathlib import Path

import pytest

from mpgen.cli import main

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"


def write_config(tmp_path: Path, **overrides) -> str:
    cfg = {
        "train_roots": [str(CORPUS / "train")],
        "eval_roots": [str(CORPUS / "eval")],
        "dataset": str(tmp_path / "dataset.jsonl"),
        "model_dir": str(tmp_path / "models"),
        "report": str(tmp_path / "report.json"),
    }
    cfg.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return str(path)


@pytest.fixture(scope="module")
def cli_workspace(tmp_path_factory, capsys_disabled=None):
    tmp = tmp_path_factory.mktemp("cli")
    cfg = write_config(tmp)
    assert main(["augment", "--config", cfg]) == 0
    assert main(["train", "--config", cfg]) == 0
    return tmp, cfg


def test_augment_writes_dataset_and_stats(cli_workspace, capsys):
    tmp, cfg = cli_workspace
    assert (tmp / "dataset.jsonl").exists()
    meta = json.loads((tmp / "dataset.jsonl.meta.json").read_text())
    assert meta["stats"]["pair_count"] >= 50
    records = [json.loads(l) for l in (tmp / "dataset.jsonl").read_text().splitlines() if l]
    assert len(records) == meta["stats"]["pair_count"]


def test_augment_empty_corpus_warns_not_errors(tmp_path, capsys):
    bare = tmp_path / "bare" / "repo00"
    bare.mkdir(parents=True)
    (bare / "only.mp").write_text("def f():\n    return 1\n")
    cfg = write_config(tmp_path, train_roots=[str(tmp_path / "bare")])
    assert main(["augment", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert "warning" in out


def test_train_writes_both_models(cli_workspace):
    tmp, _cfg = cli_workspace
    assert (tmp / "models" / "model_tool.json").exists()
    assert (tmp / "models" / "model_vanilla.json").exists()


def test_train_perplexity_beats_uniform(cli_workspace, capsys):
    _tmp, cfg = cli_workspace
    assert main(["train", "--config", cfg]) == 0
    out = capsys.readouterr().out
    for line in out.splitlines():
        if "nll/token" in line:
            nll = float(line.split("nll/token")[1].split(",")[0])
            uniform = float(line.split("uniform")[1].strip(" )"))
            assert nll < uniform


def test_generate_tool_mode_lints_clean(cli_workspace, capsys):
    _tmp, cfg = cli_workspace
    repo = str(CORPUS / "eval" / "repo14")
    # blank line position inside a getter of eval/repo14/core.mp
    from mpgen.pipeline import load_config, derive_tasks

    tasks = derive_tasks(load_config(cfg))
    # a getter task: the demo case the tool-integrated model nails
    task = next(
        t for t in tasks
        if t.repo_name == "repo14" and "core.mp" in t.label and t.gt.startswith("return self._")
    )
    code = main(
        [
            "generate",
            "--config", cfg,
            "--repo", repo,
            "--file", task.file,
            "--line", str(task.pos.line),
            "--column", str(task.pos.column),
            "--desc", task.description,
            "--trace",
        ]
    )
    assert code == 0
    out, err = capsys.readouterr()
    assert out.strip()
    assert "steps" in err
    trace = json.loads(err.splitlines()[-1])
    assert trace["steps"] >= 1
    assert set(trace["tags"]) <= {"model", "tool-selection"}

    # the tool-mode output lints clean when spliced into the demo repo
    from mpgen.metrics import EvalPair, pair_is_valid

    pred = out.rstrip("\n")
    pair = EvalPair(task.description, task.gt, pred, task.snapshot, task.file, task.pos)
    assert pair_is_valid(pair)


def test_generate_missing_model_is_data_error(tmp_path, capsys):
    cfg = write_config(tmp_path, model_dir=str(tmp_path / "nomodels"))
    code = main(
        [
            "generate",
            "--config", cfg,
            "--repo", str(CORPUS / "eval" / "repo14"),
            "--file", "core.mp",
            "--line", "1",
            "--column", "0",
            "--desc", "d",
        ]
    )
    assert code == 2


def test_evaluate_report_shape(cli_workspace, capsys):
    tmp, cfg = cli_workspace
    assert main(["evaluate", "--config", cfg]) == 0
    report = json.loads((tmp / "report.json").read_text())
    assert report["n_tasks"] >= 100
    for variant in ("tool", "vanilla"):
        entry = report["models"][variant]
        for key in ("dep_cov", "val_rate", "val_rate_dep", "exact_match", "edit_sim", "bleu4"):
            assert key in entry
        assert entry["n"] == report["n_tasks"]


def test_lint_outputs_line_delimited_records(tmp_path, capsys):
    repo = tmp_path / "repo"
    repo.mkdir()
    (repo / "bad.mp").write_text("def f():\n    return ghost\n")
    assert main(["lint", "--repo", str(repo)]) == 0
    out = capsys.readouterr().out
    rec = json.loads(out.splitlines()[0])
    assert rec["kind"] == "undefined-variable"


def test_complete_prints_sorted_members(capsys):
    repo = str(CORPUS / "eval" / "repo14")
    text = (CORPUS / "eval" / "repo14" / "core.mp").read_text()
    lines = text.split("\n")
    # caret right after "self._" on the first getter's return line
    line = next(i for i, l in enumerate(lines, 1) if l.strip().startswith("return self._"))
    col = lines[line - 1].index("self.") + len("self.")
    assert main(["complete", "--repo", repo, "--file", "core.mp",
                 "--line", str(line), "--column", str(col)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out == sorted(out)
    assert len(out) >= 3


def test_complete_unresolvable_is_empty_success(tmp_path, capsys):
    repo = tmp_path / "repo"
    repo.mkdir()
    (repo / "a.mp").write_text("def f(a):\n    return a.\n")
    code = main(["complete", "--repo", str(repo), "--file", "a.mp",
                 "--line", "2", "--column", str(len("    return a."))])
    assert code == 0
    assert capsys.readouterr().out == ""


def test_complete_out_of_range_is_error(tmp_path, capsys):
    repo = tmp_path / "repo"
    repo.mkdir()
    (repo / "a.mp").write_text("x = 1\n")
    code = main(["complete", "--repo", str(repo), "--file", "a.mp",
                 "--line", "99", "--column", "0"])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_usage_error_exit_code():
    assert main(["augment"]) == 1          # missing --config
    assert main(["no-such-command"]) == 1


def test_unknown_config_field_is_data_error(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"train_roots": [], "eval_roots": [], "bogus": 1}))
    assert main(["augment", "--config", str(path)]) == 2


def test_corpus_root_env_override(tmp_path, monkeypatch, capsys):
    cfg = {
        "train_roots": ["train"],
        "eval_roots": ["eval"],
        "dataset": str(tmp_path / "d.jsonl"),
        "model_dir": str(tmp_path / "m"),
        "report": str(tmp_path / "r.json"),
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    monkeypatch.setenv("MPGEN_CORPUS_ROOT", str(CORPUS))
    assert main(["augment", "--config", str(path)]) == 0
    assert (tmp_path / "d.jsonl").exists()


def test_parallel_augment_matches_sequential(tmp_path):
    seq_dir = tmp_path / "seq"
    par_dir = tmp_path / "par"
    seq_dir.mkdir()
    par_dir.mkdir()
    assert main(["augment", "--config", write_config(seq_dir)]) == 0
    assert main(["augment", "--config", write_config(par_dir), "--jobs", "4"]) == 0
    assert (seq_dir / "dataset.jsonl").read_bytes() == (par_dir / "dataset.jsonl").read_bytes()


def test_config_round_trips_losslessly(tmp_path):
    from mpgen.pipeline import load_config

    cfg_path = write_config(tmp_path)
    first = load_config(cfg_path)
    rewritten = tmp_path / "again.json"
    rewritten.write_text(json.dumps(first.to_dict()))
    second = load_config(str(rewritten))
    assert first.to_dict() == second.to_dict()
