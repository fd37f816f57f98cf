import os
from pathlib import Path

import pytest

from mpgen.pipeline import RunConfig

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"


def make_config(out_dir: Path, **overrides) -> RunConfig:
    defaults = dict(
        train_roots=[str(CORPUS / "train")],
        eval_roots=[str(CORPUS / "eval")],
        dataset=str(out_dir / "dataset.jsonl"),
        model_dir=str(out_dir / "models"),
        report=str(out_dir / "report.json"),
    )
    defaults.update(overrides)
    return RunConfig(**defaults)


@pytest.fixture(scope="session")
def demo_config(tmp_path_factory) -> RunConfig:
    out = tmp_path_factory.mktemp("pipeline")
    return make_config(out)


@pytest.fixture(scope="session")
def trained_models(demo_config):
    """Run augment + train once per session; returns (config, tool, vanilla)."""
    from mpgen.pipeline import run_augment, run_train

    os.makedirs(demo_config.model_dir, exist_ok=True)
    run_augment(demo_config)
    tool, vanilla, _stats = run_train(demo_config)
    return demo_config, tool, vanilla


@pytest.fixture(scope="session")
def corpus_repos():
    from mpgen.pipeline import collect_repos

    return collect_repos([str(CORPUS / "train"), str(CORPUS / "eval")])
