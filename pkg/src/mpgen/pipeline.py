"""End-to-end stages wiring corpus, augmentation, training and evaluation.

Everything here is deterministic by construction: repositories, files and
functions are processed in sorted order, no clocks or randomness enter any
artifact, and repeated runs produce byte-identical outputs.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, TypeVar

from . import __version__
from .decode import GenerationConfig, GenerationTrace, generate
from .lm.ngram import NGramModel, train
from .lm.tokenizer import tokenize
from .lm.vocab import BOS_ID, COMP_ID, EOS_ID, Vocab, build_vocab
from .metrics import EvalPair, EvalReport, evaluate_pairs
from .minilang.parser import FunctionDef, extract_functions
from .minilang.render import render_body
from .repo import CaretPosition, Repository, load_repositories
from .trigger import AugmentedDataset, augment_corpus, corpus_id_of, save_dataset

T = TypeVar("T")
U = TypeVar("U")


class DataError(Exception):
    """Missing or malformed input artifacts (exit code 2 at the CLI)."""


@dataclass
class RunConfig:
    train_roots: list[str]
    eval_roots: list[str]
    order: int = 3
    alpha: float = 0.1
    buckets: int = 16
    max_tokens: int = 256
    cache: bool = True
    dataset: str = "out/dataset.jsonl"
    model_dir: str = "out/models"
    report: str = "out/report.json"
    tasks: Optional[str] = None
    jobs: int = 1
    deterministic: bool = True

    def __post_init__(self):
        if not self.deterministic:
            raise ValueError("the pipeline only supports deterministic runs")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")

    @property
    def dataset_meta(self) -> str:
        return self.dataset + ".meta.json"

    @property
    def tool_model_path(self) -> str:
        return os.path.join(self.model_dir, "model_tool.json")

    @property
    def vanilla_model_path(self) -> str:
        return os.path.join(self.model_dir, "model_vanilla.json")

    def to_dict(self) -> dict:
        return {
            "train_roots": self.train_roots,
            "eval_roots": self.eval_roots,
            "order": self.order,
            "alpha": self.alpha,
            "buckets": self.buckets,
            "max_tokens": self.max_tokens,
            "cache": self.cache,
            "dataset": self.dataset,
            "model_dir": self.model_dir,
            "report": self.report,
            "tasks": self.tasks,
            "jobs": self.jobs,
            "deterministic": self.deterministic,
        }


CORPUS_ROOT_ENV = "MPGEN_CORPUS_ROOT"


def load_config(path: str, overrides: Optional[dict] = None) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read config {path!r}: {exc}") from exc
    if overrides:
        raw.update({k: v for k, v in overrides.items() if v is not None})
    base = os.path.dirname(os.path.abspath(path))
    corpus_base = os.environ.get(CORPUS_ROOT_ENV) or base

    def resolve(p: str, root: str) -> str:
        return p if os.path.isabs(p) else os.path.join(root, p)

    known = {f.name for f in RunConfig.__dataclass_fields__.values()}  # type: ignore[attr-defined]
    unknown = set(raw) - known
    if unknown:
        raise DataError(f"unknown config fields: {sorted(unknown)}")
    cfg = RunConfig(**raw)
    cfg.train_roots = [resolve(p, corpus_base) for p in cfg.train_roots]
    cfg.eval_roots = [resolve(p, corpus_base) for p in cfg.eval_roots]
    cfg.dataset = resolve(cfg.dataset, base)
    cfg.model_dir = resolve(cfg.model_dir, base)
    cfg.report = resolve(cfg.report, base)
    if cfg.tasks:
        cfg.tasks = resolve(cfg.tasks, base)
    return cfg


def _ordered_map(fn: Callable[[T], U], items: Sequence[T], jobs: int) -> list[U]:
    """Apply fn preserving input order; jobs > 1 uses a thread pool."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def collect_repos(roots: Iterable[str]) -> list[tuple[str, Repository]]:
    out: list[tuple[str, Repository]] = []
    for root in sorted(roots):
        if not os.path.isdir(root):
            raise DataError(f"corpus root {root!r} does not exist")
        out.extend(load_repositories(root))
    return out


def corpus_vocab(config: RunConfig) -> Vocab:
    """Vocabulary over the train and eval corpora.

    Includes every source file plus the description text of every
    docstring-bearing function: docstrings sit inside files as single
    string-literal tokens, while descriptions are tokenized as prose, so
    their words need their own vocabulary entries.
    """
    texts: list[str] = []
    for _, repo in collect_repos(config.train_roots + config.eval_roots):
        for path in repo.paths():
            texts.append(repo.text(path))
            for func in extract_functions(repo.module(path)):
                if func.docstring is not None:
                    texts.append(func.signature_text + " " + func.docstring)
    if not texts:
        raise DataError("no source files found under the configured corpus roots")
    return build_vocab(texts)


def run_augment(config: RunConfig) -> AugmentedDataset:
    repos = [repo for _, repo in collect_repos(config.train_roots)]
    if config.jobs > 1:
        # Per-repository parallelism with an order-preserving merge; each
        # repository's analysis is read-only and independent.
        parts = _ordered_map(lambda r: augment_corpus([r]).pairs, repos, config.jobs)
        pairs = [p for part in parts for p in part]
        dataset = AugmentedDataset(
            pairs=pairs, corpus_id=corpus_id_of(repos), tool_version=__version__
        )
    else:
        dataset = augment_corpus(repos)
    os.makedirs(os.path.dirname(os.path.abspath(config.dataset)), exist_ok=True)
    save_dataset(dataset, config.dataset, config.dataset_meta)
    return dataset


def training_pairs(
    records: Sequence[dict], vocab: Vocab, variant: str
) -> list[tuple[list[int], list[int]]]:
    """(description ids, <BOS>...<EOS> target ids) for one model variant."""
    pairs = []
    for rec in records:
        desc = tokenize(rec["description"], vocab)
        body = tokenize(rec["augmented_body"], vocab)
        if variant == "vanilla":
            body = [t for t in body if t != COMP_ID]
        pairs.append((desc, [BOS_ID] + body + [EOS_ID]))
    return pairs


def run_train(config: RunConfig) -> tuple[NGramModel, NGramModel, dict]:
    from .lm.ngram import save_model
    from .trigger import load_dataset_records

    if not os.path.exists(config.dataset):
        raise DataError(f"dataset {config.dataset!r} not found; run augment first")
    records = load_dataset_records(config.dataset)
    if not records:
        raise DataError(f"dataset {config.dataset!r} is empty")
    vocab = corpus_vocab(config)
    os.makedirs(config.model_dir, exist_ok=True)
    stats: dict = {}
    models = []
    for variant in ("tool", "vanilla"):
        pairs = training_pairs(records, vocab, variant)
        model = train(
            pairs, config.order, config.alpha, vocab, buckets=config.buckets, variant=variant
        )
        nll, n_tokens = model.corpus_nll(pairs)
        import math

        stats[variant] = {
            "train_nll_per_token": nll / n_tokens,
            "uniform_nll_per_token": math.log(vocab.size),
            "perplexity": math.exp(nll / n_tokens),
        }
        path = config.tool_model_path if variant == "tool" else config.vanilla_model_path
        save_model(model, path)
        models.append(model)
    return models[0], models[1], stats


@dataclass
class Task:
    label: str
    repo_name: str
    snapshot: Repository
    file: str
    pos: CaretPosition
    description: str
    gt: str


def _blank_function(repo: Repository, file: str, func: FunctionDef) -> tuple[Repository, CaretPosition]:
    """Snapshot with the function body removed and one reserved blank line."""
    lines = repo.text(file).split("\n")
    start = func.body_start_line
    end = func.end_line
    indent = func.body_start_column
    blanked = lines[: start - 1] + [" " * indent] + lines[end:]
    snap = repo.with_text(file, "\n".join(blanked))
    return snap, CaretPosition(file, start, indent)


def derive_tasks(config: RunConfig) -> list[Task]:
    """Benchmark tasks: every docstring-bearing function in the eval corpus."""
    tasks: list[Task] = []
    for name, repo in collect_repos(config.eval_roots):
        for path in repo.paths():
            module = repo.module(path)
            for func in extract_functions(module):
                if func.docstring is None or not func.body_tokens:
                    continue
                snap, pos = _blank_function(repo, path, func)
                tasks.append(
                    Task(
                        label=f"{name}/{path}:{func.name}",
                        repo_name=name,
                        snapshot=snap,
                        file=path,
                        pos=pos,
                        description=func.signature_text + " " + func.docstring,
                        gt=render_body(func.body_tokens),
                    )
                )
    return tasks


def save_tasks(tasks: Sequence[Task], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in tasks:
            fh.write(
                json.dumps(
                    {
                        "label": t.label,
                        "repo": t.repo_name,
                        "file": t.file,
                        "line": t.pos.line,
                        "column": t.pos.column,
                        "description": t.description,
                        "gt": t.gt,
                    },
                    sort_keys=True,
                )
                + "\n"
            )


def load_tasks(path: str, config: RunConfig) -> list[Task]:
    repos = dict(collect_repos(config.eval_roots))
    tasks: list[Task] = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [l for l in fh.read().split("\n") if l.strip()]
    except OSError as exc:
        raise DataError(f"cannot read tasks file {path!r}: {exc}") from exc
    for line in lines:
        try:
            rec = json.loads(line)
            repo = repos[rec["repo"]]
            module = repo.module(rec["file"])
            func = next(
                f
                for f in extract_functions(module)
                if f.body_start_line == rec["line"]
            )
        except (KeyError, StopIteration, json.JSONDecodeError) as exc:
            raise DataError(f"malformed task record {line!r}: {exc}") from exc
        snap, pos = _blank_function(repo, rec["file"], func)
        tasks.append(
            Task(
                label=rec["label"],
                repo_name=rec["repo"],
                snapshot=snap,
                file=rec["file"],
                pos=pos,
                description=rec["description"],
                gt=rec["gt"],
            )
        )
    return tasks


def run_model_over_tasks(
    model: NGramModel,
    tasks: Sequence[Task],
    gen_cfg: GenerationConfig,
    jobs: int = 1,
) -> tuple[list[EvalPair], list[GenerationTrace]]:
    def one(task: Task) -> tuple[EvalPair, GenerationTrace]:
        pred, trace = generate(model, task.snapshot, task.description, task.pos, gen_cfg)
        pair = EvalPair(
            description=task.description,
            gt=task.gt,
            pred=pred,
            repo=task.snapshot,
            file=task.file,
            pos=task.pos,
            label=task.label,
        )
        return pair, trace

    results = _ordered_map(one, list(tasks), jobs)
    return [r[0] for r in results], [r[1] for r in results]


def trace_summary(traces: Sequence[GenerationTrace]) -> dict:
    return {
        "steps": sum(t.steps for t in traces),
        "tool_invocations": sum(t.tool_invocations for t in traces),
        "cache_hits": sum(t.cache_hits for t in traces),
        "dropped_triggers": sum(t.dropped_triggers for t in traces),
        "truncated": sum(1 for t in traces if t.truncated),
        "mean_triggers_per_task": (
            sum(t.tool_invocations + t.cache_hits for t in traces) / len(traces)
            if traces
            else 0.0
        ),
    }


def run_evaluate(config: RunConfig) -> dict:
    from .lm.ngram import load_model

    for path in (config.tool_model_path, config.vanilla_model_path):
        if not os.path.exists(path):
            raise DataError(f"model {path!r} not found; run train first")
    tool_model = load_model(config.tool_model_path)
    vanilla_model = load_model(config.vanilla_model_path)
    if config.tasks and os.path.exists(config.tasks):
        tasks = load_tasks(config.tasks, config)
    else:
        tasks = derive_tasks(config)
    if not tasks:
        raise DataError("no benchmark tasks found in the eval corpus")

    report: dict = {"n_tasks": len(tasks), "models": {}}
    for variant, model, tool_enabled in (
        ("tool", tool_model, True),
        ("vanilla", vanilla_model, False),
    ):
        gen_cfg = GenerationConfig(
            max_tokens=config.max_tokens,
            cache_enabled=config.cache,
            tool_enabled=tool_enabled,
        )
        pairs, traces = run_model_over_tasks(model, tasks, gen_cfg, jobs=config.jobs)
        result: EvalReport = evaluate_pairs(pairs, tool_model.vocab)
        entry = result.to_dict()
        entry["traces"] = trace_summary(traces)
        report["models"][variant] = entry

    os.makedirs(os.path.dirname(os.path.abspath(config.report)), exist_ok=True)
    with open(config.report, "w", encoding="utf-8") as fh:
        json.dump(report, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return report
