"""Trigger insertion: mark completable identifiers and assemble the dataset.

Walks every token of a function body; at each identifier that is not a
builtin, the completion tool is queried at the identifier's start position,
and if the identifier appears among the suggestions a <COMP> marker token is
emitted immediately before it. All body tokens, identifier or not, are
appended in order, so stripping the markers recovers the original body
exactly.

Completion calls are memoized per (file, resolved receiver) for attribute
contexts and per (file, function, names-in-scope) for scope contexts; both
keys capture everything the suggestion list depends on, so memoization
cannot change results.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from statistics import mean
from typing import Iterable, Optional

from . import __version__
from .analysis.builtins import is_builtin
from .analysis.complete import classify_caret, tool_complete
from .analysis.scope import locals_before, scope_index_for
from .minilang import tokens as tk
from .minilang.parser import FunctionDef, extract_functions
from .minilang.render import render_tokens
from .minilang.tokens import LexToken
from .repo import CaretPosition, Repository


class MissingDocstringError(ValueError):
    """The function has no docstring and cannot become a training pair."""


@dataclass
class AugmentedFunction:
    description: str
    augmented_body: list[LexToken]  # body tokens with marker tokens interleaved
    file: str
    line: int
    comp_count: int
    diagnostics: list[str] = field(default_factory=list)

    def marked_positions(self) -> set[tuple[int, int]]:
        """Positions of the identifiers that directly follow a marker."""
        out: set[tuple[int, int]] = set()
        toks = self.augmented_body
        for i, t in enumerate(toks):
            if t.kind == tk.MARKER and i + 1 < len(toks):
                nxt = toks[i + 1]
                out.add((nxt.line, nxt.column))
        return out

    def body_text(self) -> str:
        return render_tokens(self.augmented_body)


@dataclass
class AugmentedDataset:
    pairs: list[AugmentedFunction]
    corpus_id: str
    tool_version: str

    @property
    def stats(self) -> dict:
        if not self.pairs:
            return {
                "pair_count": 0,
                "mean_description_tokens": 0.0,
                "mean_body_tokens": 0.0,
                "mean_comp_count": 0.0,
            }
        from .lm.tokenizer import token_strings

        return {
            "pair_count": len(self.pairs),
            "mean_description_tokens": mean(
                len(token_strings(p.description)) for p in self.pairs
            ),
            "mean_body_tokens": mean(
                len(token_strings(p.body_text())) for p in self.pairs
            ),
            "mean_comp_count": mean(p.comp_count for p in self.pairs),
        }


class _CompletionMemo:
    def __init__(self, repo: Repository):
        self.repo = repo
        self.cache: dict[tuple, list[str]] = {}
        self.calls = 0
        self.hits = 0

    def _key(self, caret: CaretPosition) -> Optional[tuple]:
        ctx = classify_caret(self.repo, caret)
        index = scope_index_for(self.repo)
        _, func = index.enclosing(caret.file, caret.line)
        if ctx.kind == "attribute":
            if ctx.receiver is None:
                return ("unresolvable",)
            resolved = index.resolve_receiver(
                caret.file, func, ctx.receiver, (caret.line, caret.column)
            )
            if resolved is None:
                return ("unresolvable",)
            kind, target = resolved
            if kind == "class":
                return ("class", target.file, target.name)
            return ("module", target.path)
        if func is None:
            return ("scope", caret.file, None, ())
        visible = frozenset(func.params) | frozenset(
            locals_before(func, (caret.line, caret.column))
        )
        return ("scope", caret.file, (func.line, func.name), tuple(sorted(visible)))

    def complete(self, caret: CaretPosition) -> list[str]:
        key = self._key(caret)
        if key is not None and key in self.cache:
            self.hits += 1
            return self.cache[key]
        self.calls += 1
        result = tool_complete(self.repo, caret)
        if key is not None:
            self.cache[key] = result
        return result


def insert_triggers(
    repo: Repository,
    file: str,
    func: FunctionDef,
    memo: Optional[_CompletionMemo] = None,
) -> AugmentedFunction:
    if func.docstring is None:
        raise MissingDocstringError(f"{file}:{func.line}: {func.name} has no docstring")
    if memo is None:
        memo = _CompletionMemo(repo)
    description = func.signature_text + " " + func.docstring
    out: list[LexToken] = []
    count = 0
    diags: list[str] = []
    for t in func.body_tokens:
        if t.kind == tk.IDENTIFIER and not is_builtin(t.text):
            caret = CaretPosition(file, t.line, t.column)
            try:
                suggestions = memo.complete(caret)
            except Exception as exc:  # completion-tool failure: treat as no match
                suggestions = []
                diags.append(f"{file}:{t.line}:{t.column}: completion failed: {exc}")
            if t.text in suggestions:
                out.append(LexToken(tk.MARKER, tk.COMP_TEXT, t.line, t.column))
                count += 1
        out.append(t)
    return AugmentedFunction(
        description=description,
        augmented_body=out,
        file=file,
        line=func.line,
        comp_count=count,
        diagnostics=diags,
    )


def strip_triggers(aug: AugmentedFunction) -> str:
    """Canonical body text with every marker removed."""
    return render_tokens([t for t in aug.augmented_body if t.kind != tk.MARKER])


def corpus_id_of(repos: Iterable[Repository]) -> str:
    h = hashlib.sha256()
    for repo in repos:
        for path in repo.paths():
            h.update(path.encode("utf-8"))
            h.update(b"\x00")
            h.update(repo.text(path).encode("utf-8"))
            h.update(b"\x01")
    return h.hexdigest()[:16]


def _repo_label(repo: Repository) -> str:
    if repo.root:
        import os

        return os.path.basename(os.path.normpath(repo.root))
    return ""


def augment_corpus(repos: list[Repository]) -> AugmentedDataset:
    """Apply trigger insertion to every docstring-bearing function.

    Output order is deterministic: repositories in the given order, files by
    path, functions by source position. Functions without docstrings are
    omitted; per-file parse failures surface as diagnostics on the pairs.
    """
    pairs: list[AugmentedFunction] = []
    for repo in repos:
        label = _repo_label(repo)
        memo = _CompletionMemo(repo)
        for path in repo.paths():
            module = repo.module(path)
            for func in extract_functions(module):
                if func.docstring is None:
                    continue
                aug = insert_triggers(repo, path, func, memo=memo)
                if label:
                    aug.file = f"{label}/{path}"
                pairs.append(aug)
    return AugmentedDataset(
        pairs=pairs, corpus_id=corpus_id_of(repos), tool_version=__version__
    )


def save_dataset(dataset: AugmentedDataset, path: str, meta_path: Optional[str] = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in dataset.pairs:
            fh.write(
                json.dumps(
                    {
                        "description": p.description,
                        "augmented_body": p.body_text(),
                        "file": p.file,
                        "line": p.line,
                        "comp_count": p.comp_count,
                    },
                    sort_keys=True,
                )
                + "\n"
            )
    if meta_path:
        meta = {
            "corpus_id": dataset.corpus_id,
            "tool_version": dataset.tool_version,
            "stats": dataset.stats,
        }
        with open(meta_path, "w", encoding="utf-8") as fh:
            json.dump(meta, fh, sort_keys=True, indent=2)
            fh.write("\n")


def load_dataset_records(path: str) -> list[dict]:
    records: list[dict] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records
