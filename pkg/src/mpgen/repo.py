"""In-memory repositories of MiniPy files and caret positions into them.

A Repository is an immutable mapping of repository-relative paths to file
text. Edits produce copy-on-write snapshots; lex and parse results are
cached per file and shared with snapshots for the files that did not change,
which keeps per-step tool invocations cheap during generation.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .minilang import lexer as _lexer
from .minilang import parser as _parser

SOURCE_SUFFIX = ".mp"


class CaretError(ValueError):
    """Caret position does not lie within the repository's text bounds."""


@dataclass(frozen=True)
class CaretPosition:
    file: str
    line: int      # 1-based
    column: int    # 0-based


class Repository:
    def __init__(self, files: Mapping[str, str], root: Optional[str] = None):
        self._files = dict(sorted(files.items()))
        self.root = root
        self._lex_cache: dict[str, tuple[list, list]] = {}
        self._module_cache: dict[str, _parser.Module] = {}
        self._index = None  # built lazily by analysis.build_scope_index

    @classmethod
    def from_dir(cls, root: str) -> "Repository":
        files: dict[str, str] = {}
        for dirpath, dirnames, filenames in os.walk(root):
            dirnames.sort()
            for fn in sorted(filenames):
                if fn.endswith(SOURCE_SUFFIX):
                    full = os.path.join(dirpath, fn)
                    rel = os.path.relpath(full, root)
                    with open(full, "r", encoding="utf-8") as fh:
                        files[rel] = fh.read()
        return cls(files, root=root)

    @property
    def files(self) -> dict[str, str]:
        return self._files

    def paths(self) -> list[str]:
        return list(self._files)

    def text(self, path: str) -> str:
        try:
            return self._files[path]
        except KeyError:
            raise CaretError(f"no such file in repository: {path!r}") from None

    def lex(self, path: str):
        """Cached (tokens, lex diagnostics) for one file, tolerant mode."""
        if path not in self._lex_cache:
            self._lex_cache[path] = _lexer.lex(self.text(path), collect_errors=True)
        return self._lex_cache[path]

    def module(self, path: str) -> _parser.Module:
        if path not in self._module_cache:
            self._module_cache[path] = _parser.parse(self.text(path), path)
        return self._module_cache[path]

    def modules(self) -> dict[str, _parser.Module]:
        return {p: self.module(p) for p in self._files}

    def with_text(self, path: str, text: str) -> "Repository":
        """Copy-on-write snapshot with one file replaced (or added)."""
        files = dict(self._files)
        files[path] = text
        snap = Repository(files, root=self.root)
        for p in files:
            if p != path:
                if p in self._lex_cache:
                    snap._lex_cache[p] = self._lex_cache[p]
                if p in self._module_cache:
                    snap._module_cache[p] = self._module_cache[p]
        return snap

    def validate_caret(self, caret: CaretPosition) -> None:
        text = self.text(caret.file)
        lines = text.split("\n")
        if not (1 <= caret.line <= len(lines)):
            raise CaretError(f"line {caret.line} out of range for {caret.file!r}")
        if not (0 <= caret.column <= len(lines[caret.line - 1])):
            raise CaretError(
                f"column {caret.column} out of range on line {caret.line} of {caret.file!r}"
            )

    def offset_of(self, caret: CaretPosition) -> int:
        self.validate_caret(caret)
        lines = self.text(caret.file).split("\n")
        return sum(len(l) + 1 for l in lines[: caret.line - 1]) + caret.column

    def position_at(self, path: str, offset: int) -> CaretPosition:
        text = self.text(path)
        head = text[:offset]
        line = head.count("\n") + 1
        col = len(head) - (head.rfind("\n") + 1)
        return CaretPosition(path, line, col)

    def __eq__(self, other) -> bool:
        return isinstance(other, Repository) and self._files == other._files

    def __repr__(self) -> str:
        return f"Repository({len(self._files)} files, root={self.root!r})"


def load_repositories(root: str) -> list[tuple[str, Repository]]:
    """Load every repository directory directly under root, sorted by name."""
    repos: list[tuple[str, Repository]] = []
    for name in sorted(os.listdir(root)):
        full = os.path.join(root, name)
        if os.path.isdir(full):
            repos.append((name, Repository.from_dir(full)))
    return repos


def iter_source_texts(repos: Iterable[Repository]) -> Iterable[str]:
    for repo in repos:
        for path in repo.paths():
            yield repo.text(path)
