"""Scope index: per-file symbol tables, class member tables, import edges.

Type resolution is deliberately flow-insensitive and single-hop, the level
of inference a static tool can honestly sustain for a dynamically typed
mini-language: the receiver `self` (a method's first parameter) resolves to
the enclosing class, a local resolves to the class it was most recently
constructed from, a class or module name resolves to itself, and everything
else is unresolvable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..minilang import nodes
from ..minilang.parser import ClassDef, FunctionDef, Module
from ..repo import Repository


@dataclass
class ClassInfo:
    name: str
    file: str
    node: ClassDef

    @property
    def members(self) -> set[str]:
        return set(m.name for m in self.node.methods) | set(self.node.attributes)


@dataclass
class ModuleScope:
    path: str
    module: Module
    functions: dict[str, FunctionDef] = field(default_factory=dict)
    classes: dict[str, ClassInfo] = field(default_factory=dict)
    variables: set[str] = field(default_factory=set)
    # alias -> ("module", path) or ("name", path, name); unresolved imports
    # map to ("unresolved",).
    imports: dict[str, tuple] = field(default_factory=dict)

    @property
    def defined_names(self) -> set[str]:
        return set(self.functions) | set(self.classes) | set(self.variables)

    @property
    def visible_names(self) -> set[str]:
        return self.defined_names | set(self.imports)


@dataclass
class ScopeIndex:
    modules: dict[str, ModuleScope]
    import_edges: list[tuple[str, str]]
    diagnostics: list[str]

    def module_scope(self, path: str) -> Optional[ModuleScope]:
        return self.modules.get(path)

    def enclosing(self, path: str, line: int) -> tuple[Optional[ClassInfo], Optional[FunctionDef]]:
        """Class and function whose span contains the given line.

        A function's span extends to its reserved body-start line even when
        the body is currently empty, so completions at a freshly blanked
        insertion point still see the function's scope.
        """
        scope = self.modules.get(path)
        if scope is None:
            return None, None

        def fn_end(fn: FunctionDef) -> int:
            return max(fn.end_line, fn.body_start_line)

        for cls in scope.classes.values():
            cls_end = max(
                [cls.node.end_line] + [fn_end(m) for m in cls.node.methods]
            )
            if cls.node.line <= line <= cls_end:
                for m in cls.node.methods:
                    if m.line <= line <= fn_end(m):
                        return cls, m
                return cls, None
        for fn in scope.functions.values():
            if fn.line <= line <= fn_end(fn):
                return None, fn
        return None, None

    def resolve_class_name(self, path: str, name: str) -> Optional[ClassInfo]:
        scope = self.modules.get(path)
        if scope is None:
            return None
        if name in scope.classes:
            return scope.classes[name]
        target = scope.imports.get(name)
        if target and target[0] == "name":
            _, tpath, tname = target
            other = self.modules.get(tpath)
            if other and tname in other.classes:
                return other.classes[tname]
        return None

    def resolve_module_alias(self, path: str, name: str) -> Optional[ModuleScope]:
        scope = self.modules.get(path)
        if scope is None:
            return None
        target = scope.imports.get(name)
        if target and target[0] == "module":
            return self.modules.get(target[1])
        return None

    def resolve_receiver(
        self,
        path: str,
        func: Optional[FunctionDef],
        name: str,
        before: tuple[int, int],
    ):
        """Resolve the receiver of a dotted access at a given position.

        Returns ("class", ClassInfo), ("module", ModuleScope) or None.
        `before` bounds the local-assignment search: only constructor
        assignments lexically preceding the access are considered.
        """
        if func is not None and func.is_method and func.params and name == func.params[0]:
            scope = self.modules.get(path)
            if scope and func.owner_class in scope.classes:
                return ("class", scope.classes[func.owner_class])
            return None
        if func is not None:
            latest: Optional[ClassInfo] = None
            latest_pos = (-1, -1)
            for stmt in nodes.walk_statements(func.body):
                if not isinstance(stmt, nodes.Assign):
                    continue
                if not isinstance(stmt.target, nodes.Name) or stmt.target.id != name:
                    continue
                tpos = (stmt.target.line, stmt.target.column)
                if tpos >= before:
                    continue
                value = stmt.value
                if isinstance(value, nodes.Call) and isinstance(value.func, nodes.Name):
                    cls = self.resolve_class_name(path, value.func.id)
                    if cls is not None and tpos > latest_pos:
                        latest, latest_pos = cls, tpos
                    elif cls is None and tpos > latest_pos:
                        latest, latest_pos = None, tpos
                elif tpos > latest_pos:
                    latest, latest_pos = None, tpos
            if latest is not None:
                return ("class", latest)
            if latest_pos != (-1, -1):
                return None
        cls = self.resolve_class_name(path, name)
        if cls is not None:
            return ("class", cls)
        mod = self.resolve_module_alias(path, name)
        if mod is not None:
            return ("module", mod)
        return None

    def to_dict(self) -> dict:
        """Deterministic structural summary used for equality checks."""
        out = {}
        for path in sorted(self.modules):
            scope = self.modules[path]
            out[path] = {
                "functions": sorted(scope.functions),
                "classes": {
                    name: sorted(info.members) for name, info in sorted(scope.classes.items())
                },
                "variables": sorted(scope.variables),
                "imports": {k: list(v) for k, v in sorted(scope.imports.items())},
            }
        return {"modules": out, "edges": sorted(self.import_edges)}

    def __eq__(self, other) -> bool:
        return isinstance(other, ScopeIndex) and self.to_dict() == other.to_dict()


def _module_path_for(name: str, files: dict[str, str]) -> Optional[str]:
    candidate = name + ".mp"
    return candidate if candidate in files else None


def build_scope_index(repo: Repository) -> ScopeIndex:
    """Build the repository-wide scope index; diagnostics are collected."""
    modules: dict[str, ModuleScope] = {}
    edges: list[tuple[str, str]] = []
    diagnostics: list[str] = []

    for path in repo.paths():
        mod = repo.module(path)
        scope = ModuleScope(path=path, module=mod)
        for fn in mod.functions:
            scope.functions[fn.name] = fn
        for cls in mod.classes:
            scope.classes[cls.name] = ClassInfo(cls.name, path, cls)
        for stmt in mod.body:
            if isinstance(stmt, nodes.Assign) and isinstance(stmt.target, nodes.Name):
                scope.variables.add(stmt.target.id)
        modules[path] = scope

    for path, scope in modules.items():
        for imp in scope.module.imports:
            target_path = _module_path_for(imp.module, repo.files)
            if target_path is None:
                for alias in imp.bound_names:
                    scope.imports[alias] = ("unresolved",)
                diagnostics.append(f"{path}: unresolved import {imp.module!r}")
                continue
            edges.append((path, target_path))
            if imp.names:
                for n in imp.names:
                    scope.imports[n] = ("name", target_path, n)
            else:
                scope.imports[imp.module] = ("module", target_path)

    # Cycle check over import edges.
    adj: dict[str, list[str]] = {}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
    state: dict[str, int] = {}

    def visit(node: str, trail: list[str]) -> None:
        state[node] = 1
        for nxt in adj.get(node, ()):
            if state.get(nxt) == 1:
                cycle = trail[trail.index(nxt):] + [nxt] if nxt in trail else [node, nxt]
                diagnostics.append("import cycle: " + " -> ".join(cycle))
            elif state.get(nxt) is None:
                visit(nxt, trail + [nxt])
        state[node] = 2

    for node in sorted(adj):
        if state.get(node) is None:
            visit(node, [node])

    return ScopeIndex(modules=modules, import_edges=edges, diagnostics=diagnostics)


def scope_index_for(repo: Repository) -> ScopeIndex:
    """Per-repository cached index (repositories are immutable)."""
    if repo._index is None:
        repo._index = build_scope_index(repo)
    return repo._index


def locals_before(func: FunctionDef, before: tuple[int, int]) -> set[str]:
    """Names assigned in the function strictly before a position."""
    out: set[str] = set()
    for stmt in nodes.walk_statements(func.body):
        if isinstance(stmt, nodes.Assign) and isinstance(stmt.target, nodes.Name):
            if (stmt.target.line, stmt.target.column) < before:
                out.add(stmt.target.id)
    return out
