"""Recursive-descent parser for MiniPy with statement-level error recovery.

Parse errors are collected as diagnostics, never raised: a file containing
one broken function must still yield usable definitions for the rest, since
the lint checker and the completion tool run on files holding partially
generated code. Recovery skips to the next line (inside a block) or to the
next top-level definition (at module level).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import nodes, tokens as tk
from .lexer import lex
from .render import render_tokens
from .tokens import LexToken


@dataclass(frozen=True)
class ParseDiagnostic:
    message: str
    line: int
    column: int
    category: str = "syntax"  # syntax | redefinition


@dataclass
class FunctionDef:
    name: str
    params: list[str]
    docstring: Optional[str]
    body: list[nodes.Stmt]            # excludes the docstring statement
    body_tokens: list[LexToken]       # excludes the docstring statement
    signature_text: str
    line: int
    column: int
    body_start_line: int              # first non-docstring body line
    body_start_column: int
    end_line: int
    owner_class: Optional[str] = None

    @property
    def has_docstring(self) -> bool:
        return self.docstring is not None

    @property
    def is_method(self) -> bool:
        return self.owner_class is not None


@dataclass
class ClassDef:
    name: str
    methods: list[FunctionDef]
    attributes: set[str]
    line: int
    column: int
    end_line: int


@dataclass
class ImportDecl:
    module: str
    names: list[str]   # empty for plain `import m`; bound names for `from m import a, b`
    line: int
    column: int

    @property
    def bound_names(self) -> list[str]:
        return self.names if self.names else [self.module]


@dataclass
class Module:
    path: str
    imports: list[ImportDecl] = field(default_factory=list)
    classes: list[ClassDef] = field(default_factory=list)
    functions: list[FunctionDef] = field(default_factory=list)
    body: list[nodes.Stmt] = field(default_factory=list)  # module-level simple statements
    diagnostics: list[ParseDiagnostic] = field(default_factory=list)
    tokens: list[LexToken] = field(default_factory=list)


class _Recover(Exception):
    def __init__(self, diag: ParseDiagnostic):
        self.diag = diag


class _Parser:
    def __init__(self, toks: list[LexToken], path: str):
        self.toks = toks
        self.i = 0
        self.path = path
        self.diags: list[ParseDiagnostic] = []

    # --- cursor helpers -------------------------------------------------
    def peek(self, ahead: int = 0) -> Optional[LexToken]:
        j = self.i + ahead
        return self.toks[j] if j < len(self.toks) else None

    def advance(self) -> LexToken:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        t = self.peek()
        return t is not None and t.kind == kind and (text is None or t.text == text)

    def expect(self, kind: str, text: Optional[str] = None) -> LexToken:
        t = self.peek()
        if t is None:
            last = self.toks[-1] if self.toks else None
            line = last.line if last else 1
            raise _Recover(ParseDiagnostic(f"unexpected end of file, expected {text or kind}", line, 0))
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            raise _Recover(ParseDiagnostic(f"expected {want!r}, found {t.text or t.kind!r}", t.line, t.column))
        return self.advance()

    def _skip_to_newline(self) -> None:
        while self.peek() is not None and not self.at(tk.NEWLINE):
            if self.at(tk.INDENT) or self.at(tk.DEDENT):
                return
            self.advance()
        if self.at(tk.NEWLINE):
            self.advance()

    def _skip_block(self) -> None:
        """Skip a balanced indent region starting at the current INDENT."""
        depth = 0
        while self.peek() is not None:
            if self.at(tk.INDENT):
                depth += 1
            elif self.at(tk.DEDENT):
                depth -= 1
                if depth <= 0:
                    self.advance()
                    return
            self.advance()

    def _sync_top_level(self) -> None:
        depth = 0
        while self.peek() is not None:
            t = self.peek()
            if t.kind == tk.INDENT:
                depth += 1
            elif t.kind == tk.DEDENT:
                depth = max(0, depth - 1)
            elif depth == 0 and t.kind == tk.KEYWORD and t.text in ("def", "class", "import", "from"):
                return
            self.advance()

    # --- expressions ----------------------------------------------------
    def parse_expr(self) -> nodes.Expr:
        return self._comparison()

    def _comparison(self) -> nodes.Expr:
        left = self._additive()
        while self.at(tk.OPERATOR) and self.peek().text in ("==", "!=", "<", ">"):
            op = self.advance().text
            right = self._additive()
            left = nodes.BinOp(left, op, right)
        return left

    def _additive(self) -> nodes.Expr:
        left = self._multiplicative()
        while self.at(tk.OPERATOR) and self.peek().text in ("+", "-"):
            op = self.advance().text
            right = self._multiplicative()
            left = nodes.BinOp(left, op, right)
        return left

    def _multiplicative(self) -> nodes.Expr:
        left = self._postfix()
        while self.at(tk.OPERATOR) and self.peek().text in ("*", "/"):
            op = self.advance().text
            right = self._postfix()
            left = nodes.BinOp(left, op, right)
        return left

    def _postfix(self) -> nodes.Expr:
        e = self._atom()
        while True:
            if self.at(tk.PUNCTUATOR, "."):
                self.advance()
                name = self.expect(tk.IDENTIFIER)
                e = nodes.Attribute(e, name.text, name.line, name.column)
            elif self.at(tk.PUNCTUATOR, "("):
                lp = self.advance()
                args: list[nodes.Expr] = []
                if not self.at(tk.PUNCTUATOR, ")"):
                    args.append(self.parse_expr())
                    while self.at(tk.PUNCTUATOR, ","):
                        self.advance()
                        args.append(self.parse_expr())
                self.expect(tk.PUNCTUATOR, ")")
                e = nodes.Call(e, args, lp.line, lp.column)
            else:
                return e

    def _atom(self) -> nodes.Expr:
        t = self.peek()
        if t is None:
            raise _Recover(ParseDiagnostic("unexpected end of file in expression", self.toks[-1].line if self.toks else 1, 0))
        if t.kind == tk.IDENTIFIER:
            self.advance()
            return nodes.Name(t.text, t.line, t.column)
        if t.kind == tk.NUMBER:
            self.advance()
            return nodes.Num(t.text, t.line, t.column)
        if t.kind == tk.STRING:
            self.advance()
            return nodes.Str(t.text, t.line, t.column)
        if t.kind == tk.PUNCTUATOR and t.text == "(":
            self.advance()
            e = self.parse_expr()
            self.expect(tk.PUNCTUATOR, ")")
            return e
        raise _Recover(ParseDiagnostic(f"unexpected {t.text or t.kind!r} in expression", t.line, t.column))

    # --- statements -----------------------------------------------------
    def parse_simple_stmt(self) -> nodes.Stmt:
        t = self.peek()
        if t.kind == tk.KEYWORD and t.text == "return":
            self.advance()
            value = None
            if not self.at(tk.NEWLINE):
                value = self.parse_expr()
            self.expect(tk.NEWLINE)
            return nodes.Return(value, t.line, t.column)
        expr = self.parse_expr()
        if self.at(tk.OPERATOR, "="):
            eq = self.advance()
            if not isinstance(expr, (nodes.Name, nodes.Attribute)):
                raise _Recover(ParseDiagnostic("invalid assignment target", eq.line, eq.column))
            value = self.parse_expr()
            self.expect(tk.NEWLINE)
            return nodes.Assign(expr, value, t.line, t.column)
        self.expect(tk.NEWLINE)
        return nodes.ExprStmt(expr)

    def parse_stmt(self) -> nodes.Stmt:
        t = self.peek()
        if t.kind == tk.KEYWORD and t.text == "if":
            self.advance()
            test = self.parse_expr()
            self.expect(tk.PUNCTUATOR, ":")
            body = self.parse_block()
            orelse: list[nodes.Stmt] = []
            if self.at(tk.KEYWORD, "else"):
                self.advance()
                self.expect(tk.PUNCTUATOR, ":")
                orelse = self.parse_block()
            return nodes.If(test, body, orelse)
        if t.kind == tk.KEYWORD and t.text == "while":
            self.advance()
            test = self.parse_expr()
            self.expect(tk.PUNCTUATOR, ":")
            body = self.parse_block()
            return nodes.While(test, body)
        return self.parse_simple_stmt()

    def parse_block(self) -> list[nodes.Stmt]:
        self.expect(tk.NEWLINE)
        self.expect(tk.INDENT)
        stmts: list[nodes.Stmt] = []
        while self.peek() is not None and not self.at(tk.DEDENT):
            try:
                stmts.append(self.parse_stmt())
            except _Recover as r:
                self.diags.append(r.diag)
                self._skip_to_newline()
                if self.at(tk.INDENT):
                    self._skip_block()
        if self.at(tk.DEDENT):
            self.advance()
        return stmts

    # --- definitions ----------------------------------------------------
    def parse_def(self, owner: Optional[str]) -> FunctionDef:
        d = self.expect(tk.KEYWORD, "def")
        name = self.expect(tk.IDENTIFIER)
        self.expect(tk.PUNCTUATOR, "(")
        params: list[str] = []
        if self.at(tk.IDENTIFIER):
            params.append(self.advance().text)
            while self.at(tk.PUNCTUATOR, ","):
                self.advance()
                params.append(self.expect(tk.IDENTIFIER).text)
        self.expect(tk.PUNCTUATOR, ")")
        self.expect(tk.PUNCTUATOR, ":")
        signature = f"def {name.text}({', '.join(params)}):"

        self.expect(tk.NEWLINE)
        self.expect(tk.INDENT)
        docstring: Optional[str] = None
        if self.at(tk.STRING) and self.peek(1) is not None and self.peek(1).kind == tk.NEWLINE:
            docstring = self.advance().text[1:-1]
            self.advance()  # the newline

        body_start_idx = self.i
        body: list[nodes.Stmt] = []
        while self.peek() is not None and not self.at(tk.DEDENT):
            try:
                body.append(self.parse_stmt())
            except _Recover as r:
                self.diags.append(r.diag)
                self._skip_to_newline()
                if self.at(tk.INDENT):
                    self._skip_block()
        body_end_idx = self.i
        if self.at(tk.DEDENT):
            self.advance()

        body_tokens = self.toks[body_start_idx:body_end_idx]
        if body_tokens:
            first = body_tokens[0]
            start_line, start_col = first.line, first.column
            end_line = max(t.line for t in body_tokens)
        else:
            # Docstring-only (or empty) body: point just past the def line.
            start_line, start_col = name.line + (2 if docstring is not None else 1), 0
            end_line = name.line + (1 if docstring is not None else 0)
        return FunctionDef(
            name=name.text,
            params=params,
            docstring=docstring,
            body=body,
            body_tokens=body_tokens,
            signature_text=signature,
            line=d.line,
            column=d.column,
            body_start_line=start_line,
            body_start_column=start_col,
            end_line=end_line,
            owner_class=owner,
        )

    def parse_class(self) -> ClassDef:
        c = self.expect(tk.KEYWORD, "class")
        name = self.expect(tk.IDENTIFIER)
        self.expect(tk.PUNCTUATOR, ":")
        self.expect(tk.NEWLINE)
        self.expect(tk.INDENT)
        methods: list[FunctionDef] = []
        while self.peek() is not None and not self.at(tk.DEDENT):
            if self.at(tk.KEYWORD, "def"):
                try:
                    methods.append(self.parse_def(owner=name.text))
                except _Recover as r:
                    self.diags.append(r.diag)
                    self._skip_to_newline()
                    if self.at(tk.INDENT):
                        self._skip_block()
            else:
                t = self.peek()
                self.diags.append(
                    ParseDiagnostic(f"only method definitions allowed in class body, found {t.text or t.kind!r}", t.line, t.column)
                )
                self._skip_to_newline()
                if self.at(tk.INDENT):
                    self._skip_block()
        end_line = methods[-1].end_line if methods else name.line
        if self.at(tk.DEDENT):
            self.advance()
        attributes: set[str] = set()
        for m in methods:
            if not m.params:
                continue
            recv = m.params[0]
            for stmt in nodes.walk_statements(m.body):
                if (
                    isinstance(stmt, nodes.Assign)
                    and isinstance(stmt.target, nodes.Attribute)
                    and isinstance(stmt.target.value, nodes.Name)
                    and stmt.target.value.id == recv
                ):
                    attributes.add(stmt.target.attr)
        return ClassDef(name.text, methods, attributes, c.line, c.column, end_line)

    def parse_import(self) -> ImportDecl:
        t = self.peek()
        if t.text == "import":
            self.advance()
            mod = self.expect(tk.IDENTIFIER)
            self.expect(tk.NEWLINE)
            return ImportDecl(mod.text, [], t.line, t.column)
        self.expect(tk.KEYWORD, "from")
        mod = self.expect(tk.IDENTIFIER)
        self.expect(tk.KEYWORD, "import")
        names = [self.expect(tk.IDENTIFIER).text]
        while self.at(tk.PUNCTUATOR, ","):
            self.advance()
            names.append(self.expect(tk.IDENTIFIER).text)
        self.expect(tk.NEWLINE)
        return ImportDecl(mod.text, names, t.line, t.column)

    # --- module ---------------------------------------------------------
    def parse_module(self) -> Module:
        mod = Module(path=self.path, tokens=list(self.toks))
        seen: dict[str, tuple[int, int]] = {}

        def declare(name: str, line: int, col: int) -> None:
            if name in seen:
                self.diags.append(
                    ParseDiagnostic(f"redefinition of {name!r}", line, col, category="redefinition")
                )
            else:
                seen[name] = (line, col)

        while self.peek() is not None:
            t = self.peek()
            try:
                if t.kind == tk.NEWLINE:
                    self.advance()
                elif t.kind == tk.KEYWORD and t.text in ("import", "from"):
                    imp = self.parse_import()
                    mod.imports.append(imp)
                    for n in imp.bound_names:
                        declare(n, imp.line, imp.column)
                elif t.kind == tk.KEYWORD and t.text == "class":
                    cls = self.parse_class()
                    mod.classes.append(cls)
                    declare(cls.name, cls.line, cls.column)
                elif t.kind == tk.KEYWORD and t.text == "def":
                    fn = self.parse_def(owner=None)
                    mod.functions.append(fn)
                    declare(fn.name, fn.line, fn.column)
                elif t.kind in (tk.INDENT, tk.DEDENT):
                    self.diags.append(ParseDiagnostic("unexpected indentation", t.line, t.column))
                    self.advance()
                    self._sync_top_level()
                else:
                    stmt = self.parse_simple_stmt()
                    mod.body.append(stmt)
                    if isinstance(stmt, nodes.Assign) and isinstance(stmt.target, nodes.Name):
                        declare(stmt.target.id, stmt.target.line, stmt.target.column)
            except _Recover as r:
                self.diags.append(r.diag)
                self._sync_top_level()
        mod.diagnostics = list(self.diags)
        return mod


def parse(source: str, path: str = "<source>") -> Module:
    """Parse MiniPy source into a Module; errors are collected, not raised."""
    toks, lex_diags = lex(source, collect_errors=True)
    parser = _Parser([t for t in toks if t.kind != tk.ERROR], path)
    parser.diags.extend(ParseDiagnostic(d.message, d.line, d.column) for d in lex_diags)
    return parser.parse_module()


def parse_body(source: str):
    """Parse statement-sequence text (a rendered function body).

    Returns (stmts, diagnostics); recovery keeps whatever prefix parsed.
    """
    toks, lex_diags = lex(source, collect_errors=True)
    parser = _Parser([t for t in toks if t.kind != tk.ERROR], "<body>")
    parser.diags.extend(ParseDiagnostic(d.message, d.line, d.column) for d in lex_diags)
    stmts: list[nodes.Stmt] = []
    while parser.peek() is not None:
        if parser.at(tk.NEWLINE):
            parser.advance()
            continue
        if parser.at(tk.INDENT) or parser.at(tk.DEDENT):
            parser.diags.append(ParseDiagnostic("unexpected indentation", parser.peek().line, parser.peek().column))
            parser.advance()
            continue
        try:
            stmts.append(parser.parse_stmt())
        except _Recover as r:
            parser.diags.append(r.diag)
            parser._skip_to_newline()
            if parser.at(tk.INDENT):
                parser._skip_block()
    return stmts, parser.diags


def extract_functions(module: Module) -> list[FunctionDef]:
    """All functions and methods in source order."""
    out: list[tuple[int, FunctionDef]] = [(f.line, f) for f in module.functions]
    for cls in module.classes:
        out.extend((m.line, m) for m in cls.methods)
    out.sort(key=lambda p: p[0])
    return [f for _, f in out]


def module_render(module: Module) -> str:
    return render_tokens(module.tokens)
