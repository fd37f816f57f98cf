"""Indentation-aware lexer for MiniPy source text."""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import tokens as tk
from .tokens import LexToken


class LexError(Exception):
    """Raised for illegal characters when lexing in strict mode."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class LexDiagnostic:
    message: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"""
      (?P<marker><BOS>|<EOS>|<UNK>|<COMP>)
    | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<number>[0-9]+(?:\.[0-9]+)?)
    | (?P<string>"[^"\n]*")
    | (?P<unterminated>"[^"\n]*)
    | (?P<op>==|!=|[<>+\-*/=])
    | (?P<punct>[(),.:])
    | (?P<space>\ +)
    """,
    re.VERBOSE,
)


def lex(source: str, *, collect_errors: bool = False):
    """Lex MiniPy source into a token list.

    In strict mode (the default) an illegal character raises LexError. With
    collect_errors=True the function never raises: illegal characters become
    error tokens and the return value is a (tokens, diagnostics) pair.
    Unterminated string literals always yield an error token plus a
    diagnostic, per the lexer contract.

    Indentation is encoded as indent/dedent tokens. Blank (or all-space)
    lines produce no tokens. Every content line is terminated by a newline
    token whether or not the source ends with one.
    """
    out: list[LexToken] = []
    diags: list[LexDiagnostic] = []
    indents = [0]
    # Position for synthetic dedent tokens: just past the previous newline,
    # keeping positions strictly increasing.
    last_line = 0
    last_col = 0

    lines = source.split("\n")
    for lineno, raw in enumerate(lines, start=1):
        stripped = raw.lstrip(" ")
        if stripped == "":
            # Blank or whitespace-only line: no tokens, no indent change.
            continue
        indent = len(raw) - len(stripped)
        if indent > indents[-1]:
            indents.append(indent)
            out.append(LexToken(tk.INDENT, "", lineno, 0))
        elif indent < indents[-1]:
            n = 0
            while indents[-1] > indent:
                indents.pop()
                out.append(LexToken(tk.DEDENT, "", last_line, last_col + 1 + n))
                n += 1
            if indents[-1] != indent:
                diags.append(
                    LexDiagnostic("unindent does not match any outer level", lineno, 0)
                )
                indents.append(indent)
                out.append(LexToken(tk.INDENT, "", lineno, 0))

        pos = indent
        while pos < len(raw):
            m = _TOKEN_RE.match(raw, pos)
            if m is None:
                ch = raw[pos]
                if not collect_errors:
                    raise LexError(f"illegal character {ch!r}", lineno, pos)
                diags.append(LexDiagnostic(f"illegal character {ch!r}", lineno, pos))
                out.append(LexToken(tk.ERROR, ch, lineno, pos))
                pos += 1
                continue
            kind = m.lastgroup
            text = m.group()
            if kind == "space":
                pass
            elif kind == "marker":
                out.append(LexToken(tk.MARKER, text, lineno, pos))
            elif kind == "name":
                k = tk.KEYWORD if text in tk.KEYWORDS else tk.IDENTIFIER
                out.append(LexToken(k, text, lineno, pos))
            elif kind == "number":
                out.append(LexToken(tk.NUMBER, text, lineno, pos))
            elif kind == "string":
                out.append(LexToken(tk.STRING, text, lineno, pos))
            elif kind == "unterminated":
                diags.append(LexDiagnostic("unterminated string literal", lineno, pos))
                out.append(LexToken(tk.ERROR, text, lineno, pos))
            elif kind == "op":
                out.append(LexToken(tk.OPERATOR, text, lineno, pos))
            elif kind == "punct":
                out.append(LexToken(tk.PUNCTUATOR, text, lineno, pos))
            pos = m.end()

        out.append(LexToken(tk.NEWLINE, "", lineno, len(raw)))
        last_line = lineno
        last_col = len(raw)

    n = 0
    while len(indents) > 1:
        indents.pop()
        out.append(LexToken(tk.DEDENT, "", last_line, last_col + 1 + n))
        n += 1

    if collect_errors:
        return out, diags
    return out
