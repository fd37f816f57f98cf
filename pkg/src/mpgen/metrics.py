"""Evaluation metrics over (generated, ground-truth) pairs.

Dependency Coverage follows the micro-averaged formula: the dependency set
of a ground truth is found by running trigger insertion on it in its
repository context and keeping, for each marked identifier, the minimal
enclosing access expression (attribute chains and call targets); the
expression set of a prediction is every attribute access and call target in
its AST. Static validity splices each prediction into its repository
snapshot and passes iff the inserted span produces no syntax-error,
undefined-variable, or no-member lint records.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from math import exp, log
from statistics import mean
from typing import Optional, Sequence

from ._kernels import levenshtein
from .analysis.insert import insert_text
from .analysis.lint import lint_check
from .lm.tokenizer import tokenize
from .lm.vocab import Vocab
from .minilang import nodes
from .minilang.lexer import lex
from .minilang.parser import parse_body
from .minilang.render import render_tokens
from .repo import CaretPosition, Repository
from .trigger import insert_triggers


@dataclass
class EvalPair:
    description: str
    gt: str
    pred: str
    repo: Repository          # snapshot with the target body blanked
    file: str
    pos: CaretPosition
    label: str = ""


def _access_candidates(stmts: list[nodes.Stmt]) -> list[tuple[str, tuple[tuple[int, int], ...]]]:
    """(canonical text, identifier positions) for every access expression.

    Access expressions are attribute chains (all levels of nesting) and call
    targets, including bare-name call targets.
    """
    out: dict[tuple[str, tuple[tuple[int, int], ...]], None] = {}
    for expr, _store in nodes.walk_expressions(stmts):
        if isinstance(expr, nodes.Attribute):
            text = nodes.expr_text(expr)
            if text is not None:
                out[(text, tuple(nodes.chain_positions(expr)))] = None
        elif isinstance(expr, nodes.Call) and isinstance(expr.func, nodes.Name):
            out[(expr.func.id, ((expr.func.line, expr.func.column),))] = None
    return list(out.keys())


def extract_expressions(pred: str) -> set[str]:
    """All attribute-access and call-target expressions in prediction text.

    Unparseable predictions contribute whatever the recovering parser keeps.
    """
    stmts, _diags = parse_body(pred)
    return {text for text, _ in _access_candidates(stmts)}


def _enclosing_function(repo: Repository, file: str, line: int):
    module = repo.module(file)
    from .minilang.parser import extract_functions

    for fn in extract_functions(module):
        if fn.line <= line <= max(fn.end_line, fn.body_start_line):
            return fn
    return None


def identify_dependencies(gt: str, repo: Repository, pos: CaretPosition) -> set[str]:
    """DEP(gt): minimal access expressions covering trigger-marked identifiers."""
    snapshot, _caret = insert_text(repo, pos, gt)
    func = _enclosing_function(snapshot, pos.file, pos.line)
    if func is None:
        raise ValueError(
            f"ground truth at {pos.file}:{pos.line} does not parse into a function"
        )
    aug = insert_triggers(snapshot, pos.file, func)
    marked = aug.marked_positions()
    candidates = _access_candidates(func.body)
    deps: set[str] = set()
    for p in marked:
        best: Optional[tuple[str, int]] = None
        for text, positions in candidates:
            if p in positions:
                if best is None or len(positions) < best[1]:
                    best = (text, len(positions))
        if best is not None:
            deps.add(best[0])
    return deps


def dependency_coverage(pairs: Sequence[EvalPair]) -> Optional[float]:
    """Micro-averaged coverage: sum of intersections over sum of DEP sizes.

    Returns None (not applicable) when no pair has dependencies.
    """
    covered = 0
    total = 0
    for pair in pairs:
        dep = identify_dependencies(pair.gt, pair.repo, pair.pos)
        exp_set = extract_expressions(pair.pred)
        covered += len(exp_set & dep)
        total += len(dep)
    if total == 0:
        return None
    return covered / total


def pair_is_valid(pair: EvalPair) -> bool:
    """True iff the inserted prediction's span lints clean."""
    snapshot, caret = insert_text(pair.repo, pair.pos, pair.pred)
    func = _enclosing_function(snapshot, pair.file, pair.pos.line)
    span_start = func.line if func is not None else pair.pos.line
    span_end = caret.line
    errors = lint_check(snapshot, pair.file)
    return not any(span_start <= e.line <= span_end for e in errors)


def static_validity_rate(pairs: Sequence[EvalPair]) -> tuple[float, Optional[float]]:
    """(ValRate over all pairs, ValRate over dependency-bearing pairs)."""
    if not pairs:
        return 0.0, None
    valid = []
    dep_flags = []
    for pair in pairs:
        valid.append(pair_is_valid(pair))
        dep_flags.append(bool(identify_dependencies(pair.gt, pair.repo, pair.pos)))
    rate = sum(valid) / len(pairs)
    dep_pairs = [v for v, d in zip(valid, dep_flags) if d]
    rate_dep = sum(dep_pairs) / len(dep_pairs) if dep_pairs else None
    return rate, rate_dep


def canonical_text(text: str) -> str:
    toks, _ = lex(text, collect_errors=True)
    return render_tokens(toks)


def exact_match(pairs: Sequence[EvalPair]) -> float:
    if not pairs:
        return 0.0
    hits = sum(1 for p in pairs if canonical_text(p.pred) == canonical_text(p.gt))
    return hits / len(pairs)


def edit_similarity(a: str, b: str) -> float:
    """100 * (1 - levenshtein/max-length); two empty strings are 100% similar."""
    if not a and not b:
        return 100.0
    return 100.0 * (1.0 - levenshtein(a, b) / max(len(a), len(b)))


def _ngram_counts(ids: Sequence[int], n: int) -> Counter:
    return Counter(tuple(ids[i: i + n]) for i in range(len(ids) - n + 1))


def corpus_bleu(token_pairs: Sequence[tuple[Sequence[int], Sequence[int]]]) -> float:
    """Corpus BLEU, n<=4, brevity penalty, 1/(2*total) smoothing on zero matches.

    Orders with no candidate n-grams at all are excluded from the geometric
    mean (short-corpus guard).
    """
    pred_len = sum(len(p) for p, _ in token_pairs)
    gt_len = sum(len(g) for _, g in token_pairs)
    if pred_len == 0:
        return 0.0
    logs: list[float] = []
    for n in range(1, 5):
        total = sum(max(len(p) - n + 1, 0) for p, _ in token_pairs)
        if total == 0:
            continue
        matches = 0
        for p, g in token_pairs:
            cp = _ngram_counts(p, n)
            cg = _ngram_counts(g, n)
            matches += sum(min(c, cg[gram]) for gram, c in cp.items())
        p_n = matches / total if matches > 0 else 1.0 / (2.0 * total)
        logs.append(log(p_n))
    if not logs:
        return 0.0
    bp = 1.0 if pred_len > gt_len else exp(1.0 - gt_len / pred_len)
    return bp * exp(sum(logs) / len(logs))


def bleu4(pairs: Sequence[EvalPair], vocab: Vocab) -> float:
    token_pairs = [
        (tokenize(p.pred, vocab), tokenize(p.gt, vocab)) for p in pairs
    ]
    return corpus_bleu(token_pairs)


def sentence_bleu(pred: str, gt: str, vocab: Vocab) -> float:
    return corpus_bleu([(tokenize(pred, vocab), tokenize(gt, vocab))])


@dataclass
class EvalReport:
    n: int
    dep_cov: Optional[float]
    val_rate: float
    val_rate_dep: Optional[float]
    exact_match: float
    edit_sim: float
    bleu4: float
    per_pair: list[dict]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "dep_cov": self.dep_cov,
            "val_rate": self.val_rate,
            "val_rate_dep": self.val_rate_dep,
            "exact_match": self.exact_match,
            "edit_sim": self.edit_sim,
            "bleu4": self.bleu4,
            "pairs": self.per_pair,
        }


def evaluate_pairs(pairs: Sequence[EvalPair], vocab: Vocab) -> EvalReport:
    """All six headline metrics plus the per-pair breakdown."""
    per_pair: list[dict] = []
    covered_sum = 0
    dep_sum = 0
    valid_flags: list[bool] = []
    dep_flags: list[bool] = []
    em_flags: list[bool] = []
    edit_sims: list[float] = []
    token_pairs = []
    for pair in pairs:
        dep = identify_dependencies(pair.gt, pair.repo, pair.pos)
        exp_set = extract_expressions(pair.pred)
        covered = len(exp_set & dep)
        covered_sum += covered
        dep_sum += len(dep)
        valid = pair_is_valid(pair)
        valid_flags.append(valid)
        dep_flags.append(bool(dep))
        em = canonical_text(pair.pred) == canonical_text(pair.gt)
        em_flags.append(em)
        sim = edit_similarity(pair.pred, pair.gt)
        edit_sims.append(sim)
        pred_ids = tokenize(pair.pred, vocab)
        gt_ids = tokenize(pair.gt, vocab)
        token_pairs.append((pred_ids, gt_ids))
        per_pair.append(
            {
                "label": pair.label,
                "file": pair.file,
                "line": pair.pos.line,
                "dep_total": len(dep),
                "dep_covered": covered,
                "valid": valid,
                "exact_match": em,
                "edit_sim": sim,
                "bleu4": corpus_bleu([(pred_ids, gt_ids)]),
            }
        )
    n = len(pairs)
    dep_pairs_valid = [v for v, d in zip(valid_flags, dep_flags) if d]
    return EvalReport(
        n=n,
        dep_cov=(covered_sum / dep_sum) if dep_sum else None,
        val_rate=(sum(valid_flags) / n) if n else 0.0,
        val_rate_dep=(sum(dep_pairs_valid) / len(dep_pairs_valid)) if dep_pairs_valid else None,
        exact_match=(sum(em_flags) / n) if n else 0.0,
        edit_sim=mean(edit_sims) if edit_sims else 0.0,
        bleu4=corpus_bleu(token_pairs),
        per_pair=per_pair,
    )
