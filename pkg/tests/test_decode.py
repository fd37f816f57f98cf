import random

import numpy as np
import pytest

from mpgen.decode import (
    GenerationConfig,
    argmax,
    build_trie,
    generate,
    mask_distribution,
    select_suggestion,
    tokenize_suggestion,
)
from mpgen.lm import build_vocab, tokenize, train
from mpgen.lm.vocab import BOS_ID, COMP_ID, EOS_ID, Vocab
from mpgen.repo import CaretPosition, Repository


from oracles import greedy_path_oracle, random_selection_case as random_case


# --- trie --------------------------------------------------------------------

def test_trie_prefix_of_another_suggestion():
    vocab = build_vocab(["update updates"])
    trie = build_trie(["update", "updates"], vocab)
    # distinct single subwords: two children of the root, both terminal
    assert len(trie.root.children) == 2
    assert trie.shadowed_count == 0


def test_trie_token_level_shadowing():
    vocab = build_vocab(["get_value get_value_str"])
    trie = build_trie(["get_value", "get_value_str"], vocab)
    # get_value's terminal lies on get_value_str's path: the longer one is
    # unreachable under the first-terminal stop
    assert trie.shadowed_count == 1


def test_trie_single_suggestion():
    vocab = build_vocab(["a"])
    trie = build_trie(["a"], vocab)
    assert len(trie.root.children) == 1
    child = next(iter(trie.root.children.values()))
    assert child.is_terminal


def test_trie_shares_prefixes_and_bounds_node_count():
    vocab = build_vocab(["_ax _ay _b"])
    trie = build_trie(["_ax", "_ay", "_b"], vocab)
    lengths = [len(tokenize_suggestion(s, vocab)) for s in ("_ax", "_ay", "_b")]
    assert trie.node_count <= 1 + sum(lengths)
    assert len(trie.root.children) == 1  # all three share the leading underscore


def test_trie_fanout_counts_distinct_first_subwords():
    names = [f"m{c}_x" for c in "abcdef"] + ["_hidden"]
    vocab = build_vocab([" ".join(names)])
    trie = build_trie(names, vocab)
    firsts = {tokenize_suggestion(s, vocab)[0] for s in names}
    assert len(trie.root.children) == len(firsts)


def test_build_trie_rejects_empty():
    vocab = build_vocab(["a"])
    with pytest.raises(ValueError):
        build_trie([], vocab)


# --- mask / argmax -----------------------------------------------------------

def test_mask_zeroes_outside_allowed():
    dist = np.full(5, 0.2)
    out = mask_distribution(dist, {3})
    assert out[3] == pytest.approx(0.2)
    assert out.sum() == pytest.approx(0.2)


def test_mask_forces_argmax_inside_allowed():
    dist = np.array([0.5, 0.1, 0.4])
    out = mask_distribution(dist, {1, 2})
    assert int(np.argmax(out)) == 2


def test_mask_idempotent():
    dist = np.array([0.3, 0.3, 0.4])
    once = mask_distribution(dist, {0, 2})
    twice = mask_distribution(once, {0, 2})
    np.testing.assert_array_equal(once, twice)


def test_mask_empty_allowed_rejected():
    with pytest.raises(ValueError):
        mask_distribution(np.ones(3), set())


def _vocab_of_size(n):
    return Vocab(tokens=("<BOS>", "<EOS>", "<UNK>", "<COMP>") + tuple(f"t{i}" for i in range(n - 4)))


def test_argmax_basic_and_ties():
    v = _vocab_of_size(6)
    assert argmax(v, np.array([0.1, 0.7, 0.2, 0.0, 0.0, 0.0])) == 1
    assert argmax(v, np.array([0.0, 0.0, 0.5, 0.0, 0.0, 0.5])) == 2  # lowest index wins


def test_argmax_scale_invariant():
    v = _vocab_of_size(5)
    dist = np.array([0.1, 0.2, 0.05, 0.4, 0.25])
    assert argmax(v, dist) == argmax(v, dist * 7.5)


def test_argmax_all_zero_rejected():
    v = _vocab_of_size(4)
    with pytest.raises(ValueError):
        argmax(v, np.zeros(4))


# --- select_suggestion -------------------------------------------------------

def test_single_suggestion_forced_regardless_of_model():
    rng = random.Random(0)
    model, desc, prefix, _sugs, vocab = random_case(rng)
    trie = build_trie(["_only_one"], build_vocab(["_only_one"]))
    # rebuild with the case vocab so ids align
    vocab2 = build_vocab(["_only_one"])
    model2 = train([([], [BOS_ID, 4, EOS_ID])], order=2, alpha=0.1, vocab=vocab2)
    out = select_suggestion(model2, [], [BOS_ID, COMP_ID], build_trie(["_only_one"], vocab2))
    from mpgen.lm.tokenizer import detokenize

    assert detokenize(out, vocab2) == "_only_one"


def test_model_bias_picks_between_two_suggestions():
    vocab = build_vocab(["left right"])
    left, right = vocab.id_strict("left"), vocab.id_strict("right")
    pairs = [([], [BOS_ID, COMP_ID, right, EOS_ID])] * 5
    model = train(pairs, order=3, alpha=0.1, vocab=vocab)
    out = select_suggestion(model, [], [BOS_ID, COMP_ID], build_trie(["left", "right"], vocab))
    assert out == [right]


def test_sixty_eight_candidate_selection_finds_trained_path():
    # model trained to prefer _registered_updates among 68 candidates
    names = ["_registered_updates"] + [f"_field_{c}{d}" for c in "abcdef" for d in "abcdefghij"][:67]
    vocab = build_vocab([" ".join(names)])
    target = tokenize_suggestion("_registered_updates", vocab)
    pairs = [([], [BOS_ID, COMP_ID] + target + [EOS_ID])] * 10
    model = train(pairs, order=3, alpha=0.1, vocab=vocab)
    trie = build_trie(names, vocab)
    out = select_suggestion(model, [], [BOS_ID, COMP_ID], trie)
    from mpgen.lm.tokenizer import detokenize

    assert detokenize(out, vocab) == "_registered_updates"


def test_selection_soundness_and_oracle_equivalence_randomized():
    rng = random.Random(20240808)
    for _ in range(200):
        model, desc, prefix, suggestions, vocab = random_case(rng)
        trie = build_trie(suggestions, vocab)
        got = select_suggestion(model, desc, prefix, trie)
        from mpgen.lm.tokenizer import detokenize

        assert detokenize(got, vocab) in suggestions
        assert got == greedy_path_oracle(model, desc, prefix, suggestions, vocab)


# --- generate ----------------------------------------------------------------

def _blank_repo():
    src = (
        "class K:\n"
        "    def boot(self):\n"
        '        "Prepare"\n'
        "        self.x = 1\n"
        "    def m(self):\n"
        '        "Return the stored x"\n'
        "        \n"
    )
    return Repository({"k.mp": src}), CaretPosition("k.mp", 7, 8)


def test_immediate_eos_gives_empty_output():
    vocab = build_vocab(["x"])
    model = train([([], [BOS_ID, EOS_ID])] * 3, order=2, alpha=0.1, vocab=vocab)
    repo, pos = _blank_repo()
    text, trace = generate(model, repo, "anything", pos, GenerationConfig())
    assert text == ""
    assert trace.steps == 1


def test_single_candidate_trigger_inserts_member():
    repo, pos = _blank_repo()
    vocab = build_vocab(["return self.x", "<COMP>"])
    body = tokenize("return <COMP>self.<COMP>x", vocab)
    model = train([([], [BOS_ID] + body + [EOS_ID])] * 5, order=3, alpha=0.1, vocab=vocab)
    text, trace = generate(model, repo, "Return the stored x", pos, GenerationConfig())
    assert text == "return self.x"
    assert trace.tool_invocations >= 1
    assert "tool-selection" in trace.tags


def test_tool_vs_vanilla_on_stale_member():
    # the vanilla model reproduces a member name from elsewhere; the tool
    # model is steered onto the only valid member
    from mpgen.analysis.lint import NO_MEMBER, lint_check

    src = (
        "class K:\n"
        "    def boot(self):\n"
        '        "Prepare"\n'
        "        self._x = 1\n"
        "    def m(self):\n"
        '        "Return the stored x"\n'
        "        \n"
    )
    repo = Repository({"k.mp": src})
    pos = CaretPosition("k.mp", 7, 8)
    corpus = ["return self._x", "return self._y_x", "<COMP>", "boot m"]
    vocab = build_vocab(corpus)
    aug = tokenize("return <COMP>self.<COMP>_y_x", vocab)
    plain = tokenize("return self._y_x", vocab)
    tool_model = train([([], [BOS_ID] + aug + [EOS_ID])] * 5, order=3, alpha=0.1, vocab=vocab)
    vanilla_model = train([([], [BOS_ID] + plain + [EOS_ID])] * 5, order=3, alpha=0.1, vocab=vocab)

    tool_text, tool_trace = generate(tool_model, repo, "d", pos, GenerationConfig())
    van_text, _ = generate(vanilla_model, repo, "d", pos, GenerationConfig(tool_enabled=False))
    assert van_text == "return self._y_x"
    assert tool_text == "return self._x"

    from mpgen.analysis.insert import insert_text

    snap_v, _ = insert_text(repo, pos, van_text)
    snap_t, _ = insert_text(repo, pos, tool_text)
    assert any(e.kind == NO_MEMBER for e in lint_check(snap_v, "k.mp"))
    assert not lint_check(snap_t, "k.mp")


def test_empty_completion_drops_trigger_and_continues():
    # receiver is an unresolvable parameter: the tool returns nothing, the
    # marker is dropped, and decoding continues with the next-best token
    src = "def f(a):\n    \"doc\"\n    \n"
    repo = Repository({"f.mp": src})
    pos = CaretPosition("f.mp", 3, 4)
    vocab = build_vocab(["return a.b", "<COMP>"])
    marked = tokenize("return a.<COMP>b", vocab)
    plain = tokenize("return a.b", vocab)
    # mixed corpus: the marker dominates, an unmarked variant supplies the
    # next-best continuation once the failed trigger is dropped
    pairs = [([], [BOS_ID] + marked + [EOS_ID])] * 5 + [([], [BOS_ID] + plain + [EOS_ID])] * 3
    model = train(pairs, order=3, alpha=0.1, vocab=vocab)
    text, trace = generate(model, repo, "d", pos, GenerationConfig())
    assert trace.dropped_triggers == 1
    assert "<COMP>" not in text
    assert text == "return a.b"


def test_marker_hygiene_and_termination():
    vocab = build_vocab(["a b"])
    a = vocab.id_strict("a")
    # degenerate model that loops on `a`
    model = train([([], [BOS_ID] + [a] * 30 + [EOS_ID])], order=2, alpha=0.1, vocab=vocab)
    repo, pos = _blank_repo()
    cfg = GenerationConfig(max_tokens=17)
    text, trace = generate(model, repo, "d", pos, cfg)
    assert trace.steps == 17
    assert trace.truncated
    for banned in ("<COMP>", "<BOS>", "<EOS>"):
        assert banned not in text


def test_vanilla_equals_plain_greedy(trained_models):
    _cfg, _tool, vanilla = trained_models
    repo, pos = _blank_repo()
    desc = "def m(self): Return the stored x"
    text, trace = generate(vanilla, repo, desc, pos, GenerationConfig(tool_enabled=False))

    # plain greedy decoding oracle
    vocab = vanilla.vocab
    seq = [BOS_ID]
    for _ in range(256):
        tok = int(np.argmax(vanilla.predict(tokenize(desc, vocab), seq)))
        seq.append(tok)
        if tok == EOS_ID:
            break
    from mpgen.lm.tokenizer import detokenize
    from mpgen.lm.vocab import CONTROL_IDS

    expected = detokenize([t for t in seq if t not in CONTROL_IDS], vocab)
    assert text == expected
    assert trace.tool_invocations == 0


def test_cache_hit_on_repeated_receiver():
    src = (
        "class K:\n"
        "    def boot(self):\n"
        '        "Prepare"\n'
        "        self.ax = 1\n"
        "        self.bx = 2\n"
        "    def m(self):\n"
        '        "Sum both"\n'
        "        \n"
    )
    repo = Repository({"k.mp": src})
    pos = CaretPosition("k.mp", 8, 8)
    vocab = build_vocab(["return self.ax + self.bx", "<COMP>"])
    body = tokenize("return self.<COMP>ax + self.<COMP>bx", vocab)
    model = train([([], [BOS_ID] + body + [EOS_ID])] * 5, order=3, alpha=0.1, vocab=vocab)

    on, trace_on = generate(model, repo, "d", pos, GenerationConfig(cache_enabled=True))
    off, trace_off = generate(model, repo, "d", pos, GenerationConfig(cache_enabled=False))
    assert on == off
    assert trace_on.cache_hits >= 1
    assert trace_on.tool_invocations < trace_off.tool_invocations
    assert trace_off.cache_hits == 0
    assert trace_off.tool_invocations == trace_on.tool_invocations + trace_on.cache_hits


def test_generation_trace_tags_cover_all_tokens():
    repo, pos = _blank_repo()
    vocab = build_vocab(["return self.x", "<COMP>"])
    body = tokenize("return <COMP>self.<COMP>x", vocab)
    model = train([([], [BOS_ID] + body + [EOS_ID])] * 5, order=3, alpha=0.1, vocab=vocab)
    _text, trace = generate(model, repo, "d", pos, GenerationConfig())
    assert len(trace.tags) == len(trace.tokens) - 1  # BOS carries no tag
    assert set(trace.tags) <= {"model", "tool-selection"}


def test_generation_config_validation():
    with pytest.raises(ValueError):
        GenerationConfig(max_tokens=0)
    with pytest.raises(ValueError):
        GenerationConfig(tie_break="random")
