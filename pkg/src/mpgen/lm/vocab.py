"""The expanded model vocabulary with reserved control tokens.

Index layout is fixed: <BOS>=0, <EOS>=1, <UNK>=2, <COMP>=3, then every
distinct subword seen in the corpus in lexicographic order. The trigger
token <COMP> is always present whether or not the corpus contains it, which
is what makes it a legal prediction target at every step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

BOS_TOKEN = "<BOS>"
EOS_TOKEN = "<EOS>"
UNK_TOKEN = "<UNK>"
COMP_TOKEN = "<COMP>"
RESERVED_TOKENS = (BOS_TOKEN, EOS_TOKEN, UNK_TOKEN, COMP_TOKEN)

BOS_ID = 0
EOS_ID = 1
UNK_ID = 2
COMP_ID = 3

# ids stripped out when rendering generated text / inserting partials
CONTROL_IDS = frozenset({BOS_ID, EOS_ID, COMP_ID})


@dataclass(frozen=True)
class Vocab:
    tokens: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "_index", {t: i for i, t in enumerate(self.tokens)}
        )

    @property
    def size(self) -> int:
        return len(self.tokens)

    def id(self, token: str) -> int:
        """Token id, falling back to <UNK> for unknown subwords."""
        return self._index.get(token, UNK_ID)

    def id_strict(self, token: str) -> int:
        return self._index[token]

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def token(self, idx: int) -> str:
        if not (0 <= idx < len(self.tokens)):
            raise ValueError(f"unknown token id {idx}")
        return self.tokens[idx]


def build_vocab(corpus: Iterable[str]) -> Vocab:
    """Vocabulary over a text corpus: reserved tokens plus sorted subwords."""
    from .tokenizer import token_strings

    texts = list(corpus)
    if not texts:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    seen: set[str] = set()
    for text in texts:
        seen.update(token_strings(text))
    seen.difference_update(RESERVED_TOKENS)
    return Vocab(tokens=RESERVED_TOKENS + tuple(sorted(seen)))
