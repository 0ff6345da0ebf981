"""Shared tokenizer: one tokenization behavior for indexing, features, and scoring."""

import re

# Maximal runs of Unicode alphanumerics; underscores split like punctuation.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase and split into alphanumeric runs. No stemming, no stopword list."""
    return _TOKEN_RE.findall(text.lower())
