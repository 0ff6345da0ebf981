"""Deterministic token-overlap scorer used as the protocol's test stand-in.

The score is 0.5 + 0.5 * J where J is the Jaccard similarity of the
lowercased token sets, so every score lands in [0.5, 1.0]: threshold-0.5
pipeline runs accept everything, and tests exercise thresholds explicitly.
"""

import re

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase and split into maximal alphanumeric runs."""
    return _TOKEN_RE.findall(text.lower())


def heuristic_score(claim: str, context: str) -> float:
    """Jaccard overlap of token sets mapped through 0.5 + 0.5 * J."""
    claim_tokens = set(tokenize(claim))
    context_tokens = set(tokenize(context))
    union = claim_tokens | context_tokens
    if not union:
        return 1.0
    return 0.5 + 0.5 * (len(claim_tokens & context_tokens) / len(union))
