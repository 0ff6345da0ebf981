"""Attach point for transformer checkpoints behind the wire protocol.

The reference scorer ships only the overlap heuristic; serving a fine-tuned
sequence classifier means implementing ``score_batch`` below and passing the
adapter's ``__call__`` to the protocol server, e.g.:

    class MyScorer(SequenceClassifierAdapter):
        def load(self):
            self.model = ...   # load tokenizer + checkpoint from self.checkpoint
        def score_batch(self, pairs):
            ...                # tokenize "<claim> [SEP] <context>", run the
                               # model, return positive-class probabilities

    serve_stdio(MyScorer("path/to/checkpoint"), sys.stdin, sys.stdout)

No weights, tokenizers, or model code are bundled here.
"""

from __future__ import annotations

from typing import Sequence


class SequenceClassifierAdapter:
    """Skeleton for serving a (claim, context) sequence classifier.

    Subclasses implement ``load`` and ``score_batch``; the adapter handles
    lazy loading, batching, and input-length bookkeeping. ``max_tokens``
    mirrors the usual encoder input budget: implementations are expected to
    truncate each "<claim> [SEP] <context>" sequence to that many tokens.
    """

    def __init__(self, checkpoint: str, max_tokens: int = 512, batch_size: int = 16):
        self.checkpoint = checkpoint
        self.max_tokens = max_tokens
        self.batch_size = batch_size
        self._loaded = False

    def load(self) -> None:
        """Load tokenizer and weights from ``self.checkpoint``."""
        raise NotImplementedError("attach a real checkpoint by implementing load()")

    def score_batch(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        """Positive-class probability in [0, 1] for each (claim, context) pair."""
        raise NotImplementedError("attach a real checkpoint by implementing score_batch()")

    def __call__(self, claim: str, context: str) -> float:
        if not self._loaded:
            self.load()
            self._loaded = True
        return self.score_batch([(claim, context)])[0]
