"""Run configuration: one JSON document, every leaf overridable by a dotted flag.

The config file mirrors this dataclass tree; ``--retrieval.k 50`` on the CLI
overrides ``{"retrieval": {"k": 50}}`` from the file. Unknown keys are
rejected so typos fail loudly. Scorer endpoints may also arrive through
``RERRFACT_SCORER_<STAGE>`` environment variables, which take precedence.
"""

from __future__ import annotations

import dataclasses
import json
import os
import types
import typing
from dataclasses import dataclass, field
from pathlib import Path


class UsageError(ValueError):
    """Bad invocation: missing paths, unknown keys, malformed overrides."""


@dataclass
class PathsConfig:
    corpus: str | None = None
    claims: str | None = None
    model_dir: str = "models"
    output_dir: str = "out"


@dataclass
class RetrievalConfig:
    k: int = 30
    fields: str = "title+abstract"  # or "title"


@dataclass
class RepresentationConfig:
    strategy: str = "reduced"  # total | diff5 | diff3 | reduced


@dataclass
class AbstractStageConfig:
    neg_per_claim: int | None = None  # None keeps every non-gold candidate
    max_abstracts: int | None = None


@dataclass
class RationaleStageConfig:
    mode: str = "loose_coupling"
    max_rationales: int | None = None
    tfidf_negatives: int = 3


@dataclass
class StanceStageConfig:
    mode: str = "two_step"  # or "multiclass"
    negatives_per_claim: int = 2


@dataclass
class ClassifierParams:
    epochs: int = 10
    batch_size: int = 1
    learning_rate: float = 0.1
    l2: float = 0.0
    hash_dims: int = 2**20


@dataclass
class ClassifiersConfig:
    abstract: ClassifierParams = field(default_factory=lambda: ClassifierParams(epochs=10))
    rationale: ClassifierParams = field(default_factory=lambda: ClassifierParams(epochs=10))
    stance_noinfo: ClassifierParams = field(default_factory=lambda: ClassifierParams(epochs=30))
    stance_sr: ClassifierParams = field(default_factory=lambda: ClassifierParams(epochs=30))
    multiclass: ClassifierParams = field(default_factory=lambda: ClassifierParams(epochs=30))


@dataclass
class ThresholdsConfig:
    abstract: float = 0.5
    rationale: float = 0.5
    stance_noinfo: float = 0.5
    stance_sr: float = 0.5


@dataclass
class ScorersConfig:
    abstract: str | None = None
    rationale: str | None = None
    stance_noinfo: str | None = None
    stance_sr: str | None = None
    timeout: float = 30.0


@dataclass
class RunConfig:
    seed: int = 0
    workers: int | None = None  # None: number of processors
    paths: PathsConfig = field(default_factory=PathsConfig)
    retrieval: RetrievalConfig = field(default_factory=RetrievalConfig)
    representation: RepresentationConfig = field(default_factory=RepresentationConfig)
    abstract: AbstractStageConfig = field(default_factory=AbstractStageConfig)
    rationale: RationaleStageConfig = field(default_factory=RationaleStageConfig)
    stance: StanceStageConfig = field(default_factory=StanceStageConfig)
    classifiers: ClassifiersConfig = field(default_factory=ClassifiersConfig)
    thresholds: ThresholdsConfig = field(default_factory=ThresholdsConfig)
    scorers: ScorersConfig = field(default_factory=ScorersConfig)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def scorer_endpoint(self, stage: str) -> str | None:
        """Configured endpoint for a stage; the environment wins over the file."""
        env = os.environ.get(f"RERRFACT_SCORER_{stage.upper()}")
        if env:
            return env
        return getattr(self.scorers, stage)


def _leaf_type(annotation) -> type:
    """Unwrap Optional[...] to the concrete leaf type."""
    origin = typing.get_origin(annotation)
    if origin in (typing.Union, types.UnionType):
        args = [a for a in typing.get_args(annotation) if a is not type(None)]
        if len(args) == 1:
            return args[0]
    return annotation


def _coerce(raw, annotation, dotted: str):
    target = _leaf_type(annotation)
    if raw is None:
        return None
    if isinstance(raw, str) and raw.lower() in ("none", "null") and annotation != target:
        return None
    try:
        if target is bool:
            if isinstance(raw, bool):
                return raw
            lowered = str(raw).lower()
            if lowered in ("true", "1", "yes"):
                return True
            if lowered in ("false", "0", "no"):
                return False
            raise ValueError(raw)
        if target is int:
            if isinstance(raw, bool):
                raise ValueError(raw)
            return int(raw)
        if target is float:
            return float(raw)
        if target is str:
            return str(raw)
    except (TypeError, ValueError):
        raise UsageError(f"invalid value {raw!r} for {dotted}") from None
    raise UsageError(f"unsupported config leaf type for {dotted}")


def _build(cls, payload: dict, prefix: str = ""):
    hints = typing.get_type_hints(cls)
    kwargs = {}
    known = {f.name for f in dataclasses.fields(cls)}
    for key in payload:
        if key not in known:
            raise UsageError(f"unknown config key {prefix + key!r}")
    for f in dataclasses.fields(cls):
        if f.name not in payload:
            continue
        value = payload[f.name]
        annotation = hints[f.name]
        if dataclasses.is_dataclass(_leaf_type(annotation)):
            if not isinstance(value, dict):
                raise UsageError(f"config section {prefix + f.name!r} must be an object")
            kwargs[f.name] = _build(_leaf_type(annotation), value, prefix + f.name + ".")
        else:
            kwargs[f.name] = _coerce(value, annotation, prefix + f.name)
    return cls(**kwargs)


def config_from_dict(payload: dict) -> RunConfig:
    return _build(RunConfig, payload)


def load_config(path: str | Path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            payload = json.load(handle)
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path} is not valid JSON: {exc.msg}") from None
    if not isinstance(payload, dict):
        raise UsageError(f"config file {path} must hold a JSON object")
    return config_from_dict(payload)


def iter_leaves(cls=RunConfig, prefix: str = ""):
    """Yield (dotted_name, annotation) for every overridable leaf field."""
    hints = typing.get_type_hints(cls)
    for f in dataclasses.fields(cls):
        annotation = hints[f.name]
        leaf = _leaf_type(annotation)
        if dataclasses.is_dataclass(leaf):
            yield from iter_leaves(leaf, prefix + f.name + ".")
        else:
            yield prefix + f.name, annotation


def apply_overrides(config: RunConfig, overrides: dict[str, object]) -> RunConfig:
    """Return a copy of config with dotted-path overrides applied."""
    payload = config.to_dict()
    leaves = dict(iter_leaves())
    for dotted, raw in overrides.items():
        if dotted not in leaves:
            raise UsageError(f"unknown config field {dotted!r}")
        cursor = payload
        *parents, leaf = dotted.split(".")
        for part in parents:
            cursor = cursor[part]
        cursor[leaf] = _coerce(raw, leaves[dotted], dotted)
    return config_from_dict(payload)
