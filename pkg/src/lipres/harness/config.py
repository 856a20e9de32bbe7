# -*- coding: utf-8 -*-

"""Experiment Configuration.

One JSON file read through `IO.load_dict`; command line flags override
single keys afterwards. Unknown keys are rejected.
"""

from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Optional, Union

from ..errors import CorpusError, ExperimentError, HmmError
from ..hmm.observation import FEATURE_SETS
from ..hmm.recipe import RecipeConfig
from ..imaging.image import Resolution
from ..imaging.resample import resolution_ladder
from ..scoring.alignment import COSTS
from ..storage.io import IO
from ..synthcorpus.config import CorpusConfig

__all__ = (
    "DEFAULT_SWEEP_SUBSET",
    "DEFAULT_TALKER",
    "NETWORKS",
    "TWO_TALKERS",
    "ExperimentConfig",
    "TalkerSpec",
    "load_config",
)

NETWORKS = ("uwn", "bwn")

# eight ladder points from 26 px down to about 1.5 px of resting lip height
DEFAULT_SWEEP_SUBSET: tuple[str, ...] = (
    "1440x1080",
    "720x540",
    "360x270",
    "240x180",
    "180x135",
    "144x108",
    "120x90",
    "80x60",
)

DEFAULT_TALKER = "t1"

# resting lip heights of about 26 and 17 px; separation scaled with the face
TWO_TALKERS: tuple[dict[str, Any], ...] = (
    {"name": "t1", "seed": 42, "lip_height_rest": 26.0},
    {"name": "t2", "seed": 43, "lip_height_rest": 17.0, "min_separation": 0.6},
)


def _ladder() -> tuple[str, ...]:
    return tuple(str(r) for r in resolution_ladder())


@dataclass(frozen=True)
class TalkerSpec:
    """One talker of a sweep.

    The corpus at `corpus` is loaded; when it does not exist yet and
    `generator` is given, it is generated there first.
    """

    name: str
    corpus: Path
    generator: Optional[CorpusConfig] = None


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a sweep needs besides the corpus itself."""

    corpus: str = "corpus"
    out: str = "results"
    seed: int = 42
    n_folds: int = 5
    n_test: int = 42
    resolutions: tuple[str, ...] = field(default_factory=_ladder)
    networks: tuple[str, ...] = NETWORKS
    features: tuple[str, ...] = FEATURE_SETS
    recipe: RecipeConfig = field(default_factory=RecipeConfig)
    retain_shape: float = 0.95
    retain_appearance: float = 0.95
    basis_mode: str = "per_resolution"
    include_similarity: bool = False
    fit_iters: int = 30
    lm_scale: float = 1.0
    word_insertion_penalty: float = 0.0
    score_units: str = "viseme"
    costs: str = "unit"
    train_once: bool = False
    fail_fast: bool = False
    jobs: int = 1
    # each: {"name": ..., optional "corpus": dir, any CorpusConfig key}
    talkers: tuple[dict[str, Any], ...] = ()

    def __post_init__(self) -> None:
        for name in ("resolutions", "networks", "features"):
            value = getattr(self, name)
            object.__setattr__(self, name, tuple(str(v).lower() for v in ([value] if isinstance(value, str) else value)))
        if isinstance(self.talkers, dict) or not all(isinstance(t, dict) for t in self.talkers):
            raise ExperimentError("talkers must be a list of objects")
        object.__setattr__(self, "talkers", tuple(dict(t) for t in self.talkers))
        if isinstance(self.recipe, dict):
            try:
                object.__setattr__(self, "recipe", RecipeConfig.from_dict(self.recipe))
            except HmmError as error:
                raise ExperimentError(str(error)) from error

        if not self.resolutions:
            raise ExperimentError("at least one resolution is needed")
        try:
            for text in self.resolutions:
                Resolution.parse(text)
        except ValueError as error:
            raise ExperimentError(str(error)) from error
        if len(set(self.resolutions)) != len(self.resolutions):
            raise ExperimentError(f"resolutions repeat: {self.resolutions}")
        bad = [n for n in self.networks if n not in NETWORKS]
        if bad or not self.networks:
            raise ExperimentError(f"networks must be drawn from {NETWORKS}, got {self.networks}")
        bad = [f for f in self.features if f not in FEATURE_SETS]
        if bad or not self.features:
            raise ExperimentError(f"features must be drawn from {FEATURE_SETS}, got {self.features}")
        if self.basis_mode not in ("per_resolution", "native"):
            raise ExperimentError(f"unknown basis mode `{self.basis_mode}`")
        if self.score_units not in ("viseme", "word"):
            raise ExperimentError(f"score_units must be `viseme` or `word`, got `{self.score_units}`")
        if self.costs not in COSTS:
            raise ExperimentError(f"unknown cost scheme `{self.costs}`, expected one of {sorted(COSTS)}")
        if self.n_folds < 1 or self.jobs < 1 or self.fit_iters < 1:
            raise ExperimentError("n_folds, jobs and fit_iters must be positive")
        self.talker_specs()

    @property
    def targets(self) -> list[Resolution]:
        return [Resolution.parse(text) for text in self.resolutions]

    def talker_specs(self) -> list[TalkerSpec]:
        """The talkers to sweep; without `talkers`, one talker reading `corpus`."""
        if not self.talkers:
            return [TalkerSpec(DEFAULT_TALKER, Path(self.corpus))]
        result: list[TalkerSpec] = []
        for entry in self.talkers:
            name = str(entry.get("name", "")).strip()
            if not name or "/" in name or "," in name:
                raise ExperimentError(f"talker entry needs a plain `name`, got {entry!r}")
            if name in {t.name for t in result}:
                raise ExperimentError(f"talker `{name}` appears twice")
            overrides = {k: v for k, v in entry.items() if k not in ("name", "corpus")}
            try:
                generator = CorpusConfig.from_dict(overrides) if overrides else None
            except CorpusError as error:
                raise ExperimentError(f"talker `{name}`: {error}") from error
            folder = Path(entry["corpus"]) if entry.get("corpus") else Path(self.corpus) / name
            result.append(TalkerSpec(name, folder, generator))
        return result

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        names = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ExperimentError(f"unknown experiment keys: {unknown}")
        return cls(**data)

    def to_dict(self) -> dict[str, Any]:
        result = asdict(self)
        for name in ("resolutions", "networks", "features"):
            result[name] = list(result[name])
        result["talkers"] = [dict(t) for t in self.talkers]
        return result

    def override(self, **changes: Any) -> "ExperimentConfig":
        """Copy with the non-None `changes` applied, the way flags override a file."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def load_config(file: Union[str, Path, None] = None, **overrides: Any) -> ExperimentConfig:
    """Read `file` (defaults when None) and apply flag overrides."""
    base = ExperimentConfig()
    if file is not None:
        try:
            base = ExperimentConfig.from_dict(IO.load_dict(file))
        except (OSError, ValueError) as error:
            if isinstance(error, ExperimentError):
                raise
            raise ExperimentError(f"unreadable experiment config {file}: {error}") from error
    return base.override(**overrides)
