# -*- coding: utf-8 -*-

"""The Resolution Sweep.

Models, tracking and features are computed once per corpus: they depend
on the key frames only, never on a fold. Every (fold, feature) pair then
trains on its train lines at each resolution and decodes its test lines
under every network. Resolutions whose feature streams are byte-identical
(always the case for shape features) share one training and one decode.
Several talkers are swept one after the other, each on its own corpus.
"""

import hashlib
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional, Sequence

from loguru import logger
from loguru._logger import Logger
from tqdm import tqdm

from ..aam.fitting import AamFitter
from ..aam.model import Aam
from ..errors import ExperimentError
from ..hmm.decode import Decoder
from ..hmm.network import WordNetwork
from ..hmm.observation import ObservationSequence
from ..hmm.recipe import train_recipe
from ..imaging.image import Resolution
from ..imaging.resample import resting_lip_height
from ..lexicon.dictionary import VisemeDict
from ..lexicon.transcript import Transcript
from ..scoring.alignment import AlignmentResult
from ..scoring.metrics import accuracy, correctness
from ..synthcorpus.corpus import Corpus
from ..synthcorpus.generator import generate_corpus
from ..utils.timer import Timer
from .config import DEFAULT_TALKER, ExperimentConfig, TalkerSpec
from .folds import FoldSpec, make_folds
from .pipeline import build_models, build_networks, corpus_vocabulary, fit_line, line_features, make_bases, score_line

__all__ = (
    "CellFailure",
    "Experiment",
    "SweepResult",
    "SweepRow",
    "UtteranceRow",
    "load_talker",
    "run_experiment",
)


@dataclass(frozen=True)
class SweepRow:
    """Pooled counts of one (talker, fold, resolution, network, feature) cell."""

    talker: str
    fold: int
    resolution: Resolution
    lip_height_px: float
    network: str
    feature: str
    n: int
    hits: int
    subs: int
    dels: int
    ins: int
    correctness: float
    accuracy: float

    @classmethod
    def from_alignment(
        cls,
        talker: str,
        fold: int,
        resolution: Resolution,
        lip_height: float,
        network: str,
        feature: str,
        a: AlignmentResult,
    ) -> "SweepRow":
        return cls(
            talker, fold, resolution, lip_height, network, feature,
            a.n, a.hits, a.subs, a.dels, a.ins, correctness(a), accuracy(a),
        )  # fmt: skip


@dataclass(frozen=True)
class UtteranceRow:
    talker: str
    fold: int
    resolution: Resolution
    network: str
    feature: str
    line_id: int
    n: int
    hits: int
    subs: int
    dels: int
    ins: int
    hypothesis: str


@dataclass(frozen=True)
class CellFailure:
    talker: str
    fold: int
    resolution: str
    feature: str
    stage: str
    message: str


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)
    utterances: list[UtteranceRow] = field(default_factory=list)
    failures: list[CellFailure] = field(default_factory=list)
    stages: dict[str, float] = field(default_factory=dict)
    started: str = ""
    finished: str = ""
    elapsed: float = 0.0

    @property
    def complete(self) -> bool:
        return not self.failures

    @classmethod
    def merge(cls, results: Sequence[tuple[str, "SweepResult"]]) -> "SweepResult":
        """One result out of per-talker results, in talker order; stages are keyed `talker/stage`."""
        merged = cls()
        for talker, result in results:
            merged.rows.extend(result.rows)
            merged.utterances.extend(result.utterances)
            merged.failures.extend(result.failures)
            merged.stages.update({f"{talker}/{stage}": seconds for stage, seconds in result.stages.items()})
            merged.elapsed += result.elapsed
        if results:
            merged.started = results[0][1].started
            merged.finished = results[-1][1].finished
        return merged


@dataclass(frozen=True)
class _CellJob:
    fold: FoldSpec
    feature: str
    train_resolution: str
    decode_resolutions: tuple[str, ...]


@dataclass
class _CellOutcome:
    job: _CellJob
    # resolution -> network -> [(line_id, alignment, hypothesis text)]
    decoded: dict[str, dict[str, list[tuple[int, AlignmentResult, str]]]] = field(default_factory=dict)
    stage: str = ""
    error: str = ""


@dataclass
class _SweepState:
    """What a cell worker needs, shipped once per process."""

    cfg: ExperimentConfig
    lines: tuple[Transcript, ...]
    features: list[dict[str, ObservationSequence]]
    vdict: VisemeDict
    networks: dict[tuple[int, str], WordNetwork]


@dataclass
class _FitState:
    corpus: Corpus
    aam: Aam
    lips: Aam
    bases: dict
    cfg: ExperimentConfig
    fitter: Optional[AamFitter] = None


_STATE: dict[str, Any] = {}


def _install(key: str, state: Any) -> None:
    _STATE[key] = state


def _features_of_line(line_id: int) -> dict[str, ObservationSequence]:
    state: _FitState = _STATE["fit"]
    if state.fitter is None:
        state.fitter = AamFitter(state.aam)
    frames, shapes = fit_line(state.fitter, state.corpus, line_id, state.cfg.fit_iters)
    return line_features(
        state.lips, frames, shapes, state.bases, state.corpus.frame_rate, state.cfg.include_similarity
    )


def _run_cell(job: _CellJob) -> _CellOutcome:
    state: _SweepState = _STATE["sweep"]
    cfg = state.cfg
    outcome = _CellOutcome(job)
    try:
        outcome.stage = "select"
        train = [(state.features[k][job.train_resolution].select(job.feature), state.lines[k]) for k in job.fold.train_lines]
        outcome.stage = "train"
        hmms = train_recipe(train, state.vdict, cfg.recipe)
        for resolution in job.decode_resolutions:
            per_network: dict[str, list[tuple[int, AlignmentResult, str]]] = {}
            for name in cfg.networks:
                outcome.stage = "decode"
                decoder = Decoder(hmms, state.networks[(job.fold.fold_id, name)], state.vdict,
                                  cfg.lm_scale, cfg.word_insertion_penalty)  # fmt: skip
                items = []
                for k in job.fold.test_lines:
                    outcome.stage = "decode"
                    obs = state.features[k][resolution].select(job.feature)
                    words, visemes = decoder.decode(obs, line_id=k)
                    outcome.stage = "score"
                    a = score_line(state.lines[k], words, visemes, state.vdict, cfg.score_units, cfg.costs)
                    hyp = words.text if cfg.score_units == "word" else visemes.text
                    items.append((k, a, hyp))
                per_network[name] = items
            outcome.decoded[resolution] = per_network
        outcome.stage = ""
    except (ValueError, ArithmeticError) as error:
        outcome.error = str(error)
    return outcome


def _digest(features: list[dict[str, ObservationSequence]], lines: Iterable[int], resolution: str, feature: str) -> str:
    md5 = hashlib.md5()
    for k in lines:
        md5.update(features[k][resolution].select(feature).frames.tobytes())
    return md5.hexdigest()


def _map(
    func: Callable, items: list, jobs: int, key: str, state: Any, progress: bool, unit: str
) -> list:
    """Ordered map, in process or over a process pool that receives `state` once."""
    bar = tqdm(total=len(items), unit=unit, disable=not progress)
    try:
        if jobs > 1 and len(items) > 1:
            with ProcessPoolExecutor(max_workers=jobs, initializer=_install, initargs=(key, state)) as pool:
                results = []
                for item in pool.map(func, items):
                    results.append(item)
                    bar.update(1)
                return results
        _install(key, state)
        results = []
        for item in items:
            results.append(func(item))
            bar.update(1)
        return results
    finally:
        bar.close()
        _STATE.pop(key, None)


class Experiment:
    """One sweep over folds, resolutions, networks and feature sets."""

    _logger: Optional[Logger]

    def __init__(
        self,
        cfg: ExperimentConfig,
        corpus: Optional[Corpus] = None,
        logger: Optional[Logger] = None,
        progress: bool = False,
        talker: str = DEFAULT_TALKER,
    ) -> None:
        """Init Experiment.

        Parameters:
            :cfg:ExperimentConfig, the grid and the training settings;
            :corpus:Corpus, loaded from `cfg.corpus` when not given;
            :logger:Logger from `loguru` library, optional;
            :progress:bool, show progress bars;
            :talker:str, written into every row;
        """
        self.cfg = cfg
        self.corpus = corpus or Corpus.load(cfg.corpus)
        self.talker = talker
        self._logger = logger
        self._progress = progress
        self._timer = Timer()
        self.folds = make_folds(len(self.corpus.lines), cfg.n_test, cfg.n_folds, cfg.seed)
        self.words, self.vdict = corpus_vocabulary(self.corpus)
        self.native = str(self.corpus.native_resolution)

    def _stage(self, name: str, start: float) -> None:
        seconds = time.perf_counter() - start
        self._timer.add_stage(name, seconds)
        if self._logger:
            self._logger.info("stage {} done in {:.1f} s", name, seconds)

    def lip_height(self, resolution: str) -> float:
        return resting_lip_height(
            self.corpus.rest, self.corpus.native_resolution, Resolution.parse(resolution), self.corpus.lip_indices
        )

    def features(self) -> list[dict[str, ObservationSequence]]:
        """Per line, the observation at every sweep resolution (plus native when training once)."""
        cfg = self.cfg
        start = time.perf_counter()
        try:
            aam, lips = build_models(self.corpus, cfg.retain_shape, cfg.retain_appearance, self._logger)
        except ValueError as error:
            raise ExperimentError(str(error), stage="build-model") from error
        self._stage("build-model", start)

        targets = list(cfg.resolutions)
        if cfg.train_once and self.native not in targets:
            targets.append(self.native)
        start = time.perf_counter()
        bases = make_bases(lips, self.corpus, [Resolution.parse(t) for t in targets], cfg.basis_mode)
        state = _FitState(self.corpus, aam, lips, bases, cfg)
        try:
            result = _map(
                _features_of_line, list(range(len(self.corpus.lines))), cfg.jobs, "fit", state, self._progress, "line"
            )
        except ValueError as error:
            raise ExperimentError(str(error), stage="fit") from error
        self._stage("fit+features", start)
        return result

    def _jobs(self, features: list[dict[str, ObservationSequence]]) -> tuple[list[_CellJob], dict]:
        """Cell jobs plus, per (fold, feature, representative), the resolutions it stands for."""
        cfg = self.cfg
        jobs: list[_CellJob] = []
        aliases: dict[tuple[int, str, str], list[str]] = {}
        for fold in self.folds:
            for feature in cfg.features:
                groups: dict[str, str] = {}
                representatives: list[str] = []
                for resolution in cfg.resolutions:
                    if cfg.train_once:
                        lines: Iterable[int] = fold.test_lines
                    else:
                        lines = fold.train_lines + fold.test_lines
                    digest = _digest(features, lines, resolution, feature)
                    if digest not in groups:
                        groups[digest] = resolution
                        representatives.append(resolution)
                    aliases.setdefault((fold.fold_id, feature, groups[digest]), []).append(resolution)
                if cfg.train_once:
                    jobs.append(_CellJob(fold, feature, self.native, tuple(representatives)))
                else:
                    jobs.extend(_CellJob(fold, feature, r, (r,)) for r in representatives)
        return jobs, aliases

    def run(self) -> SweepResult:
        cfg = self.cfg
        result = SweepResult(started=self._timer.to_str())
        features = self.features()

        networks = {}
        for fold in self.folds:
            lines = [self.corpus.lines[k] for k in fold.train_lines]
            for name, network in build_networks(lines, self.words, cfg.networks).items():
                networks[(fold.fold_id, name)] = network

        jobs, aliases = self._jobs(features)
        if self._logger:
            self._logger.info(
                "{} folds x {} resolutions x {} features: {} trainings after sharing identical streams",
                len(self.folds),
                len(cfg.resolutions),
                len(cfg.features),
                len(jobs),
            )
        state = _SweepState(cfg, self.corpus.lines, features, self.vdict, networks)
        start = time.perf_counter()
        outcomes = _map(_run_cell, jobs, cfg.jobs, "sweep", state, self._progress, "cell")
        self._stage("train+decode", start)

        heights = {r: self.lip_height(r) for r in cfg.resolutions}
        for outcome in outcomes:
            job = outcome.job
            if outcome.error:
                for rep in job.decode_resolutions:
                    for resolution in aliases[(job.fold.fold_id, job.feature, rep)]:
                        failure = CellFailure(
                            self.talker, job.fold.fold_id, resolution, job.feature, outcome.stage, outcome.error
                        )
                        result.failures.append(failure)
                        logger.error(
                            "cell failed [talker={} fold={} resolution={} feature={} stage={}]: {}",
                            self.talker, failure.fold, resolution, job.feature, failure.stage, failure.message,
                        )  # fmt: skip
                if cfg.fail_fast:
                    raise ExperimentError(
                        f"talker {self.talker}: {outcome.error}",
                        fold=job.fold.fold_id,
                        resolution=job.decode_resolutions[0],
                        stage=outcome.stage,
                    )
                continue
            for rep, per_network in outcome.decoded.items():
                for resolution in aliases[(job.fold.fold_id, job.feature, rep)]:
                    target = Resolution.parse(resolution)
                    for name, items in per_network.items():
                        total = AlignmentResult.empty()
                        for line_id, a, hyp in items:
                            total = total + a
                            result.utterances.append(
                                UtteranceRow(self.talker, job.fold.fold_id, target, name, job.feature, line_id,
                                             a.n, a.hits, a.subs, a.dels, a.ins, hyp)  # fmt: skip
                            )
                        result.rows.append(
                            SweepRow.from_alignment(
                                self.talker, job.fold.fold_id, target, heights[resolution], name, job.feature, total
                            )
                        )

        order = {r: k for k, r in enumerate(cfg.resolutions)}
        networks_order = {n: k for k, n in enumerate(cfg.networks)}
        features_order = {f: k for k, f in enumerate(cfg.features)}

        def key(row: Any) -> tuple:
            return row.fold, order[str(row.resolution)], networks_order[row.network], features_order[row.feature]

        result.rows.sort(key=key)
        result.utterances.sort(key=lambda u: (*key(u), u.line_id))
        result.failures.sort(key=lambda f: (f.fold, order[f.resolution], features_order[f.feature]))
        result.stages = self._timer.stages
        result.finished = self._timer.to_str()
        result.elapsed = self._timer.elapsed()
        if self._logger:
            self._logger.info(
                "talker {} finished in {:.1f} s: {} rows, {} failed cells",
                self.talker,
                result.elapsed,
                len(result.rows),
                len(result.failures),
            )
        return result


def load_talker(spec: TalkerSpec, logger: Optional[Logger] = None) -> Corpus:
    """The corpus of one talker, generated first when it is missing and a generator config is given."""
    if spec.generator is not None:
        if not (spec.corpus / "corpus.json").is_file():
            if logger:
                logger.info("generating the corpus of talker {} into {}", spec.name, spec.corpus)
            try:
                generate_corpus(spec.generator, spec.corpus, logger=logger)
            except ValueError as error:
                raise ExperimentError(f"talker {spec.name}: {error}", stage="synth") from error
    try:
        corpus = Corpus.load(spec.corpus)
    except ValueError as error:
        raise ExperimentError(f"talker {spec.name}: {error}", stage="load") from error
    if spec.generator is not None and corpus.config != spec.generator:
        raise ExperimentError(
            f"talker {spec.name}: the corpus at {spec.corpus} was generated from another config", stage="load"
        )
    return corpus


def run_experiment(
    cfg: ExperimentConfig,
    corpus: Optional[Corpus] = None,
    logger: Optional[Logger] = None,
    progress: bool = False,
) -> SweepResult:
    """Run the whole sweep of `cfg`, see `Experiment`.

    A given `corpus` is swept as the single default talker; otherwise every
    talker of `cfg` is loaded (or generated) and swept in turn, and the rows
    of all talkers come back in one result.
    """
    if corpus is not None:
        return Experiment(cfg, corpus, logger=logger, progress=progress).run()
    results = []
    for spec in cfg.talker_specs():
        experiment = Experiment(cfg, load_talker(spec, logger), logger=logger, progress=progress, talker=spec.name)
        results.append((spec.name, experiment.run()))
    if len(results) == 1:
        return results[0][1]
    return SweepResult.merge(results)
