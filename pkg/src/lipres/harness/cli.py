# -*- coding: utf-8 -*-

"""Command Line.

    lipres synth        generate a synthetic corpus
    lipres build-model  face model and lips sub-model from the key frames
    lipres fit          track one line and write the fitted landmarks
    lipres degrade      down- then up-sample one frame
    lipres train        train viseme models on the train lines of a fold
    lipres decode       decode the test lines of a fold into MLF files
    lipres score        align hypothesis against reference MLF
    lipres sweep        the whole cross-validated resolution sweep
    lipres plot         redraw the accuracy plot from results.csv

Exit codes: 0 success, 1 error, 2 sweep finished with failed cells.
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from loguru import logger

from ..aam.fitting import AamFitter
from ..errors import ExperimentError, ModelError
from ..geometry.shape import write_pts
from ..hmm.decode import Decoder
from ..hmm.network import dump_network
from ..hmm.observation import ObservationSequence
from ..hmm.recipe import train_recipe
from ..imaging.image import Resolution, read_frame, save_pgm
from ..imaging.resample import degrade, resolution_ladder
from ..lexicon.transcript import read_mlf, viseme_reference, write_mlf
from ..scoring.alignment import AlignmentResult, align_sequences
from ..scoring.metrics import accuracy, correctness
from ..storage.container import ModelBundle, load_models, save_models
from ..storage.io import IO
from ..synthcorpus.config import CorpusConfig
from ..synthcorpus.corpus import Corpus
from ..synthcorpus.generator import generate_corpus
from .config import DEFAULT_SWEEP_SUBSET, TWO_TALKERS, ExperimentConfig, load_config
from .experiment import run_experiment
from .folds import FoldSpec, make_folds
from .output import PLOT_FILE, emit_outputs, plot_summary, read_results_csv
from .pipeline import build_models, build_networks, corpus_vocabulary, fit_line, line_features, make_bases
from .summary import summarize

__all__ = ("main",)

EXIT_OK, EXIT_ERROR, EXIT_PARTIAL = 0, 1, 2


def _choices(value: Optional[str], all_values: Sequence[str]) -> Optional[tuple[str, ...]]:
    if value is None:
        return None
    return tuple(all_values) if value in ("all", "both") else (value,)


def _resolutions(value: Optional[str]) -> Optional[tuple[str, ...]]:
    """`all`, `subset` or a comma separated list of `WxH`."""
    if value is None:
        return None
    if value == "all":
        return tuple(str(r) for r in resolution_ladder())
    if value == "subset":
        return DEFAULT_SWEEP_SUBSET
    return tuple(v.strip() for v in value.split(",") if v.strip())


def _configure_logging(verbose: bool) -> None:
    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if verbose else "INFO")


def _config(args: argparse.Namespace) -> ExperimentConfig:
    return load_config(
        getattr(args, "config", None),
        corpus=getattr(args, "corpus", None),
        out=getattr(args, "out", None),
        seed=getattr(args, "seed", None),
        n_folds=getattr(args, "folds", None),
        resolutions=_resolutions(getattr(args, "resolutions", None)),
        networks=_choices(getattr(args, "network", None), ("uwn", "bwn")),
        features=_choices(getattr(args, "features", None), ("shape", "appearance", "combined")),
        fail_fast=getattr(args, "fail_fast", None) or None,
        train_once=getattr(args, "train_once", None) or None,
        jobs=getattr(args, "jobs", None),
        talkers=TWO_TALKERS if getattr(args, "two_talkers", False) else None,
    )


def _fold(cfg: ExperimentConfig, corpus: Corpus, fold_id: int) -> FoldSpec:
    folds = make_folds(len(corpus.lines), cfg.n_test, cfg.n_folds, cfg.seed)
    if not 0 <= fold_id < len(folds):
        raise ExperimentError(f"fold {fold_id} out of range, the config has {len(folds)} folds")
    return folds[fold_id]


def _bundle(file: Path, *sections: str) -> ModelBundle:
    bundle = load_models(file)
    missing = [s for s in sections if getattr(bundle, s) is None]
    if missing:
        raise ModelError(f"{file}: missing model sections {missing}")
    return bundle


def _observations(
    cfg: ExperimentConfig, corpus: Corpus, bundle: ModelBundle, resolution: str, lines: Sequence[int]
) -> dict[int, ObservationSequence]:
    """Fit and extract the features of `lines` at one resolution."""
    target = Resolution.parse(resolution)
    bases = make_bases(bundle.lips, corpus, [target], cfg.basis_mode)
    fitter = AamFitter(bundle.aam, logger=logger)
    result = {}
    for k in lines:
        frames, shapes = fit_line(fitter, corpus, k, cfg.fit_iters)
        result[k] = line_features(bundle.lips, frames, shapes, bases, corpus.frame_rate, cfg.include_similarity)[resolution]
    return result


def cmd_synth(args: argparse.Namespace) -> int:
    cfg = CorpusConfig.from_dict(IO.load_dict(args.config)) if args.config else CorpusConfig()
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    manifest = generate_corpus(cfg, args.out, logger=logger)
    logger.info("corpus with {} files written to {}", len(manifest.entries), manifest.root)
    return EXIT_OK


def cmd_build_model(args: argparse.Namespace) -> int:
    cfg = _config(args)
    corpus = Corpus.load(cfg.corpus)
    aam, lips = build_models(corpus, cfg.retain_shape, cfg.retain_appearance, logger)
    save_models(args.model, aam=aam, lips=lips)
    logger.info("models saved to {}", args.model)
    return EXIT_OK


def cmd_fit(args: argparse.Namespace) -> int:
    cfg = _config(args)
    corpus = Corpus.load(cfg.corpus)
    bundle = _bundle(args.model, "aam")
    _, shapes = fit_line(AamFitter(bundle.aam, logger=logger), corpus, args.line, cfg.fit_iters)
    folder = Path(cfg.out)
    IO.dir_create(folder)
    first = corpus.spans[args.line][0]
    for offset, shape in enumerate(shapes):
        write_pts(shape, folder / f"frame_{first + offset:06d}.pts")
    logger.info("{} fitted shapes of line {} written to {}", len(shapes), args.line, folder)
    return EXIT_OK


def cmd_degrade(args: argparse.Namespace) -> int:
    img = read_frame(args.frame)
    save_pgm(degrade(img, Resolution.parse(args.resolution)), args.output)
    logger.info("{} degraded through {} into {}", args.frame, args.resolution, args.output)
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    cfg = _config(args)
    corpus = Corpus.load(cfg.corpus)
    bundle = _bundle(args.model, "aam", "lips")
    fold = _fold(cfg, corpus, args.fold)
    _, vdict = corpus_vocabulary(corpus)
    observations = _observations(cfg, corpus, bundle, args.resolution, fold.train_lines)
    data = [(observations[k].select(args.feature), corpus.lines[k]) for k in fold.train_lines]
    hmms = train_recipe(data, vdict, cfg.recipe, log=logger)
    save_models(args.model, aam=bundle.aam, lips=bundle.lips, hmms=hmms)
    logger.info("viseme models of fold {} at {} added to {}", fold.fold_id, args.resolution, args.model)
    return EXIT_OK


def cmd_decode(args: argparse.Namespace) -> int:
    cfg = _config(args)
    corpus = Corpus.load(cfg.corpus)
    bundle = _bundle(args.model, "aam", "lips", "hmms")
    fold = _fold(cfg, corpus, args.fold)
    words, vdict = corpus_vocabulary(corpus)
    network = build_networks([corpus.lines[k] for k in fold.train_lines], words, (args.network,))[args.network]
    decoder = Decoder(bundle.hmms, network, vdict, cfg.lm_scale, cfg.word_insertion_penalty, logger=logger)
    observations = _observations(cfg, corpus, bundle, args.resolution, fold.test_lines)

    hyp_words, hyp_visemes = [], []
    for k in fold.test_lines:
        w, v = decoder.decode(observations[k].select(args.feature), line_id=k)
        hyp_words.append(w)
        hyp_visemes.append(v)
    folder = Path(cfg.out)
    IO.dir_create(folder)
    write_mlf(folder / "hyp_words.mlf", hyp_words)
    write_mlf(folder / "hyp_visemes.mlf", hyp_visemes)
    write_mlf(folder / "ref_visemes.mlf", [viseme_reference(corpus.lines[k], vdict) for k in fold.test_lines])
    IO.save_line(folder / "network.txt", dump_network(network))
    logger.info("{} test lines of fold {} decoded into {}", len(fold.test_lines), fold.fold_id, folder)
    return EXIT_OK


def cmd_score(args: argparse.Namespace) -> int:
    refs = {t.line_id: t for t in read_mlf(args.ref)}
    total = AlignmentResult.empty()
    for hyp in read_mlf(args.hyp):
        if hyp.line_id not in refs:
            raise ExperimentError(f"hypothesis line {hyp.line_id} has no reference in {args.ref}")
        total = total + align_sequences(refs[hyp.line_id], hyp, args.costs)
    line = (
        f"N={total.n} H={total.hits} S={total.subs} D={total.dels} I={total.ins} "
        f"C={correctness(total):.4f} A={accuracy(total):.4f}"
    )
    print(line)
    if args.output:
        IO.save_str(args.output, line + "\n")
        logger.info("score written to {}", args.output)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _config(args)
    IO.dir_create(cfg.out)
    sink = logger.add(Path(cfg.out) / "run.log", level="DEBUG", mode="w")
    try:
        return _sweep(cfg, args.quiet)
    finally:
        logger.remove(sink)


def _sweep(cfg: ExperimentConfig, quiet: bool) -> int:
    result = run_experiment(cfg, logger=logger, progress=not quiet)
    emit_outputs(result, cfg.out, cfg)
    if result.failures:
        logger.warning("{} cells failed, see {}", len(result.failures), Path(cfg.out) / "run.json")
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_plot(args: argparse.Namespace) -> int:
    output = Path(args.output) if args.output else Path(args.results).with_name(PLOT_FILE)
    plot_summary(summarize(read_results_csv(args.results)), output)
    logger.info("plot written to {}", output)
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lipres", description="Resolution limits of visual-only viseme recognition")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="JSON config file")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--verbose", action="store_true", help="log at DEBUG level")

    experiment = argparse.ArgumentParser(add_help=False)
    experiment.add_argument("--corpus", type=str, default=None, help="corpus directory")
    experiment.add_argument("--out", type=str, default=None, help="output directory")
    experiment.add_argument("--folds", type=int, default=None)
    experiment.add_argument("--jobs", type=int, default=None)

    stage = argparse.ArgumentParser(add_help=False)
    stage.add_argument("--model", type=Path, required=True, help="model container (.npz)")
    stage.add_argument("--fold", type=int, default=0)
    stage.add_argument("--resolution", type=str, default="1440x1080")
    stage.add_argument("--feature", choices=("shape", "appearance", "combined"), default="combined")

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic corpus")
    p.add_argument("--out", type=Path, default=Path("corpus"))
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("build-model", parents=[common, experiment], help="build the face and lips models")
    p.add_argument("--model", type=Path, required=True)
    p.set_defaults(func=cmd_build_model)

    p = sub.add_parser("fit", parents=[common, experiment], help="track one line")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--line", type=int, default=0)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("degrade", parents=[common], help="degrade one frame to a resolution")
    p.add_argument("frame", type=Path)
    p.add_argument("output", type=Path)
    p.add_argument("--resolution", type=str, required=True)
    p.set_defaults(func=cmd_degrade)

    p = sub.add_parser("train", parents=[common, experiment, stage], help="train viseme models on one fold")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("decode", parents=[common, experiment, stage], help="decode the test lines of one fold")
    p.add_argument("--network", choices=("uwn", "bwn"), default="bwn")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("score", parents=[common], help="score a hypothesis MLF against a reference MLF")
    p.add_argument("ref", type=Path)
    p.add_argument("hyp", type=Path)
    p.add_argument("--costs", choices=("unit", "htk", "indel"), default="unit")
    p.add_argument("--output", type=Path, default=None, help="also write the score line to this file")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("sweep", parents=[common, experiment], help="run the resolution sweep")
    p.add_argument("--resolutions", type=str, default=None, help="`all`, `subset` or a list like 720x540,80x60")
    p.add_argument("--network", choices=("uwn", "bwn", "both"), default=None)
    p.add_argument("--features", choices=("shape", "appearance", "combined", "all"), default=None)
    p.add_argument("--fail-fast", action="store_true")
    p.add_argument("--train-once", action="store_true", help="train at native resolution, decode every resolution")
    p.add_argument("--quiet", action="store_true", help="no progress bars")
    p.add_argument("--two-talkers", action="store_true", help="sweep a 26 px and a 17 px talker")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plot", parents=[common], help="plot accuracy against lip height from results.csv")
    p.add_argument("results", type=Path)
    p.add_argument("--output", type=Path, default=None)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        return args.func(args)
    except (OSError, ValueError) as error:
        logger.error("{} failed: {}", args.command, error)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
