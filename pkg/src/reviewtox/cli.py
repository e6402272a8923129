"""Command-line front end.

Modes
-----
eval      repeated stratified cross-validation, results spreadsheet (+ retro file)
retrain   train on the whole dataset and save a model file
tuning    cross-validate all eight optional-preprocessing combinations
classify  label texts (one per line, from --input or stdin) with a saved model

Exit codes: 0 ok, 1 usage, 2 data, 3 model, 4 internal error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional, Sequence

from . import __version__

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_MODEL, EXIT_INTERNAL = 0, 1, 2, 3, 4
MODES = ("eval", "retrain", "tuning", "classify")
EMBEDDINGS = ("tfidf",)
DATA_DIR_ENV = "REVIEWTOX_DATA_DIR"
DEFAULT_DATA_FILE = "code-review-dataset-full.csv"

log = logging.getLogger("reviewtox")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    mode: str = "eval"
    algo: str = "RF"
    repeat: int = 5
    folds: int = 10
    embed: str = "tfidf"
    split: bool = False
    keyword: bool = False
    profanity: bool = False
    retro: bool = False
    seed: int = 0
    min_df: int = 20
    data: Optional[str] = None
    model: Optional[str] = None
    output: str = "results"
    input: Optional[str] = None
    text_column: str = "message"
    label_column: str = "is_toxic"
    id_column: str = "id"
    hp: tuple[str, ...] = field(default=())
    verbose: bool = False

    @property
    def preprocess_cfg(self):
        from .preprocess import PreprocessConfig

        return PreprocessConfig(self.split, self.keyword, self.profanity)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(v: str) -> int:
    n = int(v)
    if n <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return n


def build_parser() -> argparse.ArgumentParser:
    from .models import ALGORITHMS

    p = _Parser(prog="reviewtox", description="Toxicity classifier for code review comments.",
                formatter_class=argparse.RawDescriptionHelpFormatter,
                epilog="Exit codes: 0 ok, 1 usage, 2 data, 3 model, 4 internal error.\n"
                       f"Default dataset: ${DATA_DIR_ENV}/{DEFAULT_DATA_FILE}, else the bundled "
                       "synthetic corpus.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--config", metavar="FILE", help="key=value file pre-seeding any option")
    p.add_argument("--mode", choices=MODES, default="eval")
    p.add_argument("--algo", choices=ALGORITHMS, default="RF")
    p.add_argument("--repeat", type=_positive, default=5, help="cross-validation repeats (default 5)")
    p.add_argument("--folds", type=_positive, default=10)
    p.add_argument("--embed", default="tfidf", help="vectorizer; only tfidf is available")
    p.add_argument("--split", action=argparse.BooleanOptionalAction, default=False,
                   help="split camelCase and under_score identifiers")
    p.add_argument("--keyword", action=argparse.BooleanOptionalAction, default=False,
                   help="remove programming keywords")
    p.add_argument("--profanity", action=argparse.BooleanOptionalAction, default=False,
                   help="append the profane-word count feature")
    p.add_argument("--retro", action=argparse.BooleanOptionalAction, default=False,
                   help="eval mode: export misclassified comments")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-df", type=_positive, default=20)
    p.add_argument("--data", metavar="CSV")
    p.add_argument("--model", metavar="FILE", help="model file written by retrain, read by classify")
    p.add_argument("--output", metavar="DIR", default="results")
    p.add_argument("--input", metavar="FILE", help="classify mode: texts, one per line ('-' for stdin)")
    p.add_argument("--text-column", default="message")
    p.add_argument("--label-column", default="is_toxic")
    p.add_argument("--id-column", default="id")
    p.add_argument("--hp", action="append", default=[], metavar="KEY=VALUE",
                   help="learner hyperparameter override, e.g. rf_n_trees=50 (repeatable)")
    p.add_argument("--verbose", "-v", action=argparse.BooleanOptionalAction, default=False)
    return p


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment. Keys use option names."""
    out: dict = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}") from None
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        k, v = (s.strip() for s in line.split("=", 1))
        k = k.lstrip("-").replace("-", "_")
        if k == "hp":
            out.setdefault("hp", []).append(v)
        else:
            out[k] = v
    return out


_BOOL = {"1": True, "true": True, "yes": True, "on": True,
         "0": False, "false": False, "no": False, "off": False}


def _coerce_defaults(parser: argparse.ArgumentParser, values: dict) -> dict:
    actions = {a.dest: a for a in parser._actions}
    out = {}
    for k, v in values.items():
        a = actions.get(k)
        if a is None or k in ("config", "help", "version"):
            raise UsageError(f"unknown config key {k!r}")
        if k == "hp":
            out[k] = list(v)
        elif isinstance(a, argparse.BooleanOptionalAction):
            if v.lower() not in _BOOL:
                raise UsageError(f"config key {k}: expected true/false, got {v!r}")
            out[k] = _BOOL[v.lower()]
        else:
            try:
                out[k] = a.type(v) if a.type else v
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"config key {k}: {exc}") from None
            if a.choices and out[k] not in a.choices:
                raise UsageError(f"config key {k}: {v!r} is not one of {', '.join(a.choices)}")
    return out


def parse_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    pre, _ = parser.parse_known_args(argv)
    if pre.config:
        parser.set_defaults(**_coerce_defaults(parser, read_config_file(pre.config)))
    ns = parser.parse_args(argv)
    if ns.embed != "tfidf":
        raise UsageError(f"embedding {ns.embed!r} is unsupported in this artifact; only 'tfidf' "
                         "is implemented (pretrained and contextual embeddings are out of scope)")
    kw = {f.name: getattr(ns, f.name) for f in fields(RunConfig)}
    kw["hp"] = tuple(ns.hp)
    cfg = RunConfig(**kw)
    _check_mode(cfg)
    _hyperparams(cfg)
    return cfg


def _check_mode(cfg: RunConfig) -> None:
    if cfg.mode in ("retrain", "classify") and not cfg.model:
        raise UsageError(f"--mode {cfg.mode} requires --model")
    if cfg.retro and cfg.mode != "eval":
        raise UsageError("--retro applies only to --mode eval")
    if cfg.input and cfg.mode != "classify":
        raise UsageError("--input applies only to --mode classify")
    if cfg.mode == "classify" and (cfg.split or cfg.keyword or cfg.profanity):
        raise UsageError("preprocessing flags are stored in the model; drop them in classify mode")


def _hyperparams(cfg: RunConfig):
    from .models import Hyperparams

    known = {f.name: f for f in fields(Hyperparams)}
    values = {"algorithm": cfg.algo, "seed": cfg.seed}
    for item in cfg.hp:
        if "=" not in item:
            raise UsageError(f"--hp expects KEY=VALUE, got {item!r}")
        k, v = (s.strip() for s in item.split("=", 1))
        if k not in known or k in ("algorithm", "seed"):
            raise UsageError(f"unknown hyperparameter {k!r}")
        default = getattr(Hyperparams(), k)
        try:
            if isinstance(default, bool):
                values[k] = _BOOL[v.lower()]
            elif k == "dt_max_depth":
                values[k] = None if v.lower() == "none" else int(v)
            elif isinstance(default, int):
                values[k] = int(v)
            elif isinstance(default, float):
                values[k] = float(v)
            else:
                values[k] = v
        except (KeyError, ValueError):
            raise UsageError(f"bad value for {k}: {v!r}") from None
    try:
        return Hyperparams(**values)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def render(cfg: RunConfig) -> list[str]:
    """Canonical argument list; ``parse_args(render(cfg)) == cfg``."""
    parser = build_parser()
    opts = {a.dest: a for a in parser._actions}
    out: list[str] = []
    for f in fields(RunConfig):
        v = getattr(cfg, f.name)
        flag = opts[f.name].option_strings[0]
        if f.name == "hp":
            for item in v:
                out += ["--hp", item]
        elif isinstance(v, bool):
            out.append(flag if v else "--no-" + flag[2:])
        elif v is not None:
            out += [flag, str(v)]
    return out


def resolve_data_path(cfg: RunConfig) -> Optional[Path]:
    if cfg.data:
        return Path(cfg.data)
    env = os.environ.get(DATA_DIR_ENV)
    if env:
        return Path(env) / DEFAULT_DATA_FILE
    return None


def _load(cfg: RunConfig):
    from .corpus import load_dataset
    from .synthetic import bundled_path

    path = resolve_data_path(cfg)
    if path is None:
        path = bundled_path()
        log.warning("no --data and $%s unset; using the bundled synthetic corpus", DATA_DIR_ENV)
    ds = load_dataset(path, cfg.text_column, cfg.label_column, cfg.id_column)
    log.info("loaded %d comments from %s (%d toxic)", len(ds), path, ds.class_counts[1])
    return ds


def _stem(cfg: RunConfig) -> str:
    return f"{cfg.algo}-{cfg.preprocess_cfg.label()}-seed{cfg.seed}"


def _run_eval(cfg: RunConfig, out) -> int:
    from .corpus import atomic_write_text
    from .evaluation import cross_validate, retro_export, write_results

    ds = _load(cfg)
    hp = _hyperparams(cfg)
    report = cross_validate(ds, cfg.algo, cfg.preprocess_cfg, hp, cfg.folds, cfg.repeat, cfg.seed,
                            cfg.min_df, progress=lambda r, f, run: log.info(
                                "repeat %d fold %d: accuracy %.4f F1_1 %.4f",
                                r, f, run.metrics.accuracy, run.metrics.f1_1))
    outdir = Path(cfg.output)
    stem = _stem(cfg)
    results = outdir / f"results-{stem}.csv"
    write_results(report, results, outdir / f"timings-{stem}.csv")
    atomic_write_text(outdir / f"run-{stem}.args", " ".join(render(cfg)) + "\n")
    m, s = report.means, report.stds
    print(f"{cfg.algo} [{cfg.preprocess_cfg.label()}] {cfg.folds}-fold x {cfg.repeat}", file=out)
    for name in ("p0", "r0", "f1_0", "p1", "r1", "f1_1", "accuracy"):
        print(f"  {name:<9}{getattr(m, name):.4f} +- {getattr(s, name):.4f}", file=out)
    print(f"  train time {report.total_train_seconds:.1f} s", file=out)
    print(f"results: {results}", file=out)
    if cfg.retro:
        retro = outdir / f"retro-{stem}.csv"
        n = retro_export(ds, report.oof_labels[0], retro, report.oof_scores[0])
        print(f"retro: {retro} ({n} misclassified in repeat 0)", file=out)
    return EXIT_OK


def _run_retrain(cfg: RunConfig, out) -> int:
    from .models import fit_pipeline, save_model

    ds = _load(cfg)
    model = fit_pipeline(ds.texts, ds.labels, _hyperparams(cfg), cfg.preprocess_cfg, cfg.min_df,
                         fingerprint=ds.fingerprint())
    save_model(model, cfg.model)
    print(f"trained {cfg.algo} on {len(ds)} comments, {len(model.vocab)} terms; saved {cfg.model}",
          file=out)
    return EXIT_OK


def _run_tuning(cfg: RunConfig, out) -> int:
    from .evaluation import tuning_sweep, write_sweep

    ds = _load(cfg)
    entries = tuning_sweep(ds, cfg.algo, _hyperparams(cfg), cfg.seed, cfg.folds, cfg.repeat,
                           cfg.min_df, progress=lambda c, r: log.info(
                               "%s: F1_1 %.4f accuracy %.4f", c.label(), r.means.f1_1,
                               r.means.accuracy))
    path = Path(cfg.output) / f"tuning-{cfg.algo}-seed{cfg.seed}.csv"
    write_sweep(entries, path)
    print(f"{'rank':<5}{'config':<26}{'F1_1':>8}{'acc':>8}{'p':>10}", file=out)
    for e in entries:
        mark = " *" if e.significant else ""
        print(f"{e.rank:<5}{e.config.label():<26}{e.report.means.f1_1:>8.4f}"
              f"{e.report.means.accuracy:>8.4f}{e.p:>10.4g}{mark}", file=out)
    print(f"* better than base at p < 0.05 (paired t on F1_1)\nresults: {path}", file=out)
    return EXIT_OK


def _run_classify(cfg: RunConfig, out, stdin) -> int:
    from .models import classify_texts, load_model

    model = load_model(cfg.model)
    if cfg.input and cfg.input != "-":
        with open(cfg.input, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    else:
        lines = stdin.read().splitlines()
    for text, pred in zip(lines, classify_texts(model, lines)):
        print(f"{pred.label}\t{pred.score:.6f}\t{text}", file=out)
    return EXIT_OK


def run(cfg: RunConfig, out=None, stdin=None) -> int:
    """Execute ``cfg``; returns the process exit status."""
    from .corpus import DatasetError
    from .models import FormatError, ModelError
    from .vectorizer import EmptyCorpusError

    out = sys.stdout if out is None else out
    stdin = sys.stdin if stdin is None else stdin
    try:
        if cfg.mode == "classify":
            try:
                return _run_classify(cfg, out, stdin)
            except FileNotFoundError as exc:
                if exc.filename and Path(exc.filename) == Path(cfg.model):
                    log.error("model file not found: %s", cfg.model)
                    return EXIT_MODEL
                log.error("input not found: %s", exc.filename)
                return EXIT_DATA
        handler = {"eval": _run_eval, "retrain": _run_retrain, "tuning": _run_tuning}[cfg.mode]
        return handler(cfg, out)
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except FormatError as exc:
        log.error("%s", exc)
        return EXIT_MODEL
    except (DatasetError, EmptyCorpusError, FileNotFoundError, UnicodeDecodeError) as exc:
        log.error("data error: %s", exc)
        return EXIT_DATA
    except ModelError as exc:
        log.error("model error: %s", exc)
        return EXIT_MODEL
    except Exception:  # noqa: BLE001
        log.exception("internal error")
        return EXIT_INTERNAL


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = parse_args(argv)
    except UsageError as exc:
        print(f"reviewtox: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if cfg.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
