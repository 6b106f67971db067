"""Command-line front end: build patterns, parse corpora, evaluate and inspect.

Run as ``python -m app.cli <command> ...``. Errors print a single
``error[<code>]: <message>`` line and exit with status 1; usage errors exit
with status 2.
"""

from __future__ import annotations

import argparse
import io
import logging
import sys
from pathlib import Path
from typing import Callable, TextIO

from app import axis, config, corpus, evaluation, joint, pipeline, storage, synthetic
from app.errors import PatternError
from app.parser import DisambiguationConfig
from app.tagset import TagInventory

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
NO_PATTERNS = "no patterns"


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from exc
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _fraction(text: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from exc
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must be within [0, 1], got {value}")
    return value


def _read_corpus_file(
    path: str,
    mode: corpus.ReadMode = "ambiguous",
    inventory: TagInventory | None = None,
) -> corpus.Corpus:
    storage.validate_extension(path, "corpus")
    with storage.open_text(path) as stream:
        return corpus.read_corpus(stream, mode, name=Path(path).stem, inventory=inventory)


def _render_corpus(parsed: corpus.Corpus) -> str:
    buffer = io.StringIO()
    corpus.write_corpus(parsed, buffer, include_gold=True)
    return buffer.getvalue()


def _load_axes(path: str, inventory: TagInventory | None = None) -> axis.AxisDB:
    storage.validate_extension(path, "axes")
    with storage.open_text(path) as stream:
        return axis.load_axis_db(stream, inventory=inventory)


def _load_joints(path: str) -> joint.JointDB:
    storage.validate_extension(path, "joints")
    with storage.open_text(path) as stream:
        return joint.load_joint_db(stream)


def _write_output(path: str, kind: str, text: str) -> None:
    storage.validate_extension(path, kind)
    storage.write_text_atomic(path, text)


def cmd_build_axes(args: argparse.Namespace, out: TextIO) -> int:
    pipeline_config = config.load_pipeline_config(args.config)
    layers = pipeline_config.require_layers()
    gold = _read_corpus_file(args.corpus, "gold", pipeline_config.inventory)
    db = axis.build_axis_db(gold, layers)
    _write_output(args.out, "axes", axis.render_axis_db(db))
    for layer in db.layers:
        print(f"layer {layer.id}: {len(layer.axes)} axes", file=out)
    return EXIT_OK


def cmd_build_joints(args: argparse.Namespace, out: TextIO) -> int:
    inventory = None
    defaults = joint.JointParams()
    if args.config:
        pipeline_config = config.load_pipeline_config(args.config)
        inventory = pipeline_config.inventory
        defaults = pipeline_config.joint_params
    params = joint.JointParams(
        error_margin=args.error_margin if args.error_margin is not None else defaults.error_margin,
        absolute_margin=args.absolute_margin
        if args.absolute_margin is not None
        else defaults.absolute_margin,
        max_len=args.max_len if args.max_len is not None else defaults.max_len,
        algorithm=args.algorithm or defaults.algorithm,
    )
    training = _read_corpus_file(args.corpus, "ambiguous", inventory)
    db = joint.generate_joints(training, params)
    _write_output(args.out, "joints", joint.render_joint_db(db))
    for target, joints in db.joints.items():
        print(f"{target}: {len(joints)} joints", file=out)
    print(f"total: {len(db)} joints", file=out)
    return EXIT_OK


def cmd_parse(args: argparse.Namespace, out: TextIO) -> int:
    inventory = None
    disambiguation = DisambiguationConfig(
        reading_cap=config.get_reading_cap() or DisambiguationConfig().reading_cap
    )
    if args.config:
        pipeline_config = config.load_pipeline_config(args.config)
        inventory = pipeline_config.inventory
        disambiguation = pipeline_config.disambiguation
    if args.reading_cap is not None:
        disambiguation = DisambiguationConfig(
            reading_cap=args.reading_cap,
            strict_gaps=disambiguation.strict_gaps,
            layer_skip=disambiguation.layer_skip,
        )
    axes = _load_axes(args.axes, inventory) if args.axes else axis.AxisDB()
    joints = _load_joints(args.joints) if args.joints else joint.JointDB.empty()
    source = _read_corpus_file(args.input, "ambiguous", inventory)
    threads = args.threads or config.get_threads()

    run = pipeline.parse_corpus(source, axes, joints, disambiguation, threads=threads)
    _write_output(args.out, "corpus", _render_corpus(run.corpus))
    if run.fallback_sentences:
        print(
            f"warning: {len(run.fallback_sentences)} sentence(s) over the reading cap "
            "were resolved by joints only",
            file=sys.stderr,
        )
    if args.stats:
        print(f"sentences: {len(run.corpus)}", file=out)
        print(f"words: {run.words}", file=out)
        print(f"seconds: {run.elapsed_seconds:.3f}", file=out)
        print(f"words/second: {run.words_per_second:.1f}", file=out)
        print(f"joints-only sentences: {len(run.fallback_sentences)}", file=out)
    return EXIT_OK


def _prediction(text: str) -> tuple[str | None, str]:
    name, sep, path = text.partition("=")
    if not sep:
        return None, text
    if not name or not path:
        raise argparse.ArgumentTypeError(f"expected NAME=PATH, got {text!r}")
    return name, path


def cmd_eval(args: argparse.Namespace, out: TextIO) -> int:
    gold = _read_corpus_file(args.gold)
    source = _read_corpus_file(args.input) if args.input else None
    if len(args.pred) == 1 and args.pred[0][0] is None:
        pred = _read_corpus_file(args.pred[0][1])
        if args.by_text:
            samples = evaluation.samples_by_text(pred, gold, source)
        else:
            samples = [evaluation.EvalSample(gold.name, pred, gold, source)]
        report = evaluation.build_report(samples)
        render = evaluation.render_report_csv if args.csv else evaluation.render_report
        out.write(render(report))
        return EXIT_OK

    predictions = [
        (name or Path(path).stem, _read_corpus_file(path)) for name, path in args.pred
    ]
    comparison = evaluation.compare_parsers(gold, predictions, source=source, by_text=args.by_text)
    render = evaluation.render_comparison_csv if args.csv else evaluation.render_comparison
    out.write(render(comparison))
    return EXIT_OK


def _axis_mentions(layer: axis.AxisLayer, item: axis.Axis, tag: str) -> bool:
    symbol = layer.symbol_map.get(tag, tag)
    return f" {symbol} " in f" {axis.axis_text(item)} "


def _inspect_axes(db: axis.AxisDB, tag: str | None, out: TextIO) -> int:
    shown = 0
    for layer in sorted(db.layers, key=lambda layer: layer.id):
        axes = sorted(
            (item for item in layer.axes if tag is None or _axis_mentions(layer, item, tag)),
            key=axis.axis_text,
        )
        if not axes:
            continue
        print(f"layer {layer.id} (priority {layer.priority}, {len(axes)} axes)", file=out)
        for item in axes:
            print(f"  {axis.axis_text(item)}", file=out)
        shown += len(axes)
    return shown


def _inspect_joints(db: joint.JointDB, tag: str | None, out: TextIO) -> int:
    joints = sorted(
        (item for item in db.all_joints() if tag is None or item.target == tag),
        key=lambda item: (item.target, -item.length, -item.support, item.left, item.right),
    )
    for item in joints:
        context = " ".join([*item.left, "_", *item.right])
        print(
            f"{item.target}: {context}  count={item.support} freq={item.freq:.3f}",
            file=out,
        )
    return len(joints)


def cmd_inspect(args: argparse.Namespace, out: TextIO) -> int:
    if args.axes:
        shown = _inspect_axes(_load_axes(args.axes), args.tag, out)
    else:
        shown = _inspect_joints(_load_joints(args.joints), args.tag, out)
    if not shown:
        print(NO_PATTERNS, file=out)
    return EXIT_OK


def cmd_synth(args: argparse.Namespace, out: TextIO) -> int:
    gold = synthetic.generate_gold_corpus(args.sentences, args.seed, texts=args.texts)
    ambiguous = synthetic.confuse_corpus(gold, args.seed, args.rate)
    buffer = io.StringIO()
    corpus.write_corpus(gold, buffer)
    _write_output(args.gold_out, "corpus", buffer.getvalue())
    _write_output(args.ambig_out, "corpus", _render_corpus(ambiguous))
    stats = corpus.corpus_stats(ambiguous)
    print(
        f"sentences: {len(gold)} words: {stats.word_count} "
        f"ambiguity: {stats.ambiguity_rate * 100:.1f}%",
        file=out,
    )
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="python -m app.cli", description=__doc__)
    subparsers = parser.add_subparsers(dest="command", required=True)

    build_axes = subparsers.add_parser("build-axes", help="Extract sentence axes from a gold corpus")
    build_axes.add_argument("--corpus", required=True, help="Gold corpus (.vrt)")
    build_axes.add_argument("--config", required=True, help="Layer configuration (.cfg)")
    build_axes.add_argument("--out", required=True, help="Axis database to write (.adb)")
    build_axes.set_defaults(handler=cmd_build_axes)

    build_joints = subparsers.add_parser("build-joints", help="Mine joints from a tagged corpus")
    build_joints.add_argument("--corpus", required=True, help="Disambiguated corpus (.vrt)")
    build_joints.add_argument("--out", required=True, help="Joint database to write (.jdb)")
    build_joints.add_argument("--config", help="Pipeline configuration with JOINTS defaults (.cfg)")
    build_joints.add_argument(
        "--error-margin",
        type=_fraction,
        help=f"Minimum relative frequency (default: {joint.DEFAULT_ERROR_MARGIN})",
    )
    build_joints.add_argument(
        "--absolute-margin",
        type=_positive_int,
        help=f"Minimum occurrence count (default: {joint.DEFAULT_ABSOLUTE_MARGIN})",
    )
    build_joints.add_argument(
        "--max-len",
        type=_positive_int,
        help=f"Maximum total context length (default: {joint.DEFAULT_MAX_LEN})",
    )
    build_joints.add_argument(
        "--algorithm",
        choices=joint.ALGORITHMS,
        help=f"Generation algorithm (default: {joint.DEFAULT_ALGORITHM})",
    )
    build_joints.set_defaults(handler=cmd_build_joints)

    parse = subparsers.add_parser("parse", help="Disambiguate an ambiguous corpus")
    parse.add_argument("--axes", help="Axis database (.adb)")
    parse.add_argument("--joints", help="Joint database (.jdb)")
    parse.add_argument("--in", dest="input", required=True, help="Ambiguous corpus (.vrt)")
    parse.add_argument("--out", required=True, help="Disambiguated corpus to write (.vrt)")
    parse.add_argument("--config", help="Pipeline configuration with PARSE settings (.cfg)")
    parse.add_argument("--reading-cap", type=_positive_int, help="Maximum readings per sentence")
    parse.add_argument("--threads", type=_positive_int, help="Worker threads (default: SYNPAT_THREADS or 1)")
    parse.add_argument("--stats", action="store_true", help="Print throughput figures")
    parse.set_defaults(handler=cmd_parse)

    evaluate = subparsers.add_parser("eval", help="Score a parsed corpus against gold")
    evaluate.add_argument("--gold", required=True, help="Gold corpus (.vrt)")
    evaluate.add_argument(
        "--pred",
        required=True,
        action="append",
        type=_prediction,
        metavar="[NAME=]PATH",
        help="Parser output (.vrt); repeat to compare parsers, one success column each",
    )
    evaluate.add_argument("--input", help="Ambiguous parser input, for ambiguity and error rates (.vrt)")
    evaluate.add_argument("--by-text", action="store_true", help="One row per '# text=' sample")
    evaluate.add_argument("--csv", action="store_true", help="Emit comma-separated lines")
    evaluate.set_defaults(handler=cmd_eval)

    inspect = subparsers.add_parser("inspect", help="Pretty-print stored patterns")
    source = inspect.add_mutually_exclusive_group(required=True)
    source.add_argument("--axes", help="Axis database (.adb)")
    source.add_argument("--joints", help="Joint database (.jdb)")
    inspect.add_argument("--tag", help="Only patterns mentioning this tag")
    inspect.set_defaults(handler=cmd_inspect)

    synth = subparsers.add_parser("synth", help="Write a synthetic gold corpus and its ambiguous twin")
    synth.add_argument("--sentences", type=_positive_int, default=50)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--rate", type=_fraction, default=1.0, help="Share of words made ambiguous")
    synth.add_argument("--texts", type=_positive_int, default=1, help="Number of '# text=' samples")
    synth.add_argument("--gold-out", required=True, help="Gold corpus to write (.vrt)")
    synth.add_argument("--ambig-out", required=True, help="Ambiguous corpus to write (.vrt)")
    synth.set_defaults(handler=cmd_synth)

    return parser


def main(argv: list[str] | None = None, *, out: TextIO | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "parse" and not (args.axes or args.joints):
        parser.error("parse needs --axes, --joints or both")
    out = out or sys.stdout
    handler: Callable[[argparse.Namespace, TextIO], int] = args.handler
    try:
        logging.basicConfig(
            level=config.get_log_level(),
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )
        return handler(args, out)
    except PatternError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"error[FileError]: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover - CLI entry
    raise SystemExit(main())
