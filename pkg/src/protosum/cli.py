"""Command-line entry points: run, sweep, synth.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ProtosumError, UsageError
from .pipeline import METHODS, RunConfig, run_pipeline, sweep
from .summarize import SummarySize
from .synth import SynthConfig, synth_stream, write_corpus_jsonl, write_refs_jsonl

_INT_SWEEPS = {"top_n", "epochs", "batch"}


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--corpus", type=Path, required=True, help="corpus JSONL path")
    p.add_argument("--embeddings", type=Path, help="precomputed embedding file")
    p.add_argument(
        "--hash-dim", type=int, help="use the built-in hash embedder at this dim"
    )
    p.add_argument(
        "--contexts", choices=("daily", "ref-gap"), default="daily",
        help="context construction mode",
    )
    p.add_argument("--method", choices=METHODS, default="pdsum")
    p.add_argument("--gamma", type=float, default=0.5, help="distillation ratio")
    p.add_argument("--tau", type=float, default=0.2, help="contrastive temperature")
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--lr", type=float, default=1e-5)
    p.add_argument("--heads", type=int, default=2)
    p.add_argument("--top-n-phrases", type=int, default=5)
    size = p.add_mutually_exclusive_group()
    size.add_argument("--summary-sentences", type=int, help="sentences per summary")
    size.add_argument("--summary-tokens", type=int, help="token budget per summary")
    p.add_argument("--refs", type=Path, help="reference summaries JSONL")
    p.add_argument("--state", type=Path, help="stream state file to resume/write")
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-docs-per-set", type=int, default=1)
    p.add_argument("--min-lifespan-docs", type=int, default=1)
    p.add_argument(
        "--dump-phrases", action="store_true", help="write per-context phrase lists"
    )
    p.add_argument(
        "--max-idle-contexts", type=int,
        help="evict sets idle for this many contexts (default: never)",
    )


def _summary_size(args: argparse.Namespace) -> SummarySize:
    if args.summary_tokens is not None:
        return SummarySize.tokens(args.summary_tokens)
    return SummarySize.sentences(
        1 if args.summary_sentences is None else args.summary_sentences
    )


def _run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        corpus=args.corpus,
        out_dir=args.out,
        embeddings=args.embeddings,
        hash_dim=args.hash_dim,
        context_mode=args.contexts,
        method=args.method,
        gamma=args.gamma,
        tau=args.tau,
        epochs=args.epochs,
        batch_size=args.batch_size,
        learning_rate=args.lr,
        heads=args.heads,
        top_n_phrases=args.top_n_phrases,
        summary_size=_summary_size(args),
        refs=args.refs,
        state_path=args.state,
        seed=args.seed,
        min_docs_per_set=args.min_docs_per_set,
        min_lifespan_docs=args.min_lifespan_docs,
        dump_phrases=args.dump_phrases,
        max_idle_contexts=args.max_idle_contexts,
    )


def _cmd_run(args: argparse.Namespace) -> int:
    result = run_pipeline(_run_config(args))
    print(
        f"processed {result.n_contexts} contexts, "
        f"wrote {result.n_summaries} summaries to {result.summaries_path}"
    )
    if result.report_json is not None:
        print(f"evaluation report: {result.report_json}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    try:
        raw = [v for v in args.values.split(",") if v]
        if args.parameter in _INT_SWEEPS:
            values: list[float | int] = [int(v) for v in raw]
        else:
            values = [float(v) for v in raw]
    except ValueError as exc:
        raise UsageError(f"bad sweep values {args.values!r}: {exc}") from exc
    results = sweep(_run_config(args), args.parameter, values)
    print(f"swept {args.parameter} over {len(results)} values under {args.out}")
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    cfg = SynthConfig(
        theme_phrases_per_set=args.theme_phrases,
        fresh_phrases_per_set=args.fresh_phrases,
        phrase_len=args.phrase_len,
        background_vocab=args.background_vocab,
        sentences_per_doc=args.sentences_per_doc,
        words_per_sentence=args.words_per_sentence,
        plant_rate=args.plant_rate,
    )
    docs, truth = synth_stream(args.sets, args.docs, args.n_contexts, cfg, args.seed)
    write_corpus_jsonl(args.out, docs)
    print(f"wrote {len(docs)} documents to {args.out}")
    if args.refs_out is not None:
        write_refs_jsonl(args.refs_out, truth)
        print(f"wrote references to {args.refs_out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="protosum",
        description="Streaming prototype-driven summarization of document-set streams",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="summarize a stream end to end")
    _add_run_flags(run_p)
    run_p.set_defaults(fn=_cmd_run)

    sweep_p = sub.add_parser("sweep", help="rerun the pipeline over one varying knob")
    _add_run_flags(sweep_p)
    sweep_p.add_argument(
        "--parameter", required=True, choices=("gamma", "top_n", "epochs", "batch", "tau")
    )
    sweep_p.add_argument(
        "--values", required=True, help="comma-separated values, e.g. 0,0.5,1"
    )
    sweep_p.set_defaults(fn=_cmd_sweep)

    synth_p = sub.add_parser("synth", help="generate a planted-theme corpus")
    synth_p.add_argument("--out", type=Path, required=True, help="corpus JSONL to write")
    synth_p.add_argument("--refs-out", type=Path, help="reference JSONL to write")
    synth_p.add_argument("--sets", type=int, default=3)
    synth_p.add_argument("--docs", type=int, default=10, help="documents per set per context")
    synth_p.add_argument("--n-contexts", type=int, default=3)
    synth_p.add_argument("--seed", type=int, default=0)
    synth_p.add_argument("--plant-rate", type=float, default=0.9)
    synth_p.add_argument("--theme-phrases", type=int, default=3)
    synth_p.add_argument("--fresh-phrases", type=int, default=2)
    synth_p.add_argument("--phrase-len", type=int, default=2)
    synth_p.add_argument("--background-vocab", type=int, default=60)
    synth_p.add_argument("--sentences-per-doc", type=int, default=4)
    synth_p.add_argument("--words-per-sentence", type=int, default=7)
    synth_p.set_defaults(fn=_cmd_synth)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ProtosumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
