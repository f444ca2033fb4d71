"""End-to-end stream runs.

Per context, in order: rank the context's set phrases, merge them into the
accumulated state, train the encoder (or update baseline centroids), pick
summaries, evaluate against references when available, advance the state,
and drop the context's documents. Also hosts the parameter sweep driver.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .baselines import BASELINE_METHODS, CentroidState, centroid_summarize, method_config
from .corpus import (
    ContextBatch,
    StreamConfig,
    build_contexts_daily,
    build_contexts_refgap,
    load_corpus,
    load_references,
)
from .embeddings import HashEmbedder, SentenceProvider, load_embedding_file
from .encoder import TrainConfig, encode_document, init_params, train_context
from .errors import DataError, UsageError
from .evaluation import (
    EvalReport,
    EvalRow,
    aggregate,
    evaluate_summary,
    write_report_csv,
    write_report_json,
)
from .phrases import SetPhrases, accumulate_phrases, rank_set_phrases, write_phrase_dump
from .state import StreamState, load_state, save_state
from .summarize import Summary, SummarySize, score_set, select_summary, write_summaries
from .text import tokenize

METHODS = ("pdsum",) + BASELINE_METHODS


@dataclass(frozen=True)
class RunConfig:
    corpus: Path
    out_dir: Path
    embeddings: Path | None = None
    hash_dim: int | None = None
    context_mode: str = "daily"
    method: str = "pdsum"
    gamma: float = 0.5
    tau: float = 0.2
    epochs: int = 5
    batch_size: int = 64
    learning_rate: float = 1e-5
    heads: int = 2
    top_n_phrases: int = 5
    summary_size: SummarySize = field(default_factory=lambda: SummarySize.sentences(1))
    refs: Path | None = None
    state_path: Path | None = None
    seed: int = 0
    min_docs_per_set: int = 1
    min_lifespan_docs: int = 1
    dump_phrases: bool = False
    max_idle_contexts: int | None = None

    def __post_init__(self) -> None:
        if (self.embeddings is None) == (self.hash_dim is None):
            raise UsageError(
                "exactly one embedding source required: --embeddings or --hash-dim"
            )
        if self.method not in METHODS:
            raise UsageError(f"unknown method {self.method!r}; have {METHODS}")
        if self.method != "pdsum" and self.state_path is not None:
            raise UsageError(
                "state files carry encoder parameters and phrases; "
                "baseline methods keep no cross-run state"
            )
        if self.context_mode == "ref-gap" and self.refs is None:
            raise UsageError("ref-gap context mode needs --refs")
        if self.top_n_phrases < 1:
            raise UsageError("top-n phrase count must be >= 1")
        # Surface bad training knobs before any file work.
        TrainConfig(
            gamma=self.gamma,
            tau=self.tau,
            epochs=self.epochs,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            heads=self.heads,
            seed=0,
        )


@dataclass
class RunResult:
    summaries_path: Path
    n_contexts: int
    n_summaries: int
    report: EvalReport | None = None
    report_json: Path | None = None
    report_csv: Path | None = None
    loss_trace: Path | None = None
    state_path: Path | None = None


def _build_provider(cfg: RunConfig) -> SentenceProvider:
    if cfg.hash_dim is not None:
        return HashEmbedder(cfg.hash_dim, seed=cfg.seed)
    return load_embedding_file(cfg.embeddings)


def _build_contexts(cfg: RunConfig) -> list[ContextBatch]:
    docs = load_corpus(cfg.corpus)
    stream_cfg = StreamConfig(
        context_mode=cfg.context_mode,
        min_docs_per_set=cfg.min_docs_per_set,
        min_lifespan_docs=cfg.min_lifespan_docs,
        seed=cfg.seed,
    )
    refs = load_references(cfg.refs) if cfg.refs is not None else None
    if cfg.context_mode == "daily":
        return build_contexts_daily(docs, stream_cfg, refs)
    return build_contexts_refgap(docs, refs, stream_cfg)


def _eval_row(
    batch: ContextBatch,
    set_id: str,
    summary: Summary,
    prev_tokens: Sequence[str],
) -> EvalRow | None:
    ref_text = batch.ref_summaries.get(set_id)
    if ref_text is None:
        return None
    ref_own = tokenize(ref_text)
    if not ref_own:
        return None
    ref_others = [
        tokenize(text)
        for sid, text in sorted(batch.ref_summaries.items())
        if sid != set_id and tokenize(text)
    ]
    return evaluate_summary(
        set_id=set_id,
        context_id=batch.context_id,
        summary=summary.token_sequence,
        prev_summary=tuple(prev_tokens),
        ref_own=ref_own,
        ref_others=ref_others,
    )


def run_pipeline(cfg: RunConfig) -> RunResult:
    provider = _build_provider(cfg)
    contexts = _build_contexts(cfg)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    summaries_path = cfg.out_dir / "summaries.jsonl"
    summaries_path.write_text("", encoding="utf-8")
    phrases_path = cfg.out_dir / "phrases.jsonl"
    if cfg.dump_phrases:
        phrases_path.write_text("", encoding="utf-8")

    seed_root = np.random.SeedSequence(cfg.seed)
    params_seed_seq, train_seed_seq = seed_root.spawn(2)

    state: StreamState | None = None
    centroids: dict[str, CentroidState] = {}
    prev_tokens_baseline: dict[str, tuple[str, ...]] = {}
    loss_rows: list[tuple[int, int, float]] = []
    eval_rows: list[EvalRow] = []
    n_summaries = 0

    if cfg.method == "pdsum":
        if cfg.state_path is not None and cfg.state_path.exists():
            state = load_state(cfg.state_path)
            if state.phrase_capacity != cfg.top_n_phrases:
                raise DataError(
                    f"state keeps {state.phrase_capacity} phrases per set, "
                    f"run asked for {cfg.top_n_phrases}"
                )
        else:
            params = init_params(
                provider.dim,
                heads=cfg.heads,
                seed=int(params_seed_seq.generate_state(1)[0]),
            )
            state = StreamState(
                params=params,
                phrase_capacity=cfg.top_n_phrases,
                max_idle_contexts=cfg.max_idle_contexts,
            )

    for batch in contexts:
        new_phrases = rank_set_phrases(batch, cfg.top_n_phrases)
        summaries: dict[str, Summary] = {}

        if cfg.method == "pdsum":
            assert state is not None
            acc_phrases: dict[str, SetPhrases] = {
                sid: accumulate_phrases(
                    state.get_set(sid).phrases, new_phrases[sid], cfg.top_n_phrases
                )
                for sid in batch.sets
            }
            train_cfg = TrainConfig(
                gamma=cfg.gamma,
                tau=cfg.tau,
                epochs=cfg.epochs,
                batch_size=cfg.batch_size,
                learning_rate=cfg.learning_rate,
                heads=cfg.heads,
                seed=int(train_seed_seq.spawn(1)[0].generate_state(1)[0]),
            )
            params, trace, protos = train_context(
                state.params, batch, acc_phrases, new_phrases, provider, train_cfg
            )
            for epoch, loss in enumerate(trace, start=1):
                loss_rows.append((batch.context_id, epoch, loss))
            proto_by_set = {p.set_id: p for p in protos}

            for sid in sorted(batch.sets):
                docs = batch.sets[sid]
                cds, alphas = [], []
                for doc in docs:
                    cd, alpha = encode_document(provider.lookup(doc), params)
                    cds.append(cd)
                    alphas.append(alpha)
                scored = score_set(
                    docs,
                    cds,
                    alphas,
                    proto_by_set[sid],
                    acc_phrases[sid],
                    new_phrases[sid],
                    cfg.gamma,
                )
                summaries[sid] = select_summary(
                    scored, cfg.summary_size, sid, batch.context_id
                )
                row = _eval_row(
                    batch, sid, summaries[sid], state.get_set(sid).prev_summary_tokens
                )
                if row is not None:
                    eval_rows.append(row)

            state.apply_context(batch.context_id, params, new_phrases, summaries)
            if cfg.dump_phrases:
                merged = {sid: state.sets[sid].phrases for sid in batch.sets}
                write_phrase_dump(phrases_path, batch.context_id, merged)
            write_summaries(
                summaries_path,
                [summaries[sid] for sid in sorted(summaries)],
                gamma=cfg.gamma,
            )
        else:
            mode, incremental = method_config(cfg.method)
            for sid in sorted(batch.sets):
                summary, cstate = centroid_summarize(
                    sid,
                    batch.context_id,
                    batch.sets[sid],
                    mode,
                    incremental,
                    centroids.get(sid) if incremental else None,
                    provider,
                    cfg.summary_size,
                )
                summaries[sid] = summary
                if incremental:
                    centroids[sid] = cstate
                row = _eval_row(
                    batch, sid, summary, prev_tokens_baseline.get(sid, ())
                )
                if row is not None:
                    eval_rows.append(row)
                prev_tokens_baseline[sid] = summary.token_sequence
            if cfg.dump_phrases:
                write_phrase_dump(phrases_path, batch.context_id, new_phrases)
            write_summaries(
                summaries_path,
                [summaries[sid] for sid in sorted(summaries)],
                gamma=None,
                method=cfg.method,
            )
        n_summaries += len(summaries)

    result = RunResult(
        summaries_path=summaries_path,
        n_contexts=len(contexts),
        n_summaries=n_summaries,
    )

    if cfg.method == "pdsum":
        trace_path = cfg.out_dir / "loss_trace.csv"
        with trace_path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["context_id", "epoch", "mean_loss"])
            for ctx, epoch, loss in loss_rows:
                writer.writerow([ctx, epoch, f"{loss:.10g}"])
        result.loss_trace = trace_path
        if cfg.state_path is not None:
            assert state is not None
            save_state(cfg.state_path, state)
            result.state_path = cfg.state_path

    if eval_rows:
        report = aggregate(eval_rows)
        result.report = report
        result.report_json = cfg.out_dir / "report.json"
        result.report_csv = cfg.out_dir / "report.csv"
        write_report_json(result.report_json, report)
        write_report_csv(result.report_csv, report)
    return result


SWEEPABLE = {
    "gamma": "gamma",
    "top_n": "top_n_phrases",
    "epochs": "epochs",
    "batch": "batch_size",
    "tau": "tau",
}


def sweep(
    cfg: RunConfig, parameter: str, values: Sequence[float | int]
) -> list[tuple[float | int, RunResult]]:
    """Run the pipeline once per value of one knob, shared seed, and write a
    tidy aggregate CSV across values."""
    if parameter not in SWEEPABLE:
        raise UsageError(f"cannot sweep {parameter!r}; have {sorted(SWEEPABLE)}")
    if not values:
        raise UsageError("sweep needs at least one value")
    if cfg.refs is None:
        raise UsageError("sweep needs --refs for evaluation")
    field_name = SWEEPABLE[parameter]
    results: list[tuple[float | int, RunResult]] = []
    for value in values:
        sub = dataclasses.replace(
            cfg,
            **{field_name: value},
            out_dir=cfg.out_dir / f"sweep_{parameter}_{value}",
            state_path=None,
        )
        results.append((value, run_pipeline(sub)))

    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    sweep_csv = cfg.out_dir / f"sweep_{parameter}.csv"
    with sweep_csv.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["value", "metric", "criterion", "mean", "stderr"])
        for value, result in results:
            if result.report is None:
                continue
            for agg in result.report.aggregates:
                writer.writerow(
                    [value, agg.metric, agg.criterion, f"{agg.mean:.10g}", f"{agg.stderr:.10g}"]
                )
    return results


def summary_rows_from_file(path: str | Path) -> list[dict]:
    """Read back a summaries JSONL artifact."""
    rows = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows
