"""Streaming summarization of evolving multi-document set streams.

Documents arrive grouped into sets and temporal contexts. Each context is
summarized once with one extractive sentence per set, guided by accumulated
set phrases and a small contrastively trained attention encoder; documents
are then discarded, so memory stays flat as the stream grows.
"""

from .baselines import CentroidState, centroid_summarize
from .corpus import (
    ContextBatch,
    Document,
    Sentence,
    StreamConfig,
    build_contexts_daily,
    build_contexts_refgap,
    load_corpus,
    load_references,
)
from .embeddings import EmbeddingStore, HashEmbedder, load_embedding_file, write_embedding_file
from .encoder import (
    EncoderParams,
    SetPrototype,
    TrainConfig,
    attentive_pool,
    contextualize,
    distill,
    grad_check,
    init_params,
    new_set_prototype,
    reg_contrastive_loss,
    set_prototype,
    train_context,
)
from .errors import DataError, NumericError, ProtosumError, UsageError
from .evaluation import (
    EvalReport,
    aggregate,
    rouge_l,
    rouge_n,
    score_distinctiveness,
    score_novelty,
    score_relevance,
    token_diff,
)
from .phrases import SetPhrases, accumulate_phrases, extract_candidates, phrase_mass, rank_set_phrases
from .pipeline import RunConfig, RunResult, run_pipeline, sweep
from .state import SetState, StreamState, load_state, save_state, update_set_state
from .summarize import Summary, SummarySize, score_sentence, select_summary
from .synth import PlantedTruth, SynthConfig, synth_stream

__version__ = "0.1.0"

__all__ = [
    "CentroidState",
    "ContextBatch",
    "DataError",
    "Document",
    "EmbeddingStore",
    "EncoderParams",
    "EvalReport",
    "HashEmbedder",
    "NumericError",
    "PlantedTruth",
    "ProtosumError",
    "RunConfig",
    "RunResult",
    "Sentence",
    "SetPhrases",
    "SetPrototype",
    "SetState",
    "StreamConfig",
    "StreamState",
    "Summary",
    "SummarySize",
    "SynthConfig",
    "TrainConfig",
    "UsageError",
    "accumulate_phrases",
    "aggregate",
    "attentive_pool",
    "build_contexts_daily",
    "build_contexts_refgap",
    "centroid_summarize",
    "contextualize",
    "distill",
    "extract_candidates",
    "grad_check",
    "init_params",
    "load_corpus",
    "load_embedding_file",
    "load_references",
    "load_state",
    "new_set_prototype",
    "phrase_mass",
    "rank_set_phrases",
    "reg_contrastive_loss",
    "rouge_l",
    "rouge_n",
    "run_pipeline",
    "save_state",
    "score_distinctiveness",
    "score_novelty",
    "score_relevance",
    "score_sentence",
    "select_summary",
    "set_prototype",
    "sweep",
    "synth_stream",
    "token_diff",
    "train_context",
    "update_set_state",
    "write_embedding_file",
]
