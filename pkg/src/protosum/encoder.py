"""Trainable sentence encoder and set prototypes.

A single self-attention block turns a document's sentence embeddings into
contextualized rows; attentive pooling collapses them into one document
vector. Documents of a set combine, weighted by accumulated phrase mass,
into the set's prototype; a second prototype built from frozen embeddings
and only the newest phrases captures the current context, and the two are
blended. Training pulls document vectors toward their own set's blended
prototype and away from concurrent ones via a temperature-scaled
contrastive loss. All math is float64 numpy with handwritten gradients so
they can be verified against finite differences.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .corpus import ContextBatch, Document
from .embeddings import SentenceProvider
from .errors import DataError, NumericError, UsageError
from .phrases import SetPhrases, phrase_mass

LN_EPS = 1e-5
NORM_FLOOR = 1e-12
CHECKPOINT_MAGIC = b"PDS1"
CHECKPOINT_VERSION = 1

# Serialization and gradient-vector order. Do not reorder: the checkpoint
# format depends on it.
PARAM_FIELDS = (
    "wq",
    "wk",
    "wv",
    "wo",
    "ff_w",
    "ff_b",
    "ln_gain",
    "ln_bias",
    "pool_w",
    "pool_b",
    "pool_v",
)


@dataclass
class EncoderParams:
    """All learnable arrays. Attention projections are stored fused: head i
    owns columns [i*head_dim, (i+1)*head_dim) of wq/wk/wv."""

    dim: int
    heads: int
    pool_dim: int
    wq: np.ndarray
    wk: np.ndarray
    wv: np.ndarray
    wo: np.ndarray
    ff_w: np.ndarray
    ff_b: np.ndarray
    ln_gain: np.ndarray
    ln_bias: np.ndarray
    pool_w: np.ndarray
    pool_b: np.ndarray
    pool_v: np.ndarray

    def __post_init__(self) -> None:
        if self.dim < 1 or self.heads < 1 or self.pool_dim < 1:
            raise UsageError("encoder dims and head count must be positive")
        if self.dim % self.heads != 0:
            raise UsageError(
                f"dim {self.dim} is not divisible by {self.heads} heads"
            )
        h, a = self.dim, self.pool_dim
        expect = {
            "wq": (h, h),
            "wk": (h, h),
            "wv": (h, h),
            "wo": (h, h),
            "ff_w": (h, h),
            "ff_b": (h,),
            "ln_gain": (h,),
            "ln_bias": (h,),
            "pool_w": (h, a),
            "pool_b": (a,),
            "pool_v": (a,),
        }
        for name, shape in expect.items():
            arr = getattr(self, name)
            if arr.shape != shape:
                raise DataError(f"parameter {name} has shape {arr.shape}, want {shape}")
            if not np.all(np.isfinite(arr)):
                raise NumericError(f"parameter {name} contains non-finite values")

    @property
    def head_dim(self) -> int:
        return self.dim // self.heads

    def arrays(self) -> list[tuple[str, np.ndarray]]:
        return [(name, getattr(self, name)) for name in PARAM_FIELDS]

    def copy(self) -> "EncoderParams":
        return EncoderParams(
            dim=self.dim,
            heads=self.heads,
            pool_dim=self.pool_dim,
            **{name: getattr(self, name).copy() for name in PARAM_FIELDS},
        )

    def to_vector(self) -> np.ndarray:
        return np.concatenate([arr.ravel() for _, arr in self.arrays()])

    def from_vector(self, vec: np.ndarray) -> "EncoderParams":
        """New params with the same shapes, values taken from a flat vector."""
        out = self.copy()
        offset = 0
        for name in PARAM_FIELDS:
            arr = getattr(out, name)
            size = arr.size
            arr[...] = vec[offset : offset + size].reshape(arr.shape)
            offset += size
        if offset != vec.size:
            raise DataError(f"vector has {vec.size} entries, params need {offset}")
        return out


def init_params(
    dim: int, heads: int = 2, seed: int = 0, pool_dim: int | None = None
) -> EncoderParams:
    """Seeded init: weight matrices and the pooling vector uniform in
    (-1/sqrt(dim), 1/sqrt(dim)); biases zero; layer-norm gain one."""
    if pool_dim is None:
        pool_dim = dim
    rng = np.random.default_rng(seed)
    bound = 1.0 / np.sqrt(dim)

    def uniform(*shape: int) -> np.ndarray:
        return rng.uniform(-bound, bound, size=shape)

    return EncoderParams(
        dim=dim,
        heads=heads,
        pool_dim=pool_dim,
        wq=uniform(dim, dim),
        wk=uniform(dim, dim),
        wv=uniform(dim, dim),
        wo=uniform(dim, dim),
        ff_w=uniform(dim, dim),
        ff_b=np.zeros(dim),
        ln_gain=np.ones(dim),
        ln_bias=np.zeros(dim),
        pool_w=uniform(dim, pool_dim),
        pool_b=np.zeros(pool_dim),
        pool_v=uniform(pool_dim),
    )


@dataclass
class ForwardCache:
    """Intermediates of one document's forward pass, kept for backprop."""

    emb: np.ndarray
    q: list[np.ndarray]
    k: list[np.ndarray]
    v: list[np.ndarray]
    attn: list[np.ndarray]
    concat: np.ndarray
    residual: np.ndarray
    ff_out: np.ndarray
    xhat: np.ndarray
    inv_std: np.ndarray
    cs: np.ndarray
    pool_z: np.ndarray
    pool_t: np.ndarray
    alpha: np.ndarray
    cd: np.ndarray


def _softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    shifted = x - np.max(x, axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=axis, keepdims=True)


def _forward(emb: np.ndarray, params: EncoderParams) -> ForwardCache:
    emb = np.asarray(emb, dtype=np.float64)
    if emb.ndim != 2 or emb.shape[0] < 1:
        raise DataError(f"sentence matrix must be 2-d and non-empty, got {emb.shape}")
    if emb.shape[1] != params.dim:
        raise DataError(
            f"sentence matrix dim {emb.shape[1]} does not match encoder dim {params.dim}"
        )
    dh = params.head_dim
    scale = 1.0 / np.sqrt(dh)
    qs, ks, vs, attns, outs = [], [], [], [], []
    for i in range(params.heads):
        cols = slice(i * dh, (i + 1) * dh)
        q = emb @ params.wq[:, cols]
        k = emb @ params.wk[:, cols]
        v = emb @ params.wv[:, cols]
        attn = _softmax(q @ k.T * scale, axis=1)
        qs.append(q)
        ks.append(k)
        vs.append(v)
        attns.append(attn)
        outs.append(attn @ v)
    concat = np.concatenate(outs, axis=1)
    residual = concat @ params.wo + emb
    ff_out = residual @ params.ff_w + params.ff_b

    mean = ff_out.mean(axis=1, keepdims=True)
    var = ff_out.var(axis=1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + LN_EPS)
    xhat = (ff_out - mean) * inv_std
    cs = xhat * params.ln_gain + params.ln_bias

    pool_z = cs @ params.pool_w + params.pool_b
    pool_t = np.tanh(pool_z)
    scores = pool_t @ params.pool_v
    alpha = _softmax(scores)
    cd = alpha @ cs
    return ForwardCache(
        emb=emb,
        q=qs,
        k=ks,
        v=vs,
        attn=attns,
        concat=concat,
        residual=residual,
        ff_out=ff_out,
        xhat=xhat,
        inv_std=inv_std,
        cs=cs,
        pool_z=pool_z,
        pool_t=pool_t,
        alpha=alpha,
        cd=cd,
    )


def contextualize(sent_embs: np.ndarray, params: EncoderParams) -> np.ndarray:
    """Self-attention block over a document's sentence embeddings:
    LayerNorm(FF(MHS(E) + E)). No positional signal, so the output rows
    permute with the input rows."""
    return _forward(sent_embs, params).cs


def attentive_pool(
    cs: np.ndarray, params: EncoderParams
) -> tuple[np.ndarray, np.ndarray]:
    """Collapse contextualized rows into one document vector.

    Scores are tanh(cs @ W + b) @ V, softmaxed into weights alpha; the
    document vector is the alpha-weighted row sum.
    """
    cs = np.asarray(cs, dtype=np.float64)
    scores = np.tanh(cs @ params.pool_w + params.pool_b) @ params.pool_v
    alpha = _softmax(scores)
    return alpha @ cs, alpha


def encode_document(
    emb: np.ndarray, params: EncoderParams
) -> tuple[np.ndarray, np.ndarray]:
    """Full forward for one document: (document vector, sentence weights)."""
    cache = _forward(emb, params)
    return cache.cd, cache.alpha


def _mass_weights(masses: np.ndarray) -> np.ndarray:
    total = masses.sum()
    if total <= 0.0:
        return np.full(masses.shape, 1.0 / masses.size)
    return masses / total


def set_prototype(
    cds: Sequence[np.ndarray], docs: Sequence[Document], phrases: SetPhrases
) -> np.ndarray:
    """Phrase-mass-weighted mean of document vectors. Zero total mass falls
    back to the plain mean."""
    if len(cds) != len(docs) or not docs:
        raise DataError("set_prototype needs one document per vector, at least one")
    masses = np.array([phrase_mass(d, phrases) for d in docs], dtype=np.float64)
    weights = _mass_weights(masses)
    return weights @ np.asarray(cds, dtype=np.float64)


def new_set_prototype(
    doc_means: Sequence[np.ndarray], docs: Sequence[Document], new_phrases: SetPhrases
) -> np.ndarray:
    """Same weighting kernel, but over frozen per-document mean embeddings
    and only the current context's phrases."""
    if len(doc_means) != len(docs) or not docs:
        raise DataError("new_set_prototype needs one mean per document, at least one")
    masses = np.array([phrase_mass(d, new_phrases) for d in docs], dtype=np.float64)
    weights = _mass_weights(masses)
    return weights @ np.asarray(doc_means, dtype=np.float64)


def distill(r: np.ndarray, r_new: np.ndarray, gamma: float) -> np.ndarray:
    """Blend the accumulated and new-context prototypes: gamma*r + (1-gamma)*r_new."""
    if not 0.0 <= gamma <= 1.0:
        raise UsageError(f"distillation ratio must be in [0, 1], got {gamma}")
    r = np.asarray(r, dtype=np.float64)
    r_new = np.asarray(r_new, dtype=np.float64)
    if r.shape != r_new.shape:
        raise DataError(f"prototype shapes differ: {r.shape} vs {r_new.shape}")
    return gamma * r + (1.0 - gamma) * r_new


def _safe_norm(vec: np.ndarray, what: str) -> float:
    norm = float(np.linalg.norm(vec))
    if norm < NORM_FLOOR:
        raise NumericError(f"{what} has zero norm; cosine undefined")
    return norm


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = _safe_norm(a, "vector")
    nb = _safe_norm(b, "vector")
    return float(np.dot(a, b) / (na * nb))


def _loss_terms(
    cds: Sequence[tuple[np.ndarray, int]],
    prototypes: Sequence[np.ndarray],
    tau: float,
) -> tuple[float, list[np.ndarray]]:
    """Total contrastive loss over the batch and the gradient of the MEAN
    loss with respect to each document vector."""
    if tau <= 0.0:
        raise UsageError(f"temperature must be positive, got {tau}")
    if not cds:
        raise DataError("contrastive loss needs at least one document")
    protos = [np.asarray(p, dtype=np.float64) for p in prototypes]
    proto_norms = [_safe_norm(p, f"prototype {k}") for k, p in enumerate(protos)]
    n = len(cds)
    total = 0.0
    dcds: list[np.ndarray] = []
    for cd, own in cds:
        if not 0 <= own < len(protos):
            raise DataError(f"set index {own} has no prototype")
        cd = np.asarray(cd, dtype=np.float64)
        cd_norm = _safe_norm(cd, "document vector")
        cos = np.array(
            [np.dot(cd, p) / (cd_norm * pn) for p, pn in zip(protos, proto_norms)]
        )
        logits = cos / tau
        shifted = logits - logits.max()
        log_z = np.log(np.sum(np.exp(shifted))) + logits.max()
        total += log_z - logits[own]

        p_soft = np.exp(logits - log_z)
        dlogits = p_soft.copy()
        dlogits[own] -= 1.0
        dcd = np.zeros_like(cd)
        for k, (proto, pn) in enumerate(zip(protos, proto_norms)):
            dcos = proto / (cd_norm * pn) - cos[k] * cd / (cd_norm * cd_norm)
            dcd += (dlogits[k] / tau) * dcos
        dcds.append(dcd / n)
    return total, dcds


def reg_contrastive_loss(
    cds: Sequence[tuple[np.ndarray, int]],
    prototypes: Sequence[np.ndarray],
    tau: float,
) -> float:
    """Mean over documents of -log softmax(cos(cd, prototype)/tau) at the
    owning prototype. Zero-norm vectors are an error, not a silent zero."""
    total, _ = _loss_terms(cds, prototypes, tau)
    return total / len(cds)


def _zero_grads(params: EncoderParams) -> dict[str, np.ndarray]:
    return {name: np.zeros_like(arr) for name, arr in params.arrays()}


def _backprop_doc(
    cache: ForwardCache,
    dcd: np.ndarray,
    params: EncoderParams,
    grads: dict[str, np.ndarray],
) -> None:
    """Accumulate parameter gradients for one document given dL/d(cd)."""
    alpha, cs = cache.alpha, cache.cs

    # Pooling: cd = alpha @ cs
    dalpha = cs @ dcd
    dcs = np.outer(alpha, dcd)
    # softmax over scores
    dscores = alpha * (dalpha - float(alpha @ dalpha))
    # scores = tanh(z) @ pool_v
    grads["pool_v"] += cache.pool_t.T @ dscores
    dt = np.outer(dscores, params.pool_v)
    dz = dt * (1.0 - cache.pool_t**2)
    grads["pool_w"] += cs.T @ dz
    grads["pool_b"] += dz.sum(axis=0)
    dcs += dz @ params.pool_w.T

    # LayerNorm: cs = xhat * gain + bias
    grads["ln_gain"] += (dcs * cache.xhat).sum(axis=0)
    grads["ln_bias"] += dcs.sum(axis=0)
    dxhat = dcs * params.ln_gain
    h = cache.ff_out.shape[1]
    m1 = dxhat.mean(axis=1, keepdims=True)
    m2 = (dxhat * cache.xhat).mean(axis=1, keepdims=True)
    dff = cache.inv_std * (dxhat - m1 - cache.xhat * m2)

    # Feed-forward: ff_out = residual @ ff_w + ff_b
    grads["ff_w"] += cache.residual.T @ dff
    grads["ff_b"] += dff.sum(axis=0)
    dresidual = dff @ params.ff_w.T

    # Residual: residual = concat @ wo + emb (emb is frozen input)
    grads["wo"] += cache.concat.T @ dresidual
    dconcat = dresidual @ params.wo.T

    dh = params.head_dim
    scale = 1.0 / np.sqrt(dh)
    for i in range(params.heads):
        cols = slice(i * dh, (i + 1) * dh)
        dout = dconcat[:, cols]
        attn, q, k, v = cache.attn[i], cache.q[i], cache.k[i], cache.v[i]
        dattn = dout @ v.T
        dv = attn.T @ dout
        dscore = attn * (dattn - np.sum(attn * dattn, axis=1, keepdims=True))
        dq = dscore @ k * scale
        dk = dscore.T @ q * scale
        grads["wq"][:, cols] += cache.emb.T @ dq
        grads["wk"][:, cols] += cache.emb.T @ dk
        grads["wv"][:, cols] += cache.emb.T @ dv


def batch_gradients(
    embs: Sequence[tuple[np.ndarray, int]],
    prototypes: Sequence[np.ndarray],
    params: EncoderParams,
    tau: float,
) -> tuple[float, dict[str, np.ndarray]]:
    """Mean contrastive loss of a batch and its parameter gradients, with
    prototypes treated as constants."""
    caches = [(_forward(e, params), own) for e, own in embs]
    total, dcds = _loss_terms([(c.cd, own) for c, own in caches], prototypes, tau)
    grads = _zero_grads(params)
    for (cache, _), dcd in zip(caches, dcds):
        _backprop_doc(cache, dcd, params, grads)
    return total / len(embs), grads


def grad_check(
    params: EncoderParams,
    embs: Sequence[tuple[np.ndarray, int]],
    prototypes: Sequence[np.ndarray],
    tau: float,
    h: float = 1e-4,
) -> float:
    """Max relative disagreement between analytical gradients and central
    finite differences over every scalar parameter."""
    _, grads = batch_gradients(embs, prototypes, params, tau)
    analytic = np.concatenate([grads[name].ravel() for name in PARAM_FIELDS])

    theta = params.to_vector()

    def loss_at(vec: np.ndarray) -> float:
        p = params.from_vector(vec)
        cds = [(_forward(e, p).cd, own) for e, own in embs]
        return reg_contrastive_loss(cds, prototypes, tau)

    numeric = np.empty_like(theta)
    for i in range(theta.size):
        bump = np.zeros_like(theta)
        bump[i] = h
        numeric[i] = (loss_at(theta + bump) - loss_at(theta - bump)) / (2.0 * h)

    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-8)
    return float(np.max(np.abs(analytic - numeric) / denom))


@dataclass(frozen=True)
class TrainConfig:
    gamma: float = 0.5
    tau: float = 0.2
    epochs: int = 5
    batch_size: int = 64
    learning_rate: float = 1e-5
    heads: int = 2
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.gamma <= 1.0:
            raise UsageError(f"distillation ratio must be in [0, 1], got {self.gamma}")
        if self.tau <= 0.0:
            raise UsageError(f"temperature must be positive, got {self.tau}")
        if self.epochs < 1 or self.batch_size < 1:
            raise UsageError("epochs and batch size must be >= 1")
        if self.learning_rate < 0.0:
            raise UsageError("learning rate must be >= 0")
        if self.heads < 1:
            raise UsageError("head count must be >= 1")


@dataclass(frozen=True)
class SetPrototype:
    """Prototype triple of one set after training on a context."""

    set_id: str
    accumulated: np.ndarray
    new: np.ndarray
    distilled: np.ndarray


class Adam:
    def __init__(
        self,
        params: EncoderParams,
        lr: float,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = _zero_grads(params)
        self.v = _zero_grads(params)

    def step(self, params: EncoderParams, grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        bias1 = 1.0 - self.beta1**self.t
        bias2 = 1.0 - self.beta2**self.t
        for name, arr in params.arrays():
            g = grads[name]
            self.m[name] = self.beta1 * self.m[name] + (1.0 - self.beta1) * g
            self.v[name] = self.beta2 * self.v[name] + (1.0 - self.beta2) * g * g
            m_hat = self.m[name] / bias1
            v_hat = self.v[name] / bias2
            arr -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def _context_prototypes(
    set_ids: Sequence[str],
    context: ContextBatch,
    doc_cds: Mapping[str, list[np.ndarray]],
    doc_means: Mapping[str, list[np.ndarray]],
    acc_phrases: Mapping[str, SetPhrases],
    new_phrases: Mapping[str, SetPhrases],
    gamma: float,
) -> list[SetPrototype]:
    protos = []
    for sid in set_ids:
        docs = context.sets[sid]
        r = set_prototype(doc_cds[sid], docs, acc_phrases[sid])
        r_new = new_set_prototype(doc_means[sid], docs, new_phrases[sid])
        protos.append(
            SetPrototype(
                set_id=sid,
                accumulated=r,
                new=r_new,
                distilled=distill(r, r_new, gamma),
            )
        )
    return protos


def train_context(
    params: EncoderParams,
    context: ContextBatch,
    acc_phrases: Mapping[str, SetPhrases],
    new_phrases: Mapping[str, SetPhrases],
    provider: SentenceProvider,
    cfg: TrainConfig,
) -> tuple[EncoderParams, list[float], list[SetPrototype]]:
    """Optimize the encoder on one context.

    Each epoch recomputes all document vectors under the current parameters,
    freezes the per-set prototypes as targets, then runs seeded-shuffle
    minibatch Adam steps on the contrastive loss. Single-set contexts have
    no contrastive signal: no steps are taken, but prototypes are still
    computed and returned. Returns (updated params, per-epoch mean loss,
    final prototypes under the updated params).
    """
    set_ids = sorted(context.sets)
    for sid in set_ids:
        if sid not in acc_phrases or sid not in new_phrases:
            raise DataError(f"set {sid!r} is missing a phrase list")

    flat: list[tuple[str, int, Document]] = []  # (set_id, set index, doc)
    for idx, sid in enumerate(set_ids):
        for doc in context.sets[sid]:
            flat.append((sid, idx, doc))
    embs = [provider.lookup(doc) for _, _, doc in flat]
    means_flat = [e.mean(axis=0) for e in embs]

    doc_means: dict[str, list[np.ndarray]] = {sid: [] for sid in set_ids}
    for (sid, _, _), mean in zip(flat, means_flat):
        doc_means[sid].append(mean)

    params = params.copy()
    optimizer = Adam(params, lr=cfg.learning_rate)
    rng = np.random.default_rng(cfg.seed)
    trace: list[float] = []
    n_docs = len(flat)

    def all_cds() -> tuple[list[np.ndarray], dict[str, list[np.ndarray]]]:
        cds = [_forward(e, params).cd for e in embs]
        by_set: dict[str, list[np.ndarray]] = {sid: [] for sid in set_ids}
        for (sid, _, _), cd in zip(flat, cds):
            by_set[sid].append(cd)
        return cds, by_set

    if len(set_ids) >= 2:
        for _ in range(cfg.epochs):
            _, by_set = all_cds()
            protos = _context_prototypes(
                set_ids, context, by_set, doc_means, acc_phrases, new_phrases, cfg.gamma
            )
            targets = [p.distilled for p in protos]

            order = rng.permutation(n_docs)
            loss_sum = 0.0
            for start in range(0, n_docs, cfg.batch_size):
                batch = order[start : start + cfg.batch_size]
                batch_embs = [(embs[j], flat[j][1]) for j in batch]
                mean_loss, grads = batch_gradients(batch_embs, targets, params, cfg.tau)
                loss_sum += mean_loss * len(batch)
                optimizer.step(params, grads)
            trace.append(loss_sum / n_docs)

    _, by_set = all_cds()
    final = _context_prototypes(
        set_ids, context, by_set, doc_means, acc_phrases, new_phrases, cfg.gamma
    )
    return params, trace, final


def params_to_bytes(params: EncoderParams) -> bytes:
    """Dims header plus flat little-endian f32 blocks in PARAM_FIELDS order."""
    parts = [struct.pack("<IIH", params.dim, params.pool_dim, params.heads)]
    for _, arr in params.arrays():
        parts.append(np.asarray(arr, dtype="<f4").tobytes())
    return b"".join(parts)


def params_from_bytes(data: bytes, offset: int = 0) -> tuple[EncoderParams, int]:
    """Parse a parameter block; returns the params and the next offset."""
    header = struct.calcsize("<IIH")
    if offset + header > len(data):
        raise DataError("truncated parameter header")
    dim, pool_dim, heads = struct.unpack_from("<IIH", data, offset)
    offset += header
    shapes = {
        "wq": (dim, dim),
        "wk": (dim, dim),
        "wv": (dim, dim),
        "wo": (dim, dim),
        "ff_w": (dim, dim),
        "ff_b": (dim,),
        "ln_gain": (dim,),
        "ln_bias": (dim,),
        "pool_w": (dim, pool_dim),
        "pool_b": (pool_dim,),
        "pool_v": (pool_dim,),
    }
    arrays = {}
    for name in PARAM_FIELDS:
        shape = shapes[name]
        count = int(np.prod(shape))
        if offset + 4 * count > len(data):
            raise DataError(f"truncated parameter block {name}")
        arrays[name] = (
            np.frombuffer(data, dtype="<f4", count=count, offset=offset)
            .astype(np.float64)
            .reshape(shape)
        )
        offset += 4 * count
    return EncoderParams(dim=dim, heads=heads, pool_dim=pool_dim, **arrays), offset


def save_checkpoint(path: str | Path, params: EncoderParams) -> None:
    """Versioned binary checkpoint: magic, u16 version, then the dims header
    and flat little-endian f32 blocks in PARAM_FIELDS order."""
    with Path(path).open("wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<H", CHECKPOINT_VERSION))
        fh.write(params_to_bytes(params))


def load_checkpoint(path: str | Path) -> EncoderParams:
    path = Path(path)
    data = path.read_bytes()
    if data[:4] != CHECKPOINT_MAGIC:
        raise DataError(f"{path}: not an encoder checkpoint")
    (version,) = struct.unpack_from("<H", data, 4)
    if version != CHECKPOINT_VERSION:
        raise DataError(f"{path}: unsupported checkpoint version {version}")
    params, offset = params_from_bytes(data, 6)
    if offset != len(data):
        raise DataError(f"{path}: {len(data) - offset} trailing bytes")
    return params


def write_loss_trace(path: str | Path, trace: Sequence[float]) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write("epoch,mean_loss\n")
        for epoch, loss in enumerate(trace, start=1):
            fh.write(f"{epoch},{loss:.10g}\n")
