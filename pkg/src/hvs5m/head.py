"""Trainable quality head: feature reduction, GRU, score regression, pooling.

Per video, fused feature rows are reduced by a fully-connected layer, run
through a single-layer GRU left-to-right from a zero initial hidden state,
and mapped to one score per step.  The per-step scores are then pooled with
a hysteresis rule that mimics how viewers judge quality over time: a memory
component (the worst score in the recent past) is mixed with an
anticipation component (a softmax-weighted average over the near future
that emphasizes low scores), and the video score is the mean of the mixed
sequence.

GRU convention, per step t with input x and previous hidden state h:

    z = sigmoid(x Wz + h Uz + bz)          update gate
    r = sigmoid(x Wr + h Ur + br)          reset gate
    c = tanh(x Wc + (r * h) Uc + bc)       candidate state
    h' = (1 - z) * c + z * h

The backward pass is hand-derived reverse-mode accumulation through every
stage, exact everywhere except two documented points: the minimum in the
memory component routes its subgradient to the smallest-index argmin on
ties, and the rank vectors inside the training loss are recomputed each
batch but treated as constants during differentiation (so that term
contributes no gradient; a pairwise soft-rank alternative is available via
``soft_rank=True``).

Training uses Adam with a step-decay learning-rate schedule
``lr * decay_factor ** (epoch // decay_every)``.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import CheckpointError, DimensionError, NumericError
from .metrics import average_ranks

EPSILON_GUARD = 1e-12

DEFAULT_IN_DIM = 8704
DEFAULT_FC_DIM = 256
DEFAULT_HIDDEN = 72


@dataclass(frozen=True)
class TempHystConfig:
    """Hysteresis pooling settings.

    ``tau`` is the window length for both the memory and anticipation
    components; ``gamma`` mixes them (1 = pure memory, 0 = pure
    anticipation).  ``enabled=False`` replaces the pooling with a plain
    mean over the per-step scores (the fully-connected ablation).
    """

    tau: int = 12
    gamma: float = 0.5
    enabled: bool = True

    def __post_init__(self) -> None:
        if self.tau < 1:
            raise ValueError(f"tau must be >= 1, got {self.tau}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")


@dataclass
class HeadParams:
    """All trainable tensors plus optional input standardization constants."""

    w_reduce: np.ndarray
    b_reduce: np.ndarray
    w_update: np.ndarray
    u_update: np.ndarray
    b_update: np.ndarray
    w_reset: np.ndarray
    u_reset: np.ndarray
    b_reset: np.ndarray
    w_cand: np.ndarray
    u_cand: np.ndarray
    b_cand: np.ndarray
    w_score: np.ndarray
    b_score: np.ndarray  # shape (1,)
    feature_mean: np.ndarray | None = None
    feature_scale: np.ndarray | None = None

    TRAINABLE = (
        "w_reduce",
        "b_reduce",
        "w_update",
        "u_update",
        "b_update",
        "w_reset",
        "u_reset",
        "b_reset",
        "w_cand",
        "u_cand",
        "b_cand",
        "w_score",
        "b_score",
    )

    @classmethod
    def init(
        cls,
        in_dim: int = DEFAULT_IN_DIM,
        fc_dim: int = DEFAULT_FC_DIM,
        hidden: int = DEFAULT_HIDDEN,
        seed: int = 0,
        dtype=np.float32,
    ) -> "HeadParams":
        """Seeded init: every tensor uniform in +-sqrt(1 / fan_in)."""
        rng = np.random.default_rng(seed)

        def uniform(fan_in, *shape):
            limit = math.sqrt(1.0 / fan_in)
            return rng.uniform(-limit, limit, size=shape).astype(dtype)

        gates = {}
        for gate in ("update", "reset", "cand"):
            gates[f"w_{gate}"] = uniform(fc_dim, fc_dim, hidden)
            gates[f"u_{gate}"] = uniform(hidden, hidden, hidden)
            gates[f"b_{gate}"] = uniform(hidden, hidden)
        return cls(
            w_reduce=uniform(in_dim, in_dim, fc_dim),
            b_reduce=uniform(in_dim, fc_dim),
            w_score=uniform(hidden, hidden),
            b_score=uniform(hidden, 1),
            **gates,
        )

    @property
    def in_dim(self) -> int:
        return self.w_reduce.shape[0]

    @property
    def fc_dim(self) -> int:
        return self.w_reduce.shape[1]

    @property
    def hidden(self) -> int:
        return self.w_score.shape[0]

    @property
    def dtype(self):
        return self.w_reduce.dtype

    def named_tensors(self):
        for name in self.TRAINABLE:
            yield name, getattr(self, name)

    def check_finite(self) -> None:
        for name, t in self.named_tensors():
            if not np.isfinite(t).all():
                raise NumericError(f"parameter {name} contains non-finite values")


@dataclass
class QualityTrace:
    """Per-step scores and their pooled components for one video."""

    scores: np.ndarray  # raw per-step scores
    memory: np.ndarray  # worst recent score per step
    anticipation: np.ndarray  # softmax-weighted near-future average per step
    pooled: np.ndarray  # gamma * memory + (1 - gamma) * anticipation
    video_score: float


def _standardize(fused: np.ndarray, params: HeadParams) -> np.ndarray:
    fused = np.asarray(fused, dtype=params.dtype)
    if fused.ndim != 2:
        raise DimensionError(f"fused features must be (steps, width), got {fused.shape}")
    if fused.shape[0] < 1:
        raise DimensionError("need at least one fused step")
    if fused.shape[1] != params.in_dim:
        raise DimensionError(
            f"fused width {fused.shape[1]} does not match w_reduce input dim "
            f"{params.in_dim}"
        )
    if params.feature_mean is not None:
        fused = (fused - params.feature_mean) / params.feature_scale
    return fused


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _hysteresis_forward(q: np.ndarray, cfg: TempHystConfig) -> dict:
    """Pool per-step scores; keeps argmin indices and window weights for backprop."""
    steps = len(q)
    dtype = q.dtype
    if cfg.enabled:
        memory = np.empty(steps, dtype=dtype)
        argmins = np.empty(steps, dtype=np.int64)
        memory[0] = q[0]
        argmins[0] = 0
        for n in range(1, steps):
            lo = max(0, n - cfg.tau)
            window = q[lo:n]
            idx = lo + int(np.argmin(window))  # smallest index on ties
            argmins[n] = idx
            memory[n] = q[idx]
        anticipation = np.empty(steps, dtype=dtype)
        weights = []
        for n in range(steps):
            hi = min(n + cfg.tau, steps - 1)
            window = q[n : hi + 1]
            shifted = -window - np.max(-window)  # stabilized softmax
            expw = np.exp(shifted)
            w = expw / expw.sum()
            weights.append(w)
            anticipation[n] = float(window @ w)
        pooled = cfg.gamma * memory + (1.0 - cfg.gamma) * anticipation
    else:
        memory = q.copy()
        anticipation = q.copy()
        pooled = q.copy()
        argmins = None
        weights = None
    if not np.isfinite(pooled).all():
        raise NumericError("non-finite value in hysteresis pooling")
    return {
        "q": q,
        "memory": memory,
        "anticipation": anticipation,
        "pooled": pooled,
        "argmins": argmins,
        "weights": weights,
        "video_score": float(pooled.mean()),
    }


def hysteresis_pool(scores: np.ndarray, cfg: TempHystConfig) -> QualityTrace:
    """Pool a raw per-step score sequence into a quality trace.

    The memory component of step n is the worst score within the previous
    ``tau`` steps (the score itself at the first step); the anticipation
    component averages scores from n over the next ``tau`` steps with
    softmax weights ``exp(-score)`` normalized over the window, so low
    scores dominate the look-ahead.
    """
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 1 or scores.shape[0] < 1:
        raise DimensionError(f"scores must be a non-empty vector, got {scores.shape}")
    state = _hysteresis_forward(scores, cfg)
    return QualityTrace(
        scores=state["q"].copy(),
        memory=state["memory"].copy(),
        anticipation=state["anticipation"].copy(),
        pooled=state["pooled"].copy(),
        video_score=state["video_score"],
    )


def _forward_video(fused: np.ndarray, params: HeadParams, cfg: TempHystConfig) -> dict:
    """Run the full head on one video, keeping every intermediate for backprop."""
    x = _standardize(fused, params)
    reduced = x @ params.w_reduce + params.b_reduce
    if not np.isfinite(reduced).all():
        raise NumericError("non-finite value after feature reduction")

    steps = reduced.shape[0]
    hidden = params.hidden
    dtype = params.dtype
    h = np.zeros(hidden, dtype=dtype)
    zs = np.empty((steps, hidden), dtype=dtype)
    rs = np.empty((steps, hidden), dtype=dtype)
    cs = np.empty((steps, hidden), dtype=dtype)
    hs = np.empty((steps, hidden), dtype=dtype)
    for t in range(steps):
        xt = reduced[t]
        z = _sigmoid(xt @ params.w_update + h @ params.u_update + params.b_update)
        r = _sigmoid(xt @ params.w_reset + h @ params.u_reset + params.b_reset)
        c = np.tanh(xt @ params.w_cand + (r * h) @ params.u_cand + params.b_cand)
        h = (1.0 - z) * c + z * h
        zs[t], rs[t], cs[t], hs[t] = z, r, c, h
    if not np.isfinite(hs).all():
        raise NumericError("non-finite value in GRU recurrence")

    q = hs @ params.w_score + params.b_score[0]

    cache = _hysteresis_forward(q, cfg)
    cache.update({"x": x, "reduced": reduced, "z": zs, "r": rs, "c": cs, "h": hs})
    return cache


def forward(fused: np.ndarray, params: HeadParams, cfg: TempHystConfig) -> QualityTrace:
    """Score one video; see the module docstring for the dataflow."""
    cache = _forward_video(fused, params, cfg)
    return QualityTrace(
        scores=cache["q"].copy(),
        memory=cache["memory"].copy(),
        anticipation=cache["anticipation"].copy(),
        pooled=cache["pooled"].copy(),
        video_score=cache["video_score"],
    )


# ---------------------------------------------------------------------------
# Loss
# ---------------------------------------------------------------------------


def _guarded_pearson(a: np.ndarray, b: np.ndarray) -> tuple[float, np.ndarray]:
    """Pearson with epsilon-guarded denominator; returns (value, d value / d a)."""
    ua = a - a.mean()
    ub = b - b.mean()
    s_ab = float(ua @ ub)
    s_aa = float(ua @ ua)
    s_bb = float(ub @ ub)
    denom = math.sqrt((s_aa + EPSILON_GUARD) * (s_bb + EPSILON_GUARD))
    value = s_ab / denom
    grad = ub / denom - s_ab * (s_bb + EPSILON_GUARD) * ua / denom**3
    return value, grad


def _soft_ranks(values: np.ndarray, temperature: float) -> tuple[np.ndarray, np.ndarray]:
    """Differentiable ranks via pairwise sigmoids; returns (ranks, jacobian)."""
    n = len(values)
    diff = (values[:, None] - values[None, :]) / temperature
    s = _sigmoid(diff)
    np.fill_diagonal(s, 0.0)
    ranks = 1.0 + s.sum(axis=1)
    sprime = s * (1.0 - s) / temperature
    np.fill_diagonal(sprime, 0.0)
    jac = -sprime.copy()  # d ranks_i / d values_k for k != i
    np.fill_diagonal(jac, sprime.sum(axis=1))
    return ranks, jac


def _loss_and_grad(
    predicted: np.ndarray,
    mos: np.ndarray,
    *,
    soft_rank: bool = False,
    temperature: float = 0.1,
) -> tuple[float, np.ndarray]:
    predicted = np.asarray(predicted, dtype=np.float64)
    mos = np.asarray(mos, dtype=np.float64)
    if predicted.ndim != 1 or predicted.shape != mos.shape:
        raise DimensionError(
            f"predictions {predicted.shape} and mos {mos.shape} must be equal-length vectors"
        )
    if len(predicted) < 2:
        raise ValueError("loss needs a batch of at least 2 videos")

    truth_ranks = average_ranks(mos)
    if soft_rank:
        pred_ranks, jac = _soft_ranks(predicted, temperature)
        rank_corr, d_corr_d_ranks = _guarded_pearson(pred_ranks, truth_ranks)
        grad_rank = -(jac.T @ d_corr_d_ranks)
    else:
        # Ranks recomputed per batch, held constant under differentiation.
        pred_ranks = average_ranks(predicted)
        rank_corr, _ = _guarded_pearson(pred_ranks, truth_ranks)
        grad_rank = np.zeros_like(predicted)

    linear_corr, d_linear = _guarded_pearson(predicted, mos)
    loss_value = (1.0 - rank_corr) + (1.0 - linear_corr) / 2.0
    grad = grad_rank - d_linear / 2.0
    return float(loss_value), grad


def loss(
    predicted,
    mos,
    *,
    soft_rank: bool = False,
    temperature: float = 0.1,
) -> float:
    """Training loss over a batch of video scores: rank term plus linear term.

    ``(1 - rank correlation) + (1 - linear correlation) / 2`` with
    epsilon-guarded denominators so degenerate constant batches stay finite.
    """
    value, _ = _loss_and_grad(
        np.asarray(predicted), np.asarray(mos), soft_rank=soft_rank, temperature=temperature
    )
    return value


# ---------------------------------------------------------------------------
# Backward
# ---------------------------------------------------------------------------


def _pooling_backward(cache: dict, cfg: TempHystConfig, upstream: float) -> np.ndarray:
    """Gradient of (upstream * video_score) with respect to per-step scores."""
    q = cache["q"]
    steps = len(q)
    d_pooled = np.full(steps, upstream / steps, dtype=np.float64)
    if not cfg.enabled:
        return d_pooled
    grad_q = np.zeros(steps, dtype=np.float64)
    argmins = cache["argmins"]
    weights = cache["weights"]
    anticipation = cache["anticipation"]
    for n in range(steps):
        # memory: subgradient routed to the (smallest-index) argmin
        grad_q[argmins[n]] += cfg.gamma * d_pooled[n]
        # anticipation: softmax weights differentiated exactly
        w = weights[n]
        hi = n + len(w)
        window = slice(n, hi)
        grad_q[window] += (
            (1.0 - cfg.gamma) * d_pooled[n] * w * (1.0 + anticipation[n] - q[window])
        )
    return grad_q


def _video_backward(
    cache: dict, params: HeadParams, grads: dict[str, np.ndarray], grad_q: np.ndarray
) -> None:
    """Accumulate parameter gradients for one video given d loss / d scores."""
    h = cache["h"]
    steps = h.shape[0]

    grads["w_score"] += h.T @ grad_q
    grads["b_score"] += grad_q.sum(keepdims=True)
    dh_all = np.outer(grad_q, params.w_score)

    d_reduced = np.zeros_like(cache["reduced"], dtype=np.float64)
    dh_next = np.zeros(params.hidden, dtype=np.float64)
    for t in range(steps - 1, -1, -1):
        dh = dh_all[t] + dh_next
        z, r, c = cache["z"][t], cache["r"][t], cache["c"][t]
        h_prev = h[t - 1] if t > 0 else np.zeros(params.hidden, dtype=np.float64)
        xt = cache["reduced"][t]

        dc = dh * (1.0 - z)
        dz = dh * (h_prev - c)
        dh_prev = dh * z

        dac = dc * (1.0 - c * c)
        grads["w_cand"] += np.outer(xt, dac)
        grads["u_cand"] += np.outer(r * h_prev, dac)
        grads["b_cand"] += dac
        drh = dac @ params.u_cand.T
        dr = drh * h_prev
        dh_prev = dh_prev + drh * r

        daz = dz * z * (1.0 - z)
        grads["w_update"] += np.outer(xt, daz)
        grads["u_update"] += np.outer(h_prev, daz)
        grads["b_update"] += daz
        dh_prev = dh_prev + daz @ params.u_update.T

        dar = dr * r * (1.0 - r)
        grads["w_reset"] += np.outer(xt, dar)
        grads["u_reset"] += np.outer(h_prev, dar)
        grads["b_reset"] += dar
        dh_prev = dh_prev + dar @ params.u_reset.T

        d_reduced[t] = daz @ params.w_update.T + dar @ params.w_reset.T + dac @ params.w_cand.T
        dh_next = dh_prev

    grads["w_reduce"] += cache["x"].T @ d_reduced
    grads["b_reduce"] += d_reduced.sum(axis=0)


def backward(
    fused_batch: list[np.ndarray],
    params: HeadParams,
    cfg: TempHystConfig,
    mos: np.ndarray,
    *,
    soft_rank: bool = False,
    temperature: float = 0.1,
) -> tuple[float, dict[str, np.ndarray], np.ndarray]:
    """Loss and analytic parameter gradients over a batch of videos.

    Returns ``(loss, grads, predicted_scores)``.  Gradients are accumulated
    video by video in batch order, so results are bit-reproducible.
    """
    caches = [_forward_video(f, params, cfg) for f in fused_batch]
    predicted = np.array([c["video_score"] for c in caches], dtype=np.float64)
    loss_value, d_loss_d_q = _loss_and_grad(
        predicted, np.asarray(mos, dtype=np.float64), soft_rank=soft_rank, temperature=temperature
    )
    grads = {name: np.zeros(t.shape, dtype=np.float64) for name, t in params.named_tensors()}
    for cache, upstream in zip(caches, d_loss_d_q):
        grad_q = _pooling_backward(cache, cfg, float(upstream))
        _video_backward(cache, params, grads, grad_q)
    for name, g in grads.items():
        if not np.isfinite(g).all():
            raise NumericError(f"non-finite gradient for {name}")
    return loss_value, grads, predicted


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OptimizerConfig:
    """Adam settings and the step-decay learning-rate schedule."""

    lr: float = 1e-5
    decay_factor: float = 0.2
    decay_every: int = 2  # epochs between decays; 0 disables decay
    epochs: int = 30
    batch_size: int = 8
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    standardize_features: bool = True
    soft_rank: bool = False
    temperature: float = 0.1


def learning_rate(opt: OptimizerConfig, epoch: int) -> float:
    if opt.decay_every <= 0:
        return opt.lr
    return opt.lr * opt.decay_factor ** (epoch // opt.decay_every)


def _make_batches(n: int, batch_size: int, rng: np.random.Generator) -> list[np.ndarray]:
    order = rng.permutation(n)
    batches = [order[i : i + batch_size] for i in range(0, n, batch_size)]
    # the loss needs >= 2 videos; fold a trailing singleton into its neighbor
    if len(batches) > 1 and len(batches[-1]) == 1:
        batches[-2] = np.concatenate([batches[-2], batches[-1]])
        batches.pop()
    return batches


def fit_standardization(
    params: HeadParams, train_videos: list[tuple[np.ndarray, float]]
) -> HeadParams:
    """Attach per-dimension mean/scale computed from the training features."""
    rows = np.concatenate([np.asarray(f, dtype=np.float64) for f, _ in train_videos])
    mean = rows.mean(axis=0)
    scale = np.maximum(rows.std(axis=0), 1e-6)
    return replace(
        params,
        feature_mean=mean.astype(params.dtype),
        feature_scale=scale.astype(params.dtype),
    )


def _split_scores(
    videos: list[tuple[np.ndarray, float]], params: HeadParams, cfg: TempHystConfig
) -> tuple[np.ndarray, np.ndarray]:
    predicted = np.array(
        [forward(f, params, cfg).video_score for f, _ in videos], dtype=np.float64
    )
    truth = np.array([m for _, m in videos], dtype=np.float64)
    return predicted, truth


def train(
    train_videos: list[tuple[np.ndarray, float]],
    val_videos: list[tuple[np.ndarray, float]],
    params: HeadParams,
    cfg: TempHystConfig,
    opt: OptimizerConfig,
) -> tuple[HeadParams, list[dict]]:
    """Adam training loop; returns the best-validation-SRCC parameters.

    Each history record carries epoch, learning rate, mean batch loss, and
    train/validation SRCC and PLCC.  With no validation videos the best
    checkpoint falls back to training SRCC.  A non-finite loss aborts with
    the offending epoch and step.
    """
    from .metrics import plcc as exact_plcc
    from .metrics import srcc as exact_srcc

    if len(train_videos) < 2:
        raise ValueError(
            f"training needs at least 2 videos (loss is correlation-based), "
            f"got {len(train_videos)}"
        )
    params = copy.deepcopy(params)
    if opt.standardize_features and params.feature_mean is None:
        params = fit_standardization(params, train_videos)

    adam_m = {name: np.zeros(t.shape, dtype=np.float64) for name, t in params.named_tensors()}
    adam_v = {name: np.zeros(t.shape, dtype=np.float64) for name, t in params.named_tensors()}
    step = 0
    rng = np.random.default_rng(opt.seed)
    history: list[dict] = []
    best_metric = -np.inf
    best_params = copy.deepcopy(params)
    best_epoch = -1

    for epoch in range(opt.epochs):
        lr = learning_rate(opt, epoch)
        batch_losses = []
        for batch_no, batch in enumerate(_make_batches(len(train_videos), opt.batch_size, rng)):
            fused = [train_videos[i][0] for i in batch]
            mos = np.array([train_videos[i][1] for i in batch], dtype=np.float64)
            loss_value, grads, _ = backward(
                fused, params, cfg, mos, soft_rank=opt.soft_rank, temperature=opt.temperature
            )
            if not math.isfinite(loss_value):
                raise NumericError(
                    f"training diverged: non-finite loss at epoch {epoch} step {batch_no}"
                )
            batch_losses.append(loss_value)
            step += 1
            for name, tensor in params.named_tensors():
                g = grads[name]
                adam_m[name] = opt.beta1 * adam_m[name] + (1.0 - opt.beta1) * g
                adam_v[name] = opt.beta2 * adam_v[name] + (1.0 - opt.beta2) * g * g
                m_hat = adam_m[name] / (1.0 - opt.beta1**step)
                v_hat = adam_v[name] / (1.0 - opt.beta2**step)
                tensor -= (lr * m_hat / (np.sqrt(v_hat) + opt.eps)).astype(tensor.dtype)

        train_pred, train_truth = _split_scores(train_videos, params, cfg)
        record = {
            "epoch": epoch,
            "lr": lr,
            "train_loss": float(np.mean(batch_losses)),
            "train_srcc": exact_srcc(train_pred, train_truth),
            "train_plcc": exact_plcc(train_pred, train_truth),
        }
        if val_videos:
            val_pred, val_truth = _split_scores(val_videos, params, cfg)
            record["val_srcc"] = exact_srcc(val_pred, val_truth)
            record["val_plcc"] = exact_plcc(val_pred, val_truth)
            selector = record["val_srcc"]
        else:
            record["val_srcc"] = float("nan")
            record["val_plcc"] = float("nan")
            selector = record["train_srcc"]
        history.append(record)
        # ties go to the later epoch: small validation splits quantize SRCC
        # heavily, and among equal scores the longer-trained model wins
        if math.isfinite(selector) and selector >= best_metric:
            best_metric = selector
            best_params = copy.deepcopy(params)
            best_epoch = epoch

    for record in history:
        record["best_epoch"] = best_epoch
    return best_params, history


# ---------------------------------------------------------------------------
# Checkpoints
# ---------------------------------------------------------------------------


def save_head_checkpoint(
    directory,
    params: HeadParams,
    cfg: TempHystConfig,
    *,
    seed: int = 0,
    epoch: int = -1,
) -> None:
    from . import io as hvsf_io

    tensors = {name: np.asarray(t) for name, t in params.named_tensors()}
    if params.feature_mean is not None:
        tensors["feature_mean"] = params.feature_mean
        tensors["feature_scale"] = params.feature_scale
    hvsf_io.save_checkpoint(
        directory,
        tensors,
        {"tau": cfg.tau, "gamma": cfg.gamma, "seed": seed, "epoch": epoch},
    )


def load_head_checkpoint(directory) -> tuple[HeadParams, TempHystConfig, dict]:
    from . import io as hvsf_io

    tensors, meta = hvsf_io.load_checkpoint(directory)
    missing = [name for name in HeadParams.TRAINABLE if name not in tensors]
    if missing:
        raise CheckpointError(f"checkpoint missing tensors: {', '.join(missing)}")
    params = HeadParams(
        **{name: tensors[name] for name in HeadParams.TRAINABLE},
        feature_mean=tensors.get("feature_mean"),
        feature_scale=tensors.get("feature_scale"),
    )
    params.check_finite()
    cfg = TempHystConfig(tau=int(meta.get("tau", 12)), gamma=float(meta.get("gamma", 0.5)))
    return params, cfg, meta
