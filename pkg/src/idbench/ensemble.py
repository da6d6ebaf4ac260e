"""Ensemble similarity predictor: combines the seven representation scores
with identifier features in an RBF-kernel epsilon-SVR, trained by an
SMO-style coordinate method and evaluated leave-one-out."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigError, InsufficientDataError, ValidationError
from .evaluator import spearman
from .model import Identifier, IdentifierPair

# Canonical order of the seven representation score columns.
SCORE_ORDER = ("lv", "nw", "w2v-cbow", "w2v-sg", "ft-cbow", "ft-sg", "path-based")

N_FEATURES = 13

_CAMEL_BOUNDARY = re.compile(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])")


def tokenize_identifier(identifier: Identifier | str) -> list[str]:
    """Split an identifier into lowercased subtokens.

    Splits on ``_`` and ``$``, at lower-to-upper boundaries, and before the
    final capital of an acronym run followed by a lowercase word; digits stay
    attached to the preceding subtoken.
    """
    text = identifier.text if isinstance(identifier, Identifier) else identifier
    subtokens = []
    for segment in re.split(r"[_$]+", text):
        for part in _CAMEL_BOUNDARY.split(segment):
            if part:
                subtokens.append(part.lower())
    return subtokens


@dataclass(frozen=True)
class FeatureVector:
    """13 inputs per pair: the seven representation scores, both identifier
    lengths, subtoken counts, and non-dictionary subtoken counts."""

    scores: tuple[float, ...]
    len1: int
    len2: int
    subtok1: int
    subtok2: int
    nondict1: int
    nondict2: int

    def __post_init__(self):
        if len(self.scores) != len(SCORE_ORDER):
            raise ValidationError(f"expected {len(SCORE_ORDER)} scores, got {len(self.scores)}")
        if any(not math.isfinite(s) for s in self.scores):
            raise ValidationError("scores must be finite")
        for name in ("len1", "len2", "subtok1", "subtok2", "nondict1", "nondict2"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be non-negative")

    def as_array(self) -> np.ndarray:
        return np.array([*self.scores, self.len1, self.len2, self.subtok1,
                         self.subtok2, self.nondict1, self.nondict2], dtype=np.float64)


def extract_features(pair: IdentifierPair, scores: Sequence[float],
                     dictionary: frozenset[str] | set[str]) -> FeatureVector:
    """Assemble the feature vector for one pair; all seven scores must be
    present (impute missing ones upstream)."""
    if not dictionary:
        raise ConfigError("empty dictionary")
    sub1 = tokenize_identifier(pair.id1)
    sub2 = tokenize_identifier(pair.id2)
    return FeatureVector(
        scores=tuple(float(s) for s in scores),
        len1=len(pair.id1.text),
        len2=len(pair.id2.text),
        subtok1=len(sub1),
        subtok2=len(sub2),
        nondict1=sum(1 for s in sub1 if s not in dictionary),
        nondict2=sum(1 for s in sub2 if s not in dictionary),
    )


def load_dictionary(stream) -> frozenset[str]:
    """One lowercase word per line."""
    return frozenset(line.strip().lower() for line in stream if line.strip())


# ── epsilon-SVR via SMO ──────────────────────────────────────────


@dataclass(frozen=True)
class SvrParams:
    C: float = 1.0
    epsilon: float = 0.1
    tolerance: float = 1e-3
    max_passes: int = 10_000


@dataclass
class RegressorModel:
    """Fitted epsilon-SVR with an RBF kernel, plus the feature
    standardization applied before the kernel."""

    support_vectors: np.ndarray  # (m, k) standardized, kept features only
    coefficients: np.ndarray     # (m,) dual coefficients, |coef| <= C
    bias: float
    gamma: float
    C: float
    epsilon: float
    feature_means: np.ndarray    # per raw feature
    feature_stds: np.ndarray     # per raw feature
    kept_features: np.ndarray    # indices of non-degenerate features
    converged: bool
    iterations: int
    kkt_gap: float

    def standardize(self, raw: np.ndarray) -> np.ndarray:
        kept = self.kept_features
        return (raw[..., kept] - self.feature_means[kept]) / self.feature_stds[kept]

    def to_json(self) -> dict:
        return {
            "kind": "epsilon-svr-rbf",
            "C": self.C,
            "epsilon": self.epsilon,
            "gamma": self.gamma,
            "bias": self.bias,
            "converged": self.converged,
            "iterations": self.iterations,
            "kkt_gap": self.kkt_gap,
            "feature_means": self.feature_means.tolist(),
            "feature_stds": self.feature_stds.tolist(),
            "kept_features": self.kept_features.tolist(),
            "support_vectors": self.support_vectors.tolist(),
            "coefficients": self.coefficients.tolist(),
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "RegressorModel":
        if obj.get("kind") != "epsilon-svr-rbf":
            raise ValidationError(f"unknown model kind {obj.get('kind')!r}")
        return cls(
            support_vectors=np.array(obj["support_vectors"], dtype=np.float64),
            coefficients=np.array(obj["coefficients"], dtype=np.float64),
            bias=float(obj["bias"]),
            gamma=float(obj["gamma"]),
            C=float(obj["C"]),
            epsilon=float(obj["epsilon"]),
            feature_means=np.array(obj["feature_means"], dtype=np.float64),
            feature_stds=np.array(obj["feature_stds"], dtype=np.float64),
            kept_features=np.array(obj["kept_features"], dtype=np.int64),
            converged=bool(obj["converged"]),
            iterations=int(obj["iterations"]),
            kkt_gap=float(obj["kkt_gap"]),
        )


def _rbf_kernel(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    sq = (
        (a * a).sum(axis=1)[:, None]
        + (b * b).sum(axis=1)[None, :]
        - 2.0 * (a @ b.T)
    )
    return np.exp(-gamma * np.maximum(sq, 0.0))


def _smo_solve(kernel: np.ndarray, targets: np.ndarray,
               params: SvrParams) -> tuple[np.ndarray, float, bool, int, float]:
    """Solve the epsilon-SVR dual by sequential minimal optimization.

    Works on the 2n-variable box form (alpha, alpha*) with max-violating-pair
    selection; one pass optimizes one pair. Deterministic: ties resolve to
    the lowest index. Returns (beta, bias, converged, iterations, kkt_gap)
    with beta = alpha - alpha*.
    """
    n = len(targets)
    C, eps, tol = params.C, params.epsilon, params.tolerance
    # Variables 0..n-1 are alpha (sign +1), n..2n-1 are alpha* (sign -1).
    sign = np.concatenate([np.ones(n), -np.ones(n)])
    lam = np.zeros(2 * n)
    gradient = np.concatenate([eps - targets, eps + targets])

    converged = False
    iterations = 0
    gap = math.inf
    while iterations < params.max_passes:
        violation = -sign * gradient
        in_up = np.concatenate([lam[:n] < C, lam[n:] > 0.0])
        in_down = np.concatenate([lam[:n] > 0.0, lam[n:] < C])
        if not in_up.any() or not in_down.any():
            converged = True
            gap = 0.0
            break
        up_vals = np.where(in_up, violation, -np.inf)
        down_vals = np.where(in_down, violation, np.inf)
        i = int(np.argmax(up_vals))
        j = int(np.argmin(down_vals))
        gap = float(up_vals[i] - down_vals[j])
        if gap <= tol:
            converged = True
            break
        iterations += 1

        ii, jj = i % n, j % n
        eta = kernel[ii, ii] + kernel[jj, jj] - 2.0 * kernel[ii, jj]
        step = gap / max(eta, 1e-12)

        # lam[i] moves by sign[i]*t, lam[j] by -sign[j]*t; clip t to the box.
        bound_i = (C - lam[i]) if sign[i] > 0 else lam[i]
        bound_j = lam[j] if sign[j] > 0 else (C - lam[j])
        step = min(step, bound_i, bound_j)

        lam[i] = min(C, max(0.0, lam[i] + sign[i] * step))
        lam[j] = min(C, max(0.0, lam[j] - sign[j] * step))
        gradient += step * sign * np.tile(kernel[:, ii] - kernel[:, jj], 2)

    # Bias from the KKT conditions: the violation value of any free variable,
    # or the midpoint of the remaining feasibility interval.
    violation = -sign * gradient
    free = (lam > 0.0) & (lam < C)
    if free.any():
        bias = float(violation[free].mean())
    else:
        in_up = np.concatenate([lam[:n] < C, lam[n:] > 0.0])
        in_down = np.concatenate([lam[:n] > 0.0, lam[n:] < C])
        hi = violation[in_up].max() if in_up.any() else 0.0
        lo = violation[in_down].min() if in_down.any() else 0.0
        bias = float((hi + lo) / 2.0)

    return lam[:n] - lam[n:], bias, converged, iterations, max(gap, 0.0)


def fit(features: Sequence[FeatureVector] | np.ndarray, targets: Sequence[float],
        params: SvrParams = SvrParams()) -> RegressorModel:
    """Standardize features (dropping degenerate ones) and fit the SVR.

    Deterministic given input order. A fit that hits the pass limit is still
    returned, with ``converged`` set to False.
    """
    raw = _feature_matrix(features)
    y = np.asarray(targets, dtype=np.float64)
    if raw.shape[0] != len(y):
        raise ValidationError(f"{raw.shape[0]} feature rows for {len(y)} targets")
    if raw.shape[0] < 2:
        raise InsufficientDataError("need at least 2 training points")
    if not np.isfinite(y).all():
        raise ValidationError("targets must be finite")

    means = raw.mean(axis=0)
    stds = raw.std(axis=0)
    kept = np.flatnonzero(stds > 0.0)
    if kept.size == 0:
        raise ConfigError("all features are constant")
    standardized = (raw[:, kept] - means[kept]) / stds[kept]
    mean_variance = float(standardized.var(axis=0).mean())
    gamma = 1.0 / (standardized.shape[1] * mean_variance)

    kernel = _rbf_kernel(standardized, standardized, gamma)
    beta, bias, converged, iterations, gap = _smo_solve(kernel, y, params)

    support = np.flatnonzero(np.abs(beta) > 1e-12)
    return RegressorModel(
        support_vectors=standardized[support],
        coefficients=beta[support],
        bias=bias,
        gamma=gamma,
        C=params.C,
        epsilon=params.epsilon,
        feature_means=means,
        feature_stds=stds,
        kept_features=kept,
        converged=converged,
        iterations=iterations,
        kkt_gap=gap,
    )


def _feature_matrix(features: Sequence[FeatureVector] | np.ndarray) -> np.ndarray:
    if isinstance(features, np.ndarray):
        return np.asarray(features, dtype=np.float64)
    return np.array([f.as_array() for f in features], dtype=np.float64)


def predict(model: RegressorModel, feature: FeatureVector | np.ndarray) -> float:
    """Kernel expansion value; intentionally not clamped (ranks matter)."""
    raw = feature.as_array() if isinstance(feature, FeatureVector) else np.asarray(feature)
    z = model.standardize(raw.reshape(1, -1))
    if len(model.support_vectors) == 0:
        return model.bias
    k = _rbf_kernel(model.support_vectors, z, model.gamma)[:, 0]
    return float(model.coefficients @ k + model.bias)


def predict_clamped(model: RegressorModel, feature: FeatureVector | np.ndarray) -> float:
    """Display convenience: prediction clipped into [0,1]."""
    return min(1.0, max(0.0, predict(model, feature)))


# ── leave-one-out evaluation ─────────────────────────────────────


@dataclass
class LooResult:
    predictions: list[float]
    correlation: float
    models_converged: int = 0


def score_table(pairs: Sequence[IdentifierPair],
                columns: Mapping[str, Mapping[str, float | None]]) -> np.ndarray:
    """(n, 7) raw score matrix in SCORE_ORDER; missing entries become NaN."""
    missing_columns = [name for name in SCORE_ORDER if name not in columns]
    if missing_columns:
        raise ConfigError(f"missing score columns: {missing_columns}")
    table = np.full((len(pairs), len(SCORE_ORDER)), np.nan)
    for col, name in enumerate(SCORE_ORDER):
        by_pair = columns[name]
        for row, pair in enumerate(pairs):
            value = by_pair.get(pair.pair_id)
            if value is not None:
                table[row, col] = value
    return table


def _impute(table: np.ndarray, train_rows: np.ndarray) -> np.ndarray:
    """Fill NaN entries with the column mean over the training rows."""
    filled = table.copy()
    for col in range(table.shape[1]):
        column = table[train_rows, col]
        finite = column[np.isfinite(column)]
        if finite.size == 0:
            raise ConfigError(f"score column {SCORE_ORDER[col]} has no values in training set")
        filled[~np.isfinite(filled[:, col]), col] = finite.mean()
    return filled


def static_feature_rows(pairs: Sequence[IdentifierPair],
                        dictionary: frozenset[str] | set[str]) -> np.ndarray:
    """(n, 6) matrix of the per-identifier features (lengths, subtokens,
    non-dictionary subtokens)."""
    if not dictionary:
        raise ConfigError("empty dictionary")
    rows = []
    for pair in pairs:
        sub1 = tokenize_identifier(pair.id1)
        sub2 = tokenize_identifier(pair.id2)
        rows.append([
            len(pair.id1.text), len(pair.id2.text), len(sub1), len(sub2),
            sum(1 for s in sub1 if s not in dictionary),
            sum(1 for s in sub2 if s not in dictionary),
        ])
    return np.array(rows, dtype=np.float64)


def leave_one_out(pairs: Sequence[IdentifierPair], raw_scores: np.ndarray,
                  targets: Sequence[float], dictionary: frozenset[str] | set[str],
                  params: SvrParams = SvrParams()) -> LooResult:
    """Hold out each pair in turn, fit on the rest, predict the held-out pair,
    and correlate the predictions with the gold targets.

    Missing scores are imputed per fold with that fold's training-column mean.
    """
    n = len(pairs)
    if n < 4:
        raise InsufficientDataError(f"leave-one-out needs at least 4 pairs, got {n}")
    y = np.asarray(targets, dtype=np.float64)
    static = static_feature_rows(pairs, dictionary)

    predictions = []
    converged = 0
    for held_out in range(n):
        train_rows = np.array([i for i in range(n) if i != held_out])
        imputed = _impute(raw_scores, train_rows)
        matrix = np.hstack([imputed, static])
        model = fit(matrix[train_rows], y[train_rows], params)
        converged += int(model.converged)
        predictions.append(predict(model, matrix[held_out]))

    return LooResult(
        predictions=predictions,
        correlation=spearman(predictions, y),
        models_converged=converged,
    )
