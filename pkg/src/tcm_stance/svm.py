"""Class-weighted linear SVM trained by dual coordinate descent.

The trainer solves the L1-loss (hinge) dual

    min_a  1/2 * sum_ij a_i a_j y_i y_j <x_i, x_j>  -  sum_i a_i
    s.t.   0 <= a_i <= C_i

one coordinate at a time.  The bias is folded into the weight vector by
augmenting every example with a constant feature of value 1, which removes
the usual sum(a_i y_i) = 0 equality constraint and leaves pure box
constraints.  Supporting (majority class, y = +1) examples get cost
C_i = C * wi with wi in (0, 1]; opposing examples keep C_i = C.  Lowering wi
makes majority-side mistakes cheaper, pushing the decision boundary so that
more points are called opposing.

Each coordinate step moves a_i to the box-clipped minimizer along its axis:
with G = y_i <w, x_i> - 1 and Q_ii = <x_i, x_i>, the new value is
clip(a_i - G / Q_ii, 0, C_i), and w is updated incrementally.  One epoch
visits all examples in a seeded random order; training stops when the
largest projected-gradient violation seen in an epoch drops below the
tolerance, or after max_epochs.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .features import SparseVector
from .stance import Stance

LABEL_MAP: dict[int, Stance] = {1: Stance.SUPPORTING, -1: Stance.OPPOSING}

_MODEL_HEADER = "stance-svm v1"


@dataclass(frozen=True)
class TrainConfig:
    C: float = 1.0
    wi: float = 0.9
    tolerance: float = 1e-4
    max_epochs: int = 1000
    seed: int = 42

    def __post_init__(self) -> None:
        if not self.C > 0:
            raise ValueError("C must be positive")
        if not 0 < self.wi <= 1:
            raise ValueError("wi must be in (0, 1]")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be at least 1")


@dataclass(frozen=True)
class TrainMeta:
    C: float
    wi: float
    seed: int
    epochs: int
    final_violation: float


@dataclass(frozen=True, eq=False)
class Model:
    """Trained weights; the last slot is the bias. Immutable and shareable."""

    weights: tuple[float, ...]
    feature_set_digest: str
    train_meta: TrainMeta
    label_map: tuple[tuple[int, str], ...] = ((1, "support"), (-1, "oppose"))

    @property
    def n_features(self) -> int:
        return len(self.weights) - 1

    @property
    def bias(self) -> float:
        return self.weights[-1]


def _upper_bound(y: int, cfg: TrainConfig) -> float:
    return cfg.C * cfg.wi if y > 0 else cfg.C


Example = tuple[SparseVector, int]


def _check_labels(data: Sequence[Example]) -> None:
    labels = {y for _, y in data}
    if not labels <= {1, -1}:
        raise ValueError("labels must be +1 or -1")
    if labels != {1, -1}:
        raise ValueError("training data must contain both classes")


@dataclass(frozen=True)
class DualSolution:
    """Raw solver state: weights (bias slot last), alphas, convergence info."""

    weights: tuple[float, ...]
    alphas: tuple[float, ...]
    epochs: int
    final_violation: float


def solve_dual(
    data: Sequence[Example],
    cfg: TrainConfig,
    n_features: int,
    *,
    fit_bias: bool = True,
) -> DualSolution:
    """Run dual coordinate descent on (vector, label) pairs.

    With fit_bias off the bias slot is kept but stays 0.0, which is what the
    closed-form small cases used in tests assume.
    """
    if not data:
        raise ValueError("empty training set")
    _check_labels(data)

    bias_index = n_features
    idx_rows: list[list[int]] = []
    val_rows: list[list[float] | None] = []  # None marks the all-ones fast path
    q_diag: list[float] = []
    for vec, _y in data:
        if vec.indices and (vec.indices[-1] >= n_features):
            raise ValueError("vector index out of range for n_features")
        idx = list(vec.indices)
        vals = list(vec.values)
        if fit_bias:
            idx.append(bias_index)
            vals.append(1.0)
        idx_rows.append(idx)
        if all(v == 1.0 for v in vals):
            val_rows.append(None)
            q_diag.append(float(len(idx)))
        else:
            val_rows.append(vals)
            q_diag.append(math.fsum(v * v for v in vals))

    ys = [float(y) for _, y in data]
    uppers = [_upper_bound(y, cfg) for _, y in data]
    alphas = [0.0] * len(data)
    w = [0.0] * (n_features + 1)

    rng = random.Random(cfg.seed)
    order = list(range(len(data)))
    epochs_run = 0
    violation = math.inf
    for _ in range(cfg.max_epochs):
        epochs_run += 1
        rng.shuffle(order)
        max_violation = 0.0
        for i in order:
            idx = idx_rows[i]
            vals = val_rows[i]
            y = ys[i]
            if vals is None:
                s = 0.0
                for j in idx:
                    s += w[j]
            else:
                s = 0.0
                for j, v in zip(idx, vals):
                    s += w[j] * v
            g = y * s - 1.0
            if g != g:
                raise FloatingPointError("non-finite gradient during training")
            a = alphas[i]
            u = uppers[i]
            if a <= 0.0:
                pg = g if g < 0.0 else 0.0
            elif a >= u:
                pg = g if g > 0.0 else 0.0
            else:
                pg = g
            if pg != 0.0:
                apg = -pg if pg < 0.0 else pg
                if apg > max_violation:
                    max_violation = apg
                q = q_diag[i]
                if q > 0.0:
                    new_a = a - g / q
                else:
                    # zero-norm row: any alpha leaves w unchanged, jump to the
                    # bound the gradient points at so the violation clears
                    new_a = u if g < 0.0 else 0.0
                if new_a < 0.0:
                    new_a = 0.0
                elif new_a > u:
                    new_a = u
                if new_a != a:
                    delta = (new_a - a) * y
                    if vals is None:
                        for j in idx:
                            w[j] += delta
                    else:
                        for j, v in zip(idx, vals):
                            w[j] += delta * v
                    alphas[i] = new_a
        violation = max_violation
        if max_violation < cfg.tolerance:
            break

    if not all(map(math.isfinite, w)):
        raise FloatingPointError("training produced non-finite weights")
    return DualSolution(tuple(w), tuple(alphas), epochs_run, violation)


def train(
    data: Sequence[Example],
    cfg: TrainConfig,
    n_features: int,
    *,
    feature_set_digest: str = "",
    fit_bias: bool = True,
) -> Model:
    """Fit a model on (vector, label) pairs of dimension ``n_features``."""
    sol = solve_dual(data, cfg, n_features, fit_bias=fit_bias)
    meta = TrainMeta(cfg.C, cfg.wi, cfg.seed, sol.epochs, sol.final_violation)
    return Model(sol.weights, feature_set_digest, meta)


def predict(
    model: Model,
    x: SparseVector,
    *,
    expected_digest: str | None = None,
) -> tuple[Stance, float]:
    """Margin-sign classification; a margin of exactly 0 goes to supporting."""
    if expected_digest is not None and expected_digest != model.feature_set_digest:
        raise ValueError("feature set digest mismatch between model and vectorizer")
    w = model.weights
    if x.indices and x.indices[-1] >= len(w) - 1:
        raise ValueError("vector index out of range for this model")
    margin = w[-1]
    for j, v in zip(x.indices, x.values):
        margin += w[j] * v
    stance = LABEL_MAP[-1] if margin < 0.0 else LABEL_MAP[1]
    return stance, margin


def dual_objective(
    data: Sequence[Example],
    alphas: Sequence[float],
    cfg: TrainConfig,
    *,
    fit_bias: bool = True,
) -> float:
    """Standard dual value 1/2 ||w(a)||^2 - sum(a); alphas must sit in the box."""
    if len(alphas) != len(data):
        raise ValueError("one alpha per example required")
    _check_labels(data)
    for a, (_x, y) in zip(alphas, data):
        if a < 0.0 or a > _upper_bound(y, cfg):
            raise ValueError("alpha outside the feasible box")
    acc: dict[int, float] = {}
    bias_key = -1  # cannot collide with real feature indices
    for (vec, y), a in zip(data, alphas):
        coef = a * y
        if coef == 0.0:
            continue
        for j, v in zip(vec.indices, vec.values):
            acc[j] = acc.get(j, 0.0) + coef * v
        if fit_bias:
            acc[bias_key] = acc.get(bias_key, 0.0) + coef
    sq = math.fsum(v * v for v in acc.values())
    return 0.5 * sq - math.fsum(alphas)


# ---------------------------------------------------------------------------
# model file: header, K/C/wi/seed/digest lines, then K+1 weights

def save_model(path: str | Path, model: Model) -> None:
    lines = [
        _MODEL_HEADER,
        f"K {model.n_features}",
        f"C {model.train_meta.C:.17g}",
        f"wi {model.train_meta.wi:.17g}",
        f"seed {model.train_meta.seed}",
        f"digest {model.feature_set_digest}",
    ]
    lines.extend(f"{w:.17g}" for w in model.weights)
    Path(path).write_text("".join(l + "\n" for l in lines), encoding="utf-8", newline="\n")


def _header_value(line: str, key: str) -> str:
    prefix = key + " "
    if not line.startswith(prefix):
        raise ValueError(f"model file: expected '{key} ...' line, got {line!r}")
    return line[len(prefix):]


def load_model(path: str | Path) -> Model:
    """Read a saved model; epochs/violation are not stored in the file."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if len(lines) < 7:
        raise ValueError("model file truncated")
    if lines[0] != _MODEL_HEADER:
        raise ValueError(f"not a model file (bad header {lines[0]!r})")
    k = int(_header_value(lines[1], "K"))
    c = float(_header_value(lines[2], "C"))
    wi = float(_header_value(lines[3], "wi"))
    seed = int(_header_value(lines[4], "seed"))
    digest = _header_value(lines[5], "digest")
    weight_lines = [l for l in lines[6:] if l.strip()]
    if len(weight_lines) != k + 1:
        raise ValueError(f"model file: expected {k + 1} weights, found {len(weight_lines)}")
    weights = tuple(float(l) for l in weight_lines)
    if not all(map(math.isfinite, weights)):
        raise ValueError("model file contains non-finite weights")
    meta = TrainMeta(c, wi, seed, 0, math.nan)
    return Model(weights, digest, meta)
