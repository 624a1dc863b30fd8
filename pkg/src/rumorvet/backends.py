"""Pluggable sequence-classification backends.

Every channel talks to a ClassifierBackend: fit on (input, target
distribution) examples under a TrainingRecipe, then predict a ProbVector.
Inputs are single texts or (text, text) pairs depending on the backend's
input kind. Calling fit twice continues training from the current state,
which is how the pretrain-then-fine-tune recipes are realized.

The reference backend is a hashed bag-of-words softmax classifier trained
by deterministic minibatch gradient descent, so the whole pipeline runs
and reproduces bit-for-bit without any pretrained model download. A
transformer-based backend implements the same interface (see
rumorvet.transformer) and is exercised only by opt-in runs.
"""

from __future__ import annotations

import abc
import json
import re
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .errors import ModelFormatError, UntrainedBackend
from .probs import ProbVector, one_hot, smooth_labels

BackendInput = Union[str, tuple[str, str]]

INPUT_TEXT = "text"
INPUT_PAIR = "pair"

MODEL_FORMAT_VERSION = 1

_TOKEN_RE = re.compile(r"\w+")


@dataclass(frozen=True)
class TrainingRecipe:
    """Hyperparameters for one training step (pretrain or fine-tune)."""

    epochs: int
    batch_size: int
    learning_rate: float
    label_smoothing: float
    optimizer: str = "adam"

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.learning_rate <= 0.0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not 0.0 <= self.label_smoothing < 1.0:
            raise ValueError(f"label_smoothing must be in [0, 1), got {self.label_smoothing}")

    def to_dict(self) -> dict:
        return {
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "label_smoothing": self.label_smoothing,
            "optimizer": self.optimizer,
        }


class ClassifierBackend(abc.ABC):
    """Behavior contract shared by all classification backends.

    fit() smooths the given hard targets itself (recipe.label_smoothing),
    so channels pass one-hot targets. predict() must be deterministic for a
    fixed trained state, safe for concurrent read-only use, and return a
    distribution over self.classes in order.
    """

    classes: tuple[str, ...]
    input_kind: str

    @abc.abstractmethod
    def fit(self, examples: Sequence[tuple[BackendInput, ProbVector]], recipe: TrainingRecipe) -> None:
        """Train (or continue training) on the given examples."""

    @abc.abstractmethod
    def predict(self, x: BackendInput) -> ProbVector:
        """Distribution over self.classes for one input."""


def labeled_examples(
    pairs: Sequence[tuple[BackendInput, str]], classes: tuple[str, ...]
) -> list[tuple[BackendInput, ProbVector]]:
    """Turn (input, label) pairs into the hard-target form fit() expects."""
    return [(x, one_hot(label, classes)) for x, label in pairs]


class ReferenceBackend(ClassifierBackend):
    """Deterministic hashed bag-of-words softmax classifier.

    Tokens are lowercased \\w+ runs hashed with crc32 into a fixed bucket
    space; pair inputs get side prefixes so thread and reply vocabularies
    stay separate. Training is minibatch gradient descent on the smoothed
    cross-entropy, iterating examples in their given order. The recipe's
    epochs, batch size and label smoothing are honored; learning_rate and
    optimizer are transformer-scale knobs that a linear model cannot use,
    so they are recorded for provenance only and the update uses a fixed
    internal step size.
    """

    backend_kind = "reference"

    def __init__(
        self,
        classes: Sequence[str],
        input_kind: str = INPUT_TEXT,
        n_buckets: int = 1 << 16,
        seed: int = 0,
        step_size: float = 0.5,
    ):
        if input_kind not in (INPUT_TEXT, INPUT_PAIR):
            raise ValueError(f"unknown input kind {input_kind!r}")
        if len(classes) not in (2, 3):
            raise ValueError("reference backend supports 2 or 3 classes")
        self.classes = tuple(classes)
        self.input_kind = input_kind
        self.n_buckets = int(n_buckets)
        self.seed = int(seed)
        self.step_size = float(step_size)
        self._weights: dict[int, np.ndarray] | None = None
        self._bias: np.ndarray | None = None
        self._recipes: list[dict] = []

    # -- features ----------------------------------------------------------

    def _bucket(self, token: str) -> int:
        return zlib.crc32(token.encode("utf-8")) % self.n_buckets

    def _feature_counts(self, x: BackendInput) -> dict[int, float]:
        if self.input_kind == INPUT_TEXT:
            if not isinstance(x, str):
                raise ValueError(f"text backend expects a string input, got {type(x).__name__}")
            sides = [("", x)]
        else:
            if not (isinstance(x, tuple) and len(x) == 2):
                raise ValueError("pair backend expects a (text, text) input")
            sides = [("a|", x[0]), ("b|", x[1])]
        counts: dict[int, float] = {}
        for prefix, text in sides:
            for token in _TOKEN_RE.findall(text.lower()):
                b = self._bucket(prefix + token)
                counts[b] = counts.get(b, 0.0) + 1.0
        return counts

    # -- training ----------------------------------------------------------

    def _ensure_initialized(self) -> None:
        if self._bias is None:
            rng = np.random.default_rng(self.seed)
            self._weights = {}
            # Tiny seeded bias noise: deterministic tie-breaking without
            # populating the (sparse) weight table.
            self._bias = rng.normal(0.0, 1e-9, len(self.classes))

    def _logits(self, counts: dict[int, float]) -> np.ndarray:
        z = self._bias.copy()
        for b, c in counts.items():
            row = self._weights.get(b)
            if row is not None:
                z += c * row
        return z

    def fit(self, examples: Sequence[tuple[BackendInput, ProbVector]], recipe: TrainingRecipe) -> None:
        if not examples:
            raise ValueError("fit needs at least one example")
        k = len(self.classes)
        prepared = []
        for x, target in examples:
            if target.k != k:
                raise ValueError(f"target has {target.k} components, backend has {k} classes")
            smoothed = smooth_labels(target, recipe.label_smoothing)
            prepared.append((self._feature_counts(x), np.array(smoothed.values)))
        self._ensure_initialized()
        for _ in range(recipe.epochs):
            for start in range(0, len(prepared), recipe.batch_size):
                self._step(prepared[start : start + recipe.batch_size])
        self._recipes.append({"n_examples": len(examples), "recipe": recipe.to_dict()})

    def _step(self, batch) -> None:
        scale = self.step_size / len(batch)
        k = len(self.classes)
        bias_grad = np.zeros(k)
        weight_grad: dict[int, np.ndarray] = {}
        for counts, target in batch:
            err = _softmax(self._logits(counts)) - target
            bias_grad += err
            for b, c in counts.items():
                g = weight_grad.get(b)
                if g is None:
                    g = weight_grad[b] = np.zeros(k)
                g += c * err
        for b, g in weight_grad.items():
            row = self._weights.get(b)
            if row is None:
                row = self._weights[b] = np.zeros(k)
            row -= scale * g
        self._bias -= scale * bias_grad

    # -- inference ---------------------------------------------------------

    def predict(self, x: BackendInput) -> ProbVector:
        if self._bias is None or not self._recipes:
            raise UntrainedBackend("reference backend has not been fitted")
        p = _softmax(self._logits(self._feature_counts(x)))
        return ProbVector(tuple(float(v) for v in p))

    # -- persistence -------------------------------------------------------

    def payload(self) -> dict:
        if self._bias is None or not self._recipes:
            raise UntrainedBackend("cannot save an unfitted backend")
        return {
            "classes": list(self.classes),
            "input_kind": self.input_kind,
            "n_buckets": self.n_buckets,
            "seed": self.seed,
            "step_size": self.step_size,
            "bias": [float(v) for v in self._bias],
            "weights": {
                str(b): [float(v) for v in row] for b, row in sorted(self._weights.items())
            },
            "recipes": self._recipes,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "ReferenceBackend":
        backend = cls(
            classes=tuple(payload["classes"]),
            input_kind=payload["input_kind"],
            n_buckets=payload["n_buckets"],
            seed=payload["seed"],
            step_size=payload["step_size"],
        )
        backend._bias = np.array([float(v) for v in payload["bias"]])
        backend._weights = {
            int(b): np.array([float(v) for v in row]) for b, row in payload["weights"].items()
        }
        backend._recipes = list(payload["recipes"])
        return backend


def _softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max())
    return e / e.sum()


def save_model(backend, path) -> None:
    """Persist a backend to a single self-describing model file."""
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "backend_kind": backend.backend_kind,
        "payload": backend.payload(),
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def load_model(path) -> ClassifierBackend:
    """Load a backend from a model file written by save_model."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"cannot read model file {path}: {exc}") from exc
    version = doc.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelFormatError(f"{path}: unsupported model format version {version!r}")
    kind = doc.get("backend_kind")
    if kind == ReferenceBackend.backend_kind:
        return ReferenceBackend.from_payload(doc["payload"])
    if kind == "transformer":
        from .transformer import TransformerBackend

        return TransformerBackend.from_payload(doc["payload"])
    raise ModelFormatError(f"{path}: unknown backend kind {kind!r}")
