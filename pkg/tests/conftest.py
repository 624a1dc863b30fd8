"""Shared fixtures: the small synthetic benchmark and trained backends."""

from __future__ import annotations

import pytest

from rumorvet.backends import ReferenceBackend
from rumorvet.pipeline import MODES, TrainingPlan, train_pipeline
from rumorvet.synthetic import SyntheticSpec, make_corpus


def reference_factory(classes, input_kind, seed):
    return ReferenceBackend(classes, input_kind=input_kind, seed=seed)


SMALL_SPEC = SyntheticSpec(
    n_train_per_cell=12, n_test_per_cell=6, replies_per_thread=3, pretrain_per_class=30
)


@pytest.fixture(scope="session")
def syn_corpus():
    return make_corpus(SMALL_SPEC)


@pytest.fixture(scope="session")
def trained(syn_corpus):
    """Trained backends per mode, shared across the suite (read-only)."""

    out = {}
    for mode in MODES:
        out[mode] = train_pipeline(
            mode,
            list(syn_corpus.train),
            list(syn_corpus.hedge),
            list(syn_corpus.deception),
            list(syn_corpus.agreement),
            reference_factory,
            plan=TrainingPlan(),
            seed=0,
        )
    return out


@pytest.fixture()
def tiny_backend():
    """A fitted 2-class text backend over a separable toy vocabulary."""
    from rumorvet.backends import TrainingRecipe, labeled_examples

    backend = ReferenceBackend(("yes", "no"), seed=0)
    examples = [("good fine great", "yes"), ("bad awful poor", "no")] * 4
    recipe = TrainingRecipe(epochs=5, batch_size=2, learning_rate=5e-5, label_smoothing=0.1)
    backend.fit(labeled_examples(examples, ("yes", "no")), recipe)
    return backend
