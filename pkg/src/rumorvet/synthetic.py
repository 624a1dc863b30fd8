"""Deterministic synthetic corpora with planted lexical signal.

Real-scale scores depend on stochastic transformer fine-tuning on large
external corpora, which no desk-scale run can reproduce. This module
builds the substitute benchmark: a corpus where the generating process
plants each channel's signal in a disjoint lexicon, so the analytically
correct pipeline is known and a sound implementation must recover it.

Five thread cells:

  true_certain    assured tone + truth lexicon, no replies
  false_certain   assured tone + lie lexicon, no replies
  true_crowd      hedged tone, agreeing primary replies
  false_crowd     hedged tone, disagreeing primary replies
  unverified      hedged tone, no replies

Thread text separates the cells only along the certainty and lie axes;
crowd cells are textually identical across veracity, so only the reply
channel can split them, and certain cells have no replies, so only the
thread-text channel can score them. Routing both channels correctly is
therefore necessary for a high score, which is what the double-vs-single
comparison leans on.

The module also emits matching pretraining corpora (hedge sentences,
deception texts, agreement pairs) and can materialize everything on disk
in the ingestion layout, which gives the CLI an end-to-end fixture.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

from .agreement import STANCE_AGREE, STANCE_DISAGREE, LabeledPair
from .certainty import CERTAIN, UNCERTAIN
from .corpus import PLATFORM_TWITTER, Conversation, Post, Reply, clean_text
from .lie import LabeledText
from .probs import FALSE, TRUE, UNVERIFIED

# Disjoint lexicons; each channel's decision must ride on exactly one.
FILLER = (
    "report", "event", "city", "people", "station", "local",
    "area", "group", "update", "story", "street", "crowd",
)
HEDGE = (
    "maybe", "perhaps", "possibly", "allegedly", "unconfirmed", "unsure",
    "might", "rumored", "doubtful", "speculation", "apparently", "supposedly",
)
ASSURANCE = (
    "confirmed", "definitely", "official", "verified", "clearly", "certain",
    "documented", "established", "conclusive", "proven", "firsthand", "witnessed",
)
TRUTH = (
    "accurate", "genuine", "authentic", "factual", "truthful", "legitimate",
    "reliable", "honest", "credible", "sound",
)
LIE = (
    "hoax", "fabricated", "scam", "fake", "debunked", "misleading",
    "bogus", "doctored", "fraudulent", "planted",
)
AGREE = (
    "agree", "exactly", "correct", "right", "indeed", "absolutely",
    "agreed", "affirmative", "seconded", "concur",
)
DISAGREE = (
    "wrong", "nonsense", "doubt", "disagree", "impossible", "denied",
    "untrue", "refuted", "objection", "disputed",
)

CELL_TRUE_CERTAIN = "true_certain"
CELL_FALSE_CERTAIN = "false_certain"
CELL_TRUE_CROWD = "true_crowd"
CELL_FALSE_CROWD = "false_crowd"
CELL_UNVERIFIED = "unverified"
CELLS = (
    CELL_TRUE_CERTAIN,
    CELL_FALSE_CERTAIN,
    CELL_TRUE_CROWD,
    CELL_FALSE_CROWD,
    CELL_UNVERIFIED,
)

_CELL_GOLD = {
    CELL_TRUE_CERTAIN: TRUE,
    CELL_FALSE_CERTAIN: FALSE,
    CELL_TRUE_CROWD: TRUE,
    CELL_FALSE_CROWD: FALSE,
    CELL_UNVERIFIED: UNVERIFIED,
}

_BASE_TIME = int(datetime(2019, 1, 7, 12, 0, tzinfo=timezone.utc).timestamp())


@dataclass(frozen=True)
class SyntheticSpec:
    """Size and seed knobs for one generated benchmark."""

    n_train_per_cell: int = 30
    n_test_per_cell: int = 12
    replies_per_thread: int = 4
    pretrain_per_class: int = 60
    signal_words: int = 4
    filler_words: int = 5
    seed: int = 0

    def __post_init__(self):
        for name in (
            "n_train_per_cell",
            "n_test_per_cell",
            "replies_per_thread",
            "pretrain_per_class",
            "signal_words",
            "filler_words",
        ):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


@dataclass(frozen=True)
class SyntheticCorpus:
    """Everything one experiment needs, already in memory."""

    train: tuple[Conversation, ...]
    test: tuple[Conversation, ...]
    hedge: tuple[LabeledText, ...]
    deception: tuple[LabeledText, ...]
    agreement: tuple[LabeledPair, ...]

    def gold(self, split: str) -> dict[str, str]:
        convs = self.train if split == "train" else self.test
        return {c.thread.id: c.gold_label for c in convs}


def _sentence(rng: random.Random, lexicons: Sequence[tuple[Sequence[str], int]]) -> str:
    words: list[str] = []
    for lexicon, k in lexicons:
        words.extend(rng.choice(lexicon) for _ in range(k))
    rng.shuffle(words)
    return " ".join(words)


def _post(post_id: str, text: str, created: int) -> Post:
    return Post(
        id=post_id,
        text_raw=text,
        text_clean=clean_text(text),
        created_at=datetime.fromtimestamp(created, tz=timezone.utc),
        platform=PLATFORM_TWITTER,
    )


def _thread_text(rng: random.Random, cell: str, spec: SyntheticSpec) -> str:
    fill = (FILLER, spec.filler_words)
    if cell == CELL_TRUE_CERTAIN:
        plan = [(ASSURANCE, spec.signal_words), (TRUTH, spec.signal_words), fill]
    elif cell == CELL_FALSE_CERTAIN:
        plan = [(ASSURANCE, spec.signal_words), (LIE, spec.signal_words), fill]
    else:
        plan = [(HEDGE, spec.signal_words), fill]
    return _sentence(rng, plan)


def _reply_lexicon(cell: str):
    if cell == CELL_TRUE_CROWD:
        return AGREE
    if cell == CELL_FALSE_CROWD:
        return DISAGREE
    return None


def make_conversations(
    spec: SyntheticSpec, split: str, n_per_cell: int, rng: random.Random
) -> list[Conversation]:
    """n_per_cell threads per cell, ids stable under the split name."""
    convs: list[Conversation] = []
    serial = 0
    for cell in CELLS:
        for i in range(n_per_cell):
            tid = f"syn-{split}-{cell}-{i:03d}"
            created = _BASE_TIME + serial * 7200
            serial += 1
            thread = _post(tid, _thread_text(rng, cell, spec), created)
            replies = []
            lexicon = _reply_lexicon(cell)
            if lexicon is not None:
                for j in range(spec.replies_per_thread):
                    reply = _post(
                        f"{tid}-r{j:02d}",
                        _sentence(
                            rng, [(lexicon, spec.signal_words), (FILLER, spec.filler_words)]
                        ),
                        created + 300 * (j + 1),
                    )
                    replies.append(Reply(post=reply, parent_id=tid, is_primary=True))
            convs.append(
                Conversation(
                    thread=thread, replies=tuple(replies), gold_label=_CELL_GOLD[cell]
                )
            )
    return convs


def make_hedge_corpus(spec: SyntheticSpec, rng: random.Random) -> list[LabeledText]:
    out: list[LabeledText] = []
    fill = (FILLER, spec.filler_words)
    for _ in range(spec.pretrain_per_class):
        out.append((_sentence(rng, [(ASSURANCE, spec.signal_words), fill]), CERTAIN))
        out.append((_sentence(rng, [(HEDGE, spec.signal_words), fill]), UNCERTAIN))
    return out


def make_deception_corpus(spec: SyntheticSpec, rng: random.Random) -> list[LabeledText]:
    out: list[LabeledText] = []
    fill = (FILLER, spec.filler_words)
    for _ in range(spec.pretrain_per_class):
        out.append((_sentence(rng, [(TRUTH, spec.signal_words), fill]), "truthful"))
        out.append((_sentence(rng, [(LIE, spec.signal_words), fill]), "deceptive"))
    return out


def make_agreement_corpus(spec: SyntheticSpec, rng: random.Random) -> list[LabeledPair]:
    out: list[LabeledPair] = []
    fill = (FILLER, spec.filler_words)
    for _ in range(spec.pretrain_per_class):
        claim = _sentence(rng, [fill])
        out.append(
            ((claim, _sentence(rng, [(AGREE, spec.signal_words), fill])), STANCE_AGREE)
        )
        claim = _sentence(rng, [fill])
        out.append(
            ((claim, _sentence(rng, [(DISAGREE, spec.signal_words), fill])), STANCE_DISAGREE)
        )
    return out


def make_corpus(spec: SyntheticSpec) -> SyntheticCorpus:
    """The full benchmark; every draw comes from one seeded generator."""
    rng = random.Random(spec.seed)
    return SyntheticCorpus(
        train=tuple(make_conversations(spec, "train", spec.n_train_per_cell, rng)),
        test=tuple(make_conversations(spec, "test", spec.n_test_per_cell, rng)),
        hedge=tuple(make_hedge_corpus(spec, rng)),
        deception=tuple(make_deception_corpus(spec, rng)),
        agreement=tuple(make_agreement_corpus(spec, rng)),
    )


# -- on-disk materialization ------------------------------------------------


def _post_json(post: Post) -> dict:
    return {
        "id_str": post.id,
        "text": post.text_raw,
        "created_at": post.created_at.isoformat(),
    }


def write_conversation_dir(conv: Conversation, root: Path) -> Path:
    """One ingestion-layout directory for a conversation."""
    d = root / conv.thread.id
    (d / "source-tweet").mkdir(parents=True, exist_ok=True)
    (d / "source-tweet" / f"{conv.thread.id}.json").write_text(
        json.dumps(_post_json(conv.thread), sort_keys=True) + "\n", encoding="utf-8"
    )
    if conv.replies:
        (d / "replies").mkdir(exist_ok=True)
    children: dict[str, dict] = {}
    nodes: dict[str, dict] = {conv.thread.id: children}
    for r in conv.replies:
        (d / "replies" / f"{r.post.id}.json").write_text(
            json.dumps(_post_json(r.post), sort_keys=True) + "\n", encoding="utf-8"
        )
        node: dict[str, dict] = {}
        nodes[r.parent_id][r.post.id] = node
        nodes[r.post.id] = node
    (d / "structure.json").write_text(
        json.dumps({conv.thread.id: children}, sort_keys=True) + "\n", encoding="utf-8"
    )
    return d


def write_key_file(convs: Iterable[Conversation], path: Path) -> None:
    labels = {c.thread.id: c.gold_label for c in convs if c.gold_label is not None}
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps({"subtaskbenglish": labels}, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )


def write_tsv(rows: Iterable[tuple], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for text, label in rows:
        if isinstance(text, tuple):
            lines.append("\t".join((*text, label)))
        else:
            lines.append(f"{text}\t{label}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def materialize(spec: SyntheticSpec, root) -> dict:
    """Write the whole benchmark under root; returns per-artifact counts."""
    root = Path(root)
    corpus = make_corpus(spec)
    for conv in corpus.train:
        write_conversation_dir(conv, root / "train")
    for conv in corpus.test:
        write_conversation_dir(conv, root / "test")
    write_key_file(corpus.train, root / "keys" / "train-key.json")
    write_key_file(corpus.test, root / "keys" / "test-key.json")
    write_tsv(corpus.hedge, root / "corpora" / "hedge.tsv")
    write_tsv(corpus.deception, root / "corpora" / "deception.tsv")
    write_tsv(corpus.agreement, root / "corpora" / "agreement.tsv")
    return {
        "train_threads": len(corpus.train),
        "test_threads": len(corpus.test),
        "hedge_examples": len(corpus.hedge),
        "deception_examples": len(corpus.deception),
        "agreement_examples": len(corpus.agreement),
    }
