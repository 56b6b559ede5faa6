from __future__ import annotations

from datetime import datetime

import pytest
from hypothesis import HealthCheck, settings

from tcm_stance.preprocess import Document
from tcm_stance.resources import Resources, TermList, load_resources
from tcm_stance.stance import Stance
from tcm_stance.supervision import LabeledDataset

settings.register_profile(
    "suite", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("suite")

TS = datetime(2013, 5, 17, 12, 0, 0)


def make_doc(tweet_id, user_id, tokens, label=None, created_at=TS) -> Document:
    return Document(tweet_id, user_id, created_at, tuple(tokens), label)


def make_dataset(rows) -> LabeledDataset:
    """rows: (user_id, tokens, stance) triples; tweet ids are positional."""
    docs = []
    users = {}
    for i, (user_id, tokens, stance) in enumerate(rows):
        docs.append(make_doc(f"t{i:04d}", user_id, tokens, stance))
        users[user_id] = stance
    return LabeledDataset(tuple(docs), users)


def make_resources(lexicon=(), stopwords=(), ads=(), terminology=(),
                   char_map=None, tag_lexicon=None) -> Resources:
    """In-memory Resources with the same lexicon merge the loader applies."""
    stop = TermList.of(stopwords)
    ad = TermList.of(ads)
    term = TermList.of(terminology)
    seg = TermList.of(lexicon).union(term).union(stop).union(ad)
    return Resources(
        char_map=dict(char_map or {}),
        segment_lexicon=seg,
        stopwords=stop,
        ad_keywords=ad,
        terminology=term,
        tag_lexicon=dict(tag_lexicon or {}),
    )


# A small linearly separable corpus: plenty of users per class so stratified
# folds stay populated, one shared token so the vocabulary overlaps.
def separable_dataset(users_per_class: int = 8, docs_per_user: int = 3) -> LabeledDataset:
    rows = []
    for u in range(users_per_class):
        for d in range(docs_per_user):
            rows.append((f"su{u}", ("经络", "穴位", "有效", f"杂{d}"), Stance.SUPPORTING))
    for u in range(users_per_class):
        for d in range(docs_per_user):
            rows.append((f"ou{u}", ("经络", "穴位", "骗局", f"杂{d}"), Stance.OPPOSING))
    return make_dataset(rows)


@pytest.fixture(scope="session")
def default_resources() -> Resources:
    return load_resources()
