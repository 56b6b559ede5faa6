"""Text normalization: simplification, entity stripping, dictionary
segmentation, stopword removal and advertisement filtering."""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass, replace
from datetime import datetime
from pathlib import Path
from typing import Iterable, Optional

from .corpus import Tweet, format_timestamp, parse_timestamp
from .resources import CharMap, Resources, TermList
from .stance import Stance

MAX_MATCH = 8  # longest lexicon entry the segmenter will consider

_URL_RE = re.compile(r"https?://\S+")
_MENTION_RE = re.compile(r"@\w{0,30}")
_BRACKET_RE = re.compile(r"\[[^\[\]]{0,8}\]")
_ASCII_EMOTICON_RE = re.compile(r":-\)|:-\(|:\)|:\(")
_PLATFORM_MARKERS = ("转发微博", "回复")
_WS_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class Document:
    """A preprocessed tweet: token sequence plus carry-through identifiers."""

    tweet_id: str
    user_id: str
    created_at: datetime
    tokens: tuple[str, ...]
    label: Optional[Stance] = None


def to_simplified(text: str, char_map: CharMap) -> str:
    return "".join(char_map.get(ch, ch) for ch in text)


def strip_entities(text: str) -> str:
    """Drop URLs, @mentions, [bracketed] emoticon codes, ASCII emoticons and
    platform markers, then collapse whitespace runs.  Never grows the text."""
    text = _URL_RE.sub("", text)
    text = _MENTION_RE.sub("", text)
    text = _BRACKET_RE.sub("", text)
    text = _ASCII_EMOTICON_RE.sub("", text)
    for marker in _PLATFORM_MARKERS:
        text = text.replace(marker, "")
    return _WS_RE.sub(" ", text).strip()


def segment(text: str, lexicon: TermList) -> list[str]:
    """Forward maximum matching: longest lexicon prefix wins, single character
    fallback.  Concatenating the tokens reproduces the input exactly."""
    tokens: list[str] = []
    i, n = 0, len(text)
    limit_cap = min(MAX_MATCH, lexicon.max_term_len)
    while i < n:
        match = None
        # length-1 lookups are skipped: a single-char lexicon hit and the
        # fallback emit the same token either way
        for length in range(min(limit_cap, n - i), 1, -1):
            cand = text[i:i + length]
            if cand in lexicon:
                match = cand
                break
        if match is None:
            match = text[i]
        tokens.append(match)
        i += len(match)
    return tokens


def _is_noise_token(token: str) -> bool:
    # pure punctuation/symbols or pure whitespace (incl. control chars)
    return all(unicodedata.category(ch)[0] in "PSZC" for ch in token)


def remove_stopwords(tokens: Iterable[str], stoplist: TermList) -> list[str]:
    return [t for t in tokens if t not in stoplist and not _is_noise_token(t)]


def is_advertisement(tokens: Iterable[str], adlist: TermList) -> bool:
    return any(t in adlist for t in tokens)


def preprocess_tweet(tweet: Tweet, resources: Resources) -> Optional[Document]:
    """Full pipeline for one tweet; None when filtered out (ad or empty)."""
    text = to_simplified(tweet.text, resources.char_map)
    text = strip_entities(text)
    tokens = segment(text, resources.segment_lexicon)
    tokens = remove_stopwords(tokens, resources.stopwords)
    if not tokens or is_advertisement(tokens, resources.ad_keywords):
        return None
    return Document(tweet.id, tweet.user_id, tweet.created_at, tuple(tokens))


# ---------------------------------------------------------------------------
# document JSONL (pipeline-internal file format)

def document_to_obj(doc: Document) -> dict:
    obj: dict = {
        "tweet_id": doc.tweet_id,
        "user_id": doc.user_id,
        "created_at": format_timestamp(doc.created_at),
        "tokens": list(doc.tokens),
    }
    if doc.label is not None:
        obj["label"] = doc.label.wire
    return obj


def document_from_obj(obj: object) -> Document:
    if not isinstance(obj, dict):
        raise ValueError("document record must be a JSON object")
    tweet_id = obj.get("tweet_id")
    user_id = obj.get("user_id")
    tokens = obj.get("tokens")
    if not isinstance(tweet_id, str) or not tweet_id:
        raise ValueError("missing or empty tweet_id")
    if not isinstance(user_id, str) or not user_id:
        raise ValueError("missing or empty user_id")
    if not isinstance(tokens, list) or not all(isinstance(t, str) and t for t in tokens):
        raise ValueError("tokens must be a list of non-empty strings")
    label = obj.get("label")
    return Document(
        tweet_id=tweet_id,
        user_id=user_id,
        created_at=parse_timestamp(obj.get("created_at")),
        tokens=tuple(tokens),
        label=None if label is None else Stance.from_wire(label),
    )


def write_documents(path: str | Path, docs: Iterable[Document]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doc in docs:
            fh.write(json.dumps(document_to_obj(doc), ensure_ascii=False, separators=(",", ":")))
            fh.write("\n")


def read_documents(path: str | Path) -> list[Document]:
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                docs.append(document_from_obj(json.loads(line)))
            except (ValueError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return docs


def relabel(doc: Document, label: Optional[Stance]) -> Document:
    return replace(doc, label=label)
