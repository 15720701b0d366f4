"""Sentence segmentation, tokenization and coarse part-of-speech tagging.

The built-in rule tagger is deterministic and dependency-free; it exists so the
pipeline, tests and demos run offline. Production tagging plugs in any service
speaking the tagger wire protocol: POST /tag with ``{"sentences": [str, ...]}``
returning ``{"sentences": [{"tokens": [{"text", "start", "end", "pos"}, ...]}]}``
where ``pos`` is drawn from the universal coarse set below.

Tokenizer rules (documented because tests hand-count against them):

* listed abbreviations keep their trailing period as one token ("Corp.", "U.S.");
* number runs, including internal ``.``/``,`` separators, are one token;
* letter runs with internal apostrophes or hyphens are one token;
* every other non-space character is a single-character token.

Sentence splits happen after ``.!?`` followed by whitespace and an uppercase
letter, unless the period belongs to a listed abbreviation. Sentences partition
the input: every character belongs to exactly one sentence.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Protocol, Sequence

import requests

POS_TAGS = frozenset(
    {"PROPN", "NOUN", "VERB", "ADJ", "ADV", "NUM", "PRON", "DET", "ADP", "AUX", "PUNCT", "OTHER"}
)

ABBREVIATIONS = (
    "U.S.",
    "Corp.",
    "Inc.",
    "Ltd.",
    "Co.",
    "Mr.",
    "Mrs.",
    "Ms.",
    "Dr.",
    "Prof.",
    "Jr.",
    "Sr.",
    "St.",
)

_TOKEN_RE = re.compile(
    "|".join(
        [
            *(re.escape(a) for a in sorted(ABBREVIATIONS, key=len, reverse=True)),
            r"\d+(?:[.,]\d+)*",
            r"[^\W\d_]+(?:['\-][^\W\d_]+)*",
            r"\S",
        ]
    )
)


@dataclass(frozen=True)
class Token:
    text: str
    char_start: int
    char_end: int
    pos: str | None = None


@dataclass(frozen=True)
class Sentence:
    text: str
    tokens: tuple[Token, ...]
    index: int


class TaggerBackend(Protocol):
    def tag_sentences(self, texts: Sequence[str]) -> list[list[Token]]:
        """Tokenize and tag each sentence text; offsets are sentence-relative."""
        ...


class TaggerTransportError(RuntimeError):
    """The tagger service could not be reached or answered incorrectly."""

    def __init__(self, message: str, retryable: bool):
        self.retryable = retryable
        super().__init__(message)


def _ends_with_abbreviation(text: str, dot_index: int) -> bool:
    end = dot_index + 1
    for abbr in ABBREVIATIONS:
        start = end - len(abbr)
        if start < 0 or text[start:end] != abbr:
            continue
        if start == 0 or not (text[start - 1].isalnum() or text[start - 1] == "."):
            return True
    return False


def _sentence_starts(text: str) -> list[int]:
    starts = [0]
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch not in ".!?":
            i += 1
            continue
        if ch == "." and _ends_with_abbreviation(text, i):
            i += 1
            continue
        j = i + 1
        while j < n and text[j] in ".!?":
            j += 1
        k = j
        while k < n and text[k].isspace():
            k += 1
        if k > j and k < n and text[k].isupper():
            starts.append(k)
        i = j
    return starts


def tokenize(text: str) -> tuple[Token, ...]:
    return tuple(
        Token(text=m.group(0), char_start=m.start(), char_end=m.end())
        for m in _TOKEN_RE.finditer(text)
    )


def segment_and_tokenize(text: str) -> list[Sentence]:
    """Split into sentences covering every input character; tokens are untagged."""
    if not text:
        return []
    starts = _sentence_starts(text)
    sentences = []
    for idx, start in enumerate(starts):
        end = starts[idx + 1] if idx + 1 < len(starts) else len(text)
        chunk = text[start:end]
        sentences.append(Sentence(text=chunk, tokens=tokenize(chunk), index=idx))
    return sentences


# --- built-in rule tagger ----------------------------------------------------

_LEXICON = {
    **{w: "DET" for w in ["the", "a", "an", "this", "that", "these", "those", "each", "every", "some", "any", "no"]},
    **{
        w: "ADP"
        for w in [
            "in", "on", "at", "of", "to", "from", "by", "with", "for", "about",
            "over", "under", "after", "before", "between", "during", "into",
            "through", "against", "without", "within", "upon", "across",
        ]
    },
    **{
        w: "PRON"
        for w in [
            "i", "you", "he", "she", "it", "we", "they", "me", "him", "her",
            "us", "them", "his", "hers", "its", "their", "our", "your", "my",
            "mine", "yours", "ours", "theirs", "who", "whom", "whose", "which",
            "what", "someone", "somebody", "something", "anyone", "anybody",
            "anything", "everyone", "everybody", "everything", "nobody",
            "nothing", "one",
        ]
    },
    **{
        w: "AUX"
        for w in [
            "is", "am", "are", "was", "were", "be", "been", "being", "have",
            "has", "had", "do", "does", "did", "will", "would", "can", "could",
            "shall", "should", "may", "might", "must",
        ]
    },
    **{
        w: "ADV"
        for w in [
            "very", "not", "never", "always", "often", "also", "too", "now",
            "then", "here", "there", "soon", "already", "again", "still",
            "just", "only", "yet",
        ]
    },
    **{w: "OTHER" for w in ["and", "or", "but", "nor", "so", "if", "while", "because", "as", "than", "when"]},
}

_NUM_RE = re.compile(r"\d+(?:[.,]\d+)*$")


def _tag_one(tokens: Sequence[Token]) -> list[str]:
    tags: list[str] = []
    for i, tok in enumerate(tokens):
        text = tok.text
        if not any(c.isalnum() for c in text):
            tags.append("PUNCT")
            continue
        lexical = _LEXICON.get(text.lower())
        if lexical is not None:
            tags.append(lexical)
            continue
        if _NUM_RE.match(text):
            tags.append("NUM")
            continue
        if text[0].isupper():
            if i > 0:
                tags.append("PROPN")
                continue
            # Sentence-initial: proper noun only when the next token is capitalized too.
            nxt = tokens[i + 1].text if i + 1 < len(tokens) else ""
            if nxt[:1].isupper():
                tags.append("PROPN")
                continue
        lower = text.lower()
        if lower.endswith("ly"):
            tags.append("ADV")
        elif lower.endswith("ed") or lower.endswith("ing"):
            tags.append("VERB")
        else:
            tags.append("NOUN")
    return tags


class RuleTagger:
    """Deterministic built-in tagger; same sentence always yields the same tags."""

    def tag_sentences(self, texts: Sequence[str]) -> list[list[Token]]:
        out = []
        for text in texts:
            tokens = tokenize(text)
            tags = _tag_one(tokens)
            out.append([replace(tok, pos=tag) for tok, tag in zip(tokens, tags)])
        return out


class HttpTagger:
    """Client for an external tagger speaking the /tag wire protocol."""

    def __init__(self, base_url: str, timeout: float = 30.0, session=None):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self._session = session or requests.Session()

    def tag_sentences(self, texts: Sequence[str]) -> list[list[Token]]:
        try:
            resp = self._session.post(
                f"{self.base_url}/tag", json={"sentences": list(texts)}, timeout=self.timeout
            )
        except (requests.ConnectionError, requests.Timeout) as exc:
            raise TaggerTransportError(f"tagger unreachable: {exc}", retryable=True) from exc
        if resp.status_code >= 500:
            raise TaggerTransportError(f"tagger error {resp.status_code}", retryable=True)
        if resp.status_code != 200:
            raise TaggerTransportError(f"tagger rejected request: {resp.status_code}", retryable=False)
        try:
            payload = resp.json()
            sentences = payload["sentences"]
            out = []
            for entry in sentences:
                tokens = []
                for t in entry["tokens"]:
                    pos = str(t["pos"])
                    if pos not in POS_TAGS:
                        raise TaggerTransportError(f"unknown pos tag {pos!r}", retryable=False)
                    tokens.append(
                        Token(text=str(t["text"]), char_start=int(t["start"]), char_end=int(t["end"]), pos=pos)
                    )
                out.append(tokens)
        except TaggerTransportError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise TaggerTransportError(f"malformed tagger response: {exc}", retryable=False) from exc
        if len(out) != len(texts):
            raise TaggerTransportError("tagger response length mismatch", retryable=False)
        return out


def pos_tag(sentence: Sentence, tagger: TaggerBackend) -> Sentence:
    """Return the sentence with tokens tokenized/tagged by the backend."""
    tokens = tagger.tag_sentences([sentence.text])[0]
    return replace(sentence, tokens=tuple(tokens))


def preprocess(text: str, tagger: TaggerBackend | None = None) -> list[Sentence]:
    """Segment, tokenize and tag; the default backend is the built-in rule tagger."""
    tagger = tagger or RuleTagger()
    sentences = segment_and_tokenize(text)
    if not sentences:
        return []
    tagged = tagger.tag_sentences([s.text for s in sentences])
    return [replace(s, tokens=tuple(toks)) for s, toks in zip(sentences, tagged)]


def make_tagger(spec: str) -> TaggerBackend:
    """Build a tagger from a config string: ``builtin`` or ``http:<url>``."""
    if spec == "builtin":
        return RuleTagger()
    if spec.startswith("http:"):
        url = spec[len("http:"):]
        if not url.startswith("//") and not url.startswith("http"):
            raise ValueError(f"bad tagger url in {spec!r}")
        return HttpTagger(url if url.startswith("http") else f"http:{url}")
    raise ValueError(f"unknown tagger spec {spec!r}")
