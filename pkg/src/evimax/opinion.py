"""Opinion polarity estimation and conversion to belief masses.

Messages arrive pre-tokenized and pre-tagged; a polarity lexicon maps
(word, tag) pairs to probability triples over {Pos, Neg, Neut}. A user's
opinion is the plain mean over message polarities, which are themselves
plain means over token polarities. Unknown words are neutral.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .belief import THETA, MassFunction, dempster_combine, simple_bba
from .errors import EmptyMessageError, NoMessagesError, ParseError

# Recognized part-of-speech labels; anything else collapses to "other".
TAGS = ("noun", "verb", "adj", "adv", "other")

_POS = THETA.subset(("Pos",))
_NEG = THETA.subset(("Neg",))


@dataclass(frozen=True)
class OpinionDistribution:
    """Probability triple over {Pos, Neg, Neut}; components sum to 1."""

    pos: float
    neg: float
    neut: float

    def __post_init__(self):
        for name, value in (("pos", self.pos), ("neg", self.neg), ("neut", self.neut)):
            if value < 0.0:
                raise ValueError(f"{name} component is negative: {value}")
        total = self.pos + self.neg + self.neut
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"opinion components sum to {total}, expected 1")

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.pos, self.neg, self.neut)


NEUTRAL = OpinionDistribution(0.0, 0.0, 1.0)


@dataclass(frozen=True)
class TaggedToken:
    surface: str
    tag: str = "other"

    def __post_init__(self):
        if not self.surface:
            raise ValueError("token surface must be non-empty")
        if self.tag not in TAGS:
            object.__setattr__(self, "tag", "other")


@dataclass(frozen=True)
class Message:
    author: str
    tokens: Tuple[TaggedToken, ...]
    timestamp: Optional[int] = None


@dataclass
class PolarityLexicon:
    """Case-insensitive map from (word, tag) to a polarity distribution."""

    entries: Dict[Tuple[str, str], OpinionDistribution] = field(default_factory=dict)

    def add(self, word: str, tag: str, dist: OpinionDistribution) -> None:
        self.entries[(word.lower(), tag)] = dist

    def lookup(self, word: str, tag: str) -> Optional[OpinionDistribution]:
        return self.entries.get((word.lower(), tag))

    def __len__(self) -> int:
        return len(self.entries)


def token_polarity(token: TaggedToken, lexicon: PolarityLexicon) -> OpinionDistribution:
    """Lexicon polarity of one token; fully neutral when the lexicon is silent."""
    found = lexicon.lookup(token.surface, token.tag)
    return found if found is not None else NEUTRAL


def message_polarity(msg: Message, lexicon: PolarityLexicon) -> OpinionDistribution:
    """Component-wise mean of the token polarities of one message."""
    if not msg.tokens:
        raise EmptyMessageError(f"message by {msg.author!r} has no tokens")
    pos = neg = neut = 0.0
    for token in msg.tokens:
        p = token_polarity(token, lexicon)
        pos += p.pos
        neg += p.neg
        neut += p.neut
    n = len(msg.tokens)
    return OpinionDistribution(pos / n, neg / n, neut / n)


def user_opinion(messages: Sequence[OpinionDistribution]) -> OpinionDistribution:
    """Component-wise mean over per-message distributions."""
    if not messages:
        raise NoMessagesError("cannot average an empty message list")
    n = len(messages)
    return OpinionDistribution(
        sum(m.pos for m in messages) / n,
        sum(m.neg for m in messages) / n,
        sum(m.neut for m in messages) / n,
    )


def opinion_to_bba(pr: OpinionDistribution, literal_alpha: bool = False) -> MassFunction:
    """Turn an opinion triple into a mass function on {Pos, Neg, Neut}.

    Two simple BBAs are built, one focused on {Pos} and one on {Neg}, then
    fused with Dempster's rule. By default the positive belief grows with
    pr.pos (m({Pos}) = pr.pos before fusion); ``literal_alpha=True`` flips
    the weighting so that the ignorance mass, not the focal mass, equals
    the opinion probability.
    """
    if literal_alpha:
        alpha_pos, alpha_neg = pr.pos, pr.neg
    else:
        alpha_pos, alpha_neg = 1.0 - pr.pos, 1.0 - pr.neg
    m_pos = simple_bba(THETA, _POS, alpha_pos)
    m_neg = simple_bba(THETA, _NEG, alpha_neg)
    return dempster_combine(m_pos, m_neg)


def pos_neg_beliefs(pr: OpinionDistribution, literal_alpha: bool = False) -> Tuple[float, float]:
    """(m({Pos}), m({Neg})) of the fused opinion BBA."""
    m = opinion_to_bba(pr, literal_alpha=literal_alpha)
    return m.mass(_POS), m.mass(_NEG)


def load_lexicon(path) -> PolarityLexicon:
    """Read a lexicon TSV: word, tag, pos, neg, neut; '#' lines are comments."""
    path = Path(path)
    lexicon = PolarityLexicon()
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter="\t")
        header = None
        for line_no, row in enumerate(reader, start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if header is None:
                header = [c.strip().lower() for c in row]
                if header[:5] != ["word", "tag", "pos", "neg", "neut"]:
                    raise ParseError(path, line_no, f"bad lexicon header {row!r}")
                continue
            if len(row) < 5:
                raise ParseError(path, line_no, f"expected 5 columns, got {len(row)}")
            word, tag = row[0].strip(), row[1].strip().lower()
            if tag not in TAGS:
                tag = "other"
            try:
                dist = OpinionDistribution(float(row[2]), float(row[3]), float(row[4]))
            except ValueError as exc:
                raise ParseError(path, line_no, str(exc)) from exc
            lexicon.add(word, tag, dist)
    if header is None:
        raise ParseError(path, 1, "missing header row")
    return lexicon


def parse_token(text: str) -> TaggedToken:
    """Parse a 'surface/tag' token; a missing tag means 'other'."""
    surface, sep, tag = text.rpartition("/")
    if not sep:
        return TaggedToken(text)
    return TaggedToken(surface, tag.lower())


def load_messages(path) -> Tuple[List[Message], int]:
    """Read newline-delimited messages: user_id, timestamp, tokens.

    Fields are tab-separated; tokens are space-separated 'surface/tag'
    pairs. Returns the messages plus a count of token-less records that
    were skipped.
    """
    path = Path(path)
    messages: List[Message] = []
    skipped = 0
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) < 2:
                raise ParseError(path, line_no, "expected user_id<TAB>timestamp<TAB>tokens")
            user = parts[0].strip()
            if not user:
                raise ParseError(path, line_no, "empty user id")
            stamp_text = parts[1].strip()
            try:
                timestamp = int(stamp_text) if stamp_text else None
            except ValueError as exc:
                raise ParseError(path, line_no, f"bad timestamp {stamp_text!r}") from exc
            token_text = parts[2].strip() if len(parts) > 2 else ""
            if not token_text:
                skipped += 1
                continue
            tokens = tuple(parse_token(t) for t in token_text.split())
            messages.append(Message(user, tokens, timestamp))
    return messages, skipped


def user_opinions_from_messages(
    messages: Iterable[Message], lexicon: PolarityLexicon
) -> Dict[str, OpinionDistribution]:
    """Group messages by author and average their polarities per user."""
    per_user: Dict[str, List[OpinionDistribution]] = {}
    for msg in messages:
        per_user.setdefault(msg.author, []).append(message_polarity(msg, lexicon))
    return {user: user_opinion(dists) for user, dists in per_user.items()}
