"""Event-log serialization into a bounded message-passing text sequence.

Each event renders as "Name(type1 name1, type2 name2)"; events join with
"; " in log order. The 256-entry limit is a token budget (the text feeds
subword models whose limits are token-denominated), and truncation cuts at
whole-token boundaries, so the rendering is prefix-stable under appended
events.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Tuple

from .core import TransactionMetadata

DEFAULT_MAX_TOKENS = 256
EVENT_SEPARATOR = "; "

# word pieces: ALLCAPS runs, Capitalized runs, lowercase runs, digit runs
_SUBTOKEN_RE = re.compile(r"[A-Z]+(?![a-z])|[A-Z][a-z]+|[a-z]+|[0-9]+")


@dataclass(frozen=True)
class EventText:
    text: str
    token_count: int
    truncated: bool


def tokenize(text: str) -> List[str]:
    """Split on non-alphanumerics and camelCase/letter-digit boundaries.

    Everything is lowercased; empty tokens never appear.
    """
    return [m.group(0).lower() for m in _SUBTOKEN_RE.finditer(text)]


def _token_spans(text: str) -> List[Tuple[int, int]]:
    return [m.span() for m in _SUBTOKEN_RE.finditer(text)]


def render_event(name: str, params) -> str:
    inner = ", ".join(f"{ptype} {pname}" for ptype, pname in params)
    return f"{name}({inner})"


def build_event_text(m: TransactionMetadata,
                     max_tokens: int = DEFAULT_MAX_TOKENS) -> EventText:
    """Serialize m.el into one narrative string, cut at max_tokens tokens."""
    if max_tokens < 1:
        raise ValueError("max_tokens must be >= 1")
    full = EVENT_SEPARATOR.join(render_event(ev.name, ev.params) for ev in m.el)
    spans = _token_spans(full)
    if len(spans) <= max_tokens:
        return EventText(text=full, token_count=len(spans), truncated=False)
    cut_end = spans[max_tokens - 1][1]
    return EventText(text=full[:cut_end], token_count=max_tokens, truncated=True)


def export_text_rows(rows) -> str:
    """Text export: "hash<TAB>event_text" TSV."""
    return "".join(f"{tx_hash}\t{text}\n" for tx_hash, text in rows)
