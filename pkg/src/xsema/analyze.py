"""Distribution analyses: per-class motif profiles and term frequencies.

Term counting keeps raw identifiers intact (event titles and parameter
names are not subtoken-split), so compound names like "toChainId" survive
as single terms in the exported word-cloud data.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from .core import CLASSES
from .errors import XsemaError
from .ingest import Dataset


@dataclass(frozen=True)
class MotifProfile:
    means: Dict[str, np.ndarray]   # class -> 16 mean counts
    shares: Dict[str, np.ndarray]  # class -> 16 normalized shares

    def top_slots(self, class_name: str, k: int = 3) -> List[int]:
        """1-based slot indices with the k largest shares (stable order)."""
        share = self.shares[class_name]
        order = np.argsort(-share, kind="stable")
        return [int(i) + 1 for i in order[:k]]


def motif_profile(features) -> MotifProfile:
    """features: iterable of (16-vector of counts, label value or Label)."""
    per_class: Dict[str, List[np.ndarray]] = {c: [] for c in CLASSES}
    for counts, label in features:
        value = label.value if hasattr(label, "value") else label
        per_class[value].append(np.asarray(counts, dtype=np.float64))
    if not any(per_class.values()):
        raise XsemaError("empty-input")
    means = {}
    shares = {}
    for cls in CLASSES:
        rows = per_class[cls]
        if not rows:
            means[cls] = np.zeros(16)
            shares[cls] = np.zeros(16)
            continue
        stacked = np.vstack(rows)
        means[cls] = stacked.mean(axis=0)
        totals = stacked.sum(axis=0)
        grand = totals.sum()
        shares[cls] = totals / grand if grand > 0 else np.zeros(16)
    return MotifProfile(means=means, shares=shares)


def export_motif_profile_csv(profile: MotifProfile) -> str:
    header = "class,stat," + ",".join(f"m{i}" for i in range(1, 17))
    lines = [header]
    for cls in CLASSES:
        lines.append(f"{cls},mean," + ",".join(
            f"{v:.6f}" for v in profile.means[cls]))
        lines.append(f"{cls},share," + ",".join(
            f"{v:.6f}" for v in profile.shares[cls]))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class TermProfile:
    counts: Dict[str, Dict[str, int]]  # class -> term -> frequency

    def ranked(self, class_name: str) -> List[Tuple[str, int]]:
        """Descending count, then lexicographic."""
        items = self.counts[class_name].items()
        return sorted(items, key=lambda kv: (-kv[1], kv[0]))

    def top_terms(self, class_name: str, k: int) -> List[str]:
        return [term for term, _count in self.ranked(class_name)[:k]]


def term_profile(ds: Dataset) -> TermProfile:
    """Frequencies of raw event titles and parameter names, per class."""
    if len(ds) == 0:
        raise XsemaError("empty-input")
    counters = {c: Counter() for c in CLASSES}
    for item in ds.items:
        counter = counters[item.label.value]
        for event in item.metadata.el:
            counter[event.name] += 1
            for _ptype, pname in event.params:
                counter[pname] += 1
    return TermProfile(counts={c: dict(counters[c]) for c in CLASSES})


def export_term_profile_json(profile: TermProfile) -> str:
    """{class: [[term, count], ...]} ordered for word-cloud renderers."""
    out = {cls: [[term, count] for term, count in profile.ranked(cls)]
           for cls in CLASSES}
    return json.dumps(out, indent=2, sort_keys=True)
