"""Catalog of candidate graphs: embeddability, class, rank, photon budget."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

from . import graphs
from .embedding import SQUEEZING, embeddability_check, make_embedding


@dataclass(frozen=True)
class CatalogRecord:
    code: str
    embeddable: bool
    iso_class: str
    rank: int | None = None
    m: float | None = None                 # mean photon per mode
    singular_value: float | None = None    # common nonzero singular value
    reason: str | None = None              # why not embeddable


def build_catalog(include_all: bool = False) -> list[CatalogRecord]:
    """One record per code, ascending; embeddable-only unless ``include_all``."""
    records = []
    for code in graphs.all_codes():
        m = graphs.decode_code(code)
        label = graphs.classify(graphs.build_adjacency(m))
        emb = embeddability_check(m)
        if emb.embeddable:
            spec = make_embedding(code)
            records.append(CatalogRecord(
                code=code,
                embeddable=True,
                iso_class=label,
                rank=spec.rank,
                m=spec.mean_photon_per_mode,
                singular_value=math.tanh(SQUEEZING) / spec.scale_c,
            ))
        elif include_all:
            records.append(CatalogRecord(
                code=code,
                embeddable=False,
                iso_class=label,
                reason=emb.reason,
            ))
    return records


def class_counts(records: list[CatalogRecord]) -> dict[str, int]:
    """Embeddable-member count per class, in catalog display order."""
    counts = {label: 0 for label in graphs.CLASS_LABELS}
    for rec in records:
        if rec.embeddable:
            counts[rec.iso_class] += 1
    return counts


def write_catalog(records: list[CatalogRecord], path) -> Path:
    path = Path(path)
    payload = {
        "graphs": [asdict(rec) for rec in records],
        "class_counts": class_counts(records),
        "total": len(records),
        "embeddable": sum(1 for r in records if r.embeddable),
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return path


def load_catalog(path) -> list[CatalogRecord]:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return [CatalogRecord(**rec) for rec in payload["graphs"]]
