"""Corpus ingestion and the prepared-corpus cache.

Annotation index format (one record per line, UTF-8):

    filename<TAB>keyword1/keyword2/...<TAB>optional phrase

The index file is named ``annotations.tsv`` and sits next to the SVG
files it references. Icons whose encoded sequence exceeds the 512-token
budget are dropped (and counted); splits are a deterministic 90/5/5
hash of the filename, so re-ingestion always reproduces them.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import dataclass, field

from .. import tokenizer
from ..geometry import GRID, Icon
from ..svg_codec import CodecError, normalize_and_quantize, parse_svg

log = logging.getLogger(__name__)

ANNOTATION_FILE = "annotations.tsv"
MAX_ICON_TOKENS = 512
SPLITS = ("train", "val", "test")


class AnnotationError(ValueError):
    pass


@dataclass(frozen=True)
class Record:
    icon: Icon
    keywords: tuple[str, ...]
    phrase: str | None = None
    name: str = ""

    def __post_init__(self):
        if not self.keywords and not self.phrase:
            raise ValueError("record needs keywords or a phrase")


@dataclass
class IngestResult:
    train: list = field(default_factory=list)
    val: list = field(default_factory=list)
    test: list = field(default_factory=list)
    dropped_too_long: int = 0
    skipped_unreadable: int = 0

    def split(self, name: str) -> list:
        return getattr(self, name)

    @property
    def total(self) -> int:
        return len(self.train) + len(self.val) + len(self.test)


def split_of(name: str) -> str:
    """Deterministic 90/5/5 bucket from the filename hash."""
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    bucket = int.from_bytes(digest[:4], "big") % 100
    if bucket < 90:
        return "train"
    if bucket < 95:
        return "val"
    return "test"


def _bbox_cover(path) -> float:
    xs = [p.x for c in path for p in c.points]
    ys = [p.y for c in path for p in c.points]
    area = (max(xs) - min(xs)) * (max(ys) - min(ys))
    return area / float((GRID - 1) * (GRID - 1))


def drop_outer_box(icon: Icon, threshold: float = 0.98) -> Icon:
    """Heuristic frame removal: drop the first path when its bbox covers
    at least `threshold` of the viewbox, then renormalize the rest."""
    if len(icon) >= 2 and _bbox_cover(icon.paths[0]) >= threshold:
        return normalize_and_quantize(Icon(icon.paths[1:]))
    return icon


def parse_annotation_line(line: str, lineno: int) -> tuple[str, tuple[str, ...], str | None]:
    parts = line.rstrip("\n").split("\t")
    if len(parts) < 2 or not parts[0].strip():
        raise AnnotationError(
            f"annotation line {lineno}: expected 'filename<TAB>keywords[<TAB>phrase]'"
        )
    fname = parts[0].strip()
    keywords = tuple(k.strip() for k in parts[1].split("/") if k.strip())
    phrase = parts[2].strip() if len(parts) > 2 and parts[2].strip() else None
    if not keywords and phrase is None:
        raise AnnotationError(f"annotation line {lineno}: no keywords and no phrase")
    return fname, keywords, phrase


def ingest(
    directory: str,
    remove_outer_box: bool = False,
    take_first: int | None = None,
) -> IngestResult:
    """Parse, simplify and quantize every annotated icon in a directory."""
    index_path = os.path.join(directory, ANNOTATION_FILE)
    if not os.path.exists(index_path):
        raise AnnotationError(f"missing annotation index {index_path}")
    result = IngestResult()
    entries = []
    with open(index_path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            entries.append(parse_annotation_line(line, lineno))
    if take_first is not None:
        # stable selection rule: order by filename hash, keep the first N
        entries.sort(key=lambda e: hashlib.sha256(e[0].encode("utf-8")).hexdigest())
        entries = entries[:take_first]
    for fname, keywords, phrase in entries:
        path = os.path.join(directory, fname)
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
            icon = normalize_and_quantize(parse_svg(text))
        except (OSError, CodecError) as exc:
            log.warning("skipping %s: %s", fname, exc)
            result.skipped_unreadable += 1
            continue
        if remove_outer_box:
            icon = drop_outer_box(icon)
        if tokenizer.encoded_length(icon) > MAX_ICON_TOKENS:
            result.dropped_too_long += 1
            continue
        record = Record(icon=icon, keywords=keywords, phrase=phrase, name=fname)
        result.split(split_of(fname)).append(record)
    return result


# --- prepared-corpus cache: token lines + annotations + JSON manifest ---


def write_cache(result: IngestResult, out_dir: str, extra_meta: dict | None = None) -> None:
    os.makedirs(out_dir, exist_ok=True)
    counts = {}
    for split in SPLITS:
        records = result.split(split)
        counts[split] = len(records)
        tokenizer.write_token_lines(
            os.path.join(out_dir, f"{split}.tokens"),
            (tokenizer.encode_icon(r.icon) for r in records),
        )
        with open(os.path.join(out_dir, f"{split}.annot.tsv"), "w", encoding="utf-8") as fh:
            for r in records:
                phrase = r.phrase or ""
                fh.write(f"{r.name}\t{'/'.join(r.keywords)}\t{phrase}\n")
    manifest = {
        "format": "iconsynth-corpus-cache",
        "version": 1,
        "counts": counts,
        "dropped_too_long": result.dropped_too_long,
        "skipped_unreadable": result.skipped_unreadable,
    }
    if extra_meta:
        manifest.update(extra_meta)
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)


def load_cache(cache_dir: str) -> IngestResult:
    manifest_path = os.path.join(cache_dir, "manifest.json")
    with open(manifest_path, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    if manifest.get("format") != "iconsynth-corpus-cache":
        raise AnnotationError(f"{manifest_path} is not a corpus-cache manifest")
    result = IngestResult(
        dropped_too_long=manifest.get("dropped_too_long", 0),
        skipped_unreadable=manifest.get("skipped_unreadable", 0),
    )
    for split in SPLITS:
        tok_path = os.path.join(cache_dir, f"{split}.tokens")
        annot_path = os.path.join(cache_dir, f"{split}.annot.tsv")
        if not os.path.exists(tok_path):
            continue
        seqs = list(tokenizer.read_token_lines(tok_path))
        records = result.split(split)
        with open(annot_path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh):
                if not line.strip():
                    continue
                name, keywords, phrase = parse_annotation_line(line, lineno + 1)
                records.append(
                    Record(
                        icon=tokenizer.decode_icon(seqs[lineno]),
                        keywords=keywords,
                        phrase=phrase,
                        name=name,
                    )
                )
    return result
