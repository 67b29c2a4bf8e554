"""Corpus handling: synthetic icon generation, ingestion of
keyword-annotated SVG dumps, and assembly of padded/shifted/loss-masked
training samples."""

from .ingest import IngestResult, Record, ingest, load_cache, write_cache
from .samples import (
    ICON_LEN,
    SAMPLE_LEN,
    TEXT_LEN,
    SampleConfig,
    TrainingSample,
    batches,
    make_training_sample,
    stream_samples,
)
from .synth import FAMILIES, synth_corpus

__all__ = [
    "Record",
    "IngestResult",
    "ingest",
    "load_cache",
    "write_cache",
    "synth_corpus",
    "FAMILIES",
    "SampleConfig",
    "TrainingSample",
    "make_training_sample",
    "stream_samples",
    "batches",
    "TEXT_LEN",
    "ICON_LEN",
    "SAMPLE_LEN",
]
