"""Knowledge-infilled corpus compiler and zero-shot probing toolkit."""

import json

from ._kilm import (
    KilmError,
    NGramModel,
    TfidfIndex,
    mask_budget,
    normalize_answer,
    run_cli,
    tokenize,
    unigram_f1,
)
from . import _kilm

__all__ = [
    "KilmError",
    "NGramModel",
    "TfidfIndex",
    "build_ed_prompts",
    "evaluate",
    "ingest",
    "kn_infill",
    "mask_budget",
    "normalize_answer",
    "rank",
    "run_cli",
    "tokenize",
    "unigram_f1",
    "validate_transcript",
]


def ingest(dump, out_dir, stride=512, mode="primary", jobs=1):
    """Parse a dump into a corpus directory; returns the ingest report."""
    return json.loads(_kilm._ingest(str(dump), str(out_dir), stride, mode, jobs))


def kn_infill(text, start, end, title, description, seed=0, mask_prob=0.0, poisson_lambda=3.0):
    """Insert knowledge after tokens [start, end) of text and corrupt the result."""
    return json.loads(_kilm._kn_infill(text, start, end, title, description, seed, mask_prob, poisson_lambda))


def build_ed_prompts(instance, window=100):
    """One scoring prompt per candidate of an ED instance dict."""
    return json.loads(_kilm._ed_prompts(json.dumps(instance), window))


def rank(prompts, model, mode="perplexity"):
    """Rank prompt dicts with an NGramModel; returns (records, report)."""
    out = json.loads(_kilm._rank(json.dumps(prompts), model, mode))
    return out["records"], out["report"]


def evaluate(records, metric="all"):
    return json.loads(_kilm._evaluate(json.dumps(records), metric))


def validate_transcript(requests_path, responses_path):
    return json.loads(_kilm._validate_transcript(str(requests_path), str(responses_path)))
