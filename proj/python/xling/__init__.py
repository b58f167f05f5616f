"""Cross-lingual document similarity and alignment."""

from ._xling import (
    Dictionary,
    LsiModel,
    XlingError,
    align,
    bin_measure,
    bin_symmetric,
    dict_cosine,
    interlanguage_links,
    matching_rate,
    oov_rate,
    oracle_experiment,
    recall_at_k,
    retrieve,
    run_cli,
    strip_wiki_markup,
    tokenize,
    train_crosslingual,
    train_monolingual,
    truncated_svd,
)

__all__ = [
    "Dictionary",
    "LsiModel",
    "XlingError",
    "align",
    "bin_measure",
    "bin_symmetric",
    "dict_cosine",
    "interlanguage_links",
    "matching_rate",
    "oov_rate",
    "oracle_experiment",
    "recall_at_k",
    "retrieve",
    "run_cli",
    "strip_wiki_markup",
    "tokenize",
    "train_crosslingual",
    "train_monolingual",
    "truncated_svd",
]
