"""Subword segmentation and surprisal laboratory.

Splits verse-aligned corpora, segments them with character, BPE, Morfessor
and FST-with-back-off methods, scores test verses with an n-gram language
model and relates per-language surprisal to corpus complexity measures and
typological features.
"""

__version__ = "0.1.0"
