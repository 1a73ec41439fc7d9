"""Small builders shared by the test modules."""

import random

from subseglab.corpus import ParallelCorpus, VerseRecord


def verses(*texts, prefix="V"):
    return tuple(VerseRecord(f"{prefix}{i}", tuple(t.split())) for i, t in enumerate(texts))


def numbered_corpus(n, lang="xxx"):
    return ParallelCorpus(lang, tuple(VerseRecord(f"V{i:06d}", ("w",)) for i in range(n)))


def random_words(rng: random.Random, n, alphabet="abcdeçışğü", max_len=8):
    return [
        "".join(rng.choice(alphabet) for _ in range(rng.randint(1, max_len)))
        for _ in range(n)
    ]


def random_verses(rng: random.Random, n, vocab=None, alphabet="abcdeçışğü"):
    vocab = vocab or random_words(rng, 60, alphabet)
    return tuple(
        VerseRecord(f"R{i}", tuple(rng.choice(vocab) for _ in range(rng.randint(1, 12))))
        for i in range(n)
    )
