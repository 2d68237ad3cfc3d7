"""Named, versioned sequence-pair generators for reproducible experiments."""

from __future__ import annotations

import random

from .functions import Alphabet

GENERATOR_VERSION = 1

GENERATOR_NAMES = ("all-match", "all-mismatch", "half-mismatch", "periodic",
                   "seeded-random")


def _cycle(alphabet: Alphabet, n: int, offset: int = 0) -> tuple:
    k = len(alphabet)
    return tuple(alphabet.symbol((i + offset) % k) for i in range(n))


def generate_pair(name: str, n: int, x_alphabet: Alphabet, y_alphabet: Alphabet,
                  seed: int | None = None) -> tuple[tuple, tuple]:
    """Build an (x, y) sequence pair of length n.

    all-match cycles identical symbols; all-mismatch offsets y by one
    position so labels differ everywhere (alphabet size >= 2);
    half-mismatch matches on the first half and mismatches on the rest;
    periodic cycles each alphabet independently; seeded-random draws
    symbols iid from the given seed.
    """
    if n < 1:
        raise ValueError(f"sequence length must be positive, got {n}")
    if name in ("all-match", "all-mismatch", "half-mismatch"):
        if x_alphabet != y_alphabet:
            raise ValueError(f"generator {name!r} needs matching alphabets")
        if name != "all-match" and len(x_alphabet) < 2:
            raise ValueError(f"generator {name!r} needs at least two symbols")
    if name == "all-match":
        xs = _cycle(x_alphabet, n)
        return xs, xs
    if name == "all-mismatch":
        return _cycle(x_alphabet, n), _cycle(y_alphabet, n, offset=1)
    if name == "half-mismatch":
        half = n // 2
        xs = _cycle(x_alphabet, n)
        shifted = _cycle(y_alphabet, n, offset=1)
        return xs, xs[:half] + shifted[half:]
    if name == "periodic":
        return _cycle(x_alphabet, n), _cycle(y_alphabet, n)
    if name == "seeded-random":
        if seed is None:
            raise ValueError("seeded-random requires a seed")
        rng = random.Random(f"seqgen-v{GENERATOR_VERSION}:{seed}")
        xs = tuple(x_alphabet.symbol(rng.randrange(len(x_alphabet))) for _ in range(n))
        ys = tuple(y_alphabet.symbol(rng.randrange(len(y_alphabet))) for _ in range(n))
        return xs, ys
    raise ValueError(f"unknown generator {name!r} (have {GENERATOR_NAMES})")
