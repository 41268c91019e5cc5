"""Shared fixtures: default laws and the random law corpus."""

import itertools

import numpy as np
import pytest

from cutwords.laws import (
    LetterLaw,
    ReferenceLaw,
    iid_law,
    make_algebraic_renewal,
    markov_law,
)

CORPUS_SEED = 7


@pytest.fixture(scope="session")
def nu_ab():
    return LetterLaw.uniform("ab")


@pytest.fixture(scope="session")
def rho_default():
    return make_algebraic_renewal(2.0, 4)


@pytest.fixture(scope="session")
def ref_default(nu_ab, rho_default):
    return ReferenceLaw(rho_default, nu_ab)


def _word_pool(syms, maxlen):
    return [
        "".join(w)
        for L in range(1, maxlen + 1)
        for w in itertools.product(syms, repeat=L)
    ]


def random_iid_law(rng, max_words=6, max_len=4):
    syms = "ab" if rng.random() < 0.7 else "abc"
    pool = _word_pool(syms, max_len)
    k = int(rng.integers(2, max_words + 1))
    idx = sorted(rng.choice(len(pool), size=min(k, len(pool)), replace=False))
    words = [pool[i] for i in idx]
    probs = rng.dirichlet(np.ones(len(words)))
    return syms, iid_law(dict(zip(words, probs)))


def random_markov_law(rng, max_words=5, max_len=3):
    syms = "ab"
    pool = _word_pool(syms, max_len)
    k = int(rng.integers(2, max_words + 1))
    idx = sorted(rng.choice(len(pool), size=min(k, len(pool)), replace=False))
    words = tuple(pool[i] for i in idx)
    # Mix with uniform so every row is strictly positive (irreducible).
    P = rng.dirichlet(np.ones(k), size=k) * 0.9 + 0.1 / k
    P /= P.sum(axis=1, keepdims=True)
    return syms, markov_law(words, P)


@pytest.fixture(scope="session")
def law_corpus():
    """50 random IID + 20 random irreducible Markov word laws."""
    rng = np.random.Generator(
        np.random.Philox(key=np.array([CORPUS_SEED, 0], dtype=np.uint64))
    )
    corpus = [("iid",) + random_iid_law(rng) for _ in range(50)]
    corpus += [("markov",) + random_markov_law(rng) for _ in range(20)]
    return corpus


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
