"""Letter laws, renewal laws, the reference word law, and word-process laws.

All laws are immutable after construction and validate their own mass
balance.  Logs are natural (nats) everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import InputError
from .words import Alphabet, concat, cut, truncate_word

MASS_TOL = 1e-12
STATIONARY_TOL = 1e-10
MAX_WORD_SET = 64

# Sentinel tail exponents for the boundary cases of the quenched rate.
ALPHA_ONE = 1.0
ALPHA_INF = math.inf


@dataclass(frozen=True)
class LetterLaw:
    """Fully supported distribution on an alphabet."""

    alphabet: Alphabet
    probs: dict

    def __post_init__(self):
        if set(self.probs) != set(self.alphabet.symbols):
            raise InputError("letter law must assign a probability to every letter")
        total = sum(self.probs.values())
        if abs(total - 1.0) > MASS_TOL:
            raise InputError(f"letter probabilities sum to {total}, not 1")
        for c, p in self.probs.items():
            if p <= 0:
                raise InputError(f"letter {c!r} has non-positive probability {p}")

    @classmethod
    def uniform(cls, letters: str) -> "LetterLaw":
        a = Alphabet.from_string(letters)
        p = 1.0 / len(a)
        return cls(a, {c: p for c in a.symbols})

    @classmethod
    def from_probs(cls, letters: str, probs) -> "LetterLaw":
        a = Alphabet.from_string(letters)
        return cls(a, {c: float(p) for c, p in zip(a.symbols, probs)})

    def prob(self, letter: str) -> float:
        return self.probs[letter]

    def log_prob(self, letter: str) -> float:
        return math.log(self.probs[letter])

    def prob_vector(self) -> np.ndarray:
        return np.array([self.probs[c] for c in self.alphabet.symbols])

    def to_json(self) -> dict:
        return {
            "alphabet": self.alphabet.as_string(),
            "probs": [self.probs[c] for c in self.alphabet.symbols],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "LetterLaw":
        return cls.from_probs(doc["alphabet"], doc["probs"])


@dataclass(frozen=True)
class RenewalLaw:
    """Probability mass on positive integers with a declared tail exponent.

    The support is finite (capped); constructors report the tail mass a
    genuinely algebraic law would have carried beyond the cap, so results
    downstream can state explicitly that they hold for the capped law.
    """

    probs: dict
    alpha: float
    c_rho: Optional[float] = None
    discarded_tail: float = 0.0

    def __post_init__(self):
        if not self.probs:
            raise InputError("renewal law needs non-empty support")
        for n, p in self.probs.items():
            if not (isinstance(n, int) and n >= 1):
                raise InputError(f"renewal support must be positive integers, got {n}")
            if p <= 0:
                raise InputError(f"renewal atom {n} has non-positive probability {p}")
        total = sum(self.probs.values())
        if abs(total - 1.0) > MASS_TOL:
            raise InputError(f"renewal probabilities sum to {total}, not 1")

    @property
    def support(self) -> tuple:
        return tuple(sorted(self.probs))

    @property
    def max_jump(self) -> int:
        return max(self.probs)

    def prob(self, n: int) -> float:
        return self.probs.get(n, 0.0)

    def mean(self) -> float:
        return sum(n * p for n, p in self.probs.items())

    def to_json(self) -> dict:
        alpha: object = self.alpha
        if alpha == ALPHA_ONE:
            alpha = "one"
        elif math.isinf(self.alpha):
            alpha = "infinity"
        return {"atoms": [[n, self.probs[n]] for n in self.support], "alpha": alpha}

    @classmethod
    def from_json(cls, doc: dict) -> "RenewalLaw":
        alpha = doc["alpha"]
        if alpha == "one":
            alpha = ALPHA_ONE
        elif alpha == "infinity":
            alpha = ALPHA_INF
        return cls({int(n): float(p) for n, p in doc["atoms"]}, float(alpha))


def make_algebraic_renewal(alpha: float, cap: int) -> RenewalLaw:
    """Exact power law rho(n) proportional to n^(-alpha) on {1, ..., cap}.

    The normalizing constant C = 1/sum(n^-alpha) satisfies
    rho(n) <= C * n^(-alpha) with equality on the support.
    """
    if alpha <= 1:
        raise InputError("algebraic constructor needs alpha > 1; use boundary constructors")
    if cap < 1:
        raise InputError("cap must be >= 1")
    weights = {n: float(n) ** (-alpha) for n in range(1, cap + 1)}
    norm = sum(weights.values())
    # Tail mass the uncapped power law would carry past the cap, relative
    # to the full zeta normalization.
    from scipy.special import zeta

    full = float(zeta(alpha))
    discarded = (full - norm) / full
    return RenewalLaw(
        probs={n: w / norm for n, w in weights.items()},
        alpha=alpha,
        c_rho=1.0 / norm,
        discarded_tail=discarded,
    )


def renewal_from_atoms(atoms: dict, alpha: float) -> RenewalLaw:
    """Explicit-atoms constructor; supports gapped supports."""
    return RenewalLaw(probs=dict(atoms), alpha=alpha)


@dataclass(frozen=True)
class ReferenceLaw:
    """The word law of one cut: rho(len(w)) times the product of letter probs."""

    rho: RenewalLaw
    nu: LetterLaw

    def word_prob(self, w: str) -> float:
        p = self.rho.prob(len(w))
        for c in w:
            if c not in self.nu.probs:
                return 0.0
            p *= self.nu.prob(c)
        return p

    def log_word_prob(self, w: str) -> float:
        p = self.rho.prob(len(w))
        if p == 0.0 or any(c not in self.nu.probs for c in w):
            return -math.inf
        return math.log(p) + sum(self.nu.log_prob(c) for c in w)

    def enumerate_atoms(self, max_len: Optional[int] = None) -> dict:
        """All words of length <= max_len (default: the cap) with their probs."""
        import itertools

        if max_len is None:
            max_len = self.rho.max_jump
        out = {}
        letters = self.nu.alphabet.symbols
        for n in range(1, max_len + 1):
            rp = self.rho.prob(n)
            if rp == 0.0:
                continue
            for tup in itertools.product(letters, repeat=n):
                w = "".join(tup)
                p = rp
                for c in w:
                    p *= self.nu.prob(c)
                out[w] = p
        return out

    def as_iid_process(self) -> "WordProcessLaw":
        """The reference law viewed as an i.i.d. word process on the capped support."""
        return iid_law(self.enumerate_atoms())


def reference_law(rho: RenewalLaw, nu: LetterLaw) -> ReferenceLaw:
    return ReferenceLaw(rho, nu)


@dataclass(frozen=True)
class WordProcessLaw:
    """Stationary law on word sequences: i.i.d. or finite Markov variant.

    For the Markov variant, `transition` is row-stochastic over `words`
    and `stationary` is its verified stationary row.  `exact_truncation`
    is False only for lumped chains produced by truncating a Markov law
    whose truncation map is not injective; such chains match the image
    measure only at the single-word marginal and are offered as samplers,
    never for rate evaluation.
    """

    variant: str
    words: tuple
    probs: Optional[tuple] = None
    transition: Optional[tuple] = None  # tuple of row tuples
    stationary: Optional[tuple] = None
    exact_truncation: bool = True

    def __post_init__(self):
        if self.variant not in ("iid", "markov"):
            raise InputError(f"unknown word-process variant {self.variant!r}")
        if len(self.words) == 0:
            raise InputError("word set must be non-empty")
        if len(self.words) > MAX_WORD_SET:
            raise InputError(f"word set capped at {MAX_WORD_SET} words, got {len(self.words)}")
        if len(set(self.words)) != len(self.words):
            raise InputError("word set must contain distinct words")
        for w in self.words:
            if len(w) == 0:
                raise InputError("words must be non-empty")
        if self.variant == "iid":
            if self.probs is None or len(self.probs) != len(self.words):
                raise InputError("iid law needs one probability per word")
            total = sum(self.probs)
            if abs(total - 1.0) > MASS_TOL:
                raise InputError(f"word probabilities sum to {total}, not 1")
            if any(p < 0 for p in self.probs):
                raise InputError("word probabilities must be non-negative")
        else:
            P = np.asarray(self.transition, dtype=float)
            k = len(self.words)
            if P.shape != (k, k):
                raise InputError("transition table must be square over the word set")
            if np.any(P < 0):
                raise InputError("transition probabilities must be non-negative")
            rows = P.sum(axis=1)
            if np.max(np.abs(rows - 1.0)) > MASS_TOL:
                raise InputError("transition rows must sum to 1")
            if not _irreducible(P):
                raise InputError("Markov word chain must be irreducible")
            pi = np.asarray(self.stationary, dtype=float)
            if np.max(np.abs(pi @ P - pi)) > STATIONARY_TOL:
                raise InputError("stationary row fails pi P = pi within 1e-10")

    @property
    def tr_max(self) -> int:
        return max(len(w) for w in self.words)

    def marginal(self) -> dict:
        """Single-word marginal (canonical word order)."""
        if self.variant == "iid":
            m = dict(zip(self.words, self.probs))
        else:
            m = dict(zip(self.words, self.stationary))
        return dict(sorted(m.items()))

    def kernel_row(self, i: int) -> np.ndarray:
        """Next-word distribution given current word index i."""
        if self.variant == "iid":
            return np.asarray(self.probs, dtype=float)
        return np.asarray(self.transition[i], dtype=float)

    def to_json(self) -> dict:
        doc: dict = {"variant": self.variant, "words": list(self.words)}
        if self.variant == "iid":
            doc["probs"] = list(self.probs)
        else:
            doc["transition"] = [list(r) for r in self.transition]
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "WordProcessLaw":
        if doc["variant"] == "iid":
            return iid_law(dict(zip(doc["words"], doc["probs"])))
        return markov_law(tuple(doc["words"]), np.asarray(doc["transition"], dtype=float))


def _irreducible(P: np.ndarray) -> bool:
    k = P.shape[0]
    reach = P > 0
    closure = np.eye(k, dtype=bool) | reach
    for _ in range(k):
        closure = closure | (closure @ closure)
    return bool(closure.all())


def iid_law(word_probs: dict) -> WordProcessLaw:
    items = sorted((w, p) for w, p in word_probs.items() if p > 0)
    return WordProcessLaw(
        variant="iid",
        words=tuple(w for w, _ in items),
        probs=tuple(float(p) for _, p in items),
    )


def stationary_row(P: np.ndarray, tol: float = 1e-13, max_iter: int = 200000) -> np.ndarray:
    """Stationary distribution by dense power iteration to a 1e-13 residual."""
    k = P.shape[0]
    pi = np.full(k, 1.0 / k)
    for _ in range(max_iter):
        nxt = pi @ P
        nxt /= nxt.sum()
        if np.max(np.abs(nxt - pi)) < tol:
            return nxt
        pi = nxt
    raise InputError("power iteration failed to converge to the stationary row")


def markov_law(words: tuple, P: np.ndarray) -> WordProcessLaw:
    P = np.asarray(P, dtype=float)
    pi = stationary_row(P)
    return WordProcessLaw(
        variant="markov",
        words=tuple(words),
        transition=tuple(tuple(float(x) for x in row) for row in P),
        stationary=tuple(float(x) for x in pi),
    )


def mean_length(Q: WordProcessLaw) -> float:
    """Mean word length under the single-word marginal."""
    return sum(len(w) * p for w, p in Q.marginal().items())


def truncate_process(Q: WordProcessLaw, tr: int) -> WordProcessLaw:
    """Image of Q under clipping every word to its first tr letters.

    IID laws merge atoms exactly.  Markov laws are relabeled; if two
    distinct words collapse to the same truncated word, the merged row is
    the pi-weighted average, which reproduces the image measure only at
    the single-word marginal -- the result is flagged `exact_truncation
    = False` and rejected by rate evaluation.
    """
    if tr < 1:
        raise InputError("truncation level must be >= 1")
    if Q.tr_max <= tr:
        return Q
    if Q.variant == "iid":
        merged: dict = {}
        for w, p in zip(Q.words, Q.probs):
            t = truncate_word(w, tr)
            merged[t] = merged.get(t, 0.0) + p
        return iid_law(merged)

    trunc = [truncate_word(w, tr) for w in Q.words]
    new_words = sorted(set(trunc))
    idx = {w: i for i, w in enumerate(new_words)}
    k_old, k_new = len(Q.words), len(new_words)
    P = np.asarray(Q.transition, dtype=float)
    pi = np.asarray(Q.stationary, dtype=float)
    exact = k_new == k_old
    P_new = np.zeros((k_new, k_new))
    w_new = np.zeros(k_new)
    for i in range(k_old):
        ti = idx[trunc[i]]
        w_new[ti] += pi[i]
        for j in range(k_old):
            P_new[ti, idx[trunc[j]]] += pi[i] * P[i, j]
    P_new /= w_new[:, None]
    out = markov_law(tuple(new_words), P_new)
    if not exact:
        out = replace(out, exact_truncation=False)
    return out


def _rng_streams(seed: int):
    """Two deterministic counter-based streams: one for letters, one for jumps."""
    letters = np.random.Generator(np.random.Philox(key=np.array([seed, 0], dtype=np.uint64)))
    jumps = np.random.Generator(np.random.Philox(key=np.array([seed, 1], dtype=np.uint64)))
    return letters, jumps


def sample_arrays(nu: LetterLaw, rho: RenewalLaw, n_letters: int, n_words: int, seed: int):
    """Numpy internals of sample_path: (letter indices, cumulative cut points).

    The letter sequence is auto-extended when n_letters is too short to
    host n_words jumps.
    """
    letters_rng, jumps_rng = _rng_streams(seed)
    support = np.array(rho.support)
    jump_p = np.array([rho.probs[int(n)] for n in support])
    taus = jumps_rng.choice(support, size=n_words, p=jump_p)
    points = np.cumsum(taus)
    need = int(points[-1])
    total = max(n_letters, need)
    letter_p = nu.prob_vector()
    x = letters_rng.choice(len(letter_p), size=total, p=letter_p)
    return x, points


def sample_path(nu: LetterLaw, rho: RenewalLaw, n_letters: int, n_words: int, seed: int):
    """Sample (X, cut points, sentence) of the word-cutting experiment."""
    x_idx, points = sample_arrays(nu, rho, n_letters, n_words, seed)
    symbols = nu.alphabet.symbols
    x = "".join(symbols[i] for i in x_idx)
    pts = tuple(int(j) for j in points)
    return x, pts, cut(x, pts)
