"""Relative entropy, exact entropy rates, and two-sided letter-process brackets.

Conventions: nats everywhere, 0 log 0 = 0, and absolute-continuity
failures return math.inf (checked before entering any arithmetic that
combines quantities).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, asdict
from typing import Optional

import numpy as np
from scipy.special import xlogy

from .errors import InputError
from .interval import Interval
from .laws import LetterLaw, ReferenceLaw, WordProcessLaw, mean_length
from .psi import (
    conditional_entropy_series,
    hidden_chain,
    pattern_entropy_series,
    psi_marginal_chain,
)

BRACKET_TOL = 1e-10


def rel_entropy(mu: dict, lam: dict) -> float:
    """KL divergence sum(mu log mu/lam) in nats; math.inf when mu is not
    absolutely continuous w.r.t. lam."""
    atom = first_violating_atom(mu, lam)
    if atom is not None:
        return math.inf
    total = 0.0
    for k, p in mu.items():
        if p > 0:
            total += p * (math.log(p) - math.log(lam[k]))
    return max(total, 0.0)


def first_violating_atom(mu: dict, lam: dict):
    """First atom (canonical order) with mu > 0 but lam = 0, else None."""
    for k in sorted(mu):
        if mu[k] > 0 and lam.get(k, 0.0) <= 0.0:
            return k
    return None


def entropy(mu: dict) -> float:
    return float(-sum(xlogy(p, p) for p in mu.values()))


def entropy_rate(Q: WordProcessLaw) -> float:
    """Specific entropy per word: h(q) for iid, the usual closed form for Markov."""
    if Q.variant == "iid":
        return entropy(dict(zip(Q.words, Q.probs)))
    P = np.asarray(Q.transition)
    pi = np.asarray(Q.stationary)
    return float(-(pi[:, None] * xlogy(P, P)).sum())


def expected_log_rho(Q: WordProcessLaw, ref: ReferenceLaw) -> float:
    """E_Q[log rho(tau_1)]; -inf when some word length is outside supp(rho)."""
    total = 0.0
    for w, p in Q.marginal().items():
        r = ref.rho.prob(len(w))
        if r == 0.0:
            if p > 0:
                return -math.inf
            continue
        total += p * math.log(r)
    return total


def expected_log_nu(Q: WordProcessLaw, nu: LetterLaw) -> float:
    """E[log nu(X_1)] under the stationary concatenation law (closed form)."""
    m_q = mean_length(Q)
    total = 0.0
    for w, p in Q.marginal().items():
        total += p * sum(nu.log_prob(c) for c in w)
    return total / m_q


def spec_rel_entropy(Q: WordProcessLaw, ref: ReferenceLaw) -> float:
    """Specific relative entropy per word against the product reference law.

    Exact closed form: -H(Q) - E_Q[log q_ref(Y_1)]; math.inf when some word
    in the support is impossible under the reference (annealed impossibility).
    """
    e_log_q = 0.0
    for w, p in Q.marginal().items():
        lq = ref.log_word_prob(w)
        if math.isinf(lq):
            if p > 0:
                return math.inf
            continue
        e_log_q += p * lq
    return max(-entropy_rate(Q) - e_log_q, 0.0)


@dataclass(frozen=True)
class EntropyBracket:
    """Two-sided bound (nats per symbol or per word) with witnessing depth."""

    lower: float
    upper: float
    depth_used: int

    def __post_init__(self):
        if not (self.lower <= self.upper + BRACKET_TOL):
            raise InputError(f"bracket endpoints out of order: {self.lower} > {self.upper}")

    def as_interval(self) -> Interval:
        return Interval(self.lower, max(self.lower, self.upper))

    @property
    def width(self) -> float:
        return self.upper - self.lower


def psi_entropy_bracket(Q: WordProcessLaw, L: int, alphabet=None) -> EntropyBracket:
    """Sandwich for the entropy rate of the concatenated letter process.

    Lower: next-letter entropy conditioned on the L-prefix and the hidden
    state at time 1; upper: next-letter entropy conditioned on the prefix
    alone.  Both converge to the entropy rate as L grows.
    """
    chain = hidden_chain(Q, alphabet)
    h = pattern_entropy_series(chain, L + 1)
    upper = h[L + 1] - h[L]
    lower = conditional_entropy_series(chain, L)[L]
    return EntropyBracket(lower=min(lower, upper), upper=upper, depth_used=L)


def psi_rel_entropy_bracket(Q: WordProcessLaw, nu: LetterLaw, L: int) -> EntropyBracket:
    """Bracket for the per-letter relative entropy of the concatenation law
    w.r.t. the product letter law.

    Lower: h(pi_L | nu^L)/L (non-decreasing in L); upper: -(conditional
    entropy given prefix and starting hidden state) - E[log nu(X_1)]
    (non-increasing in L).
    """
    chain = hidden_chain(Q, alphabet=nu.alphabet.symbols)
    table = psi_marginal_chain(chain, L)
    h_rel_L = 0.0
    for pat, p in table.items():
        if p > 0:
            h_rel_L += p * (math.log(p) - sum(nu.log_prob(c) for c in pat))
    lower = max(h_rel_L, 0.0) / L
    h_cond = conditional_entropy_series(chain, L)[L]
    upper = -h_cond - expected_log_nu(Q, nu)
    return EntropyBracket(lower=min(lower, upper + BRACKET_TOL), upper=max(lower, upper), depth_used=L)


def psi_bracket_series(Q: WordProcessLaw, nu: LetterLaw, L_max: int):
    """Per-depth (entropy sandwich, relative-entropy bracket) for L = 1..L_max,
    from a single forward pass per DP kind."""
    chain = hidden_chain(Q, alphabet=nu.alphabet.symbols)
    h = pattern_entropy_series(chain, L_max + 1)
    cond = conditional_entropy_series(chain, L_max)
    e_log_nu = expected_log_nu(Q, nu)
    # Per-letter mean log nu of depth-L patterns equals L * sum over the
    # single-letter marginal, by stationarity; accumulate via marginals.
    table = psi_marginal_chain(chain, 1)
    mean_log_nu_1 = sum(p * nu.log_prob(c) for c, p in table.items())
    ent_brackets = []
    rel_brackets = []
    for L in range(1, L_max + 1):
        ent = EntropyBracket(lower=min(cond[L], h[L + 1] - h[L]), upper=h[L + 1] - h[L], depth_used=L)
        rel_lower = max((-h[L] - L * mean_log_nu_1), 0.0) / L
        rel_upper = -cond[L] - e_log_nu
        rel = EntropyBracket(
            lower=min(rel_lower, rel_upper + BRACKET_TOL),
            upper=max(rel_lower, rel_upper),
            depth_used=L,
        )
        ent_brackets.append(ent)
        rel_brackets.append(rel)
    return ent_brackets, rel_brackets


def h_tau_given_k(Q: WordProcessLaw, psi_ent: EntropyBracket) -> Interval:
    """Conditional word-length entropy via H(Q) = m_Q H(psi) + H_{tau|K},
    as an interval from the entropy sandwich, clipped below at 0."""
    h_q = entropy_rate(Q)
    m_q = mean_length(Q)
    lo = max(0.0, h_q - m_q * psi_ent.upper)
    hi = max(0.0, h_q - m_q * psi_ent.lower)
    return Interval(lo, min(hi, h_q))


def identity_residual(Q: WordProcessLaw, ref: ReferenceLaw, L: int,
                      sandwich: EntropyBracket | None = None) -> Interval:
    """Residual of the per-word entropy identity
    H(Q|q^N) = m_Q H(psi|nu^N) - H_{tau|K} - E_Q[log rho],
    evaluated over the entropy sandwich for H(psi).

    Both the relative-entropy term and H_{tau|K} are monotone functions of
    the one uncertain quantity (the concatenation entropy rate), so the
    residual is evaluated along that single parameter; without the >= 0
    clipping of H_{tau|K} it is identically zero.
    """
    h_rel_q = spec_rel_entropy(Q, ref)
    if math.isinf(h_rel_q):
        raise InputError("identity undefined: Q not absolutely continuous w.r.t. reference")
    h_q = entropy_rate(Q)
    m_q = mean_length(Q)
    e_log_rho = expected_log_rho(Q, ref)
    e_log_nu = expected_log_nu(Q, ref.nu)
    if sandwich is None:
        sandwich = psi_entropy_bracket(Q, L, alphabet=ref.nu.alphabet.symbols)

    def residual(h_psi: float) -> float:
        rel = -h_psi - e_log_nu
        tau_k = max(0.0, h_q - m_q * h_psi)
        return h_rel_q - (m_q * rel - tau_k - e_log_rho)

    candidates = [sandwich.lower, sandwich.upper]
    knee = h_q / m_q  # where the clipping activates
    if sandwich.lower < knee < sandwich.upper:
        candidates.append(knee)
    vals = [residual(h) for h in candidates]
    # Outward rounding: the pieces are long entropy sums, so pad the
    # endpoints by an fp-error allowance at the scale of the summands.
    scale = max(1.0, abs(h_rel_q), abs(h_q), m_q * (abs(e_log_nu) + sandwich.upper),
                abs(e_log_rho))
    slack = 64.0 * np.finfo(float).eps * scale
    return Interval(min(vals) - slack, max(vals) + slack)


@dataclass(frozen=True)
class EntropyReport:
    """All per-word entropy quantities of Q against a reference law."""

    h_q: float
    h_rel: float
    m_q: float
    psi_bracket: EntropyBracket          # relative entropy per letter
    psi_entropy: EntropyBracket          # entropy rate per letter
    h_tau_given_k: Interval
    e_log_rho: float
    e_log_nu: float
    depth: int

    def to_json(self) -> dict:
        return {
            "H_Q": self.h_q,
            "H_rel": self.h_rel,
            "m_Q": self.m_q,
            "psi_rel_entropy_bracket": asdict(self.psi_bracket),
            "psi_entropy_bracket": asdict(self.psi_entropy),
            "H_tau_given_K": [self.h_tau_given_k.lo, self.h_tau_given_k.hi],
            "E_log_rho": self.e_log_rho,
            "E_log_nu": self.e_log_nu,
            "depth": self.depth,
        }


def entropy_report(Q: WordProcessLaw, ref: ReferenceLaw, L: int) -> EntropyReport:
    ent = psi_entropy_bracket(Q, L, alphabet=ref.nu.alphabet.symbols)
    rel = psi_rel_entropy_bracket(Q, ref.nu, L)
    return EntropyReport(
        h_q=entropy_rate(Q),
        h_rel=spec_rel_entropy(Q, ref),
        m_q=mean_length(Q),
        psi_bracket=rel,
        psi_entropy=ent,
        h_tau_given_k=h_tau_given_k(Q, ent),
        e_log_rho=expected_log_rho(Q, ref),
        e_log_nu=expected_log_nu(Q, ref.nu),
        depth=L,
    )


def marginal_rel_entropy(Q: WordProcessLaw, ref: ReferenceLaw, N: int) -> float:
    """(1/N) h(N-word marginal of Q | reference product), by exact enumeration.

    Non-decreasing in N; used by invariants.  Exponential in N, so keep
    N small (<= 4 for desk-scale word sets).
    """
    marg = Q.marginal()
    if Q.variant == "iid":
        total = 0.0
        for w, p in marg.items():
            lq = ref.log_word_prob(w)
            if math.isinf(lq) and p > 0:
                return math.inf
            if p > 0:
                total += p * (math.log(p) - lq)
        return max(total, 0.0)
    words = Q.words
    P = np.asarray(Q.transition)
    pi = np.asarray(Q.stationary)
    total = 0.0
    for path in itertools.product(range(len(words)), repeat=N):
        p = pi[path[0]]
        for a, b in zip(path, path[1:]):
            p *= P[a, b]
        if p <= 0:
            continue
        log_ref = sum(ref.log_word_prob(words[i]) for i in path)
        if math.isinf(log_ref):
            return math.inf
        total += p * (math.log(p) - log_ref)
    return max(total, 0.0) / N
