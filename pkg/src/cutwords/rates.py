"""Annealed and quenched rate functions, truncation ladders, boundary
cases, the i.i.d. contraction upper bound, and I-projection onto
single-word-marginal neighbourhoods."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from typing import Optional

from .errors import InfeasibleError, InputError
from .interval import INF_INTERVAL, Interval, point
from .entropy import psi_rel_entropy_bracket, rel_entropy, spec_rel_entropy
from .laws import ReferenceLaw, WordProcessLaw, iid_law, mean_length, truncate_process
from .psi import r_nu_test


@dataclass(frozen=True)
class Constraint:
    """Pattern frequency box: the empirical frequency of `pattern`
    (a tuple of 1 or 2 words) must lie in [low, high]."""

    pattern: tuple
    low: float
    high: float

    def __post_init__(self):
        if not (0.0 <= self.low < self.high <= 1.0 or self.low == self.high):
            raise InputError(f"constraint bounds must satisfy 0 <= a < b <= 1, got [{self.low}, {self.high}]")
        if len(self.pattern) not in (1, 2):
            raise InputError("only 1- and 2-word patterns are supported")


@dataclass(frozen=True)
class Neighbourhood:
    constraints: tuple

    def __post_init__(self):
        if len(self.constraints) == 0:
            raise InputError("neighbourhood needs at least one constraint")

    @property
    def max_depth(self) -> int:
        return max(len(c.pattern) for c in self.constraints)

    def to_json(self) -> dict:
        return {
            "constraints": [
                {"pattern": list(c.pattern), "low": c.low, "high": c.high}
                for c in self.constraints
            ]
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Neighbourhood":
        return cls(
            tuple(
                Constraint(tuple(c["pattern"]), float(c["low"]), float(c["high"]))
                for c in doc["constraints"]
            )
        )


@dataclass(frozen=True)
class RateResult:
    annealed: float
    quenched: Interval
    alpha: float
    h_rel: float
    m_q: float
    psi_lower: float
    psi_upper: float
    depth: int
    ladder: Optional[tuple] = None  # tuple of (tr, Interval)

    def to_json(self) -> dict:
        doc = {
            "annealed": self.annealed,
            "quenched": [self.quenched.lo, self.quenched.hi],
            "alpha": self.alpha,
            "components": {
                "H_rel": self.h_rel,
                "m_Q": self.m_q,
                "psi_bracket": [self.psi_lower, self.psi_upper],
            },
            "depth": self.depth,
        }
        if self.ladder is not None:
            doc["ladder"] = [
                {"tr": tr, "lower": iv.lo, "upper": iv.hi, "width": iv.width}
                for tr, iv in self.ladder
            ]
        return doc


def ann_rate(Q: WordProcessLaw, ref: ReferenceLaw) -> float:
    """Annealed rate: the specific relative entropy against the reference."""
    return spec_rel_entropy(Q, ref)


def fin_rate(Q: WordProcessLaw, ref: ReferenceLaw, alpha: float, L: int) -> Interval:
    """Quenched rate on finite-mean laws, as a bracket at depth L:
    H_rel + (alpha - 1) * m_Q * [psi relative-entropy bracket]."""
    if not (1.0 < alpha < math.inf):
        raise InputError("fin_rate needs alpha in (1, inf); use boundary_rate otherwise")
    if not Q.exact_truncation:
        raise InputError(
            "law is an inexact lumped truncation (sampler only); "
            "rate evaluation requires the image measure"
        )
    h_rel = spec_rel_entropy(Q, ref)
    if math.isinf(h_rel):
        return INF_INTERVAL
    b = psi_rel_entropy_bracket(Q, ref.nu, L)
    c = (alpha - 1.0) * mean_length(Q)
    iv = b.as_interval().scale(c).shift(h_rel)
    # Outward fp rounding so exact zeros of the rate stay inside the bracket.
    slack = 64.0 * sys.float_info.epsilon * max(1.0, abs(h_rel), c * abs(b.upper))
    return Interval(iv.lo - slack, iv.hi + slack)


def fin_rate_result(Q: WordProcessLaw, ref: ReferenceLaw, alpha: float, L: int,
                    ladder: Optional[tuple] = None) -> RateResult:
    h_rel = spec_rel_entropy(Q, ref)
    b = psi_rel_entropy_bracket(Q, ref.nu, L)
    return RateResult(
        annealed=h_rel,
        quenched=fin_rate(Q, ref, alpha, L),
        alpha=alpha,
        h_rel=h_rel,
        m_q=mean_length(Q),
        psi_lower=b.lower,
        psi_upper=b.upper,
        depth=L,
        ladder=ladder,
    )


def que_rate_ladder(Q: WordProcessLaw, ref: ReferenceLaw, alpha: float,
                    tr_list, L: int) -> list:
    """fin_rate of the truncated law per truncation level.

    For bounded word lengths the ladder stabilizes exactly once tr reaches
    the maximum length.  Markov laws whose truncation map is not injective
    produce inexact lumped chains and are rejected with a diagnostic.
    """
    prev = 0
    out = []
    for tr in tr_list:
        if tr <= prev:
            raise InputError("truncation levels must be strictly increasing")
        prev = tr
        q_tr = truncate_process(Q, tr)
        if not q_tr.exact_truncation:
            raise InputError(
                f"truncation at tr={tr} merges Markov words with distinct rows; "
                "the lumped chain is a sampler only and has no exact rate"
            )
        out.append((tr, fin_rate(q_tr, ref, alpha, L)))
    return out


def boundary_rate(Q: WordProcessLaw, ref: ReferenceLaw, mode: str, L: int) -> Interval:
    """Rate at the tail-exponent boundary: alpha = 1 collapses to the
    annealed rate; alpha = infinity is the annealed rate on letter-typical
    laws and infinite elsewhere."""
    if mode not in ("one", "infinity"):
        raise InputError(f"boundary mode must be 'one' or 'infinity', got {mode!r}")
    a = ann_rate(Q, ref)
    if math.isinf(a):
        return INF_INTERVAL
    if mode == "one":
        return point(a)
    ok, _dev = r_nu_test(Q, ref.nu, L_max=L)
    return point(a) if ok else INF_INTERVAL


def i_projection(ref_marginal: dict, nbhd: Neighbourhood):
    """KL minimizer over box constraints on single-word frequencies.

    KKT structure: free atoms keep the reference ratios scaled by a common
    factor t, boxed atoms are clip(t * ref, box); t solves total mass = 1
    by bisection (total is non-decreasing in t).  Returns (q*, value in nats).
    """
    boxes: dict = {}
    for c in nbhd.constraints:
        if len(c.pattern) != 1:
            raise InputError("i_projection supports single-word constraints only")
        w = c.pattern[0]
        if w not in ref_marginal or ref_marginal[w] <= 0.0:
            raise InfeasibleError(
                f"constrained word {w!r} has zero reference mass (annealed impossibility)"
            )
        lo, hi = boxes.get(w, (0.0, 1.0))
        lo, hi = max(lo, c.low), min(hi, c.high)
        if lo > hi:
            raise InfeasibleError(f"constraints on word {w!r} intersect to an empty box")
        boxes[w] = (lo, hi)

    atoms = sorted(ref_marginal)
    free_mass = sum(ref_marginal[w] for w in atoms if w not in boxes)
    lo_sum = sum(lo for lo, _ in boxes.values())
    hi_sum = sum(hi for _, hi in boxes.values())
    if lo_sum > 1.0 + 1e-12:
        raise InfeasibleError(f"lower bounds sum to {lo_sum} > 1")
    if free_mass == 0.0 and hi_sum < 1.0 - 1e-12:
        raise InfeasibleError(f"all atoms boxed with upper bounds summing to {hi_sum} < 1")

    def total(t: float) -> float:
        s = t * free_mass
        for w, (lo, hi) in boxes.items():
            s += min(max(t * ref_marginal[w], lo), hi)
        return s

    t_lo, t_hi = 0.0, 1.0
    while total(t_hi) < 1.0:
        t_hi *= 2.0
        if t_hi > 1e18:
            raise InfeasibleError("constraint set admits no distribution")
    for _ in range(200):
        mid = 0.5 * (t_lo + t_hi)
        if total(mid) < 1.0:
            t_lo = mid
        else:
            t_hi = mid
    t = 0.5 * (t_lo + t_hi)

    q_star = {}
    for w in atoms:
        if w in boxes:
            lo, hi = boxes[w]
            q_star[w] = min(max(t * ref_marginal[w], lo), hi)
        else:
            q_star[w] = t * ref_marginal[w]
    # fp cleanup: rescale the free atoms for an exact unit total
    drift = 1.0 - sum(q_star.values())
    if free_mass > 0.0 and abs(drift) > 0.0:
        for w in atoms:
            if w not in boxes:
                q_star[w] += drift * ref_marginal[w] / free_mass
    value = rel_entropy(q_star, ref_marginal)
    return q_star, value


def contraction_upper(q: dict, ref: ReferenceLaw, alpha: float, L: int):
    """Upper bound for the contracted (first-word-marginal) quenched rate,
    from the i.i.d. law with marginal q.

    Returns (interval, exact) where exact means the concatenation of
    q^iid is letter-typical for nu, in which case the bound collapses to
    h(q | q_ref) and is the rate itself.
    """
    Q = iid_law(q)
    ref_atoms = {w: ref.word_prob(w) for w in q}
    kl = rel_entropy(q, ref_atoms)
    if math.isinf(kl):
        return INF_INTERVAL, False
    ok, _dev = r_nu_test(Q, ref.nu, L_max=min(L, 8))
    if ok:
        return point(kl), True
    return fin_rate(Q, ref, alpha, L), False
