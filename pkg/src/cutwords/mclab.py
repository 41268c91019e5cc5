"""Simulation and verification experiments: ergodic convergence of the
empirical word process, exact quenched probabilities by cut-point DP,
quenched-vs-annealed slope series, and the waiting-time experiment."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import reduce
from typing import Optional

import numpy as np

from .errors import InputError, SizeBudgetError
from .entropy import rel_entropy
from .laws import LetterLaw, ReferenceLaw, RenewalLaw, sample_arrays
from .rates import Neighbourhood, i_projection
from .words import cut, empirical_patterns

ENUM_BUDGET = 2**22


def _word_id_layout(n_letters_alphabet: int, lengths):
    """Canonical word ids: all words of each supported length, lexicographic."""
    offsets = {}
    total = 0
    for n in lengths:
        offsets[n] = total
        total += n_letters_alphabet**n
    return offsets, total


def _reference_vector(ref: ReferenceLaw, lengths, offsets, total) -> np.ndarray:
    probs = np.zeros(total)
    v = ref.nu.prob_vector()
    for n in lengths:
        block = ref.rho.prob(n) * reduce(np.kron, [v] * n)
        probs[offsets[n] : offsets[n] + len(block)] = block
    return probs


def ergodic_gap(nu: LetterLaw, rho: RenewalLaw, N: int, k: int, seed: int) -> float:
    """Sup-norm gap between the k-word marginal of the empirical process of
    N sampled words and the reference product law."""
    if k not in (1, 2):
        raise InputError("pattern depth must be 1 or 2")
    E = len(nu.alphabet)
    lengths = list(rho.support)
    offsets, total = _word_id_layout(E, lengths)
    if total**k > ENUM_BUDGET:
        raise SizeBudgetError(f"{total}^{k} word patterns exceed budget {ENUM_BUDGET}")

    x, points = sample_arrays(nu, rho, 0, N, seed)
    lens = np.diff(points, prepend=0)
    starts = points - lens
    ids = np.zeros(N, dtype=np.int64)
    for n in lengths:
        sel = np.nonzero(lens == n)[0]
        if len(sel) == 0:
            continue
        val = np.zeros(len(sel), dtype=np.int64)
        for t in range(n):
            val = val * E + x[starts[sel] + t]
        ids[sel] = offsets[n] + val

    ref_vec = _reference_vector(ReferenceLaw(rho, nu), lengths, offsets, total)
    if k == 1:
        freq = np.bincount(ids, minlength=total) / N
        return float(np.max(np.abs(freq - ref_vec)))
    nxt = np.roll(ids, -1)  # periodic wrap: pair (Y_N, Y_1) included
    pair = ids * total + nxt
    freq = np.bincount(pair, minlength=total * total) / N
    return float(np.max(np.abs(freq - np.kron(ref_vec, ref_vec))))


def _split_constraints(nbhd: Neighbourhood):
    l1, l2 = [], []
    for c in nbhd.constraints:
        (l1 if len(c.pattern) == 1 else l2).append(c)
    return l1, l2


def _count_bounds(c, N: int):
    lo = math.ceil(c.low * N - 1e-9)
    hi = math.floor(c.high * N + 1e-9)
    return lo, hi


def quenched_prob_enum(X: str, rho: RenewalLaw, N: int, nbhd: Neighbourhood,
                       Jmax: int, state_budget: int = 2_000_000) -> float:
    """Exact probability that the empirical process of N words cut from the
    fixed X lands in the neighbourhood, summed over all cut vectors with
    increments in supp(rho) intersect [1, Jmax].

    Convention: increment weights are rho's own atoms without
    renormalization, so with the all-pass neighbourhood the total is
    (sum of rho mass <= Jmax)^N.
    """
    incs = [d for d in rho.support if d <= Jmax]
    if not incs:
        raise InputError(f"no renewal atoms within Jmax={Jmax}")
    if N * Jmax > len(X):
        raise InputError(f"need len(X) >= N*Jmax = {N * Jmax}, got {len(X)}")
    cons = nbhd.constraints
    l1, l2 = _split_constraints(nbhd)
    track = bool(l2)
    tracked_words = {w for c in cons for w in c.pattern}

    states = {(0, (0,) * len(cons), None, None): 1.0}
    for i in range(1, N + 1):
        nxt: dict = {}
        for (j, counts, first, last), pr in states.items():
            for d in incs:
                j2 = j + d
                if j2 > len(X):
                    continue
                w = X[j:j2]
                cls = w if w in tracked_words else None
                cc = list(counts)
                for u, c in enumerate(cons):
                    if len(c.pattern) == 1:
                        if w == c.pattern[0]:
                            cc[u] += 1
                    elif i >= 2 and last == c.pattern[0] and w == c.pattern[1]:
                        cc[u] += 1
                key = (
                    j2,
                    tuple(cc),
                    (cls if i == 1 else first) if track else None,
                    cls if track else None,
                )
                nxt[key] = nxt.get(key, 0.0) + pr * rho.probs[d]
        if len(nxt) > state_budget:
            raise SizeBudgetError(
                f"cut-point DP needs {len(nxt)} states at word {i} "
                f"(budget {state_budget}: positions x counts x classes^2)"
            )
        states = nxt

    bounds = [_count_bounds(c, N) for c in cons]
    total = 0.0
    for (j, counts, first, last), pr in states.items():
        final = list(counts)
        for u, c in enumerate(cons):
            if len(c.pattern) == 2 and last == c.pattern[0] and first == c.pattern[1]:
                final[u] += 1
        if all(lo <= final[u] <= hi for u, (lo, hi) in enumerate(bounds)):
            total += pr
    return total


def quenched_prob_brute(X: str, rho: RenewalLaw, N: int, nbhd: Neighbourhood, Jmax: int) -> float:
    """Independent oracle: explicit sum over all admissible cut vectors."""
    incs = [d for d in rho.support if d <= Jmax]
    cons = nbhd.constraints
    total = 0.0
    for taus in itertools.product(incs, repeat=N):
        pts = list(itertools.accumulate(taus))
        if pts[-1] > len(X):
            continue
        s = cut(X, pts)
        ok = True
        for c in cons:
            k = len(c.pattern)
            freq = float(empirical_patterns(s, k).get(tuple(c.pattern), 0.0))
            lo, hi = _count_bounds(c, N)
            if not (lo <= round(freq * N) <= hi):
                ok = False
                break
        if ok:
            total += math.prod(rho.probs[d] for d in taus)
    return total


@dataclass(frozen=True)
class SlopeSeries:
    """Exact quenched decay slopes -(1/N) log P(R_N in nbhd | X) per N."""

    entries: tuple           # (N, probability, slope)
    annealed: float
    discarded_mass: float    # renewal mass beyond Jmax, dropped per increment
    seed: int
    jmax: int

    def to_json(self) -> dict:
        return {
            "entries": [{"N": n, "prob": p, "slope": s} for n, p, s in self.entries],
            "annealed": self.annealed,
            "discarded_mass": self.discarded_mass,
            "seed": self.seed,
            "Jmax": self.jmax,
        }


def quenched_slope_series(nu_x: LetterLaw, rho: RenewalLaw, nbhd: Neighbourhood,
                          N_list, Jmax: int, seed: int,
                          state_budget: int = 2_000_000) -> SlopeSeries:
    """One fixed medium X, exact quenched slopes per N, plus the annealed
    slope from the I-projection onto the same constraints.

    The annealed companion uses the reference word marginal with jumps
    restricted to Jmax and renormalized; the discarded renewal mass is
    reported, not hidden.
    """
    l1, l2 = _split_constraints(nbhd)
    if l2:
        raise InputError("annealed companion supports single-word constraints only")
    n_max = max(N_list)
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, 0], dtype=np.uint64)))
    n_letters = n_max * Jmax
    x_idx = rng.choice(len(nu_x.alphabet), size=n_letters, p=nu_x.prob_vector())
    X = "".join(nu_x.alphabet.symbols[i] for i in x_idx)

    incs = [d for d in rho.support if d <= Jmax]
    kept = sum(rho.probs[d] for d in incs)
    capped = RenewalLaw({d: rho.probs[d] / kept for d in incs}, alpha=rho.alpha)
    ref_marginal = ReferenceLaw(capped, nu_x).enumerate_atoms()
    _, annealed = i_projection(ref_marginal, nbhd)

    entries = []
    for n in N_list:
        prob = quenched_prob_enum(X, rho, n, nbhd, Jmax, state_budget)
        slope = -math.log(prob) / n if prob > 0 else math.inf
        entries.append((int(n), prob, slope))
    return SlopeSeries(
        entries=tuple(entries),
        annealed=annealed,
        discarded_mass=1.0 - kept,
        seed=seed,
        jmax=Jmax,
    )


@dataclass(frozen=True)
class WaitingTimeResult:
    per_m: tuple             # (M, mean_log_sigma, trials, censored)
    slope: float             # fitted slope of E[log sigma_1] vs M
    predicted: float         # per-letter KL of target vs medium law
    tol_typicality: float
    seed: int

    def to_json(self) -> dict:
        return {
            "per_M": [
                {"M": m, "mean_log_sigma": v, "trials": t, "censored": c}
                for m, v, t, c in self.per_m
            ],
            "slope": self.slope,
            "predicted": self.predicted,
            "tol_typicality": self.tol_typicality,
            "seed": self.seed,
        }


def _first_typical_shift(x_idx: np.ndarray, M: int, targets, tol: float, E: int) -> int:
    """Smallest shift i >= 1 whose length-M window is empirically typical,
    or -1 when none exists in the sample."""
    n = len(x_idx)
    if n < M + 1:
        return -1
    ok = np.ones(n - M, dtype=bool)  # window starting at i = 1..n-M
    for e in range(E):
        cs = np.concatenate(([0], np.cumsum(x_idx == e)))
        counts = cs[M + 1 :] - cs[1 : n - M + 1]
        ok &= np.abs(counts / M - targets[e]) <= tol + 1e-12
    hits = np.nonzero(ok)[0]
    return int(hits[0]) + 1 if len(hits) else -1


def waiting_time(nu: LetterLaw, target: LetterLaw, M_list, trials: int,
                 tol_typicality: float, seed: int,
                 horizon_cap: int = 2**24) -> WaitingTimeResult:
    """Waiting time for a typical block of the target letter law inside a
    nu-random medium, versus the per-letter KL exponent.

    sigma_1 is the first shift >= 1 whose M-window has empirical letter
    frequencies within tol_typicality of the target.  Horizons are
    extended by doubling up to horizon_cap; censored trials keep the cap
    value and are counted in the output.
    """
    if target.alphabet != nu.alphabet:
        raise InputError("target and medium letter laws must share the alphabet")
    E = len(nu.alphabet)
    targets = [target.prob(c) for c in nu.alphabet.symbols]
    predicted = rel_entropy(target.probs, nu.probs)
    p_vec = nu.prob_vector()

    # The typical set can be exactly empty when no integer count vector
    # fits inside the tolerance box; that would censor every trial, so
    # reject it up front with the offending M.
    for M in M_list:
        los = [math.ceil(M * (t - tol_typicality) - 1e-12) for t in targets]
        his = [math.floor(M * (t + tol_typicality) + 1e-12) for t in targets]
        if any(lo > hi for lo, hi in zip(los, his)) or sum(los) > M or sum(his) < M:
            raise InputError(
                f"typical set empty at M={M}: no count vector within "
                f"tol_typicality={tol_typicality}; widen the tolerance"
            )

    per_m = []
    means = []
    for M in M_list:
        base = 256 + int(32.0 * math.exp(M * predicted))
        logs = []
        censored = 0
        for t in range(trials):
            rng = np.random.Generator(
                np.random.Philox(key=np.array([seed, (M << 32) | t], dtype=np.uint64))
            )
            horizon = min(base, horizon_cap)
            x = rng.choice(E, size=horizon + M + 1, p=p_vec)
            hit = _first_typical_shift(x, M, targets, tol_typicality, E)
            while hit < 0 and horizon < horizon_cap:
                horizon = min(horizon * 2, horizon_cap)
                x = np.concatenate([x, rng.choice(E, size=horizon + M + 1 - len(x), p=p_vec)])
                hit = _first_typical_shift(x, M, targets, tol_typicality, E)
            if hit < 0:
                censored += 1
                hit = horizon_cap
            logs.append(math.log(hit))
        mean = math.fsum(logs) / trials
        per_m.append((int(M), mean, trials, censored))
        means.append(mean)
    slope = float(np.polyfit(np.asarray(M_list, dtype=float), np.asarray(means), 1)[0])
    return WaitingTimeResult(
        per_m=tuple(per_m),
        slope=slope,
        predicted=predicted,
        tol_typicality=tol_typicality,
        seed=seed,
    )
