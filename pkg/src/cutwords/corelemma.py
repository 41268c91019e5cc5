"""Laboratory for the marked-site power-law sum S_N and the convolution
tail bound.

S_N(omega) sums, over N-tuples of marked positions, the product of the
power-law weights of consecutive gaps.  The DP here evaluates it exactly
(up to fp) with log-domain rescaling, and the fractional-moment bound on
its a.s. decay rate is maximized numerically.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.fft
from scipy.optimize import minimize_scalar
from scipy.special import zeta

from .errors import InputError
from .laws import RenewalLaw

_DIRECT_LIMIT = 512


def zeta_partial(s: float, T: int) -> float:
    """Partial zeta sum over 1..T (exact fp summation, descending order)."""
    d = np.arange(1, T + 1, dtype=float)
    return float(np.sum(d ** (-s)))


def bernoulli_omega(p: float, T: int, seed: int, trial: int = 0) -> np.ndarray:
    """Deterministic Bernoulli(p) mark sequence omega_1..omega_T.

    Counter-based keying by (seed, trial) makes trials independent of
    any worker partitioning.
    """
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, trial], dtype=np.uint64)))
    out = np.empty(T)
    np.less(rng.random(T), p, out=out, casting="unsafe")
    return out


def _kernel_fft(alpha: float, T: int, nfft: int):
    k = np.zeros(nfft)
    d = np.arange(1, T + 1, dtype=float)
    k[1 : T + 1] = d ** (-alpha)
    return scipy.fft.rfft(k)


def _nfft(T: int) -> int:
    # Circular wraparound with n >= 2T only aliases onto index 0, which is
    # masked by omega_0 = 0, so outputs at 1..T stay exact.
    return scipy.fft.next_fast_len(2 * T)


def s_n_eval(omega: np.ndarray, alpha: float, N: int, T: int) -> float:
    """log S_N for the first T positions of omega; -inf when fewer than N
    marks exist in the horizon."""
    omega = np.asarray(omega, dtype=float)[:T]
    T = len(omega)
    if N < 1 or T < N:
        raise InputError("need horizon T >= N >= 1")
    if omega.sum() < N:
        return -math.inf
    w = np.zeros(T + 1)
    w[1:] = omega
    if T <= _DIRECT_LIMIT:
        return _s_n_direct(w, alpha, N, T)
    return _s_n_fft(w, alpha, N, T)


def _s_n_direct(w: np.ndarray, alpha: float, N: int, T: int) -> float:
    js = np.arange(T + 1, dtype=float)
    f = np.zeros(T + 1)
    f[1:] = w[1:] * js[1:] ** (-alpha)
    logscale = 0.0
    for _ in range(1, N):
        g = np.zeros(T + 1)
        for j in range(1, T + 1):
            if w[j] == 0.0:
                continue
            prev = f[1:j]
            if prev.any():
                gaps = (j - np.arange(1, j, dtype=float)) ** (-alpha)
                g[j] = float(prev @ gaps)
        f = g
        m = f.max()
        if m <= 0.0:
            return -math.inf
        f /= m
        logscale += math.log(m)
    total = f.sum()
    return math.log(total) + logscale if total > 0 else -math.inf


def _s_n_fft(w: np.ndarray, alpha: float, N: int, T: int, workers: int = 1) -> float:
    nfft = _nfft(T)
    kf = _kernel_fft(alpha, T, nfft)
    js = np.arange(T + 1, dtype=float)
    f = np.zeros(T + 1)
    f[1:] = w[1:] * js[1:] ** (-alpha)
    logscale = 0.0
    for _ in range(1, N):
        conv = scipy.fft.irfft(scipy.fft.rfft(f, n=nfft, workers=workers) * kf, n=nfft, workers=workers)
        f = w * np.maximum(conv[: T + 1], 0.0)
        m = f.max()
        if m <= 0.0:
            return -math.inf
        f /= m
        logscale += math.log(m)
    total = f.sum()
    return math.log(total) + logscale if total > 0 else -math.inf


def phi_bounds(alpha: float, p: float):
    """(lower, upper) bounds on the a.s. decay rate of S_N.

    Upper: alpha log(1/p) from the first-run strategy.  Lower: best
    fractional-moment bound -(1/beta)(log p + log zeta(alpha beta)) over
    beta in (1/alpha, 1].
    """
    if not (alpha > 1.0):
        raise InputError("phi bounds need alpha > 1")
    if not (0.0 < p < 1.0):
        raise InputError("p must lie in (0, 1)")
    upper = alpha * math.log(1.0 / p)

    def neg_bound(beta: float) -> float:
        return (math.log(p) + math.log(float(zeta(alpha * beta)))) / beta

    res = minimize_scalar(neg_bound, bounds=(1.0 / alpha + 1e-9, 1.0), method="bounded",
                          options={"xatol": 1e-12})
    lower = max(-res.fun, -neg_bound(1.0), 0.0)
    return min(lower, upper), upper


@dataclass(frozen=True)
class MeanCheckLevel:
    n: int
    mc_mean: float
    ci_half_width: float
    target: float

    @property
    def ok(self) -> bool:
        return abs(self.mc_mean - self.target) <= 3.0 * self.ci_half_width


@dataclass(frozen=True)
class MeanCheckResult:
    alpha: float
    p: float
    T: int
    trials: int
    seed: int
    levels: tuple

    @property
    def ok(self) -> bool:
        return all(lv.ok for lv in self.levels)


def _mean_check_block(args):
    alpha, p, N, T, seed, lo, hi, nfft, kf, workers = args
    b = hi - lo
    omega = np.empty((b, T + 1))
    omega[:, 0] = 0.0
    for i in range(b):
        omega[i, 1:] = bernoulli_omega(p, T, seed, trial=lo + i)
    js = np.arange(T + 1, dtype=float)
    pw = np.zeros(T + 1)
    pw[1:] = js[1:] ** (-alpha)
    buf = np.zeros((b, nfft))
    np.multiply(omega, pw, out=buf[:, : T + 1])
    sums = [buf[:, : T + 1].sum(axis=1)]
    for _ in range(1, N):
        conv = scipy.fft.irfft(
            scipy.fft.rfft(buf, axis=1, workers=workers) * kf, n=nfft, axis=1, workers=workers
        )
        head = conv[:, : T + 1]
        np.maximum(head, 0.0, out=head)
        np.multiply(head, omega, out=buf[:, : T + 1])
        sums.append(buf[:, : T + 1].sum(axis=1))
    return np.stack(sums)  # (N, block)


def s_n_mean_check(alpha: float, p: float, N: int, T: int, trials: int, seed: int,
                   threads: int = 1, block: int = 256) -> MeanCheckResult:
    """Monte Carlo mean of S_n for n = 1..N against the exact target
    (p * zeta_T(alpha))^n with the horizon-truncated zeta sum.

    Per-trial RNG is keyed by (seed, trial index); blocks are reduced in
    fixed index order, so the result is invariant across thread counts.
    """
    nfft = _nfft(T)
    kf = _kernel_fft(alpha, T, nfft)
    blocks = [(lo, min(lo + block, trials)) for lo in range(0, trials, block)]
    jobs = [(alpha, p, N, T, seed, lo, hi, nfft, kf, 1) for lo, hi in blocks]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(_mean_check_block, jobs))
    else:
        parts = [_mean_check_block(j) for j in jobs]
    values = np.concatenate(parts, axis=1)  # (N, trials)

    zt = float(np.sum(np.arange(1, T + 1, dtype=float) ** (-alpha)))
    levels = []
    for n in range(1, N + 1):
        v = values[n - 1]
        mean = math.fsum(v) / trials
        sd = float(np.std(v, ddof=1))
        half = 1.96 * sd / math.sqrt(trials)
        levels.append(MeanCheckLevel(n=n, mc_mean=mean, ci_half_width=half, target=(p * zt) ** n))
    return MeanCheckResult(alpha=alpha, p=p, T=T, trials=trials, seed=seed, levels=tuple(levels))


def conv_tail_check(rho: RenewalLaw, alpha: float, c_rho: float, m_max: int, n_max: int):
    """Worst ratio of the m-fold convolution against the polynomial tail
    bound (C v 1) m^(alpha+1) n^(-alpha), by exact iterated summation.

    Verifies the single-step premise rho(n) <= C n^(-alpha) first and
    names the violating atom on failure.
    """
    for n in rho.support:
        if rho.probs[n] > c_rho * n ** (-alpha) * (1.0 + 1e-12):
            raise InputError(
                f"premise fails at atom n={n}: rho(n)={rho.probs[n]} > C n^-alpha={c_rho * n ** (-alpha)}"
            )
    c = max(c_rho, 1.0)
    pmf = np.zeros(n_max + 1)
    for n, q in rho.probs.items():
        if n <= n_max:
            pmf[n] = q
    ns = np.arange(1, n_max + 1, dtype=float)
    bound_pow = ns ** (-alpha)
    worst = 0.0
    worst_at = (1, 1)
    conv = pmf.copy()
    for m in range(1, m_max + 1):
        if m > 1:
            conv = np.convolve(conv, pmf)[: n_max + 1]
        ratios = conv[1:] / (c * m ** (alpha + 1.0) * bound_pow)
        j = int(np.argmax(ratios))
        if ratios[j] > worst:
            worst = float(ratios[j])
            worst_at = (m, j + 1)
    return worst, worst_at
