import itertools
import math

import numpy as np
import pytest

from cutwords.errors import InfeasibleError, InputError
from cutwords.laws import (
    ALPHA_INF,
    ALPHA_ONE,
    LetterLaw,
    ReferenceLaw,
    iid_law,
    markov_law,
    renewal_from_atoms,
)
from cutwords.rates import (
    Constraint,
    Neighbourhood,
    ann_rate,
    boundary_rate,
    contraction_upper,
    fin_rate,
    fin_rate_result,
    i_projection,
    que_rate_ladder,
)


def test_ann_rate_zero_at_reference(ref_default):
    assert ann_rate(ref_default.as_iid_process(), ref_default) == pytest.approx(
        0.0, abs=1e-12
    )


def test_ann_rate_point_mass():
    rho = renewal_from_atoms({1: 0.5, 2: 0.5}, 2.0)
    nu = LetterLaw.uniform("ab")
    ref = ReferenceLaw(rho, nu)
    Q = iid_law({"a": 1.0})
    assert ann_rate(Q, ref) == pytest.approx(math.log(4))


def test_ann_rate_unsupported_is_infinite(ref_default):
    assert math.isinf(ann_rate(iid_law({"aaaaa": 1.0}), ref_default))


def test_fin_rate_reference_zero(nu_ab, ref_default):
    iv = fin_rate(ref_default.as_iid_process(), ref_default, 2.0, 8)
    assert iv.contains(0.0)
    assert iv.width <= 1e-9


def test_fin_rate_dominates_annealed(ref_default, law_corpus):
    for kind, syms, Q in law_corpus[:8]:
        if syms != "ab":
            continue
        a = ann_rate(Q, ref_default)
        if math.isinf(a):
            continue
        iv = fin_rate(Q, ref_default, 2.0, 8)
        assert iv.lo >= a - 1e-10


def test_fin_rate_alpha_monotone(ref_default):
    Q = iid_law({"ab": 1.0})
    r15 = fin_rate(Q, ref_default, 1.5, 8)
    r3 = fin_rate(Q, ref_default, 3.0, 8)
    assert r3.lo >= r15.lo - 1e-12


def test_fin_rate_rejects_boundary_alphas(ref_default):
    Q = iid_law({"a": 1.0})
    with pytest.raises(InputError):
        fin_rate(Q, ref_default, ALPHA_ONE, 4)
    with pytest.raises(InputError):
        fin_rate(Q, ref_default, ALPHA_INF, 4)


def test_boundary_rate_alpha_one_equals_annealed(ref_default):
    Q = iid_law({"a": 0.5, "bb": 0.5})
    iv = boundary_rate(Q, ref_default, "one", 6)
    assert iv.lo == pytest.approx(ann_rate(Q, ref_default), abs=1e-12)
    assert iv.width == pytest.approx(0.0, abs=1e-12)


def test_boundary_rate_alpha_inf(ref_default, nu_ab):
    # reference law is letter-typical: rate 0
    iv = boundary_rate(ref_default.as_iid_process(), ref_default, "infinity", 6)
    assert iv.contains(0.0)
    # alternating-word law is not: rate infinite
    iv = boundary_rate(iid_law({"ab": 1.0}), ref_default, "infinity", 6)
    assert math.isinf(iv.lo)


def test_ladder_stabilizes(ref_default):
    Q = iid_law({"a": 0.25, "abb": 0.35, "bbab": 0.4})
    ladder = que_rate_ladder(Q, ref_default, 2.0, [1, 2, 3, 4, 5], 8)
    final = fin_rate(Q, ref_default, 2.0, 8)
    tr, iv = ladder[-1]
    assert iv.lo == pytest.approx(final.lo, abs=1e-9)
    assert iv.hi == pytest.approx(final.hi, abs=1e-9)


def test_ladder_rejects_inexact_markov_truncation(ref_default):
    P = np.full((3, 3), 1.0 / 3)
    Q = markov_law(("ab", "ac", "b"), P)
    with pytest.raises(InputError):
        que_rate_ladder(Q, ReferenceLaw(ref_default.rho, LetterLaw.uniform("abc")), 2.0, [1], 4)


def test_affine_mixture_trend(ref_default):
    """fin_rate along a near-decomposable two-block Markov mixture tends to
    the convex combination of the block rates as cross-transitions vanish."""
    lam = 0.5
    words1, words2 = ("a", "ba"), ("bb", "abb")
    q1 = iid_law({"a": 0.5, "ba": 0.5})
    q2 = iid_law({"bb": 0.5, "abb": 0.5})
    target = 0.5 * fin_rate(q1, ref_default, 2.0, 10).mid + 0.5 * fin_rate(
        q2, ref_default, 2.0, 10
    ).mid
    gaps = []
    for eps in (1e-2, 1e-3, 1e-4):
        k = 4
        P = np.zeros((k, k))
        P[:2, :2] = (1 - eps) / 2
        P[2:, 2:] = (1 - eps) / 2
        P[:2, 2:] = eps / 2
        P[2:, :2] = eps / 2
        Q = markov_law(words1 + words2, P)
        gaps.append(abs(fin_rate(Q, ref_default, 2.0, 10).mid - target))
    # trend check: the gap shrinks monotonically; a finite-depth bias of
    # order log(2)/L remains even at eps -> 0
    assert gaps[0] >= gaps[1] >= gaps[2]
    assert gaps[2] < 0.1


def test_i_projection_spec_example():
    ref = {"a": 0.25, "b": 0.25, "aa": 0.125, "ab": 0.125, "ba": 0.125, "bb": 0.125}
    nbhd = Neighbourhood(constraints=(Constraint(pattern=("a",), low=0.5, high=1.0),))
    q_star, value = i_projection(ref, nbhd)
    assert q_star["a"] == pytest.approx(0.5, abs=1e-9)
    for w in ("b", "aa", "ab", "ba", "bb"):
        assert q_star[w] == pytest.approx(ref[w] * (2.0 / 3.0), abs=1e-9)
    assert value == pytest.approx(0.1438, abs=5e-4)


def test_i_projection_feasible_reference_is_zero():
    ref = {"a": 0.5, "b": 0.5}
    nbhd = Neighbourhood(constraints=(Constraint(pattern=("a",), low=0.25, high=0.6),))
    q_star, value = i_projection(ref, nbhd)
    assert value == pytest.approx(0.0, abs=1e-12)
    assert q_star == pytest.approx(ref)


def test_i_projection_infeasible():
    ref = {"a": 0.5, "b": 0.5}
    nbhd = Neighbourhood(
        constraints=(
            Constraint(pattern=("a",), low=0.8, high=1.0),
            Constraint(pattern=("b",), low=0.8, high=1.0),
        )
    )
    with pytest.raises(InputError):
        i_projection(ref, nbhd)


def test_i_projection_grid_domination():
    # brute-force check on a dense simplex slice: no feasible q beats q*
    ref = {"a": 0.25, "b": 0.25, "aa": 0.125, "ab": 0.125, "ba": 0.125, "bb": 0.125}
    nbhd = Neighbourhood(constraints=(Constraint(pattern=("a",), low=0.5, high=1.0),))
    q_star, value = i_projection(ref, nbhd)
    rng = np.random.Generator(np.random.Philox(key=np.array([11, 0], dtype=np.uint64)))
    atoms = sorted(ref)
    for _ in range(3000):
        q = rng.dirichlet(np.ones(len(atoms)))
        table = dict(zip(atoms, q))
        if table["a"] < 0.5:
            continue
        kl = sum(p * math.log(p / ref[w]) for w, p in table.items() if p > 0)
        assert kl >= value - 1e-9


def test_contraction_upper_exact_at_reference(ref_default):
    marginal = ref_default.enumerate_atoms()
    iv, exact = contraction_upper(marginal, ref_default, 2.0, 6)
    assert exact
    assert iv.contains(0.0)


def test_contraction_upper_interval_case(ref_default):
    iv, exact = contraction_upper({"ab": 1.0}, ref_default, 2.0, 6)
    assert not exact
    assert iv.lo > 0.0


def test_fin_rate_result_serializes(ref_default):
    res = fin_rate_result(iid_law({"a": 0.5, "bb": 0.5}), ref_default, 2.0, 6)
    doc = res.to_json()
    assert doc["annealed"] == pytest.approx(res.annealed)
    assert doc["quenched"] == [res.quenched.lo, res.quenched.hi]
