import math

import numpy as np
import pytest

from cutwords.errors import SizeBudgetError
from cutwords.laws import LetterLaw, iid_law, markov_law, sample_path
from cutwords.psi import (
    conditional_entropy_series,
    hidden_chain,
    minimize_chain,
    pattern_entropy_series,
    psi_marginal,
    r_nu_test,
)


def test_hidden_chain_init_is_stationary():
    Q = iid_law({"a": 0.3, "ab": 0.3, "bb": 0.4})
    ch = hidden_chain(Q, alphabet="ab")
    assert np.allclose(ch.init @ ch.trans, ch.init, atol=1e-12)
    assert ch.init.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(ch.trans.sum(axis=1), 1.0, atol=1e-12)


def test_minimize_chain_preserves_series():
    Q = iid_law({"a": 0.3, "ab": 0.25, "bb": 0.25, "bab": 0.2})
    ch = hidden_chain(Q, alphabet="ab")
    mc = minimize_chain(ch)
    assert mc.n_states < ch.n_states
    assert np.allclose(mc.init @ mc.trans, mc.init, atol=1e-12)
    # both chains describe the same letter process
    a = pattern_entropy_series(ch, 6)
    b = pattern_entropy_series(mc, 6)
    assert a == pytest.approx(b, abs=1e-12)
    c = conditional_entropy_series(ch, 5)
    d = conditional_entropy_series(mc, 5)
    assert c == pytest.approx(d, abs=1e-12)


def test_psi_marginal_alternating_word():
    # all mass on "ab": the letter stream is ...ababab... seen from a
    # uniformly random offset
    table = psi_marginal(iid_law({"ab": 1.0}), 2)
    assert table == {"ab": pytest.approx(0.5), "ba": pytest.approx(0.5)}


def test_psi_marginal_matches_product_for_reference(ref_default, nu_ab):
    Q = ref_default.as_iid_process()
    table = psi_marginal(Q, 3, alphabet="ab")
    for pat, p in table.items():
        assert p == pytest.approx(0.125, abs=1e-12), pat


def test_psi_marginal_normalized_and_consistent():
    Q = iid_law({"a": 0.6, "ba": 0.4})
    t3 = psi_marginal(Q, 3)
    assert sum(t3.values()) == pytest.approx(1.0, abs=1e-12)
    t2 = psi_marginal(Q, 2)
    # depth-3 table marginalizes to the depth-2 table (projective family)
    marg = {}
    for pat, p in t3.items():
        marg[pat[:2]] = marg.get(pat[:2], 0.0) + p
    for pat, p in t2.items():
        assert marg[pat] == pytest.approx(p, abs=1e-12)
    # shift consistency: dropping the first letter also gives depth-2
    shift = {}
    for pat, p in t3.items():
        shift[pat[1:]] = shift.get(pat[1:], 0.0) + p
    for pat, p in t2.items():
        assert shift.get(pat, 0.0) == pytest.approx(p, abs=1e-12)


def test_psi_marginal_against_long_simulation(nu_ab, rho_default):
    # empirical sliding-window frequencies of a million-letter sample
    Q = iid_law({"a": 0.5, "bb": 0.3, "ab": 0.2})
    n = 10**6
    # simulate the word process directly
    rng = np.random.Generator(np.random.Philox(key=np.array([3, 0], dtype=np.uint64)))
    words = rng.choice(Q.words, size=n // 1, p=Q.probs)
    stream = "".join(words.tolist())[:n]
    t2 = psi_marginal(Q, 2)
    for pat, p in t2.items():
        count = 0
        start = 0
        while True:
            i = stream.find(pat, start)
            if i < 0:
                break
            count += 1
            start = i + 1
        emp = count / (len(stream) - 1)
        assert abs(emp - p) < 5.0 / math.sqrt(n)


def test_entropy_series_shapes():
    Q = iid_law({"a": 0.5, "b": 0.5})
    ch = hidden_chain(Q, alphabet="ab")
    h = pattern_entropy_series(ch, 4)
    assert h[0] == 0.0
    # i.i.d. uniform letters: h(pi_t) = t log 2
    for t in range(5):
        assert h[t] == pytest.approx(t * math.log(2), abs=1e-12)
    cond = conditional_entropy_series(ch, 3)
    # the start state pins down the first letter; afterwards letters are
    # fresh fair coins
    assert cond[0] == pytest.approx(0.0, abs=1e-12)
    for v in cond[1:]:
        assert v == pytest.approx(math.log(2), abs=1e-12)


def test_r_nu_test_verdicts(nu_ab, ref_default):
    ok, dev = r_nu_test(ref_default.as_iid_process(), nu_ab, 4)
    assert ok and dev <= 1e-9
    bad, dev = r_nu_test(iid_law({"ab": 1.0}), nu_ab, 2)
    assert not bad and dev > 0.1


def test_pattern_budget():
    Q = iid_law({"a": 0.5, "b": 0.5})
    ch = hidden_chain(Q, alphabet="ab")
    with pytest.raises(SizeBudgetError):
        pattern_entropy_series(ch, 40)
