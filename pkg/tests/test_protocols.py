import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forrkit import boolfn, protocols
from forrkit.boolfn import constant, linear
from forrkit.circuits import deutsch_jozsa, forrelation2_circuit
from forrkit.protocols import (
    StrategyCurve,
    amplified_success,
    amplitude_amplify,
    amplitude_estimate,
    check_resilient,
    check_uncorrelated,
    estimate_cross_correlation_point,
    estimation_call_bound,
    median_reps_for,
    point_probe,
    point_probe_expected,
    precision_qubits_for,
    qpe_distribution,
    query_cost_comparison,
    sample_cross_correlation,
    strategy_curve,
)
from forrkit.qsim import RY, Circuit, H
from forrkit.spectra import cross_correlation, is_m_resilient, uncorrelated_degree

from . import oracles


def coin(p):
    """One-qubit base circuit with P(1) = p."""
    return Circuit(1, [RY(0, 2 * math.asin(math.sqrt(p)))], {"q": (0,)}, (0,), name="coin")


def is_one(s):
    return s == "1"


class TestStrategyCurve:
    @pytest.mark.parametrize("p,row", [
        (0.0, [0, 0, 0, 0]),
        (0.25, [0.25, 0.4375, 1.0, 0.75]),
        (0.75, [0.75, 0.9375, 0.0, 0.75]),
    ])
    def test_closed_form(self, p, row):
        np.testing.assert_allclose(StrategyCurve.closed_form(p).row()[1:], row, atol=1e-12)

    def test_a33_beats_dj_below_crossover(self):
        for p in np.linspace(0.001, 0.749, 300):
            c = StrategyCurve.closed_form(p)
            assert c.a33 > c.dj_once
            assert all(0 <= v <= 1 for v in c.row())

    def test_empirical_matches(self, f_w):
        closed, emp = strategy_curve(f_w, ["01"])
        assert closed.p == 0.25
        np.testing.assert_allclose(emp.row(), [0.25, 0.25, 0.4375, 1.0, 0.75], atol=1e-10)

    def test_zero_mass(self):
        closed, emp = strategy_curve(linear(2, "11"), ["00", "01"])
        np.testing.assert_allclose(emp.row(), 0, atol=1e-12)

    def test_random(self, rng):
        for n in (2, 3):
            for _ in range(10):
                f = boolfn.random_table(n, rng)
                s = [x for x in range(2**n) if rng.random() < 0.4] or [0]
                strategy_curve(f, s)

    def test_empty_set(self, f_w):
        with pytest.raises(ValueError):
            strategy_curve(f_w, [])


class TestAmplify:
    def test_examples(self):
        assert amplitude_amplify(coin(0.25), is_one, 1)["1"] == pytest.approx(1, abs=1e-12)
        for k in range(4):
            assert amplitude_amplify(coin(0.0), is_one, k)["1"] == pytest.approx(0, abs=1e-12)
        assert amplitude_amplify(coin(1.0), is_one, 0)["1"] == pytest.approx(1)

    def test_dj_base(self, f_w):
        good = lambda s: s == "01"  # noqa: E731
        assert amplitude_amplify(deutsch_jozsa(f_w), good, 1).mass(good) == pytest.approx(1, abs=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0, 1), st.integers(0, 5))
    def test_sin_squared_law(self, p, k):
        got = amplitude_amplify(coin(p), is_one, k)["1"]
        assert got == pytest.approx(amplified_success(p, k), abs=1e-10)

    def test_matrix_matches_callable(self, rng):
        f, g = boolfn.random_table(2, rng), boolfn.random_table(2, rng)
        base = forrelation2_circuit(f, g)
        it = protocols.GroverIterate(base, lambda s: s == "00")
        s = it.initial()
        np.testing.assert_allclose(it.matrix() @ s.amplitudes, it(s).amplitudes, atol=1e-12)


class TestEstimate:
    def test_mass_zero_and_one(self):
        assert amplitude_estimate(coin(0.0), is_one, 4, 3).alpha == pytest.approx(0, abs=1e-12)
        assert amplitude_estimate(coin(1.0), is_one, 4, 3).alpha == pytest.approx(1, abs=1e-12)

    def test_half_at_t3(self):
        dist = qpe_distribution(coin(0.5), is_one, 3)
        support = {y for y, p in dist.items() if p > 1e-12}
        assert support == {"010", "110"}
        for seed in range(5):
            assert amplitude_estimate(coin(0.5), is_one, 3, 1, seed).alpha == pytest.approx(0.5, abs=1e-12)

    def test_qpe_distribution_normalized(self):
        assert qpe_distribution(coin(0.3), is_one, 4).total() == pytest.approx(1, abs=1e-10)

    def test_precision_and_reps(self):
        t = precision_qubits_for(0.025)
        assert protocols.qpe_error_bound(t) <= 0.025 < protocols.qpe_error_bound(t - 1)
        r = median_reps_for(0.1)
        assert r % 2 == 1
        q = 1 - protocols.QPE_SUCCESS
        tail = sum(math.comb(r, j) * q**j * (1 - q) ** (r - j) for j in range((r + 1) // 2, r + 1))
        assert tail <= 0.1
        with pytest.raises(ValueError):
            amplitude_estimate(coin(0.5), is_one, 3, 2)

    @pytest.mark.parametrize("fn,y,want", [
        ("and", "00", 1.0),
        ("and", "11", 0.0),
        ("const", "01", 1.0),
    ])
    def test_examples(self, and2, fn, y, want):
        f = and2 if fn == "and" else constant(2, 1)
        res = estimate_cross_correlation_point(f, f, y, 0.1, 0.1, seed=1)
        assert abs(res.alpha - want) <= 0.1
        assert res.calls <= estimation_call_bound(0.1, 0.1)

    def test_call_bound_grid(self):
        for eps in (0.01, 0.02, 0.05, 0.1, 0.2, 0.25):
            for delta in (0.001, 0.01, 0.05, 0.1, 0.3, 0.5):
                t = precision_qubits_for(eps / 2)
                calls = median_reps_for(delta) * (2 ** (t + 1) - 1)
                assert calls <= estimation_call_bound(eps, delta)

    def test_rejects_bad_eps(self, and2):
        with pytest.raises(ValueError):
            estimate_cross_correlation_point(and2, and2, "00", 0.5, 0.1)


class TestPointProbe:
    @pytest.mark.parametrize("y,want", [("00", (1.0, 1.0)), ("11", (0.0, 0.5))])
    def test_bent_examples(self, and2, y, want):
        assert point_probe(and2, and2, y) == pytest.approx(want, abs=1e-12)

    def test_orthogonal(self):
        assert point_probe(linear(2, "01"), linear(2, "10"), "01") == pytest.approx((0.0, 0.5), abs=1e-12)

    def test_random(self, rng):
        for n in (1, 2, 3):
            f, g = boolfn.random_table(n, rng), boolfn.random_table(n, rng)
            c = oracles.cross_corr(f.values, g.values)
            for y in range(2**n):
                want = ((c[y] / 2**n) ** 2, (1 + c[y] / 2**n) / 2)
                assert point_probe(f, g, y) == pytest.approx(want, abs=1e-10)
                assert point_probe_expected(f, g, y) == pytest.approx(want, abs=1e-12)


class TestSampleCorrelation:
    def test_constant(self):
        c = constant(2, 1)
        out = sample_cross_correlation(c, c, 100, 0).correlation_outcomes()
        assert [out[u]["exact"] for u in ("00", "01", "10", "11")] == pytest.approx([0.25] * 4)

    def test_bent(self, and2):
        out = sample_cross_correlation(and2, and2, 100, 0).correlation_outcomes()
        assert [out[u]["exact"] for u in ("00", "01", "10", "11")] == pytest.approx([0.25, 0, 0, 0], abs=1e-12)

    def test_orthogonal(self):
        rep = sample_cross_correlation(linear(2, "01"), linear(2, "10"), 1000, 3)
        for e in rep.correlation_outcomes().values():
            assert e["exact"] == pytest.approx(0, abs=1e-12) and e["count"] == 0
        assert sum(rep.counts.values()) == 1000


class TestCheckResilient:
    def test_examples(self, f_w):
        v = check_resilient(linear(2, "11"), 1)
        assert v.verdict == "NOT_REFUTED" and v.good_mass == pytest.approx(0, abs=1e-12)
        assert v.oracle_calls <= 2000
        v = check_resilient(constant(2, 1), 0)
        assert v.verdict == "REFUTED" and v.witness == "00" and v.method == "dj-prefilter"
        v = check_resilient(f_w, 0)
        assert v.refuted and v.good_mass == pytest.approx(0.75, abs=1e-12)

    def test_amplified_path(self, f_w):
        v = check_resilient(f_w, 0, prefilter_shots=0, seed=5)
        assert v.refuted and v.method == "a33-amplified" and "1" in v.witness

    def test_exact_matches_definition_n3(self):
        for f in boolfn.all_tables(3):
            for m in range(3):
                v = check_resilient(f, m, exact=True)
                assert v.refuted == (not is_m_resilient(f, m))

    def test_sampled_sound(self, rng):
        for _ in range(30):
            f = boolfn.random_table(3, rng)
            m = int(rng.integers(0, 3))
            v = check_resilient(f, m, budget=300, seed=int(rng.integers(1 << 30)))
            if v.refuted:
                assert not is_m_resilient(f, m)
            assert v.oracle_calls <= 300

    def test_bad_m(self):
        with pytest.raises(ValueError):
            check_resilient(constant(2), 2)


class TestCheckUncorrelated:
    @pytest.mark.parametrize("method", ["flat", "dicke"])
    def test_orthogonal(self, method):
        v = check_uncorrelated(linear(2, "01"), linear(2, "10"), 1, method=method)
        assert v.verdict == "NOT_REFUTED"
        assert v.good_mass == pytest.approx(0, abs=1e-12)
        assert all(e["good_mass"] == pytest.approx(0, abs=1e-12) for e in v.per_weight)

    def test_bent_dicke_immediate(self, and2):
        v = check_uncorrelated(and2, and2, 0, method="dicke")
        assert v.refuted and v.witness == "0000" and v.shots_used == 1
        assert v.per_weight[0]["good_mass"] == pytest.approx(1)

    def test_constant_dicke_weight1(self):
        c = constant(2, 1)
        v = check_uncorrelated(c, c, 1, method="dicke", exact=True)
        assert v.per_weight[1]["good_mass"] == pytest.approx(1)
        assert v.refuted

    def test_exact_matches_definition(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 4))
            f, g = boolfn.random_table(n, rng), boolfn.random_table(n, rng)
            deg = uncorrelated_degree(f, g)
            for m in range(n):
                for method in ("flat", "dicke"):
                    v = check_uncorrelated(f, g, m, method=method, exact=True)
                    assert v.refuted == (deg < m)

    def test_reproducible(self, f_w):
        g = boolfn.indicator_negated(2, {"01"})
        a = check_uncorrelated(f_w, g, 1, method="dicke", seed=9)
        b = check_uncorrelated(f_w, g, 1, method="dicke", seed=9)
        assert a.to_json() == b.to_json()

    def test_witness_is_correlated(self, rng):
        for _ in range(20):
            f, g = boolfn.random_table(3, rng), boolfn.random_table(3, rng)
            v = check_uncorrelated(f, g, 1, seed=int(rng.integers(1 << 30)))
            if v.refuted:
                assert cross_correlation(f, g)[v.witness[:3]] != 0
                assert v.witness[3:] == "000"


class TestQueryCost:
    def test_dicke_within_per_weight_flat_cost(self, rng):
        checked = 0
        for _ in range(200):
            f, g = boolfn.random_table(4, rng), boolfn.random_table(4, rng)
            for m in (0, 1, 2):
                cost = query_cost_comparison(f, g, m)
                if math.isinf(cost["dicke"]):
                    continue
                checked += 1
                assert cost["dicke"] <= cost["flat_per_weight"] * (1 + 1e-12)
        assert checked > 100

    def test_zero_mass_is_infinite(self):
        cost = query_cost_comparison(linear(2, "01"), linear(2, "10"), 1)
        assert math.isinf(cost["dicke"]) and cost["masses"] == [0.0, 0.0]

    def test_masses(self, and2):
        cost = query_cost_comparison(and2, and2, 1)
        assert cost["masses"] == [16.0, 0.0]


def test_hadamard_coin_base():
    base = Circuit(1, [H(0)], {"q": (0,)}, (0,))
    assert amplitude_amplify(base, is_one, 1)["1"] == pytest.approx(amplified_success(0.5, 1), abs=1e-12)
