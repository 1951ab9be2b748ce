import math
import random

import numpy as np
import pytest

from cryptidhunt.stats import (
    StatsError,
    group_summary,
    p_from_t,
    pooled_t,
    t_from_summary,
)


def tail_probability_by_quadrature(t, df):
    """Independent oracle: two-tailed p by Gauss-Legendre quadrature.

    p = 1 - integral of the t density over (-|t|, |t|), with the density
    written directly from its definition.
    """
    t = abs(float(t))
    log_c = math.lgamma((df + 1) / 2) - math.lgamma(df / 2) - 0.5 * math.log(df * math.pi)

    def density(u):
        return math.exp(log_c - ((df + 1) / 2) * math.log1p(u * u / df))

    nodes, weights = np.polynomial.legendre.leggauss(80)
    total = 0.0
    panels = 24
    for k in range(panels):
        a = -t + 2 * t * k / panels
        b = -t + 2 * t * (k + 1) / panels
        mid, half = (a + b) / 2, (b - a) / 2
        total += half * sum(w * density(mid + half * x) for x, w in zip(nodes, weights))
    return 1.0 - total


def test_p_from_t_exact_points():
    # t-dist with df=1 is Cauchy: P(|T|>1) = 1 - (2/pi) arctan(1) = 1/2
    assert p_from_t(1, 1) == pytest.approx(0.5, abs=1e-9)
    for df in (1, 2, 5, 30, 298):
        assert p_from_t(0, df) == 1.0


def test_p_from_t_against_quadrature_oracle():
    points = [
        (0.5, 1), (1.0, 1), (2.0, 1), (3.0, 1),
        (0.5, 2), (1.5, 2), (2.5, 2),
        (0.7, 5), (1.0, 5), (4.0, 5),
        (0.3, 10), (2.2, 10),
        (1.0, 30), (3.5, 30),
        (0.9, 100), (4.5, 100),
        (1.4186, 148), (4.9834, 248), (4.4973, 298), (6.0, 298),
    ]
    assert len(points) == 20
    for t, df in points:
        oracle = tail_probability_by_quadrature(t, df)
        assert p_from_t(t, df) == pytest.approx(oracle, abs=1e-8), (t, df)


def test_p_monotone_in_t():
    for df in (1, 5, 50):
        ps = [p_from_t(t, df) for t in np.linspace(0, 8, 30)]
        assert all(a >= b for a, b in zip(ps, ps[1:]))
        assert all(0.0 < p <= 1.0 for p in ps)


def test_group_summary_hand_case():
    s = group_summary([0, 0.5, 1.0])
    assert s.mean == pytest.approx(0.5)
    assert s.sample_sd == pytest.approx(0.5)  # variance (0.25+0+0.25)/2
    assert s.median == pytest.approx(0.5)
    assert s.pass_count == 1
    assert s.pass_rate == pytest.approx(1 / 3)


def test_group_summary_all_zero_and_even_median():
    s = group_summary([0.0] * 50)
    assert (s.mean, s.sample_sd, s.median, s.pass_count) == (0.0, 0.0, 0.0, 0)
    assert group_summary([1, 2, 3, 4]).median == pytest.approx(2.5)
    with pytest.raises(StatsError):
        group_summary([])


def test_pooled_t_hand_case():
    # pooled variance = (2*1 + 3*(5/3)) / 5 = 1.4
    c = pooled_t([1, 2, 3], [1, 2, 3, 4])
    assert c.degrees_of_freedom == 5
    assert c.t_statistic == pytest.approx(-0.55328, abs=1e-4)


def test_identical_groups():
    c = pooled_t([1, 2, 3], [1, 2, 3])
    assert c.t_statistic == 0.0
    assert c.p_two_tailed == 1.0
    assert c.cohens_d == 0.0


def test_degenerate_variance():
    c = pooled_t([2, 2], [2, 2])
    assert (c.t_statistic, c.p_two_tailed) == (0.0, 1.0)
    with pytest.raises(StatsError):
        pooled_t([2, 2], [3, 3])


def test_table_fixture_phonestheme_vs_random():
    c = t_from_summary(0.3709, 0.2997, 200, 0.2087, 0.2837, 100)
    assert abs(c.t_statistic - 4.497) <= 0.1
    assert abs(c.cohens_d - 0.551) <= 0.005
    assert 0.5e-5 <= c.p_two_tailed <= 2e-5  # within a factor of 2 of 1.0e-5
    assert c.degrees_of_freedom == 298


def test_table_fixture_phonestheme_vs_negative():
    c = t_from_summary(0.3709, 0.2997, 200, 0.1412, 0.2556, 50)
    assert abs(c.t_statistic - 4.983) <= 0.1
    assert abs(c.cohens_d - 0.788) <= 0.005
    assert 0.5e-6 <= c.p_two_tailed <= 2e-6
    assert c.degrees_of_freedom == 248


def test_table_fixture_random_vs_negative_not_significant():
    c = t_from_summary(0.2087, 0.2837, 100, 0.1412, 0.2556, 50)
    assert abs(c.t_statistic - 1.418) <= 0.1
    assert c.p_two_tailed == pytest.approx(0.158, abs=0.01)


def test_summary_antisymmetry_trivials():
    same = t_from_summary(2, 1, 10, 2, 1, 10)
    assert same.t_statistic == 0.0
    a = t_from_summary(3, 1, 10, 2, 1, 10)
    b = t_from_summary(2, 1, 10, 3, 1, 10)
    assert a.t_statistic == pytest.approx(-b.t_statistic)
    assert a.p_two_tailed == pytest.approx(b.p_two_tailed)


def test_randomized_antisymmetry_and_pooled_agreement():
    # 1,000 randomized cases: swap-negation and raw-vs-summary agreement
    rng = random.Random(20240817)
    for _ in range(1000):
        n1 = rng.randint(2, 40)
        n2 = rng.randint(2, 40)
        g1 = [rng.gauss(rng.uniform(-2, 2), rng.uniform(0.5, 3)) for _ in range(n1)]
        g2 = [rng.gauss(rng.uniform(-2, 2), rng.uniform(0.5, 3)) for _ in range(n2)]
        fwd = pooled_t(g1, g2)
        rev = pooled_t(g2, g1)
        assert fwd.t_statistic == pytest.approx(-rev.t_statistic, rel=1e-12, abs=1e-12)
        assert fwd.p_two_tailed == pytest.approx(rev.p_two_tailed, rel=1e-9)
        assert abs(fwd.cohens_d) == pytest.approx(abs(rev.cohens_d), rel=1e-12)
        # raw agrees with summary form to 1e-12 relative
        m1 = sum(g1) / n1
        m2 = sum(g2) / n2
        s1 = math.sqrt(sum((x - m1) ** 2 for x in g1) / (n1 - 1))
        s2 = math.sqrt(sum((x - m2) ** 2 for x in g2) / (n2 - 1))
        summ = t_from_summary(m1, s1, n1, m2, s2, n2)
        assert fwd.t_statistic == pytest.approx(summ.t_statistic, rel=1e-12, abs=1e-12)
        assert fwd.cohens_d == pytest.approx(summ.cohens_d, rel=1e-12, abs=1e-12)


def test_scale_shift_invariance_of_d_and_p():
    rng = random.Random(5)
    g1 = [rng.gauss(0, 1) for _ in range(20)]
    g2 = [rng.gauss(0.7, 1.3) for _ in range(25)]
    base = pooled_t(g1, g2)
    a, b = 3.7, -11.0
    scaled = pooled_t([a * x + b for x in g1], [a * x + b for x in g2])
    assert scaled.cohens_d == pytest.approx(base.cohens_d, rel=1e-10)
    assert scaled.p_two_tailed == pytest.approx(base.p_two_tailed, rel=1e-9)
    assert scaled.t_statistic == pytest.approx(base.t_statistic, rel=1e-10)


def test_welch_option():
    g1 = [1.0, 2.0, 3.0, 4.0, 8.0]
    g2 = [1.1, 1.9, 3.2, 3.9, 4.2, 5.0, 2.2]
    student = pooled_t(g1, g2)
    welch = pooled_t(g1, g2, welch=True)
    assert welch.degrees_of_freedom != student.degrees_of_freedom
    assert welch.cohens_d == pytest.approx(student.cohens_d)  # d stays pooled


def test_preconditions():
    with pytest.raises(StatsError):
        pooled_t([1], [1, 2])
    with pytest.raises(StatsError):
        t_from_summary(1, -0.1, 5, 1, 1, 5)
    with pytest.raises(StatsError):
        p_from_t(1.0, 0)
