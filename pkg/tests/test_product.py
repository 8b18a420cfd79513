"""Finite product distributions, exact revenue enumeration, and trim_lift."""

import math

import numpy as np
import pytest

from reservelab.errors import SearchSpaceTooLarge
from reservelab.mechanics import Mechanism, ReserveVector
from reservelab.product import (FiniteDist, ProductDist, expected_revenue_product,
                                optimal_reserves_product, trim_lift)

D1 = FiniteDist(((1.0, 0.5), (3.0, 0.5)))
D2 = FiniteDist(((2.0, 1.0),))
PAIR = ProductDist({"b1": D1, "b2": D2})


def test_finite_dist_validation():
    with pytest.raises(ValueError):
        FiniteDist(())
    with pytest.raises(ValueError):
        FiniteDist(((1.0, 0.5), (1.0, 0.5)))
    with pytest.raises(ValueError):
        FiniteDist(((-1.0, 1.0),))
    with pytest.raises(ValueError):
        FiniteDist(((math.inf, 1.0),))
    with pytest.raises(ValueError):
        FiniteDist(((1.0, 0.0), (2.0, 1.0)))
    with pytest.raises(ValueError):
        FiniteDist(((1.0, 0.3), (2.0, 0.3)))


def test_finite_dist_sorts_atoms():
    d = FiniteDist(((3.0, 0.25), (1.0, 0.75)))
    assert d.atoms == ((1.0, 0.75), (3.0, 0.25))
    assert d.values() == (1.0, 3.0)


def test_trimmed_collapses_low_mass():
    assert D1.trimmed(3.0).atoms == ((0.0, 0.5), (3.0, 0.5))
    # nothing below the cut: same object back
    assert D1.trimmed(1.0) is D1
    assert D1.trimmed(0.5) is D1


def test_trimmed_merges_zero_atom():
    d = FiniteDist(((0.0, 0.2), (1.0, 0.3), (4.0, 0.5)))
    t = d.trimmed(2.0)
    assert t.atoms == ((0.0, 0.5), (4.0, 0.5))


def test_product_dist_validation():
    with pytest.raises(ValueError):
        ProductDist({})
    p = ProductDist({"z": D2, "a": D1})
    assert p.bidder_ids() == ("a", "z")
    assert p.support_size() == 2


def test_expected_revenue_worked_example():
    r = ReserveVector({"b1": 3.0, "b2": 0.0})
    assert expected_revenue_product(PAIR, r, Mechanism.LAZY) == 2.0
    trimmed = ProductDist({"b1": D1.trimmed(3.0), "b2": D2})
    r2 = ReserveVector({"b1": 3.0, "b2": 1.0})
    assert expected_revenue_product(trimmed, r2, Mechanism.EAGER) == 2.0


def test_expected_revenue_zero_reserves_is_mean_second():
    zero = ReserveVector({})
    for mech in Mechanism:
        assert expected_revenue_product(PAIR, zero, mech) == 1.5


def test_expected_revenue_refuses_large_support():
    with pytest.raises(SearchSpaceTooLarge):
        expected_revenue_product(PAIR, ReserveVector({}), Mechanism.LAZY,
                                 max_profiles=1)


def test_optimal_reserves_single_bidder():
    d = ProductDist({"solo": FiniteDist(((2.0, 0.5), (5.0, 0.5)))})
    for mech in Mechanism:
        reserves, rev = optimal_reserves_product(d, mech)
        assert reserves.get("solo") == 5.0
        assert rev == 2.5


def test_optimal_reserves_tie_prefers_lex_smallest():
    point = FiniteDist(((1.0, 1.0),))
    d = ProductDist({"a": point, "b": point})
    for mech in Mechanism:
        reserves, rev = optimal_reserves_product(d, mech)
        assert rev == 1.0
        assert (reserves.get("a"), reserves.get("b")) == (0.0, 0.0)


def test_optimal_reserves_refuses_large_grid():
    with pytest.raises(SearchSpaceTooLarge):
        optimal_reserves_product(PAIR, Mechanism.EAGER, max_product_size=3)


def random_product(rng, max_bidders=3, max_atoms=4):
    n = int(rng.integers(1, max_bidders + 1))
    bidders = {}
    for i in range(n):
        m = int(rng.integers(1, max_atoms + 1))
        values = rng.choice(np.arange(0.0, 8.0, 0.5), size=m, replace=False)
        weights = rng.integers(1, 6, size=m)
        total = int(weights.sum())
        atoms = tuple((float(v), int(w) / total) for v, w in zip(values, weights))
        bidders[f"b{i}"] = FiniteDist(atoms)
    return ProductDist(bidders)


def random_reserves(rng, dist):
    r = {}
    for b, d in dist.bidders.items():
        hi = max(d.values())
        r[b] = float(rng.choice([0.0, hi / 2, hi, hi + 1.0]))
    return ReserveVector(r)


def test_eager_optimum_dominates_lazy_optimum():
    rng = np.random.default_rng(7)
    for _ in range(40):
        dist = random_product(rng)
        _, rev_l = optimal_reserves_product(dist, Mechanism.LAZY)
        _, rev_e = optimal_reserves_product(dist, Mechanism.EAGER)
        assert rev_e >= rev_l - 1e-9


def test_optimum_beats_midpoint_perturbations():
    # the atom grid is lossless: nudging any coordinate off-grid cannot help
    rng = np.random.default_rng(11)
    for _ in range(10):
        dist = random_product(rng)
        for mech in Mechanism:
            reserves, rev = optimal_reserves_product(dist, mech)
            cands = sorted({0.0} | {v for d in dist.bidders.values()
                                    for v in d.values()})
            for b in dist.bidder_ids():
                base = dict((k, reserves.get(k)) for k in dist.bidder_ids())
                for lo, hi in zip(cands, cands[1:]):
                    base[b] = (lo + hi) / 2
                    perturbed = expected_revenue_product(
                        dist, ReserveVector(base), mech)
                    assert perturbed <= rev + 1e-12


def test_trim_lift_worked_example():
    r = ReserveVector({"b1": 3.0, "b2": 0.0})
    out_dist, out_r = trim_lift(PAIR, r)
    assert out_dist.bidders["b1"].atoms == ((0.0, 0.5), (3.0, 0.5))
    assert out_dist.bidders["b2"].atoms == D2.atoms
    assert out_r.get("b1") == 3.0
    assert out_r.get("b2") == 1.0
    rev = expected_revenue_product(out_dist, out_r, Mechanism.LAZY)
    assert rev == 2.0


def test_trim_lift_zero_reserves_noop():
    zero = ReserveVector({b: 0.0 for b in PAIR.bidder_ids()})
    out_dist, out_r = trim_lift(PAIR, zero)
    assert out_dist.bidders == PAIR.bidders
    assert all(out_r.get(b) == 0.0 for b in PAIR.bidder_ids())


def test_trim_lift_chain_random():
    # the two inequality links compare different enumerations, so a real-
    # arithmetic tie may round one ulp apart; allow that much and no more
    def leq(a, b):
        return a <= b + 1e-12 * max(1.0, abs(a))

    rng = np.random.default_rng(23)
    for _ in range(60):
        dist = random_product(rng)
        r = random_reserves(rng, dist)
        out_dist, out_r = trim_lift(dist, r)
        rev_l_before = expected_revenue_product(dist, r, Mechanism.LAZY)
        rev_l_after = expected_revenue_product(out_dist, out_r, Mechanism.LAZY)
        rev_e_after = expected_revenue_product(out_dist, out_r, Mechanism.EAGER)
        rev_e_lifted = expected_revenue_product(dist, out_r, Mechanism.EAGER)
        assert leq(rev_l_before, rev_l_after)
        assert rev_l_after == rev_e_after
        assert leq(rev_e_after, rev_e_lifted)
