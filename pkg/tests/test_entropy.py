"""Entropy solver against closed forms, hand-derived identities, and the
fixed-point contract."""

import math
from fractions import Fraction

import numpy as np
import pytest

from volentropy import (
    entropy_volume_product,
    scale_metric,
    series_reduce,
    spectral_radius,
    verify_fixed_point,
    volume_entropy,
    weighted_matrix,
)
from volentropy.errors import GraphError

from builders import complete, cycle, dumbbell, graph_doc, theta
from volentropy import build_graph

LOG2 = math.log(2)


def test_theta_unit():
    sol = volume_entropy(theta())
    assert sol.h == pytest.approx(LOG2, rel=1e-9)
    assert max(sol.vector.values()) == pytest.approx(1.0)
    assert min(sol.vector.values()) == pytest.approx(1.0, rel=1e-9)


def test_theta_third_lengths():
    sol = volume_entropy(theta((Fraction(1, 3),) * 3))
    assert sol.h == pytest.approx(3 * LOG2, rel=1e-9)


def test_theta_112_algebraic_identity():
    # with two unit edges and one of length 2, symmetry reduces the
    # fixed-point system to 2u^3 + u = 1 for u = exp(-h)
    sol = volume_entropy(theta((1, 1, 2)))
    u = math.exp(-sol.h)
    assert 2 * u**3 + u == pytest.approx(1.0, abs=1e-10)


def test_dumbbell_unit_algebraic_identity():
    # loops give x = ux + uy, the bridge y = 2ux, so 2u^2 + u = 1 and u = 1/2
    sol = volume_entropy(dumbbell())
    assert sol.h == pytest.approx(LOG2, rel=1e-9)


def test_k4_unit():
    assert volume_entropy(complete(4)).h == pytest.approx(LOG2, rel=1e-9)


def test_cycle_rejected():
    with pytest.raises(GraphError, match="hypotheses"):
        volume_entropy(cycle(4))


def test_bracket_is_sign_bracketing():
    g = theta((1, 2, 3))
    sol = volume_entropy(g)
    lo, hi = sol.bracket
    assert hi - lo < 1e-11
    assert spectral_radius(weighted_matrix(g, lo)).radius > 1
    assert spectral_radius(weighted_matrix(g, hi)).radius < 1


def test_residual_contract():
    for g in (theta(), dumbbell(), complete(4), theta((1, 1, 2))):
        sol = volume_entropy(g)
        assert sol.residual <= 1e-9
        report = verify_fixed_point(g, sol.h, sol.vector)
        assert report.max_residual <= 1e-9


@pytest.mark.parametrize("alpha", [Fraction(1, 3), Fraction(1, 2), 2, 5])
def test_homogeneity(alpha):
    for g in (theta(), dumbbell((1, 2, 1))):
        base = volume_entropy(g).h
        scaled = volume_entropy(scale_metric(g, alpha)).h
        assert scaled == pytest.approx(base / alpha, rel=1e-9)


def test_reduction_invariance():
    g = build_graph(graph_doc(
        ["a", "b", "m"],
        [("e1", "a", "b", 1), ("e2", "a", "b", 1),
         ("e3a", "a", "m", Fraction(1, 2)), ("e3b", "m", "b", Fraction(1, 2))],
    ))
    reduced, _ = series_reduce(g)
    assert volume_entropy(reduced).h == pytest.approx(volume_entropy(g).h, rel=1e-9)


def test_relabeling_invariance():
    base = theta((1, 2, 3))
    relabeled = build_graph(graph_doc(
        ["q", "p"],
        [("z9", "q", "p", 1), ("a1", "p", "q", 2), ("m5", "q", "p", 3)],
    ))
    assert volume_entropy(relabeled).h == pytest.approx(
        volume_entropy(base).h, rel=1e-9
    )


def test_verify_fixed_point_exact_identity():
    g = theta()
    ones = {e.id: 1.0 for e in g.edges}
    report = verify_fixed_point(g, LOG2, ones)
    assert report.max_residual < 1e-15


def test_verify_fixed_point_perturbation():
    g = theta()
    eps = 1e-6
    x = {e.id: 1.0 for e in g.edges}
    x["e1+"] += eps
    report = verify_fixed_point(g, LOG2, x)
    assert eps / 2 <= report.max_residual <= 2 * eps
    assert report.worst_edge == "e1+"


def test_verify_fixed_point_requires_positive():
    g = theta()
    x = {e.id: 1.0 for e in g.edges}
    x["e1+"] = 0.0
    with pytest.raises(GraphError, match="positive"):
        verify_fixed_point(g, LOG2, x)


def test_entropy_volume_product_dilation_invariant():
    g = theta()
    base = entropy_volume_product(g)
    assert base == pytest.approx(3 * LOG2, rel=1e-9)
    for alpha in (Fraction(1, 3), 2, 7):
        assert entropy_volume_product(scale_metric(g, alpha)) == pytest.approx(
            base, rel=1e-9
        )
    assert entropy_volume_product(complete(4, Fraction(1, 6))) == pytest.approx(
        6 * LOG2, rel=1e-9
    )


def test_float_lengths_supported_by_solver():
    g = theta().with_lengths({"e1": 1 / 3, "e2": 1 / 3, "e3": 1 / 3})
    assert volume_entropy(g).h == pytest.approx(3 * LOG2, rel=1e-9)
