import math

import numpy as np
import pytest

from mfgibbs.errors import GridEdgeError
from mfgibbs.spectrum import (alpha_of_q, beta_of_q, endpoints,
                              hausdorff_spectrum_prediction, legendre,
                              packing_spectrum_prediction, spectrum_curve)

LOG3 = math.log(3.0)


def closed_form_beta(q: float) -> float:
    return math.log(0.25 ** q + 0.75 ** q) / LOG3


def test_beta_matches_closed_form(cantor, cantor_psi):
    for q in range(-5, 6):
        got = beta_of_q(cantor, cantor_psi, float(q))
        assert got == pytest.approx(closed_form_beta(q), abs=1e-11)


def test_beta_normalization_identities(cantor, cantor_psi):
    assert beta_of_q(cantor, cantor_psi, 1.0) == pytest.approx(0.0, abs=1e-12)
    assert beta_of_q(cantor, cantor_psi, 0.0) == pytest.approx(
        math.log(2) / LOG3, abs=1e-12)


def test_endpoints_single_letter_extremes(cantor, cantor_psi):
    lo, hi = endpoints(cantor, cantor_psi)
    assert lo == pytest.approx(math.log(4 / 3) / LOG3, abs=1e-12)
    assert hi == pytest.approx(math.log(4) / LOG3, abs=1e-12)


def test_endpoints_collapse_when_degenerate(cantor, uniform_psi):
    lo, hi = endpoints(cantor, uniform_psi)
    assert lo == pytest.approx(hi, abs=1e-10)


def test_curve_shape(cantor_curve):
    assert len(cantor_curve.samples) == 201
    assert not cantor_curve.degenerate
    betas = cantor_curve.betas
    second = betas[:-2] - 2 * betas[1:-1] + betas[2:]
    assert second.min() >= -1e-9  # convex in q
    alphas = cantor_curve.alphas
    assert (np.diff(alphas) <= 1e-12).all()  # alpha decreasing in q
    assert alphas.min() >= cantor_curve.alpha_minus - 1e-6
    assert alphas.max() <= cantor_curve.alpha_plus + 1e-6


def test_legendre_duality(cantor_curve):
    worst = 0.0
    for s in cantor_curve.samples[1:-1]:
        dual = legendre(cantor_curve, s.alpha)
        worst = max(worst, abs(dual.value - (s.beta + s.q * s.alpha)))
    assert worst < 1e-3


def test_legendre_at_dimension_peak(cantor_curve):
    peak = legendre(cantor_curve, cantor_curve.alpha_zero)
    assert peak.interior
    assert peak.value == pytest.approx(math.log(2) / LOG3, abs=1e-6)


def test_legendre_edge_flag(cantor_curve):
    edge = legendre(cantor_curve, cantor_curve.alpha_plus)
    assert not edge.interior
    assert edge.value == pytest.approx(0.0, abs=1e-3)


def test_alpha_of_q(cantor_curve):
    exact = (0.25 * math.log(0.25) + 0.75 * math.log(0.75)) / (-LOG3)
    assert alpha_of_q(cantor_curve, 1.0) == pytest.approx(exact, abs=1e-3)
    with pytest.raises(GridEdgeError):
        alpha_of_q(cantor_curve, -10.0)


def test_degenerate_curve_short_circuits(cantor, uniform_psi):
    curve = spectrum_curve(cantor, uniform_psi)
    assert curve.degenerate
    s = math.log(2) / LOG3
    assert curve.alpha_zero == pytest.approx(s, abs=1e-9)
    for sample in curve.samples[::50]:
        assert sample.beta == pytest.approx(s * (1 - sample.q), abs=1e-9)
        assert sample.alpha == pytest.approx(s, abs=1e-9)
        assert sample.beta_star == pytest.approx(s, abs=1e-9)


def test_moebius_normalized_beta_one(moebius, moebius_psi):
    assert beta_of_q(moebius, moebius_psi, 1.0, k=10) == pytest.approx(
        0.0, abs=1e-6)


def test_predictions_plateau_and_support(cantor_curve):
    az = cantor_curve.alpha_zero
    grid = np.linspace(cantor_curve.alpha_minus - 0.1,
                       cantor_curve.alpha_plus + 0.1, 41)
    haus = hausdorff_spectrum_prediction(cantor_curve, grid)
    pack = packing_spectrum_prediction(cantor_curve, grid)
    plateau = legendre(cantor_curve, az).value
    for h, p in zip(haus, pack):
        if h.empty:
            assert p.empty and math.isnan(h.dim)
            continue
        if h.alpha <= az:
            assert p.dim == pytest.approx(plateau, abs=1e-12)
            assert p.dim >= h.dim - 1e-9  # packing dominates on the left
        else:
            assert p.dim == pytest.approx(h.dim, abs=1e-12)
