import numpy as np
import pytest

from ldpcb.channel import ebno_db_to_sigma
from ldpcb.degree import Ensemble
from ldpcb.density_evolution import DEControls, _Grid, bec_recursion, biawgn_de
from ldpcb.errors import ValidationError
from ldpcb.thresholds import de_threshold

REG36 = Ensemble.from_pairs([(3, 1.0)], [(6, 1.0)])


def full_table_box(grid, a, b):
    """Check-node combination through the complete pairwise table."""
    K, step = grid.K, grid.step
    t = np.tanh(np.arange(K + 1) * step / 2)
    prod = np.minimum(np.outer(t, t), np.nextafter(1.0, 0.0))
    table = np.minimum(np.rint(2 * np.arctanh(prod) / step).astype(int), K).ravel()
    (ap, an), (bp, bn) = a, b
    pos = np.bincount(table, (np.outer(ap, bp) + np.outer(an, bn)).ravel(), minlength=K + 1)
    neg = np.bincount(table, (np.outer(ap, bn) + np.outer(an, bp)).ravel(), minlength=K + 1)
    pos[0] += neg[0]
    neg[0] = 0.0
    return pos, neg


@pytest.mark.parametrize("step, rng_", [(0.04, 30.0), (0.1, 20.0), (0.5, 10.0)])
def test_banded_check_node_matches_full_table(step, rng_):
    grid = _Grid(DEControls(llr_quantization_step=step, llr_range=rng_))
    rng = np.random.default_rng(3)
    for _ in range(3):
        u, v = rng.random(grid.N) ** 4, rng.random(grid.N) ** 8
        a, b = grid.split(u / u.sum()), grid.split(v / v.sum())
        got, ref = grid.box(a, b), full_table_box(grid, a, b)
        assert np.max(np.abs(got[0] - ref[0])) < 1e-15
        assert np.max(np.abs(got[1] - ref[1])) < 1e-15


def test_check_node_of_exact_messages():
    grid = _Grid(DEControls(llr_quantization_step=0.1, llr_range=10.0))
    sure = grid.split(np.eye(grid.N)[-1])  # LLR = +range, essentially noiseless
    erased = grid.split(np.eye(grid.N)[grid.K])  # LLR = 0
    v = np.zeros(grid.N)
    v[grid.K + 20] = 0.7
    v[grid.K - 20] = 0.3
    x = grid.split(v)
    pos, neg = grid.box(x, sure)
    assert pos[20] == pytest.approx(0.7) and neg[20] == pytest.approx(0.3)
    pos, neg = grid.box(x, erased)
    assert pos[0] == pytest.approx(1.0)


def test_gaussian_quantization_keeps_mass_and_mean():
    grid = _Grid(DEControls())
    a = grid.quantize_gaussian(2.0, 2.0)
    assert a.sum() == pytest.approx(1.0, abs=1e-12)
    assert float(a @ grid.llr) == pytest.approx(2.0, abs=1e-3)


def test_biawgn_de_far_from_threshold():
    lam, rho = REG36.lambda_edge, REG36.rho_edge
    good = biawgn_de(lam, rho, ebno_db_to_sigma(2.0, 0.5))
    bad = biawgn_de(lam, rho, ebno_db_to_sigma(0.5, 0.5))
    assert good.converged and good.error_probability < 1e-6
    assert not bad.converged and bad.error_probability > 1e-3


def test_biawgn_de_threshold_of_regular_code():
    # (3,6) on the BIAWGN channel: sigma* = 0.8809, i.e. about 1.102 dB
    t = de_threshold(REG36, family="biawgn", de_ctrl=DEControls(bisection_tol_db=0.01), start=0.9)
    assert t == pytest.approx(1.102, abs=0.03)


def test_puncturing_slows_convergence():
    lam, rho = REG36.lambda_edge, REG36.rho_edge
    sigma = ebno_db_to_sigma(2.0, 0.5)
    plain = biawgn_de(lam, rho, sigma)
    punct = biawgn_de(lam, rho, sigma, {3: 0.05})
    assert punct.iterations > plain.iterations or not punct.converged


def bec_punctured_oracle(lam, rho, pi):
    """eps* = min over x of (x - A(x)) / B(x) with A, B the punctured and
    unpunctured parts of the erasure recursion."""
    x = np.linspace(1e-6, 1, 200001)
    y = 1 - rho(1 - x)
    A = sum(l * pi.get(d, 0.0) * y ** (d - 1) for d, l in lam.coefficients.items())
    B = sum(l * (1 - pi.get(d, 0.0)) * y ** (d - 1) for d, l in lam.coefficients.items())
    return float(np.min((x - A) / B))


@pytest.mark.parametrize("pi", [{2: 0.2}, {3: 0.4}, {2: 0.1, 8: 0.5}])
def test_bec_recursion_with_puncturing_matches_oracle(pi):
    e = Ensemble.from_pairs([(2, 0.3), (3, 0.3), (8, 0.4)], [(6, 0.5), (7, 0.5)])
    from ldpcb.parallel import IntentionalPuncturing

    got = de_threshold(e, IntentionalPuncturing.from_mapping(pi), family="bec")
    assert got == pytest.approx(bec_punctured_oracle(e.lambda_edge, e.rho_edge, pi), abs=5e-5)


def test_bec_recursion_noiseless_and_useless():
    lam, rho = REG36.lambda_edge, REG36.rho_edge
    assert bec_recursion(lam, rho, 0.0).converged
    assert not bec_recursion(lam, rho, 1.0).converged


def test_controls_validation():
    with pytest.raises(ValidationError):
        DEControls(llr_quantization_step=0.0005)
    with pytest.raises(ValidationError):
        DEControls(max_iterations=0)
