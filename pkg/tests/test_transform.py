import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from tailgof.empirical import DensityMeasure, EmpiricalSignedMeasure, build_eta_measure
from tailgof.errors import ConfigError, DomainError, SingularInformationError
from tailgof.families import TailCopulaFamily
from tailgof.transform import (GridSpec, TransformedField, Transformer, _invert_spd, fgh,
                               information_curve, score_vector, transform_field, transform_scores)

FIXED = TailCopulaFamily("fixed_logistic_half")
SMALL = GridSpec(eval_cells=40, integ_cells_per_axis=80)


class SumMeasure:
    def __init__(self, *parts):
        self.parts = parts

    def cell_integrals(self, phi, x_edges, y_edges, smooth=None):
        return sum(p.cell_integrals(phi, x_edges, y_edges, smooth=smooth) for p in self.parts)


def fgh_closed(gamma, x):
    """Textbook branches, used as the oracle away from gamma = 0."""
    L = np.log(x)
    if gamma == 0:
        return (x * L, -x, -x * L * L / 2, L + 1, -1.0, -(L * L + 2 * L) / 2)
    xg = x ** gamma
    return (x * (xg - 1) / gamma, -x * xg, x * (1 - xg) / gamma ** 2 + x * L / gamma,
            ((gamma + 1) * xg - 1) / gamma, -(gamma + 1) * xg,
            (1 - (gamma + 1) * xg) / gamma ** 2 + (L + 1) / gamma)


def test_grid_defaults():
    g = GridSpec()
    assert_allclose(g.mesh, 1 / 200)
    assert len(g.eval_nodes) == 200 and g.eval_nodes[0] > g.delta
    assert_allclose(g.eval_nodes[-1], g.tau)
    e = g.integ_edges
    assert len(e) == 401 and e[0] == g.delta and e[-1] == g.T
    assert np.all(np.diff(e) > 0)
    # integration edges contain every evaluation edge
    assert np.all(np.isin(g.eval_edges, e))


@pytest.mark.parametrize("bad", [dict(delta=0.0), dict(tau=2.0), dict(tau=0.0005), dict(eval_cells=0)])
def test_grid_validation(bad):
    with pytest.raises(ConfigError):
        GridSpec(**bad)


def test_fgh_examples():
    f, g, h, df, dg, dh = fgh(1.0, 2.0)
    assert_allclose((f, g), (2.0, -4.0))
    assert_allclose(fgh(0.0, 1.0), (0, -1, 0, 1, -1, 0), atol=1e-15)
    assert abs(fgh(1e-8, np.e)[0] - np.e) < 1e-6


@pytest.mark.parametrize("gamma", [-0.7, -0.1, 0.0, 0.05, 0.5, 1.3])
def test_fgh_matches_closed_form(gamma):
    x = np.linspace(0.001, 2.0, 57)
    assert_allclose(np.array(fgh(gamma, x)), np.array(np.broadcast_arrays(*fgh_closed(gamma, x))),
                    rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("gamma", [-0.4, 0.0, 1e-7, 0.3])
def test_fgh_derivatives(gamma):
    x = np.linspace(0.01, 2.0, 31)
    eps = 1e-6
    up, dn = fgh(gamma, x + eps), fgh(gamma, x - eps)
    mid = fgh(gamma, x)
    for i in range(3):
        fd = (up[i] - dn[i]) / (2 * eps)
        assert_allclose(mid[i + 3], fd, rtol=1e-5, atol=1e-7)


def test_fgh_continuous_at_zero():
    x = np.linspace(0.001, 2.0, 400)
    base = np.array(fgh(0.0, x))
    # the gamma-derivative of h' is about log(x)^3 / 6, at most ~55 on [delta, T]
    for g in (1e-9, -1e-9, 1e-7, 5e-4, 1.5e-3):
        assert np.max(np.abs(np.array(fgh(g, x)) - base)) < 100 * abs(g) + 1e-12


def test_fgh_domain():
    with pytest.raises(DomainError):
        fgh(0.2, np.array([1.0, 0.0]))


def test_score_examples():
    q = score_vector(FIXED, 0.0, 0.0, 1.0, 1.0)
    assert q.shape == (6,)
    assert_allclose(q[:3], (1.0, -0.5, 0.0), atol=1e-14)
    scaled = TailCopulaFamily("scaled_model1", (0.75,))
    assert_allclose(score_vector(scaled, 0.0, 0.0, 1.0, 1.0)[6], 4 / 3, rtol=1e-6)


@pytest.mark.parametrize("family", [FIXED, TailCopulaFamily("logistic", (0.4,))])
def test_score_symmetry(family, rng):
    s, t = rng.uniform(0.01, 2, 20), rng.uniform(0.01, 2, 20)
    a = score_vector(family, 0.3, 0.3, s, t)
    b = score_vector(family, 0.3, 0.3, t, s)
    assert_allclose(a[:, 3:6], b[:, 0:3], rtol=1e-10, atol=1e-12)


def test_scaled_model1_score_redundancy(rng):
    # psi * R is homogeneous, so the psi score is a combination of the others
    psi = 0.6
    fam = TailCopulaFamily("scaled_model1", (psi,))
    g1, g2 = 0.2, -0.1
    s, t = rng.uniform(0.01, 2, 50), rng.uniform(0.01, 2, 50)
    q = score_vector(fam, g1, g2, s, t)
    combo = -(q[:, 1] + g1 * q[:, 0] + q[:, 4] + g2 * q[:, 3]) / psi
    assert_allclose(q[:, 6], combo, rtol=1e-6, atol=1e-8)
    assert transform_scores(fam, g1, g2, s, t).shape == (50, 6)


def test_redundant_basis_is_singular():
    fam = TailCopulaFamily("scaled_model1", (0.75,))
    tr = Transformer(fam, (0.0, 0.0), SMALL)
    S, T = tr.rule.S, tr.rule.T
    q = score_vector(fam, 0.0, 0.0, S, T)
    full = np.einsum("xyp,xyq,xy->pq", q, q, tr.rule.mass)
    with pytest.raises(SingularInformationError, match="near-singular"):
        _invert_spd(full[None])
    tr.information  # reduced basis inverts fine


def test_information_properties():
    info = information_curve(FIXED, None, (0.1, -0.2), GridSpec())
    mats = info.matrices
    assert np.max(np.abs(mats - np.swapaxes(mats, 1, 2))) <= 1e-12
    assert np.min(np.linalg.eigvalsh(mats)) >= -1e-10
    assert np.min(np.linalg.eigvalsh(mats[0] - mats[-1])) >= -1e-10
    tr = np.trace(mats, axis1=1, axis2=2)
    assert np.all(np.diff(tr) <= 1e-12)
    assert_allclose(np.einsum("tij,tjk->tik", mats, info.inverses)[::37],
                    np.broadcast_to(np.eye(6), (len(mats[::37]), 6, 6)), atol=1e-6)


def test_information_grid_refinement():
    a = information_curve(FIXED, None, (0.0, 0.0), GridSpec()).matrices[0]
    b = information_curve(FIXED, None, (0.0, 0.0), GridSpec().doubled()).matrices[0]
    big = np.abs(b) > 1e-8 * np.abs(b).max()
    assert np.max(np.abs(a - b)[big] / np.abs(b)[big]) <= 1e-3


def test_information_singular_error(monkeypatch):
    import tailgof.transform as tmod
    info = information_curve(FIXED, None, (0.0, 0.0), SMALL)
    monkeypatch.setattr(tmod, "MAX_CONDITION", 0.5 * info.condition_numbers.max())
    with pytest.raises(SingularInformationError, match="decrease tau or increase T"):
        information_curve(FIXED, None, (0.0, 0.0), SMALL)


def _sample_measure(rng, family=FIXED, k=30):
    std = rng.exponential(0.7, size=(200, 2))
    return build_eta_measure(std, k, family)


def test_field_shape_and_determinism(rng):
    meas = _sample_measure(rng)
    a = transform_field(meas, FIXED, None, (0.1, 0.2), SMALL)
    b = transform_field(meas, FIXED, None, (0.1, 0.2), SMALL)
    assert a.values.shape == (40, 40)
    assert a.values.tobytes() == b.values.tobytes()
    assert_allclose(a.x_nodes, SMALL.eval_nodes)


def test_field_additivity(rng):
    fld = transform_field(_sample_measure(rng), FIXED, None, (0.0, 0.0), SMALL)
    whole = fld.rectangle(4, 30, 2, 25)
    parts = fld.rectangle(4, 17, 2, 25) + fld.rectangle(17, 30, 2, 11) + fld.rectangle(17, 30, 11, 25)
    assert_allclose(whole, parts, rtol=1e-12, atol=1e-12)
    assert fld.rectangle(-1, 5, -1, 7) == fld.values[5, 7]


def test_field_linear_in_measure(rng):
    m1, m2 = _sample_measure(rng), _sample_measure(rng)
    tr = Transformer(FIXED, (0.0, 0.1), SMALL)
    both = tr.field(SumMeasure(m1, m2)).values
    assert_allclose(both, tr.field(m1).values + tr.field(m2).values, atol=1e-10)


def test_zero_process_maps_to_zero():
    k = 250
    no_atoms = EmpiricalSignedMeasure(np.empty((0, 2)), k, FIXED)
    compensate = DensityMeasure(lambda s, t: np.sqrt(k) * FIXED.density(s, t))
    fld = transform_field(SumMeasure(no_atoms, compensate), FIXED, None, (0.0, 0.0), GridSpec())
    assert np.max(np.abs(fld.values)) < 1e-3


def test_drift_annihilated():
    tr = Transformer(FIXED, (0.0, 0.0), GridSpec())
    drift = DensityMeasure(lambda s, t: 3.0 * tr.scores(s, t)[..., 1] * FIXED.density(s, t), order=3)
    assert np.max(np.abs(tr.field(drift).values)) <= 5e-2


def test_field_csv_round_trip(tmp_path, rng):
    fld = transform_field(_sample_measure(rng), FIXED, None, (0.0, 0.0), SMALL)
    path = tmp_path / "field.csv"
    fld.to_csv(path)
    back = TransformedField.from_csv(path, SMALL)
    assert back.values.tobytes() == fld.values.tobytes()
    assert_allclose(back.x_nodes, fld.x_nodes, rtol=0)
    header = path.read_text().splitlines()[0].split(",")
    assert len(header) == 41


@settings(max_examples=25, deadline=None)
@given(st.floats(-0.9, 1.5), st.floats(0.002, 2.0))
def test_fgh_finite(gamma, x):
    assert np.all(np.isfinite(fgh(gamma, x)))
