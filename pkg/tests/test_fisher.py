"""Information matrices, bound computations, and divergence checks."""

import numpy as np
import pytest

from crbcompress.errors import BadShape, NotPositiveDefinite, RankDeficient, SingularFim
from crbcompress.fisher import (
    compressed_crb,
    compressed_fim,
    compressed_kl,
    crb,
    crb_angle_form,
    fim,
    kl_divergence,
    normalized_fim,
)
from crbcompress.randcomp import CompressorSpec, derive_stream, sample
from crbcompress.sigmodel import Source, UlaModel, UlaScenario, two_source_half_rayleigh


def _random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_fim_unit_column():
    g = np.zeros((3, 1), dtype=complex)
    g[0, 0] = 1.0
    info = fim(g, 1.0)
    np.testing.assert_allclose(info.J, [[1.0]], atol=0.0)
    assert info.n == 3 and info.p == 1


def test_fim_noise_scaling():
    rng = np.random.default_rng(31)
    g = _random_complex(rng, (6, 2))
    np.testing.assert_allclose(fim(g, 4.0).J, fim(g, 1.0).J / 4.0, rtol=1e-14)


def test_fim_three_sensor_single_source():
    # column is (0, j e^{j theta}, 2j e^{2j theta}); squared norm 0+1+4
    model = UlaModel(UlaScenario(n=3, sources=(Source(0.7),)))
    info = fim(model.jacobian(model.reference_theta), 1.0)
    np.testing.assert_allclose(info.J, [[5.0]], atol=1e-13)


def test_fim_shape_errors():
    rng = np.random.default_rng(32)
    with pytest.raises(BadShape):
        fim(_random_complex(rng, (2, 3)))
    with pytest.raises(BadShape):
        fim(_random_complex(rng, (3, 3)))
    with pytest.raises(BadShape):
        fim(_random_complex(rng, (4, 2)), sigma2=0.0)
    with pytest.raises(BadShape):
        fim(_random_complex(rng, (4, 2)), sigma2=-1.0)


def test_crb_orthogonal_columns():
    g = np.zeros((5, 2), dtype=complex)
    g[0, 0] = 2.0
    g[1, 1] = 1.0 + 1.0j
    info = fim(g, 0.5)
    np.testing.assert_allclose(crb(info, 0), 0.5 / 4.0, rtol=1e-14)
    np.testing.assert_allclose(crb(info, 1), 0.5 / 2.0, rtol=1e-14)


def test_crb_matches_matrix_inverse():
    rng = np.random.default_rng(33)
    g = _random_complex(rng, (10, 3))
    info = fim(g, 0.7)
    inv = np.linalg.inv(info.J)
    for i in range(3):
        np.testing.assert_allclose(crb(info, i), inv[i, i].real, rtol=1e-10)


def test_crb_single_parameter():
    rng = np.random.default_rng(34)
    g = _random_complex(rng, (7, 1))
    info = fim(g, 2.0)
    np.testing.assert_allclose(crb(info, 0), 2.0 / np.sum(np.abs(g) ** 2), rtol=1e-12)


def test_crb_forty_five_degree_angle():
    g = np.zeros((3, 2), dtype=complex)
    g[0, 0] = 1.0
    g[:2, 1] = 1.0 / np.sqrt(2.0)
    info = fim(g, 1.0)
    np.testing.assert_allclose(crb(info, 0), 2.0, rtol=1e-12)
    np.testing.assert_allclose(crb_angle_form(g, 1.0, 0), 2.0, rtol=1e-12)


def test_crb_angle_form_agrees():
    rng = np.random.default_rng(35)
    g = _random_complex(rng, (12, 4))
    info = fim(g, 1.3)
    for i in range(4):
        np.testing.assert_allclose(crb_angle_form(g, 1.3, i), crb(info, i), rtol=1e-10)


def test_crb_near_singular_threshold():
    u = np.zeros(8, dtype=complex)
    v = np.zeros(8, dtype=complex)
    u[0] = 1.0
    v[1] = 1.0
    ok = fim(np.column_stack([u, u + 1e-5 * v]))
    np.testing.assert_allclose(crb(ok, 1), 1e10, rtol=1e-6)
    bad = fim(np.column_stack([u, u + 1e-7 * v]))
    with pytest.raises(SingularFim):
        crb(bad, 1)
    with pytest.raises(BadShape):
        crb(ok, 2)


def test_compressed_fim_identity_map():
    rng = np.random.default_rng(36)
    g = _random_complex(rng, (9, 2))
    info = compressed_fim(g, np.eye(9), 1.0)
    np.testing.assert_allclose(info.J, fim(g).J, atol=1e-12)


def test_compressed_fim_coordinate_truncation():
    rng = np.random.default_rng(37)
    g = _random_complex(rng, (10, 2))
    phi = np.eye(10)[:6]
    info = compressed_fim(g, phi, 0.8)
    np.testing.assert_allclose(info.J, fim(g[:6], 0.8).J, atol=1e-12)


def test_compressed_fim_row_transform_invariance():
    # the bound depends on phi only through its row space
    rng = np.random.default_rng(38)
    g = _random_complex(rng, (12, 2))
    phi = _random_complex(rng, (5, 12))
    t = _random_complex(rng, (5, 5)) + 3.0 * np.eye(5)
    d = np.diag(rng.uniform(0.5, 2.0, size=5)).astype(complex)
    base = compressed_fim(g, phi).J
    np.testing.assert_allclose(compressed_fim(g, d @ phi).J, base, atol=1e-10)
    np.testing.assert_allclose(compressed_fim(g, t @ phi).J, base, atol=1e-10)


def test_compressed_fim_errors():
    rng = np.random.default_rng(39)
    g = _random_complex(rng, (8, 2))
    row = _random_complex(rng, (1, 8))
    with pytest.raises(RankDeficient):
        compressed_fim(g, np.vstack([row, row, row]))
    with pytest.raises(BadShape):
        compressed_fim(g, _random_complex(rng, (2, 8)))
    with pytest.raises(BadShape):
        compressed_fim(g, _random_complex(rng, (9, 8)))
    with pytest.raises(BadShape):
        compressed_fim(g, _random_complex(rng, (4, 7)))


def test_compression_never_improves_the_bound():
    model = UlaModel(two_source_half_rayleigh(24))
    g = model.jacobian(model.reference_theta)
    before = crb(fim(g), 0)
    for trial in range(50):
        spec = CompressorSpec(m=8, n=24, family="gaussian", seed=4)
        phi = sample(spec, derive_stream(4, trial))
        after = compressed_crb(g, phi, 1.0, 0)
        assert after >= before * (1.0 - 1e-10)


def test_compressed_crb_mean_inflation():
    # mean of after/before approaches (n-p)/(m-p) as trials grow
    n, m, p, trials = 32, 16, 2, 3000
    model = UlaModel(two_source_half_rayleigh(n))
    g = model.jacobian(model.reference_theta)
    before = crb(fim(g), 0)
    total = 0.0
    for trial in range(trials):
        phi = sample(CompressorSpec(m=m, n=n, family="gaussian", seed=7), derive_stream(7, trial))
        total += compressed_crb(g, phi, 1.0, 0) / before
    expected = (n - p) / (m - p)
    assert abs(total / trials - expected) < 0.05 * expected


def test_normalized_fim_identity_and_scaling():
    rng = np.random.default_rng(40)
    g = _random_complex(rng, (10, 3))
    before = fim(g)
    w_same = normalized_fim(before, before).W
    np.testing.assert_allclose(w_same, np.eye(3), atol=1e-12)
    half = fim(g / np.sqrt(2.0))
    np.testing.assert_allclose(normalized_fim(before, half).W, 0.5 * np.eye(3), atol=1e-12)
    with pytest.raises(BadShape):
        normalized_fim(before, fim(_random_complex(rng, (10, 2))))


def test_normalized_fim_spectrum_in_unit_interval():
    model = UlaModel(two_source_half_rayleigh(20))
    g = model.jacobian(model.reference_theta)
    before = fim(g)
    for trial in range(40):
        phi = sample(CompressorSpec(m=6, n=20, family="stiefel", seed=9), derive_stream(9, trial))
        w = normalized_fim(before, compressed_fim(g, phi)).W
        eigs = np.linalg.eigvalsh(w)
        assert eigs[0] > -1e-10 and eigs[-1] < 1.0 + 1e-10


def test_kl_zero_for_equal_means():
    rng = np.random.default_rng(41)
    x = _random_complex(rng, 6)
    assert kl_divergence(x, x.copy(), np.eye(6)) == 0.0


def test_kl_identity_covariance():
    rng = np.random.default_rng(42)
    x1 = _random_complex(rng, 5)
    x2 = _random_complex(rng, 5)
    np.testing.assert_allclose(
        kl_divergence(x1, x2, 2.0 * np.eye(5)), np.sum(np.abs(x1 - x2) ** 2) / 2.0, rtol=1e-12
    )


def test_kl_matches_explicit_inverse():
    rng = np.random.default_rng(43)
    b = _random_complex(rng, (6, 6))
    c = b.conj().T @ b + np.eye(6)
    x1 = _random_complex(rng, 6)
    x2 = _random_complex(rng, 6)
    delta = x1 - x2
    expected = np.real(delta.conj() @ np.linalg.inv(c) @ delta)
    np.testing.assert_allclose(kl_divergence(x1, x2, c), expected, rtol=1e-10)
    with pytest.raises(NotPositiveDefinite):
        kl_divergence(x1, x2, np.zeros((6, 6)))


def test_compressed_kl_invertible_map_changes_nothing():
    rng = np.random.default_rng(44)
    b = _random_complex(rng, (6, 6))
    c = b.conj().T @ b + np.eye(6)
    x1 = _random_complex(rng, 6)
    x2 = _random_complex(rng, 6)
    phi = _random_complex(rng, (6, 6)) + 2.0 * np.eye(6)
    np.testing.assert_allclose(
        compressed_kl(x1, x2, c, phi), kl_divergence(x1, x2, c), rtol=1e-10
    )


def test_compressed_kl_projector_form_for_white_noise():
    from crbcompress.cxla import projector

    rng = np.random.default_rng(45)
    x1 = _random_complex(rng, 10)
    x2 = _random_complex(rng, 10)
    phi = _random_complex(rng, (4, 10))
    sigma2 = 0.6
    p = projector(phi.conj().T)
    delta = x1 - x2
    expected = np.real(delta.conj() @ p @ delta) / sigma2
    np.testing.assert_allclose(
        compressed_kl(x1, x2, sigma2 * np.eye(10), phi), expected, rtol=1e-10
    )
    row = _random_complex(rng, (1, 10))
    with pytest.raises(RankDeficient):
        compressed_kl(x1, x2, np.eye(10), np.vstack([row, 2.0 * row]))


def test_compressed_kl_ratio_mean():
    # for white noise the ratio after/before concentrates around m/n
    n, m, trials = 32, 8, 4000
    model = UlaModel(two_source_half_rayleigh(n))
    x1 = model.mean(model.reference_theta)
    x2 = model.mean(model.reference_theta + np.array([0.01, -0.02]))
    c = np.eye(n)
    before = kl_divergence(x1, x2, c)
    total = 0.0
    for trial in range(trials):
        phi = sample(CompressorSpec(m=m, n=n, family="gaussian", seed=3), derive_stream(3, trial))
        total += compressed_kl(x1, x2, c, phi) / before
    assert abs(total / trials - m / n) < 0.02 * (m / n)
