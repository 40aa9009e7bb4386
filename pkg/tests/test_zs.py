import numpy as np
import pytest

from solitoncomm import zs
from solitoncomm.synthesis import synthesize_reflectionless
from solitoncomm.waveform import ComplexWaveform, make_grid, soliton_waveform


@pytest.fixture(scope="module")
def sech_fine():
    return soliton_waveform(make_grid(8192, 40.0), 1.0)


def zero_waveform(n=1024, t_span=40.0):
    return ComplexWaveform(make_grid(n, t_span), np.zeros(n, complex))


def test_vacuum_coefficients():
    w = zero_waveform()
    for zeta in (0.3 + 0j, -1.2 + 0j, 0.5j, 0.2 + 0.4j):
        a, b = zs.scattering_coefficients(w, zeta)
        assert a == pytest.approx(1.0, abs=1e-12)
        assert b == pytest.approx(0.0, abs=1e-12)


def test_sech_bound_state_zero_of_a(sech_fine):
    a, _ = zs.scattering_coefficients(sech_fine, 0.5j)
    assert abs(a) < 1e-6


def test_subcritical_sech_has_no_bound_state():
    g = make_grid(2048, 40.0)
    w = soliton_waveform(g, 1.0)
    w04 = w.with_samples(0.4 * w.samples)
    # oracle: |a| stays well away from zero on a dense upper-half-plane grid
    re = np.linspace(-1.5, 1.5, 41)
    im = np.linspace(0.02, 1.0, 41)
    zg = (re[None, :] + 1j * im[:, None]).ravel()
    amin = np.min(np.abs(zs._batch(w04, zg)[0]))
    assert amin > 0.05
    with pytest.warns(UserWarning):
        # spurious coarse-scan minima are dropped with a diagnostic
        evs = zs.find_discrete_eigenvalues(w04)
    assert evs == []


def test_a_derivative_simple_zero(sech_fine):
    d = zs.a_derivative(sech_fine, 0.5j)
    assert abs(d) > 1e-3


def test_a_derivative_vacuum_is_zero():
    # a == 1 identically; the central difference only sees rounding noise
    w = zero_waveform()
    assert abs(zs.a_derivative(w, 0.3 + 0.5j)) < 1e-6


def test_a_derivative_step_consistency(sech_fine):
    # Richardson-style self check at two step sizes
    d1 = zs.a_derivative(sech_fine, 0.3 + 0.4j, h=1e-5)
    d2 = zs.a_derivative(sech_fine, 0.3 + 0.4j, h=1e-6)
    assert abs(d1 - d2) / abs(d2) < 1e-4


def test_find_eigenvalues_sech(sech_fine):
    evs = zs.find_discrete_eigenvalues(sech_fine)
    assert len(evs) == 1
    assert abs(evs[0] - 0.5j) < 1e-6


def test_find_eigenvalues_two_bound_state():
    g = make_grid(16384, 40.0)
    w = synthesize_reflectionless(g, [(1.0j, 0.0, 0.0), (0.5j, 0.0, 0.0)])
    evs = zs.find_discrete_eigenvalues(w)
    assert len(evs) == 2
    assert abs(evs[0] - 1.0j) < 1e-5
    assert abs(evs[1] - 0.5j) < 1e-5


def test_find_eigenvalues_empty_for_vacuum():
    assert zs.find_discrete_eigenvalues(zero_waveform()) == []


def test_norming_constants_centered_sech(sech_fine):
    modes = zs.norming_constants(sech_fine, [zs.find_discrete_eigenvalues(sech_fine, seeds=[0.5j])[0]])
    assert abs(modes[0].t_pos) < 1e-4
    assert modes[0].eta() == pytest.approx(1.0, abs=1e-5)


def test_norming_constants_shifted_soliton():
    g = make_grid(4096, 40.0)
    w = soliton_waveform(g, 1.0, t0=3.0)
    evs = zs.find_discrete_eigenvalues(w, seeds=[0.5j])
    m = zs.norming_constants(w, evs)[0]
    assert m.t_pos == pytest.approx(3.0, abs=1e-3)
    assert m.c == pytest.approx(m.b / zs.a_derivative(w, m.zeta), rel=1e-9)


def test_phase_rotation_moves_only_arg_b():
    g = make_grid(4096, 40.0)
    w0 = soliton_waveform(g, 1.0, t0=1.0, sigma0=0.0)
    w1 = w0.with_samples(w0.samples * np.exp(1j * np.pi / 2))
    m0 = zs.norming_constants(w0, zs.find_discrete_eigenvalues(w0, seeds=[0.5j]))[0]
    m1 = zs.norming_constants(w1, zs.find_discrete_eigenvalues(w1, seeds=[0.5j]))[0]
    assert abs(m1.b) == pytest.approx(abs(m0.b), rel=1e-6)
    assert m1.t_pos == pytest.approx(m0.t_pos, abs=1e-6)
    dphi = np.angle(m1.b / m0.b)
    assert abs(abs(dphi) - np.pi / 2) < 1e-6


def test_reflection_vacuum_is_zero():
    r = zs.reflection_coefficient(zero_waveform(), np.linspace(-5, 5, 21))
    assert np.max(np.abs(r)) < 1e-12


def test_reflection_of_synthesized_soliton_is_tiny():
    g = make_grid(2048, 40.0)
    w = synthesize_reflectionless(g, [(0.5j, 0.0, 0.0)])
    r = zs.reflection_coefficient(w, np.linspace(-10, 10, 81))
    assert np.max(np.abs(r)) < 1e-3


def test_reflection_born_limit():
    # Born/linear ZS: r(xi) ~ -conj(FT of q at 2 xi) for weak potentials
    g = make_grid(2048, 40.0)
    t = g.times()
    q = 0.01 * np.exp(-(t**2))
    w = ComplexWaveform(g, q)
    xi = np.linspace(-2, 2, 17)
    r = zs.reflection_coefficient(w, xi)
    born = np.array(
        [-np.conj(np.trapezoid(q * np.exp(-2j * x * t), t)) for x in xi]
    )
    assert np.max(np.abs(r - born)) / np.max(np.abs(born)) < 0.1


def test_generalized_positions_formula():
    m1 = zs.DiscreteMode(zeta=0.5j, b=1.0 + 0j)
    m2 = zs.DiscreteMode(zeta=1.0j, b=1.0 + 0j)
    assert zs.generalized_positions([m1, m2]) == [0.0, 0.0]
    m3 = zs.DiscreteMode(zeta=0.5j, b=np.exp(2.0) + 0j)
    assert zs.generalized_positions([m3])[0] == pytest.approx(2.0, rel=1e-12)
    with pytest.raises(zs.ScatteringError):
        zs.generalized_positions([zs.DiscreteMode(zeta=0.5j, b=0.0j)])


@pytest.mark.parametrize("t0", [-3.0, 0.0, 3.0])
def test_position_calibration(t0):
    # pins the position convention |b| = exp(gamma*eta*t), gamma = +1
    g = make_grid(4096, 40.0)
    w = soliton_waveform(g, 1.0, t0=t0)
    m = zs.norming_constants(w, zs.find_discrete_eigenvalues(w, seeds=[0.5j]))[0]
    assert m.t_pos == pytest.approx(t0, abs=1e-3)
    assert np.log(abs(m.b)) == pytest.approx(zs.POSITION_GAMMA * m.eta() * t0, abs=1e-3)


def test_translation_covariance():
    g = make_grid(4096, 40.0)
    w0 = soliton_waveform(g, 1.4, t0=-1.0)
    w1 = soliton_waveform(g, 1.4, t0=1.5)
    m0 = zs.norming_constants(w0, zs.find_discrete_eigenvalues(w0, seeds=[0.7j]))[0]
    m1 = zs.norming_constants(w1, zs.find_discrete_eigenvalues(w1, seeds=[0.7j]))[0]
    assert abs(m1.zeta - m0.zeta) < 1e-6
    assert m1.t_pos - m0.t_pos == pytest.approx(2.5, abs=1e-4)


def test_unitarity_on_real_axis():
    g = make_grid(2048, 40.0)
    xi = np.linspace(-8, 8, 101).astype(complex)
    rng = np.random.default_rng(7)
    noise = 0.3 * (rng.standard_normal(2048) + 1j * rng.standard_normal(2048))
    noise *= np.exp(-(g.times() / 15.0) ** 8)  # keep edges quiet
    for w in (
        soliton_waveform(g, 1.0),
        synthesize_reflectionless(g, [(1.0j, 0.0, 0.0), (0.5j, 1.0, 0.5)]),
        ComplexWaveform(g, noise),
    ):
        a, b = zs._batch(w, xi)
        assert np.max(np.abs(np.abs(a) ** 2 + np.abs(b) ** 2 - 1.0)) < 1e-6


def test_a_tends_to_one_far_from_spectrum(sech_fine):
    # leading asymptotics ln a ~ -E/(2 i zeta): |a-1| ~ E/(2|zeta|)
    a50, _ = zs.scattering_coefficients(sech_fine, 50j)
    assert abs(a50 - 1.0) == pytest.approx(2.0 / 100.0, rel=0.05)
    a2000, _ = zs.scattering_coefficients(sech_fine, 2000j)
    assert abs(a2000 - 1.0) < 1e-3


def test_degenerate_eigenvalue_rejected():
    w = zero_waveform()
    with pytest.raises(zs.ScatteringError, match="degenerate"):
        zs.norming_constants(w, [0.5j])  # a == 1 everywhere, a' == 0


def test_scattering_data_validation():
    with pytest.raises(zs.ScatteringError):
        zs.ScatteringData(
            (zs.DiscreteMode(0.5j, 1.0 + 0j), zs.DiscreteMode(0.5j + 1e-9, 1.0 + 0j)),
            np.array([0.0]),
            np.array([0.0j]),
        )
    with pytest.raises(zs.ScatteringError):
        zs.DiscreteMode(zeta=0.5 - 0.1j)


def test_scattering_json_round_trip():
    g = make_grid(2048, 40.0)
    w = synthesize_reflectionless(g, [(0.2 + 0.6j, 0.5, 0.3)])
    sd = zs.scatter_waveform(w, xi_grid=np.linspace(-3, 3, 17), coarse_n=40)
    back = zs.scattering_data_from_json(zs.scattering_data_to_json(sd))
    assert back.modes[0].zeta == sd.modes[0].zeta
    assert back.modes[0].b == sd.modes[0].b
    assert back.modes[0].t_pos == sd.modes[0].t_pos
    assert np.array_equal(back.xi_grid, sd.xi_grid)
    assert np.array_equal(back.reflection, sd.reflection)
