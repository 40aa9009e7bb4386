"""Inverse transform: reflectionless N-soliton construction and the
analytic distance evolution of scattering data.

Waveforms are built by iterated Darboux transformation seeded from the
zero potential.  Each dressing step inserts one prescribed eigenvalue;
the seed coefficient ratio equals the bound state's b coefficient, so
positions and phases survive the direct-scattering round trip.
"""

import numpy as np

from .waveform import ComplexWaveform, GridSpec, WaveformError, soliton_waveform
from .zs import (
    POSITION_GAMMA,
    DiscreteMode,
    ScatteringData,
    ScatteringError,
    position_from_norming,
)

__all__ = [
    "synthesize_single",
    "synthesize_reflectionless",
    "synthesize_from_modes",
    "norming_from_position",
    "evolve_scattering_data",
    "evolve_mode",
]

MIN_ZETA_SEPARATION = 1e-3


def synthesize_single(
    grid: GridSpec, eta: float, kappa: float = 0.0, t0: float = 0.0, sigma0: float = 0.0
) -> ComplexWaveform:
    """Single-soliton transmit waveform at Z = 0; its scattering data is
    one mode at zeta = (kappa + i*eta)/2 with generalized position t0."""
    return soliton_waveform(grid, eta, kappa, t0, sigma0, Z=0.0)


def norming_from_position(zeta: complex, t: float, phase: float = 0.0) -> complex:
    """b coefficient placing a mode at generalized position t:
    |b| = exp(gamma*eta*t), arg(b) = phase (0 by default).

    Exact inverse of the generalized-position extraction."""
    if not zeta.imag > 0:
        raise ScatteringError(f"zeta must be in the upper half-plane, got {zeta}")
    eta = 2.0 * zeta.imag
    return np.exp(POSITION_GAMMA * eta * t) * complex(np.cos(phase), np.sin(phase))


def _vacuum_seed(zeta: complex, b: complex, t: np.ndarray) -> np.ndarray:
    """Normalized zero-potential ZS solution (phi + b*psi) at ``zeta``,
    evaluated in log space so huge |b| or wide windows cannot overflow."""
    e1 = -1j * zeta * t
    e2 = 1j * zeta * t + np.log(complex(b))
    m = np.maximum(e1.real, e2.real)
    return np.stack([np.exp(e1 - m), np.exp(e2 - m)])


def _darboux_apply(q, chi, zeta, others):
    """One dressing step: insert the bound state ``zeta`` whose kernel
    vector is ``chi``; returns the new potential and the other seed
    vectors pushed through the Darboux matrix (zeta_m*I - S)."""
    d = np.abs(chi[0]) ** 2 + np.abs(chi[1]) ** 2
    p12 = chi[0] * np.conj(chi[1]) / d
    p11 = np.abs(chi[0]) ** 2 / d
    # S = zeta*P + conj(zeta)*(I-P) with P the projector onto chi
    s11 = zeta * p11 + np.conj(zeta) * (1.0 - p11)
    s22 = np.conj(zeta) * p11 + zeta * (1.0 - p11)
    s12 = (zeta - np.conj(zeta)) * p12
    s21 = (zeta - np.conj(zeta)) * np.conj(p12)
    q_new = q + 2j * s12
    out = []
    for zm, cm in others:
        v0 = (zm - s11) * cm[0] - s12 * cm[1]
        v1 = -s21 * cm[0] + (zm - s22) * cm[1]
        norm = np.maximum(np.abs(v0), np.abs(v1))
        norm[norm == 0.0] = 1.0
        out.append((zm, np.stack([v0 / norm, v1 / norm])))
    return q_new, out


def synthesize_reflectionless(grid: GridSpec, modes, t0_offset=None) -> ComplexWaveform:
    """Reflectionless N-bound-state waveform from prescribed modes.

    ``modes`` is a sequence of (zeta, t, phase) triples: upper-half-plane
    eigenvalue, generalized position, b-coefficient phase.  Modes are
    inserted in order of decreasing Im(zeta) for conditioning.  Positions
    must lie inside the window and eigenvalues must be pairwise distinct.
    """
    parsed = []
    for zeta, t, phase in modes:
        zeta = complex(zeta)
        if not zeta.imag > 0:
            raise ScatteringError(f"mode eigenvalue {zeta} not in upper half-plane")
        parsed.append((zeta, float(t), float(phase)))
    if not parsed:
        raise ScatteringError("need at least one mode")
    for i in range(len(parsed)):
        for j in range(i + 1, len(parsed)):
            if abs(parsed[i][0] - parsed[j][0]) < MIN_ZETA_SEPARATION:
                raise ScatteringError(
                    f"coincident eigenvalues {parsed[i][0]} and {parsed[j][0]} "
                    f"(min separation {MIN_ZETA_SEPARATION})"
                )
    if t0_offset is None:
        t0_offset = -0.5 * grid.t_span
    tgrid = grid.times(t0_offset)
    for zeta, t, _ in parsed:
        if not (tgrid[0] <= t <= tgrid[-1]):
            raise WaveformError(
                f"mode position t={t:g} outside window [{tgrid[0]:g}, {tgrid[-1]:g}]"
            )
    parsed.sort(key=lambda m: -m[0].imag)
    pending = [
        (zeta, _vacuum_seed(zeta, norming_from_position(zeta, t, phase), tgrid))
        for zeta, t, phase in parsed
    ]
    q = np.zeros(grid.n_samples, dtype=np.complex128)
    while pending:
        zeta, chi = pending.pop(0)
        q, pending = _darboux_apply(q, chi, zeta, pending)
    return ComplexWaveform(grid, q, t0_offset)


def synthesize_from_modes(grid: GridSpec, modes, t0_offset=None) -> ComplexWaveform:
    """Reflectionless waveform from :class:`DiscreteMode` records (uses
    each mode's b coefficient directly)."""
    triples = [
        (m.zeta, position_from_norming(m.zeta, m.b), float(np.angle(m.b)))
        for m in modes
    ]
    return synthesize_reflectionless(grid, triples, t0_offset=t0_offset)


def evolve_mode(m: DiscreteMode, Z: float) -> DiscreteMode:
    """Analytic distance evolution of one bound state: zeta is invariant,
    b and c rotate by exp(2i*zeta^2*Z), the position follows |b|."""
    factor = np.exp(2j * m.zeta**2 * Z)
    b = m.b * factor
    return DiscreteMode(
        zeta=m.zeta,
        b=b,
        c=m.c * factor,
        t_pos=position_from_norming(m.zeta, b) if b != 0.0 else 0.0,
    )


def evolve_scattering_data(sd: ScatteringData, Z: float) -> ScatteringData:
    """Exact linear evolution of the full spectrum over distance Z:
    r(xi) multiplies by exp(2i*xi^2*Z), each mode per :func:`evolve_mode`."""
    modes = tuple(evolve_mode(m, Z) for m in sd.modes)
    refl = sd.reflection * np.exp(2j * sd.xi_grid**2 * Z)
    return ScatteringData(modes, sd.xi_grid, refl)
