"""Split-step spectral integration of the noiseless/stochastic NLS channel.

The model is  i q_Z + (1/2) q_TT + |q|^2 q = eps * R  with R complex white
Gaussian noise of unit two-sided PSD, band-limited to the grid Nyquist and
injected adiabatically along the fiber.  Symmetric (Strang) splitting:
half nonlinear phase, full dispersion step in the spectral domain, noise,
half nonlinear phase.
"""

from dataclasses import dataclass

import numpy as np

from .waveform import ComplexWaveform

__all__ = [
    "ChannelSpec",
    "propagate",
    "propagate_noisy",
    "suggest_steps",
    "StepSizeError",
]

# stability heuristic dz * peak|q|^2 < DZ_LIMIT, suggestions carry SAFETY
DZ_LIMIT = 0.1
SAFETY = 4
MIN_STEPS = 16


class StepSizeError(ValueError):
    """Step size violates the nonlinear-phase stability heuristic."""


@dataclass(frozen=True)
class ChannelSpec:
    """Stochastic channel: distance Z, noise scale eps, step count, seed.

    eps = 0 reduces exactly to the noiseless propagator.
    """

    Z: float
    eps: float = 0.0
    n_steps: int = 0  # 0 means "use suggest_steps"
    seed: int = 0

    def __post_init__(self):
        if not self.Z > 0:
            raise ValueError(f"Z must be positive, got {self.Z}")
        if self.eps < 0:
            raise ValueError(f"eps must be non-negative, got {self.eps}")
        if self.n_steps < 0:
            raise ValueError(f"n_steps must be >= 0, got {self.n_steps}")


def suggest_steps(w: ComplexWaveform, Z: float) -> int:
    """Step count satisfying dz*peak|q|^2 < 0.1 with safety factor 4
    (floor of 16 steps, e.g. for the zero waveform)."""
    peak2 = w.peak_amplitude() ** 2
    n = int(np.ceil(SAFETY * Z * peak2 / DZ_LIMIT))
    return max(n, MIN_STEPS)


def _check_steps(w: ComplexWaveform, Z: float, n_steps: int) -> None:
    if n_steps < 1:
        raise StepSizeError(f"n_steps must be >= 1, got {n_steps}")
    dz = Z / n_steps
    peak2 = w.peak_amplitude() ** 2
    if dz * peak2 >= DZ_LIMIT:
        raise StepSizeError(
            f"dz*peak|q|^2 = {dz * peak2:.3g} >= {DZ_LIMIT}; "
            f"use n_steps >= {suggest_steps(w, Z)}"
        )


_NOISE_CHUNK = 256  # steps drawn per counter-addressed Philox block


def _noise_chunk(seed: int, chunk: int, n_steps_in_chunk: int, n: int) -> np.ndarray:
    # counter-based stream: (seed, chunk index) fully determines the block,
    # so the noise of any step is reproducible independent of execution
    # order across trials/workers
    rng = np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, chunk]))
    block = rng.standard_normal((n_steps_in_chunk, 2, n))
    return block[:, 0, :] + 1j * block[:, 1, :]


def _split_step_run(
    q0: np.ndarray,
    dt: float,
    Z: float,
    n_steps: int,
    eps: float,
    seed: int,
) -> np.ndarray:
    n = len(q0)
    dz = Z / n_steps
    omega = 2.0 * np.pi * np.fft.fftfreq(n, d=dt)
    disp = np.exp(-0.5j * omega**2 * dz)
    q = q0.astype(np.complex128, copy=True)
    noise_std = eps * np.sqrt(dz / (2.0 * dt)) if eps > 0 else 0.0
    block = None

    def nonlinear(qarr, frac):
        # phase rotation exp(i |q|^2 dz*frac); |q| is invariant under it,
        # so adjacent half-steps of the Strang pattern merge exactly
        return qarr * np.exp((1j * dz * frac) * (qarr.real**2 + qarr.imag**2))

    q = nonlinear(q, 0.5)
    for step in range(n_steps):
        q = np.fft.ifft(np.fft.fft(q) * disp)
        if noise_std > 0.0:
            offset = step % _NOISE_CHUNK
            if offset == 0:
                block = _noise_chunk(
                    seed, step // _NOISE_CHUNK, min(_NOISE_CHUNK, n_steps - step), n
                )
            q += noise_std * block[offset]
        q = nonlinear(q, 1.0 if step < n_steps - 1 else 0.5)
    return q


def propagate(w: ComplexWaveform, Z: float, n_steps: int = 0) -> ComplexWaveform:
    """Noiseless NLS evolution of ``w`` over distance ``Z``.

    Deterministic; conserves energy to rounding.  ``n_steps=0`` picks the
    suggested stable step count.
    """
    if n_steps == 0:
        n_steps = suggest_steps(w, Z)
    _check_steps(w, Z, n_steps)
    q = _split_step_run(w.samples, w.dt, Z, n_steps, eps=0.0, seed=0)
    return w.with_samples(q)


def propagate_noisy(w: ComplexWaveform, spec: ChannelSpec) -> ComplexWaveform:
    """Stochastic NLS evolution: after each dispersion sub-step a complex
    circular Gaussian field with per-sample variance eps^2*dz/dt is added
    (distributed amplifier noise, white up to the grid Nyquist).

    Bit-reproducible for equal (seed, n_steps, grid).
    """
    n_steps = spec.n_steps if spec.n_steps else suggest_steps(w, spec.Z)
    _check_steps(w, spec.Z, n_steps)
    q = _split_step_run(w.samples, w.dt, spec.Z, n_steps, spec.eps, spec.seed)
    return w.with_samples(q)
