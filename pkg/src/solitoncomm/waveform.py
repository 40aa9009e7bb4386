"""Sampled complex envelopes, time grids, and closed-form soliton pulses.

All quantities are in the normalized units of the dimensionless focusing
NLS channel: time T, distance Z, amplitude |q|.  Waveforms are immutable
value objects; every operation returns a new waveform.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GridSpec",
    "ComplexWaveform",
    "make_grid",
    "soliton_waveform",
    "energy",
    "write_waveform_csv",
    "read_waveform_csv",
    "WaveformError",
]


class WaveformError(ValueError):
    """Invalid grid or waveform construction."""


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Uniform sampling grid: ``n_samples`` points covering a window of
    length ``t_span``.  ``n_samples`` must be a power of two so spectral
    transforms stay fast."""

    n_samples: int
    t_span: float

    def __post_init__(self):
        if not _is_power_of_two(self.n_samples):
            raise WaveformError(
                f"n_samples must be a power of two, got {self.n_samples}"
            )
        if not self.t_span > 0:
            raise WaveformError(f"t_span must be positive, got {self.t_span}")

    @property
    def dt(self) -> float:
        return self.t_span / self.n_samples

    def times(self, t0_offset: float | None = None) -> np.ndarray:
        """Sample positions (midpoints of the ``n_samples`` cells).  The
        default window is centered on T = 0."""
        if t0_offset is None:
            t0_offset = -0.5 * self.t_span
        return t0_offset + (np.arange(self.n_samples) + 0.5) * self.dt


def make_grid(n_samples: int, t_span: float) -> GridSpec:
    """Build a :class:`GridSpec`; rejects non-power-of-two sample counts."""
    return GridSpec(n_samples=int(n_samples), t_span=float(t_span))


@dataclass(frozen=True)
class ComplexWaveform:
    """A sampled complex envelope q(T) on a finite window.

    ``t0_offset`` is the left edge of the window; samples sit at cell
    midpoints.  Instances are immutable; the samples array is set
    non-writeable on construction.
    """

    grid: GridSpec
    samples: np.ndarray
    t0_offset: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.t0_offset is None:
            object.__setattr__(self, "t0_offset", -0.5 * self.grid.t_span)
        samples = np.asarray(self.samples, dtype=np.complex128)
        if samples.shape != (self.grid.n_samples,):
            raise WaveformError(
                f"samples shape {samples.shape} does not match grid "
                f"n_samples={self.grid.n_samples}"
            )
        if not np.all(np.isfinite(samples.view(np.float64))):
            raise WaveformError("samples contain non-finite values")
        samples = samples.copy()
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    @property
    def times(self) -> np.ndarray:
        return self.grid.times(self.t0_offset)

    @property
    def dt(self) -> float:
        return self.grid.dt

    def with_samples(self, samples: np.ndarray) -> "ComplexWaveform":
        """New waveform on the same grid/window."""
        return ComplexWaveform(self.grid, samples, self.t0_offset)

    def peak_amplitude(self) -> float:
        return float(np.max(np.abs(self.samples))) if self.grid.n_samples else 0.0


def soliton_waveform(
    grid: GridSpec,
    eta: float,
    kappa: float = 0.0,
    t0: float = 0.0,
    sigma0: float = 0.0,
    Z: float = 0.0,
    t0_offset: float | None = None,
    strict: bool = True,
) -> ComplexWaveform:
    """Closed-form fundamental soliton sampled on ``grid``.

        q(T, Z) = eta * sech(eta*(T + kappa*Z - t0))
                  * exp(-i*kappa*T + i*(eta^2 - kappa^2)*Z/2 + i*sigma0)

    The envelope peak sits at T = t0 - kappa*Z.  With ``strict`` the peak
    must lie inside the window (a badly truncated soliton is useless as a
    channel input); set ``strict=False`` to get the truncated samples
    anyway.
    """
    if not eta > 0:
        raise WaveformError(f"eta must be positive, got {eta}")
    if t0_offset is None:
        t0_offset = -0.5 * grid.t_span
    t = grid.times(t0_offset)
    peak = t0 - kappa * Z
    if strict and not (t[0] <= peak <= t[-1]):
        raise WaveformError(
            f"soliton peak at T={peak:g} lies outside the window "
            f"[{t[0]:g}, {t[-1]:g}]"
        )
    arg = eta * (t + kappa * Z - t0)
    phase = -kappa * t + 0.5 * (eta**2 - kappa**2) * Z + sigma0
    q = eta / np.cosh(arg) * np.exp(1j * phase)
    return ComplexWaveform(grid, q, t0_offset)


def energy(w: ComplexWaveform) -> float:
    """Riemann-sum signal energy, integral of |q|^2 dT."""
    return float(np.sum(np.abs(w.samples) ** 2) * w.dt)


def write_waveform_csv(w: ComplexWaveform, path) -> None:
    """Plain-text CSV with header ``t,re,im``; round-trips to 1e-12."""
    t = w.times
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t,re,im\n")
        for ti, qi in zip(t, w.samples):
            fh.write(f"{float(ti)!r},{float(qi.real)!r},{float(qi.imag)!r}\n")


def read_waveform_csv(path) -> ComplexWaveform:
    """Read a ``t,re,im`` CSV written by :func:`write_waveform_csv`.

    The time column must be uniform and the row count a power of two.
    """
    data = np.loadtxt(path, delimiter=",", skiprows=1, dtype=np.float64, ndmin=2)
    if data.shape[1] != 3:
        raise WaveformError(f"expected 3 columns (t,re,im), got {data.shape[1]}")
    t = data[:, 0]
    n = len(t)
    if n < 2:
        raise WaveformError("waveform CSV needs at least 2 samples")
    dt = np.diff(t)
    if np.max(np.abs(dt - dt[0])) > 1e-9 * max(abs(dt[0]), 1.0):
        raise WaveformError("waveform CSV time column is not uniformly sampled")
    grid = make_grid(n, n * float(dt[0]))
    t0_offset = float(t[0]) - 0.5 * grid.dt
    return ComplexWaveform(grid, data[:, 1] + 1j * data[:, 2], t0_offset)
