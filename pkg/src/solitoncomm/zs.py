"""Direct scattering for the focusing Zakharov-Shabat system.

Computes the transmission/reflection coefficients a, b, the discrete
eigenvalues (zeros of a in the upper half-plane), norming constants, and
the generalized positions encoded in |b| at each bound state.

Spectral convention: a fundamental soliton of amplitude eta and velocity
kappa has the single eigenvalue  zeta = (kappa + i*eta)/2,  so
eta = 2*Im(zeta) and kappa = 2*Re(zeta).
"""

import json
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .waveform import ComplexWaveform

__all__ = [
    "DiscreteMode",
    "ScatteringData",
    "SearchRect",
    "scattering_coefficients",
    "a_derivative",
    "find_discrete_eigenvalues",
    "norming_constants",
    "reflection_coefficient",
    "generalized_positions",
    "position_from_norming",
    "scatter_waveform",
    "scattering_data_to_json",
    "scattering_data_from_json",
    "ScatteringError",
    "POSITION_GAMMA",
]

# |b| = exp(POSITION_GAMMA * eta * t) defines the generalized position t.
# Fixed once by the t0-recovery calibration test on known solitons.
POSITION_GAMMA = 1.0

NEWTON_TOL = 1e-9
NEWTON_MAX_ITERS = 50
DEFLATION_TOL = 1e-6
IM_FLOOR = 0.01
DEGENERATE_APRIME_TOL = 1e-8


class ScatteringError(ValueError):
    """Direct-scattering failure (degenerate modes, undefined position...)."""


@dataclass(frozen=True)
class DiscreteMode:
    """One bound state: eigenvalue, b coefficient, norming constant
    c = b/a', and generalized position."""

    zeta: complex
    b: complex = 0.0j
    c: complex = 0.0j
    t_pos: float = 0.0

    def __post_init__(self):
        if not self.zeta.imag > 0:
            raise ScatteringError(
                f"discrete eigenvalue must lie in the upper half-plane, got {self.zeta}"
            )

    def eta(self) -> float:
        return 2.0 * self.zeta.imag

    def kappa(self) -> float:
        return 2.0 * self.zeta.real


@dataclass(frozen=True)
class ScatteringData:
    """Full nonlinear spectrum: discrete modes (sorted by descending
    Im(zeta)) plus the sampled reflection coefficient r(xi) = b/a."""

    modes: tuple
    xi_grid: np.ndarray
    reflection: np.ndarray

    def __post_init__(self):
        modes = tuple(
            sorted(self.modes, key=lambda m: (-m.zeta.imag, m.zeta.real))
        )
        zs = [m.zeta for m in modes]
        for i in range(len(zs)):
            for j in range(i + 1, len(zs)):
                if abs(zs[i] - zs[j]) < DEFLATION_TOL:
                    raise ScatteringError(
                        f"duplicate eigenvalues within {DEFLATION_TOL}: "
                        f"{zs[i]} vs {zs[j]}"
                    )
        xi = np.asarray(self.xi_grid, dtype=np.float64)
        r = np.asarray(self.reflection, dtype=np.complex128)
        if xi.shape != r.shape:
            raise ScatteringError("xi_grid and reflection lengths differ")
        xi.flags.writeable = False
        r.flags.writeable = False
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "xi_grid", xi)
        object.__setattr__(self, "reflection", r)


@dataclass(frozen=True)
class SearchRect:
    """Upper-half-plane rectangle scanned for zeros of a."""

    re_min: float = -2.0
    re_max: float = 2.0
    im_min: float = IM_FLOOR
    im_max: float = 1.5

    def __post_init__(self):
        if self.im_min <= 0:
            raise ScatteringError("search rectangle must satisfy im_min > 0")
        if self.re_min >= self.re_max or self.im_min >= self.im_max:
            raise ScatteringError("empty search rectangle")


def default_search_rect(w: ComplexWaveform) -> SearchRect:
    """Default scan region: Re in [-2, 2], Im up to 0.75*peak|q| (a bound
    state of amplitude eta sits at Im = eta/2 <= peak/2, margin 1.5x)."""
    im_max = max(0.75 * w.peak_amplitude(), 5.0 * IM_FLOOR)
    return SearchRect(-2.0, 2.0, IM_FLOOR, im_max)


def _batch(w: ComplexWaveform, zetas: np.ndarray, bound_safe: bool = False):
    z = np.ascontiguousarray(zetas, dtype=np.complex128)
    t_left = w.t0_offset
    if bound_safe:
        return _kernels.bound_b_batch(w.samples, w.dt, t_left, z)
    return _kernels.scatter_batch(w.samples, w.dt, t_left, z)


def scattering_coefficients(w: ComplexWaveform, zeta: complex):
    """Jost coefficients (a, b) at one spectral point.

    Integrates the ZS system across the window with per-sample
    constant-potential transfer matrices; a is extracted from the
    right-edge asymptotics.  Valid for real xi and for Im(zeta) > 0
    (internal renormalization prevents overflow).
    """
    a, b = _batch(w, np.array([zeta], dtype=np.complex128))
    return complex(a[0]), complex(b[0])


def a_derivative(w: ComplexWaveform, zeta: complex, h: float | None = None) -> complex:
    """da/dzeta by central finite difference, step 1e-6*max(1, |zeta|)."""
    if h is None:
        h = 1e-6 * max(1.0, abs(zeta))
    a, _ = _batch(w, np.array([zeta + h, zeta - h], dtype=np.complex128))
    return complex((a[0] - a[1]) / (2.0 * h))


def _coarse_candidates(w: ComplexWaveform, rect: SearchRect, coarse_n: int):
    """Local minima of |a| on a coarse rectangle grid.

    The scan runs on a decimated copy of the waveform (factor chosen so
    <= 1024 samples remain): layer-peeling error only shifts the minima
    slightly and Newton refines on the full-resolution waveform.
    """
    dec = max(1, w.grid.n_samples // 512)
    q = np.ascontiguousarray(w.samples[::dec])
    dt = w.dt * dec
    re = np.linspace(rect.re_min, rect.re_max, coarse_n)
    im = np.linspace(rect.im_min, rect.im_max, coarse_n)
    zz = (re[None, :] + 1j * im[:, None]).ravel()
    am = _kernels.abs_a_grid(q, dt, w.t0_offset, zz).reshape(coarse_n, coarse_n)
    cands = []
    for i in range(coarse_n):
        for j in range(coarse_n):
            v = am[i, j]
            lo = max(i - 1, 0), min(i + 2, coarse_n)
            loj = max(j - 1, 0), min(j + 2, coarse_n)
            if v <= am[lo[0]:lo[1], loj[0]:loj[1]].min() and v < 0.99:
                cands.append(re[j] + 1j * im[i])
    return cands


def _newton_refine(w: ComplexWaveform, seeds, rect: SearchRect | None):
    """Damped Newton iteration zeta -= a/a' on each seed; drops
    non-convergent candidates with a warning."""
    roots = []
    for z0 in seeds:
        z = complex(z0)
        ok = False
        for _ in range(NEWTON_MAX_ITERS):
            h = 1e-6 * max(1.0, abs(z))
            a, _ = _batch(
                w, np.array([z, z + h, z - h], dtype=np.complex128)
            )
            if abs(a[0]) < NEWTON_TOL:
                ok = True
                break
            da = (a[1] - a[2]) / (2.0 * h)
            if da == 0.0:
                break
            step = -a[0] / da
            mag = abs(step)
            if mag > 0.5:
                step *= 0.5 / mag
            z = z + step
            if z.imag <= 0.0 or abs(z) > 1e3:
                break
        if not ok:
            warnings.warn(
                f"Newton refinement did not converge from seed {z0}; candidate dropped",
                stacklevel=3,
            )
            continue
        if z.imag < IM_FLOOR:
            continue
        if rect is not None:
            margin_re = 0.1 * (rect.re_max - rect.re_min)
            margin_im = 0.5 * (rect.im_max - rect.im_min)
            if not (
                rect.re_min - margin_re <= z.real <= rect.re_max + margin_re
                and z.imag <= rect.im_max + margin_im
            ):
                continue
        roots.append(z)
    return roots


def _deflate(w: ComplexWaveform, roots):
    """Merge roots within DEFLATION_TOL, keeping the one with smaller |a|."""
    if not roots:
        return []
    a, _ = _batch(w, np.array(roots, dtype=np.complex128))
    order = np.argsort(np.abs(a))
    kept = []
    for idx in order:
        z = roots[idx]
        if all(abs(z - zk) >= DEFLATION_TOL for zk in kept):
            kept.append(z)
    kept.sort(key=lambda z: (-z.imag, z.real))
    return kept


def find_discrete_eigenvalues(
    w: ComplexWaveform,
    search: SearchRect | None = None,
    coarse_n: int = 80,
    seeds=None,
) -> list:
    """Discrete eigenvalues: coarse |a| scan for local minima, damped
    Newton refinement to |a| < 1e-9, deflation, sort by descending Im.

    ``seeds`` bypasses the coarse scan (fast path when the transmitted
    eigenvalues are known, e.g. inside Monte-Carlo trials).
    """
    if seeds is None:
        rect = search if search is not None else default_search_rect(w)
        if w.peak_amplitude() == 0.0:
            return []
        cands = _coarse_candidates(w, rect, coarse_n)
    else:
        rect = search
        cands = list(seeds)
    roots = _newton_refine(w, cands, rect)
    return _deflate(w, roots)


def generalized_positions(modes) -> list:
    """t_n = ln|b_n| / (gamma * eta_n); errors on b = 0."""
    out = []
    for m in modes:
        if m.b == 0.0:
            raise ScatteringError(
                f"norming coefficient b = 0 at zeta = {m.zeta}: position undefined"
            )
        out.append(float(np.log(abs(m.b)) / (POSITION_GAMMA * m.eta())))
    return out


def position_from_norming(zeta: complex, b: complex) -> float:
    """Generalized position of a single (zeta, b) pair."""
    if b == 0.0:
        raise ScatteringError("norming coefficient b = 0: position undefined")
    return float(np.log(abs(b)) / (POSITION_GAMMA * 2.0 * zeta.imag))


def norming_constants(w: ComplexWaveform, zetas) -> list:
    """Discrete modes with b, c = b/a', and generalized position filled in.

    b comes from matching the left and right Jost solutions at mid-window
    (the right-edge asymptotic formula is numerically swamped by the
    growing solution for bound states deep in the upper half-plane); each
    zeta must be a simple zero of a.
    """
    zs_arr = np.array(list(zetas), dtype=np.complex128)
    if len(zs_arr) == 0:
        return []
    _, b = _batch(w, zs_arr, bound_safe=True)
    modes = []
    for z, bn in zip(zs_arr, b):
        ap = a_derivative(w, complex(z))
        if abs(ap) < DEGENERATE_APRIME_TOL:
            raise ScatteringError(
                f"|a'({z})| = {abs(ap):.2e} < {DEGENERATE_APRIME_TOL}: "
                "degenerate (non-simple) eigenvalue"
            )
        modes.append(
            DiscreteMode(
                zeta=complex(z),
                b=complex(bn),
                c=complex(bn / ap),
                t_pos=position_from_norming(complex(z), complex(bn)),
            )
        )
    return modes


def reflection_coefficient(w: ComplexWaveform, xi_grid) -> np.ndarray:
    """r(xi) = b(xi)/a(xi) on a real-xi grid."""
    xi = np.asarray(xi_grid, dtype=np.float64)
    a, b = _batch(w, xi.astype(np.complex128))
    return b / a


def scatter_waveform(
    w: ComplexWaveform,
    xi_grid=None,
    search: SearchRect | None = None,
    coarse_n: int = 80,
) -> ScatteringData:
    """Full direct transform: eigenvalues, norming constants, reflection."""
    if xi_grid is None:
        xi_grid = np.linspace(-10.0, 10.0, 257)
    zetas = find_discrete_eigenvalues(w, search=search, coarse_n=coarse_n)
    modes = norming_constants(w, zetas)
    refl = reflection_coefficient(w, xi_grid)
    return ScatteringData(tuple(modes), np.asarray(xi_grid, float), refl)


def scattering_data_to_json(sd: ScatteringData) -> str:
    payload = {
        "modes": [
            {
                "zeta_re": m.zeta.real,
                "zeta_im": m.zeta.imag,
                "b_re": m.b.real,
                "b_im": m.b.imag,
                "c_re": m.c.real,
                "c_im": m.c.imag,
                "t_pos": m.t_pos,
            }
            for m in sd.modes
        ],
        "xi": list(map(float, sd.xi_grid)),
        "r_re": list(map(float, sd.reflection.real)),
        "r_im": list(map(float, sd.reflection.imag)),
    }
    return json.dumps(payload, indent=1)


def scattering_data_from_json(text: str) -> ScatteringData:
    payload = json.loads(text)
    modes = tuple(
        DiscreteMode(
            zeta=complex(m["zeta_re"], m["zeta_im"]),
            b=complex(m["b_re"], m["b_im"]),
            c=complex(m["c_re"], m["c_im"]),
            t_pos=float(m["t_pos"]),
        )
        for m in payload["modes"]
    )
    xi = np.array(payload["xi"], dtype=np.float64)
    r = np.array(payload["r_re"], dtype=np.float64) + 1j * np.array(
        payload["r_im"], dtype=np.float64
    )
    return ScatteringData(modes, xi, r)
