"""A first walk through the laboratory: build a fundamental soliton,
look at its energy, and read its nonlinear spectrum back off the
waveform with the direct scattering transform.

Run:  python3 demos/01_single_soliton_and_spectrum.py
"""
import numpy as np

from solitoncomm import (
    energy,
    make_grid,
    norming_constants,
    find_discrete_eigenvalues,
    reflection_coefficient,
    soliton_waveform,
)

# A grid of 2048 samples covering T in [-20, 20).  Power-of-two sizes keep
# the spectral transforms fast; the window is wide enough that the soliton
# tails are far below the noise floor at the edges.
grid = make_grid(2048, 40.0)

# q(T) = eta * sech(eta (T - t0)) with amplitude 2, centered at T = 3.
eta, t0 = 2.0, 3.0
w = soliton_waveform(grid, eta=eta, t0=t0)
print(f"peak amplitude        : {w.peak_amplitude():.4f}")
print(f"energy (analytic 2*eta): {energy(w):.6f}")

# The soliton is a bound state of the Zakharov-Shabat problem with
# eigenvalue zeta = i*eta/2.  The eigenvalue search scans |a(zeta)| on the
# upper half-plane and polishes the minima with Newton steps.
zetas = find_discrete_eigenvalues(w)
print(f"discrete eigenvalues  : {zetas}")

# The norming constant b localizes the mode: |b| = exp(eta * t).
modes = norming_constants(w, zetas)
m = modes[0]
print(f"recovered eta         : {m.eta():.6f}  (sent {eta})")
print(f"recovered position    : {m.t_pos:.6f}  (sent {t0})")
print(f"norming constant      : |b|={abs(m.b):.4f}, arg={np.angle(m.b):+.4f}")

# Solitons are reflectionless: the continuous spectrum is empty.
xi = np.linspace(-8, 8, 33)
r = reflection_coefficient(w, xi)
print(f"max |r(xi)|           : {np.max(np.abs(r)):.2e}  (reflectionless)")
