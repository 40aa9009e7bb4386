"""End-to-end link: draw amplitudes uniformly from [1, 2], synthesize,
push through the noisy fiber, recover the amplitude at the receiver,
and estimate the mutual information of the resulting scalar channel by
plug-in binning.

Run:  python3 demos/06_link_experiment.py
"""
import numpy as np

from solitoncomm import mclab
from solitoncomm.capacity import spectral_efficiency_bound
from solitoncomm.waveform import make_grid

eps, Z, n_symbols = 0.1, 1.0, 1200   # eps^2 Z = 0.01
res = mclab.mc_link_experiment(
    (1.0, 2.0), eps, Z, n_symbols, seed=7, grid=make_grid(512, 20.0)
)
print(f"symbols kept          : {res.n_kept}/{n_symbols} (lost {res.lost_trials})")

d = res.eta_out - res.eta_in
print(f"mean amplitude error  : {d.mean():+.4e}")
print(f"var of error          : {d.var(ddof=1):.4e}")
print(f"law eps^2*eta_mid*Z   : {mclab.analytic_amp_var(1.5, eps, Z):.4e}")

bound = spectral_efficiency_bound(1.0, 2.0, eps, Z)
print(f"MI (plug-in, {res.n_bins} bins): {res.mi_bits:.3f} bits/soliton")
print(f"analytic lower bound  : {bound:.3f} bits/soliton")
