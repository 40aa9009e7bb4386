"""Information rates of the amplitude channel Y = eta + sqrt(eta)*N:
Blahut-Arimoto capacity of the discretized channel versus the analytic
spectral-efficiency lower bound, and the modulation-gain figures of
merit for soliton trains.

Run:  python3 demos/05_capacity_and_gains.py
"""
import numpy as np

from solitoncomm import capacity as cap

# the benchmark channel: eta in [1, 2], E[N^2] = 0.1^2
ch = cap.build_sqrt_mult_channel(1.0, 2.0, 0.1, 200, 1200)
c_bits, prior = cap.blahut_arimoto(ch, tol=1e-8)
bound = cap.spectral_efficiency_bound(1.0, 2.0, 0.1, 1.0)
print(f"Blahut-Arimoto capacity : {c_bits:.4f} bits/soliton")
print(f"analytic lower bound    : {bound:.4f} bits/soliton")
print(
    "capacity-achieving prior: boundary atoms "
    f"{prior[0]:.3f} and {prior[-1]:.3f}, continuous interior mass "
    f"{prior[3:-3].sum():.3f}"
)

# modulation gains against on-off keying for a sweep of effective noise
print("\nmax gains vs sigma_eff (eta_max=2, C=7, alpha=1):")
print("sigma_eff   single   with-off   2-bound   n-train")
for s_eff in (0.05, 0.1, 0.2, 0.3):
    eps = s_eff / np.sqrt(np.pi * np.e * 2.0 * 1.0)
    cfg = cap.ModulationConfig(1.0, 2.0, eps, 1.0, C_spacing=7.0, alpha=1.0)
    g1, arg1 = cap.modulation_gain_single(cfg)
    goff, _, _ = cap.modulation_gain_single_with_off(cfg)
    g2, _ = cap.modulation_gain_2bound(cfg)
    gn, _ = cap.modulation_gain_ntrain(cfg)
    print(f"  {s_eff:5.2f}    {g1:6.3f}   {goff:6.3f}     {g2:6.3f}    {gn:6.3f}")

# arrival-order ambiguity: the jitter price of packing solitons densely
print("\npermutation penalties at p_mixup = 0.1:")
print(f"  2-bound rate loss        : {cap.permutation_loss_bound_2(0.1):.4f} bits/symbol")
print(f"  n-train penalty (exact)  : {cap.permutation_penalty_ntrain(0.1):.4f} bits/soliton")
print(f"  n-train penalty (approx) : {cap.permutation_penalty_ntrain(0.1, approximate=True):.4f}")

# the Gordon-Haus synchronization constraint bounds eta_max from above
e_max = cap.gordon_haus_eta_max(spacing=5.0, eps=0.05, Z=2.0, p_sync=1e-9)
print(f"\njitter-free eta_max for spacing 5, eps 0.05, Z 2: {e_max:.3f}")
