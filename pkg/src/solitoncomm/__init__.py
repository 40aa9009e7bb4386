"""Soliton/scattering-domain communication laboratory for the noisy
nonlinear Schrodinger channel: inverse-scattering synthesis, stochastic
split-step propagation, direct scattering, perturbation statistics, and
capacity/modulation-gain calculators."""

__version__ = "0.1.0"

from .waveform import (  # noqa: F401
    ComplexWaveform,
    GridSpec,
    energy,
    make_grid,
    read_waveform_csv,
    soliton_waveform,
    write_waveform_csv,
)
from .propagator import (  # noqa: F401
    ChannelSpec,
    propagate,
    propagate_noisy,
    suggest_steps,
)
from .zs import (  # noqa: F401
    DiscreteMode,
    ScatteringData,
    SearchRect,
    a_derivative,
    find_discrete_eigenvalues,
    generalized_positions,
    norming_constants,
    reflection_coefficient,
    scatter_waveform,
    scattering_coefficients,
)
from .synthesis import (  # noqa: F401
    evolve_scattering_data,
    norming_from_position,
    synthesize_from_modes,
    synthesize_reflectionless,
    synthesize_single,
)
