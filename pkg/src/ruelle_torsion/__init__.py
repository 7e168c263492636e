"""Imaginary-axis Pollicott-Ruelle resonances of Morse-Smale flows."""

from .flow_model import (
    ClosedOrbit,
    FixedPoint,
    FlatBundleData,
    FlowSpec,
    SpecError,
    builtin_example,
    builtin_examples,
    euler_characteristic,
    load_spec,
    orbit_multiplicity_m,
    reversed_spec,
    save_spec,
    validate_spec,
)
from .fuller_trace import GaussianSum, TestFunction, fuller_identity_check, geometric_pairing, spectral_pairing
from .kernels import BACKEND
from .specfun import PrecisionPolicy, hurwitz_zeta, hurwitz_zeta_zero_values, log_gamma, orbit_dirichlet_sum
from .spectrum import ResonanceLine, koszul_homology, morse_report, resonance_line, resonances
from .torsion_lab import (
    BasedComplex,
    TorsionValue,
    complex_cohomology,
    cw_torsion,
    model_complex,
    torsion_closed_form,
    torsion_determinant,
)
from .zeta_engine import (
    MonodromyConvention,
    big_z_rs,
    regularized_torsion,
    torsion_function,
    z_rs_closed_form,
    zeta_flat,
    zeta_rs,
    zeta_v,
    zeta_v_residue,
)

__version__ = "0.1.0"
