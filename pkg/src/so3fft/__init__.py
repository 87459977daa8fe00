"""Exact sampling and fast Wigner transforms on the rotation group SO(3).

The equiangular sampling theorem implemented here captures a signal
band-limited at (L, M, N) in [(L-1)(2M-1)+1](2N-1) ~ 4LMN samples and makes
the forward/inverse Wigner transforms theoretically exact.  The package
provides the transforms (fast separation-of-variables and per-n spin paths,
plus naive direct-summation oracles), the exact quadrature rule, Wigner
d-function machinery, and a benchmark harness with a CLI.
"""

from .errors import NumericalIntegrityError
from .grid import (
    BandLimits,
    So3Samples,
    WignerCoeffs,
    alpha_node,
    beta_node,
    coeff_count,
    coeff_index,
    coeff_unindex,
    gamma_node,
    read_coeffs,
    read_samples,
    real_coeff_count,
    sample_index,
    sample_unindex,
    theorem_sample_count,
    write_coeffs,
    write_samples,
)
from .quadrature import (
    QuadratureWeights,
    integrate,
    quadrature_nodes,
    weight_q,
    weight_v,
    weight_w,
)
from .transform import (
    TransformPlan,
    evaluate_on_quadrature_grid,
    forward,
    forward_naive,
    forward_real,
    forward_via_spin_sht,
    integrate_coeffs,
    inverse,
    inverse_naive,
    inverse_real,
    inverse_via_spin_sht,
    spin_sh_value,
    spin_sht_forward,
    spin_sht_inverse,
)
from .wigner_d import (
    DBetaPlane,
    DeltaTable,
    build_delta_table,
    d_plane,
    d_recursion_step,
    d_via_fourier,
)

__version__ = "0.1.0"

__all__ = [
    "BandLimits",
    "DBetaPlane",
    "DeltaTable",
    "NumericalIntegrityError",
    "QuadratureWeights",
    "So3Samples",
    "TransformPlan",
    "WignerCoeffs",
    "alpha_node",
    "beta_node",
    "build_delta_table",
    "coeff_count",
    "coeff_index",
    "coeff_unindex",
    "d_plane",
    "d_recursion_step",
    "d_via_fourier",
    "evaluate_on_quadrature_grid",
    "forward",
    "forward_naive",
    "forward_real",
    "forward_via_spin_sht",
    "gamma_node",
    "integrate",
    "integrate_coeffs",
    "inverse",
    "inverse_naive",
    "inverse_real",
    "inverse_via_spin_sht",
    "quadrature_nodes",
    "read_coeffs",
    "read_samples",
    "real_coeff_count",
    "sample_index",
    "sample_unindex",
    "spin_sh_value",
    "spin_sht_forward",
    "spin_sht_inverse",
    "theorem_sample_count",
    "weight_q",
    "weight_v",
    "weight_w",
    "write_coeffs",
    "write_samples",
]
