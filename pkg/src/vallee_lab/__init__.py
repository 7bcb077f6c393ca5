"""Numerics for de la Vallee Poussin summation of periodic functions.

The package evaluates trigonometric series and their V_{n,p} means, the
coefficient calculus for multiplier sequences psi(k) with a geometric ratio
limit, best approximations in L_s and the uniform norm, the sharp constants
appearing in the deviation bounds, and a verification harness that measures
both sides of those bounds together with their extremal families.
"""

from .series import (TrigSeries, SampledFunction, evaluate, partial_sum,
                     vp_sum, vp_sum_by_averaging, fejer_sum, vp_weight,
                     deviation_weight, vp_deviation, project_series)
from .norms import norm_ls, norm_ls_result, cos_norm, conjugate_exponent, INF
from .psi import (PsiSequence, geometric, gen_poisson, polyharmonic, heat,
                  neumann, custom, psi_value, psi_values, psi_ratio, dq_limit,
                  ratio_gap, ratio_gap_detailed, polyharmonic_ratio_gap_bound,
                  psi_derivative, psi_integral, PsiError, PsiUnderflowError,
                  UnsupportedPsiError)
from .kernels import (KernelSample, psi_kernel, poisson_envelope,
                      poisson_phase, vp_band_sum, vp_band_kernel_values,
                      vp_tail_kernel, tail_sum_tau_psi, TailSum,
                      geometric_gap_remainder, convolve, vp_band_identity)
from .constants import (SharpConstant, sharp_constant, budget_sigma,
                        budget_delta, elliptic_k, hyp2f1,
                        sharp_constant_hypergeom, vp_kernel_l2_norm)
from .bestapprox import (BestApproxResult, best_l2, best_linf, best_l1,
                         best_ls, best_approx, lp_grid_minimax,
                         cos_power_extremal, cos_power_extremal_series,
                         smoothed_sign_wave, smoothed_sign_wave_series,
                         smoothing_delta, zero_poly_dual_residual,
                         ConvergenceError)
from .harness import (InequalityReport, rhs_leading_t1, verify_t1, verify_t2,
                      verify_t3, verify_t4, extremal_sweep,
                      kernel_matched_extremal, resolve_p)
from ._accel import active_backend, set_backend

__version__ = "0.1.0"
