"""Hecke operators, delta-p-symmetry and eigenforms for delta-series mod p."""

__version__ = "0.1.0"

from .fieldcore import FpElem, PadicNum, PrecisionError, delta_rational, fp_inv, padic_arith
from .qseries import (CoeffProvider, EigenSystem, LaurentSeries, divisor_sum_coeffs,
                      eigen_check_classical, eigen_series, hecke_classical, theta,
                      theta_inv_part, u_classical, v_classical)
from .deltaseries import (DeltaSeries1, DeltaSeries2, basis_convert, echelon_shape_check,
                          f_rel, frobenii, hecke_delta, hecke_delta_monomial,
                          hecke_delta_order2, is_primitive, theta1, v_delta)
from .symmetry import (SymmetricProfile, eigen_conditions_voce2, ptp, pu, pu_monomial,
                       structure_decompose)
from .symoracle import MultiPoly, pu_oracle, sigma_p_expand, symmetric_solve
from .eigen import (classify_case, decompose_eigenform, eigen_check_delta, sharp1,
                    sharp2)
from .lift import knacond_check, reduce_mod_p, sharp2_lift
