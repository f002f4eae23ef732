"""Truncated Fourier expansions of Borcherds products.

The logarithmic algorithm lives in :func:`compute_product`; the direct
product of binomial factors, used as an oracle, in :func:`naive_product`.
"""

from .errors import (BorcherdsError, ContractViolation, DegenerateTruncation, InputError,
                     InsufficientPrecision, IntegralityError)
from .hermitian import (HermitianIndex, conjugate_b, count_coefficients, delta_power,
                        gl2_orbit_reduce, restrict_diagonal)
from .lattice import LatticeL0, classify, hermitian_d3, load_lattice, reduce_disc
from .product import ProductResult, WeylData, compute_product, naive_product, weyl_data
from .series import (FormalSeries, TruncationFilter, add, exp_partial, geometric_power,
                     multiply, shift, support_stats, truncate, unit)
from .vvform import (VVForm, load_builtin, lookup, parse_vvform, required_precision,
                     serialize_vvform)

__version__ = "0.1.0"
