"""Generic Newton polygons of one-variable Laurent exponential sums.

Submodules:
  polygons      Hodge and arithmetic polygons, convexity
  hasse         Artin-Hasse coefficients and the Hasse polynomial
  oracle        exact character sums, L-polynomials, instance checks
  dwork         Newton polygons from a truncated Dwork Frobenius matrix
  campaign      configs, cache and reports for verification campaigns
  cli           the ``laurentnp`` command
"""
from .cyclotomic import CyclotomicInteger
from .finite_field import ExtensionField, build_extension
from .hasse import (
    HassePolynomial,
    SparseFpPolynomial,
    artin_hasse,
    enumerate_sk,
    hasse_component,
    hasse_polynomial,
    lambda_mod_p,
    minimal_monomial,
    r_vector,
    unit_u_tau,
)
from .oracle import (
    LaurentCoeffVector,
    LPolynomial,
    char_sum,
    l_polynomial,
    newton_polygon,
    verify_instance,
)
from .padic import PadicCyclotomic
from .polygons import (
    IntervalShape,
    LowerPolygon,
    arithmetic_polygon,
    convexity_report,
    degree,
    hodge_polygon,
    index_pairs,
    lies_on_or_above,
    minimizing_pairs,
    p_unit,
)

__version__ = "0.1.0"
