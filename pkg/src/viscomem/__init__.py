"""Viscoelastic dynamics with exponential fading memory in 1D.

Library for the rescaled dynamic system

    eps^2 v'' - div((a+b) e v) + int_0^t (beta eps)^-1 exp(-(t-s)/(beta eps))
                                          div(b e v(s)) ds = load(t),

its stationary (quasistatic) limit -div(a e u0) = load, and the verification
machinery around them: the internal-variable time integrator with its
energy-dissipation ledger, convolution-quadrature reference solver,
Laplace-domain solves and coercivity bounds on Bromwich lines, and the cubic
root-localization estimates those bounds rest on.
"""

from .fem import (
    CoefficientField,
    FemMatrices,
    SpatialMesh,
    TimeGrid,
    assemble,
    coefficient_field,
    error_norms,
    norm_H,
    norm_V,
    poincare_constant,
    spacetime_norms,
    uniform_mesh,
)

__version__ = "0.1.0"
