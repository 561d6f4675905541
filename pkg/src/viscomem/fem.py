"""1D P1 finite element core: meshes, coefficient fields, operators, norms.

The domain is an interval (0, L) split into elements with piecewise-linear
(P1) displacements and piecewise-constant coefficients.  Strains live per
element, displacements per node.  Dirichlet conditions at both endpoints are
imposed by restriction to interior degrees of freedom, which keeps every
reduced operator symmetric positive definite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

__all__ = [
    "SpatialMesh",
    "CoefficientField",
    "FemMatrices",
    "TimeGrid",
    "uniform_mesh",
    "coefficient_field",
    "assemble",
    "norm_H",
    "norm_V",
    "poincare_constant",
    "RieszMap",
    "spacetime_norms",
    "error_norms",
    "gauss_panels",
]


@dataclass(frozen=True)
class SpatialMesh:
    """Nodes of a 1D mesh on [0, L], strictly increasing, endpoints included."""

    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or nodes.size < 3:
            raise ValueError("mesh needs at least 3 nodes")
        if nodes[0] != 0.0:
            raise ValueError("mesh must start at 0")
        h = np.diff(nodes)
        if np.any(h <= 0.0):
            raise ValueError("node coordinates must be strictly increasing")
        self.nodes.setflags(write=False)

    @property
    def length(self) -> float:
        return float(self.nodes[-1])

    @property
    def n_nodes(self) -> int:
        return self.nodes.size

    @property
    def n_elements(self) -> int:
        return self.nodes.size - 1

    @property
    def h(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def interior(self) -> np.ndarray:
        return np.arange(1, self.n_nodes - 1)

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.nodes[:-1] + self.nodes[1:])


def uniform_mesh(length: float, n_elements: int) -> SpatialMesh:
    return SpatialMesh(np.linspace(0.0, length, n_elements + 1))


@dataclass(frozen=True)
class CoefficientField:
    """Per-element elasticity a and viscosity b with declared uniform bounds."""

    a: np.ndarray
    b: np.ndarray
    c_A: float
    C_A: float
    c_B: float
    C_B: float

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if a.shape != b.shape:
            raise ValueError("a and b must have one value per element")
        if not (0.0 < self.c_A <= self.C_A and 0.0 < self.c_B <= self.C_B):
            raise ValueError("coefficient bounds must satisfy 0 < lower <= upper")
        if np.any(a < self.c_A) or np.any(a > self.C_A):
            raise ValueError("elasticity values outside declared bounds")
        if np.any(b < self.c_B) or np.any(b > self.C_B):
            raise ValueError("viscosity values outside declared bounds")
        self.a.setflags(write=False)
        self.b.setflags(write=False)


def coefficient_field(mesh: SpatialMesh, a, b, bounds=None) -> CoefficientField:
    """Build a CoefficientField, broadcasting scalars over elements.

    When ``bounds`` is None the declared bounds are tightened to the actual
    min/max of the supplied values.
    """
    a = np.broadcast_to(np.asarray(a, dtype=float), (mesh.n_elements,)).copy()
    b = np.broadcast_to(np.asarray(b, dtype=float), (mesh.n_elements,)).copy()
    if bounds is None:
        bounds = (a.min(), a.max(), b.min(), b.max())
    c_A, C_A, c_B, C_B = bounds
    return CoefficientField(a, b, c_A, C_A, c_B, C_B)


def _stiffness(mesh: SpatialMesh, coeff: np.ndarray) -> sp.csr_matrix:
    """Assemble the P1 stiffness matrix for elementwise-constant coefficients."""
    n = mesh.n_nodes
    k = coeff / mesh.h
    rows = np.concatenate([np.arange(n - 1), np.arange(1, n), np.arange(n - 1), np.arange(1, n)])
    cols = np.concatenate([np.arange(n - 1), np.arange(1, n), np.arange(1, n), np.arange(n - 1)])
    vals = np.concatenate([k, k, -k, -k])
    return sp.csr_matrix(sp.coo_matrix((vals, (rows, cols)), shape=(n, n)))


def _mass(mesh: SpatialMesh) -> sp.csr_matrix:
    n = mesh.n_nodes
    h = mesh.h
    rows = np.concatenate([np.arange(n - 1), np.arange(1, n), np.arange(n - 1), np.arange(1, n)])
    cols = np.concatenate([np.arange(n - 1), np.arange(1, n), np.arange(1, n), np.arange(n - 1)])
    vals = np.concatenate([h / 3.0, h / 3.0, h / 6.0, h / 6.0])
    return sp.csr_matrix(sp.coo_matrix((vals, (rows, cols)), shape=(n, n)))


@dataclass(frozen=True)
class FemMatrices:
    """Assembled operators on the full node set plus interior restrictions.

    ``grad`` maps nodal values to element strains; ``div_b`` is its adjoint
    weighted by b_e * h_e restricted to interior rows, so that
    ``v_int . div_b @ w = (b w, e v)`` for any strain-valued w.
    """

    mesh: SpatialMesh
    coeffs: CoefficientField
    mass_full: sp.csr_matrix
    stiff_unit_full: sp.csr_matrix
    stiff_a_full: sp.csr_matrix
    stiff_b_full: sp.csr_matrix
    grad: sp.csr_matrix
    b_weights: np.ndarray
    M: sp.csr_matrix
    K1: sp.csr_matrix
    KA: sp.csr_matrix
    KB: sp.csr_matrix
    div_b: sp.csr_matrix

    @property
    def interior(self) -> np.ndarray:
        return self.mesh.interior

    @property
    def n_interior(self) -> int:
        return self.mesh.n_nodes - 2

    def restrict(self, u: np.ndarray) -> np.ndarray:
        return np.asarray(u)[..., self.interior]

    def extend(self, u_int: np.ndarray) -> np.ndarray:
        u_int = np.asarray(u_int)
        out = np.zeros(u_int.shape[:-1] + (self.mesh.n_nodes,), dtype=u_int.dtype)
        out[..., self.interior] = u_int
        return out

    def strain(self, u: np.ndarray) -> np.ndarray:
        return self.grad @ np.asarray(u)


def assemble(mesh: SpatialMesh, coeffs: CoefficientField) -> FemMatrices:
    """Assemble mass, stiffness, and strain operators for a mesh/coefficient pair."""
    if coeffs.a.size != mesh.n_elements:
        raise ValueError("coefficient field does not match the mesh")
    mass = _mass(mesh)
    k1 = _stiffness(mesh, np.ones(mesh.n_elements))
    ka = _stiffness(mesh, coeffs.a)
    kb = _stiffness(mesh, coeffs.b)

    n = mesh.n_nodes
    inv_h = 1.0 / mesh.h
    e_idx = np.arange(mesh.n_elements)
    grad = sp.csr_matrix(
        sp.coo_matrix(
            (
                np.concatenate([-inv_h, inv_h]),
                (np.concatenate([e_idx, e_idx]), np.concatenate([e_idx, e_idx + 1])),
            ),
            shape=(mesh.n_elements, n),
        )
    )
    b_weights = coeffs.b * mesh.h
    idx = mesh.interior
    div_b = sp.csr_matrix((grad.T @ sp.diags(b_weights)))[idx, :]

    return FemMatrices(
        mesh=mesh,
        coeffs=coeffs,
        mass_full=mass,
        stiff_unit_full=k1,
        stiff_a_full=ka,
        stiff_b_full=kb,
        grad=grad,
        b_weights=b_weights,
        M=sp.csr_matrix(mass[np.ix_(idx, idx)]),
        K1=sp.csr_matrix(k1[np.ix_(idx, idx)]),
        KA=sp.csr_matrix(ka[np.ix_(idx, idx)]),
        KB=sp.csr_matrix(kb[np.ix_(idx, idx)]),
        div_b=div_b,
    )


def norm_H(u: np.ndarray, mats: FemMatrices) -> float:
    """L2 norm of a full nodal field."""
    u = np.asarray(u)
    if u.shape[-1] != mats.mesh.n_nodes:
        raise ValueError("field does not conform to the mesh")
    return float(np.sqrt(np.real(np.vdot(u, mats.mass_full @ u))))


def norm_V(u: np.ndarray, mats: FemMatrices) -> float:
    """(||u||^2 + ||u'||^2)^(1/2) of a full nodal field."""
    u = np.asarray(u)
    if u.shape[-1] != mats.mesh.n_nodes:
        raise ValueError("field does not conform to the mesh")
    quad = np.vdot(u, mats.mass_full @ u) + np.vdot(u, mats.stiff_unit_full @ u)
    return float(np.sqrt(np.real(quad)))


def poincare_constant(mats: FemMatrices) -> float:
    """Discrete constant in ||u|| <= C_P ||u'|| over the interior space.

    Computed as 1/sqrt(lambda_min) of K1 u = lambda M u on interior nodes.
    The discrete value increases towards the continuous one (L/pi on an
    interval) under mesh refinement.
    """
    n = mats.n_interior
    if n < 1:
        raise ValueError("no interior degrees of freedom")
    if n <= 400:
        lam = scipy.linalg.eigh(
            mats.K1.toarray(), mats.M.toarray(), eigvals_only=True, subset_by_index=(0, 0)
        )[0]
    else:
        lam = spla.eigsh(mats.K1, k=1, M=mats.M, sigma=0.0, which="LM")[0][0]
    if lam <= 0:
        raise ArithmeticError("generalized eigenvalue solve returned a nonpositive value")
    return 1.0 / float(np.sqrt(lam))


class RieszMap:
    """Discrete V0' norm via the Riesz representation (M + K1)^-1 on interior dofs."""

    def __init__(self, mats: FemMatrices):
        self._lu = spla.splu(sp.csc_matrix(mats.M + mats.K1))

    def dual_norm(self, ell: np.ndarray) -> float:
        ell = np.asarray(ell, dtype=float)
        return float(np.sqrt(ell @ self._lu.solve(ell)))


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid on [0, T] with N steps; eta marks a window start for sup norms."""

    T: float
    steps: int
    eta: float = 0.0

    def __post_init__(self):
        if self.T <= 0 or self.steps < 1:
            raise ValueError("need T > 0 and at least one step")
        if not 0.0 <= self.eta < self.T:
            raise ValueError("eta must lie in [0, T)")

    @property
    def dt(self) -> float:
        return self.T / self.steps

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.steps + 1)

    @property
    def midtimes(self) -> np.ndarray:
        t = self.times
        return 0.5 * (t[:-1] + t[1:])


def spacetime_norms(fields: np.ndarray, grid: TimeGrid, mats: FemMatrices, eta: float | None = None) -> dict:
    """Space-time norms of a trajectory of full nodal fields (rows = grid times).

    L2-in-time norms use the trapezoidal rule; sup norms take the max over
    grid points in [eta, T].
    """
    fields = np.asarray(fields)
    if eta is None:
        eta = grid.eta
    if not 0.0 <= eta < grid.T:
        raise ValueError("eta must lie in [0, T)")
    times = grid.times
    if fields.shape[0] != times.size:
        raise ValueError("trajectory rows must match the time grid")
    nv = np.array([norm_V(fields[i], mats) for i in range(fields.shape[0])])
    nh = np.array([norm_H(fields[i], mats) for i in range(fields.shape[0])])
    window = times >= eta - 1e-12 * grid.T
    return {
        "l2_0T_V": float(np.sqrt(np.trapz(nv**2, times))),
        "l2_0T_H": float(np.sqrt(np.trapz(nh**2, times))),
        "linf_etaT_V": float(nv[window].max()),
        "linf_etaT_H": float(nh[window].max()),
    }


def gauss_panels(a: float, b: float, n_panels: int, order: int = 12):
    """Composite Gauss-Legendre nodes and weights on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, n_panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def error_norms(u: np.ndarray, mats: FemMatrices, exact, exact_prime, order: int = 8):
    """H and V norms of u_h - u_exact with elementwise Gauss quadrature.

    ``exact`` and ``exact_prime`` are vectorized callables of x.
    """
    mesh = mats.mesh
    x, w = np.polynomial.legendre.leggauss(order)
    xl, xr = mesh.nodes[:-1], mesh.nodes[1:]
    half = 0.5 * mesh.h
    pts = xl[:, None] + half[:, None] * (x[None, :] + 1.0)
    wq = half[:, None] * w[None, :]
    lam = (pts - xl[:, None]) / mesh.h[:, None]
    uh = u[:-1, None] * (1.0 - lam) + u[1:, None] * lam
    duh = ((u[1:] - u[:-1]) / mesh.h)[:, None]
    e = uh - exact(pts)
    de = duh - exact_prime(pts)
    err_h2 = float(np.sum(wq * e**2))
    err_semi2 = float(np.sum(wq * de**2))
    return np.sqrt(err_h2), np.sqrt(err_h2 + err_semi2)
