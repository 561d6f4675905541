"""Stationary solves: real Lax-Milgram problems and the transformed complex system.

The stationary problem is -div(a e u0(t)) = load(t) with a Dirichlet lift z(t).
The transformed system, posed for frequencies s with Re(s) > 0, is

    eps^2 s^2 M v + (K_A + K_B) v - (beta eps s + 1)^-1 K_B v = rhs

on the interior degrees of freedom; it is uniquely solvable on the whole open
right half-plane.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .fem import FemMatrices, TimeGrid

__all__ = [
    "EllipticProblem",
    "StationarySolver",
    "solve_stationary",
    "solve_stationary_trajectory",
    "ComplexSolver",
    "solve_complex",
]


@dataclass(frozen=True)
class EllipticProblem:
    """Stationary problem data: assembled operators, interior load, optional lift.

    ``load(t)`` returns the dual vector on interior dofs (f and g already
    assembled together); ``lift(t)`` returns the full nodal boundary datum or
    None for homogeneous conditions.
    """

    mats: FemMatrices
    load: Callable[[float], np.ndarray]
    lift: Callable[[float], np.ndarray] | None = None


class StationarySolver:
    """Factorize K_A once and solve u0(t) for many right-hand sides."""

    def __init__(self, mats: FemMatrices):
        self.mats = mats
        self._lu = spla.splu(sp.csc_matrix(mats.KA))

    def solve(self, load_int: np.ndarray, lift: np.ndarray | None = None) -> np.ndarray:
        """Return the full nodal solution with u - lift interior-supported."""
        mats = self.mats
        rhs = np.asarray(load_int, dtype=float)
        if rhs.shape != (mats.n_interior,):
            raise ValueError("load must be an interior dual vector")
        if lift is not None:
            rhs = rhs - mats.restrict(mats.stiff_a_full @ np.asarray(lift, dtype=float))
        v = self._lu.solve(rhs)
        u = mats.extend(v)
        if lift is not None:
            u = u + lift
        return u


def solve_stationary(prob: EllipticProblem, t: float) -> np.ndarray:
    """Solve -div(a e u0) = load(t) with u0 = lift(t) on the boundary."""
    solver = StationarySolver(prob.mats)
    lift = prob.lift(t) if prob.lift is not None else None
    return solver.solve(prob.load(t), lift)


def solve_stationary_trajectory(prob: EllipticProblem, grid: TimeGrid) -> np.ndarray:
    """Stationary solutions at every grid time, rows indexed by time."""
    solver = StationarySolver(prob.mats)
    out = np.empty((grid.steps + 1, prob.mats.mesh.n_nodes))
    for i, t in enumerate(grid.times):
        lift = prob.lift(t) if prob.lift is not None else None
        out[i] = solver.solve(prob.load(t), lift)
    return out


class ComplexSolver:
    """Per-run cache of factorizations of the transformed operator.

    Keyed by (s, eps); matrices are fixed per instance.  Safe for repeated
    line integrals where the same frequency appears many times.
    """

    def __init__(self, mats: FemMatrices, beta: float):
        if beta <= 0:
            raise ValueError("beta must be positive")
        self.mats = mats
        self.beta = beta
        self._cache: dict[tuple[complex, float], spla.SuperLU] = {}

    def operator(self, s: complex, eps: float) -> sp.csc_matrix:
        if np.real(s) <= 0:
            raise ValueError(f"s must lie in the open right half-plane, got s={s}")
        if eps <= 0:
            raise ValueError("eps must be positive")
        m = self.mats
        mu = 1.0 / (self.beta * eps * s + 1.0)
        return sp.csc_matrix(
            (eps**2 * s**2) * m.M.astype(complex) + m.KA + (1.0 - mu) * m.KB
        )

    def solve(self, s: complex, eps: float, rhs: np.ndarray) -> np.ndarray:
        key = (complex(s), float(eps))
        lu = self._cache.get(key)
        if lu is None:
            lu = spla.splu(self.operator(s, eps))
            self._cache[key] = lu
        rhs = np.asarray(rhs, dtype=complex)
        if rhs.shape != (self.mats.n_interior,):
            raise ValueError("rhs must be an interior dual vector")
        try:
            out = lu.solve(rhs)
        except RuntimeError as exc:  # pragma: no cover - singular only off C_+
            raise ArithmeticError(f"complex solve failed at s={s}, eps={eps}") from exc
        return out


def solve_complex(mats: FemMatrices, s: complex, eps: float, beta: float, rhs: np.ndarray) -> np.ndarray:
    """One-shot solve of the transformed system at frequency s."""
    return ComplexSolver(mats, beta).solve(s, eps, rhs)
