"""Named catalog of analytic load, lift, and history families.

Experiment configs refer to loads by family name plus parameters, never by
code, which keeps runs hashable and reproducible.  A scalar time factor is
paired with a nodal space profile; loads are assembled into dual vectors on
interior dofs through the mass matrix.
"""

from __future__ import annotations

import numpy as np

from .elliptic import StationarySolver
from .fem import FemMatrices, SpatialMesh

__all__ = ["time_factor", "space_profile", "dual_load", "nodal_load", "lift_field", "history_field"]

TIME_FAMILIES = ("zero", "constant", "sine", "bump", "exp", "ramp")
SPACE_PROFILES = ("zero", "const", "bump", "sine_mode", "hat", "linear")


def time_factor(family: str, params: dict, T: float):
    """Scalar time factor c(t) on [0, T]; vectorized in t."""
    amp = float(params.get("amplitude", 1.0))
    if family == "zero":
        return lambda t: 0.0 * np.asarray(t, dtype=float)
    if family == "constant":
        return lambda t: amp * np.ones_like(np.asarray(t, dtype=float))
    if family == "sine":
        omega = float(params.get("omega", 2.0 * np.pi / T))
        phase = float(params.get("phase", 0.0))
        return lambda t: amp * np.sin(omega * np.asarray(t, dtype=float) + phase)
    if family == "bump":
        # polynomial bump vanishing to order k at both interval ends, peak amp
        k = int(params.get("order", 3))
        scale = 4.0**k
        return lambda t: amp * scale * (np.asarray(t, dtype=float) / T) ** k * (1.0 - np.asarray(t, dtype=float) / T) ** k
    if family == "exp":
        rate = float(params.get("rate", -1.0))
        return lambda t: amp * np.exp(rate * np.asarray(t, dtype=float))
    if family == "ramp":
        return lambda t: amp * np.asarray(t, dtype=float) / T
    raise ValueError(f"unknown time family {family!r}")


def space_profile(family: str, mesh: SpatialMesh, params: dict) -> np.ndarray:
    """Nodal profile on the full node set."""
    x = mesh.nodes
    L = mesh.length
    if family == "zero":
        return np.zeros_like(x)
    if family == "const":
        return np.ones_like(x)
    if family == "bump":
        return 4.0 * x * (L - x) / L**2
    if family == "sine_mode":
        k = int(params.get("mode", 1))
        return np.sin(k * np.pi * x / L)
    if family == "hat":
        return np.maximum(0.0, 1.0 - np.abs(2.0 * x / L - 1.0))
    if family == "linear":
        return x / L
    raise ValueError(f"unknown space profile {family!r}")


def nodal_load(mats: FemMatrices, profile: np.ndarray, factor):
    """t -> full nodal values c(t) * profile."""
    return lambda t: factor(t) * profile


def dual_load(mats: FemMatrices, profile: np.ndarray, factor):
    """t -> interior dual vector of the H-load c(t) * profile."""
    base = (mats.mass_full @ profile)[mats.interior]
    return lambda t: factor(t) * base


def lift_field(mats: FemMatrices, profile: np.ndarray, factor):
    """t -> full nodal Dirichlet lift c(t) * profile."""
    return lambda t: factor(t) * profile


def history_field(
    family: str,
    params: dict,
    mats: FemMatrices,
    g=None,
):
    """Pre-history u_in(tau) for tau <= 0, or None for zero history.

    The ``resolvent`` family realizes the compatibility scenario: the history
    solves the stationary problem for g(tau) on [-window, 0] and is frozen
    below -window (which keeps it kernel-integrable).
    """
    if family == "zero":
        return None
    profile = space_profile(params.get("profile", "bump"), mats.mesh, params)
    if family == "constant":
        return lambda tau: profile
    if family == "exp":
        rate = float(params.get("rate", 1.0))
        return lambda tau: np.exp(rate * tau) * profile
    if family == "resolvent":
        if g is None:
            raise ValueError("resolvent history needs the g load")
        window = float(params.get("window", 1.0))
        solver = StationarySolver(mats)
        return lambda tau: solver.solve(g(np.clip(tau, -window, 0.0)))
    raise ValueError(f"unknown history family {family!r}")
