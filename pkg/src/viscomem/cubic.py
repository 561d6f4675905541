"""Root localization for the damping cubic beta*z^3 + z^2 + beta*b*z + a.

For parameter boxes a >= a0, b >= b0, c0*a <= b <= c1*a (with c1 >= c0 > 1)
every root has real part strictly inside (-1/beta, -alpha), with alpha an
explicit function of the box.  These bounds feed the coercivity constant of
the transformed system; here they are checked directly on sampled parameters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CubicSpec",
    "solve_cubic",
    "alpha_bound",
    "verify_localization",
    "LocalizationReport",
    "product_inequality",
]


@dataclass(frozen=True)
class CubicSpec:
    """Cubic parameters (beta, a, b) with their admissible box (a0, b0, c0, c1)."""

    beta: float
    a: float
    b: float
    a0: float
    b0: float
    c0: float
    c1: float

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if not (self.a0 > 0 and self.b0 > 0):
            raise ValueError("box lower bounds must be positive")
        if not (self.c1 >= self.c0 > 1.0):
            raise ValueError("need c1 >= c0 > 1")
        if self.a < self.a0 or self.b < self.b0:
            raise ValueError("(a, b) below the box lower bounds")
        if not (self.c0 * self.a <= self.b * (1 + 1e-12) and self.b <= self.c1 * self.a * (1 + 1e-12)):
            raise ValueError("(a, b) violates c0*a <= b <= c1*a")

    def poly(self) -> np.ndarray:
        return np.array([self.beta, 1.0, self.beta * self.b, self.a])


def solve_cubic(spec: CubicSpec) -> np.ndarray:
    """Roots of the cubic via companion-matrix eigenvalues plus a Newton polish.

    The returned multiset is closed under conjugation: a root pair with
    nonzero imaginary part is stored as exact conjugates.
    """
    p = spec.poly()
    roots = np.roots(p)
    dp = np.polyder(p)
    for _ in range(2):
        val = np.polyval(p, roots)
        der = np.polyval(dp, roots)
        step = np.where(np.abs(der) > 0, val / np.where(der == 0, 1.0, der), 0.0)
        roots = roots - step
    # classify: a real cubic has either three real roots or one real + conj pair
    im = np.abs(roots.imag)
    order = np.argsort(im)
    roots = roots[order]
    if im[order][-1] < 1e-9 * (1.0 + np.abs(roots[-1])):
        roots = roots.real.astype(complex)
    else:
        pair = roots[-1]
        roots = np.array([complex(roots[0].real), pair, np.conj(pair)])
    resid = np.abs(np.polyval(p, roots))
    tol = 1e-10 * (1.0 + np.abs(roots) ** 3)
    if np.any(resid > tol):
        raise ArithmeticError(f"root polish failed: residuals {resid}")
    return roots


def alpha_bound(beta: float, a0: float, b0: float, c0: float, c1: float) -> float:
    """Explicit lower bound alpha for the distance of root real parts from 0.

    alpha = min of b~0*a0*beta, 1/(c1*beta), beta*(c0-1)*a0 / (2*(c1*a0*beta^2+1))
    with b~0 = 1 - sqrt(1 - 3*b0*beta^2); the first term is omitted when
    3*b0*beta^2 >= 1 since the all-real-root case is then vacuous.
    """
    if beta <= 0 or a0 <= 0 or b0 <= 0 or not (c1 >= c0 > 1.0):
        raise ValueError("invalid box parameters")
    terms = [
        1.0 / (c1 * beta),
        beta * (c0 - 1.0) * a0 / (2.0 * (c1 * a0 * beta**2 + 1.0)),
    ]
    if 3.0 * b0 * beta**2 < 1.0:
        b_tilde = 1.0 - np.sqrt(1.0 - 3.0 * b0 * beta**2)
        terms.append(b_tilde * a0 * beta)
    return float(min(terms))


@dataclass(frozen=True)
class LocalizationReport:
    samples: int
    passed: int
    min_slack_left: float
    min_slack_right: float
    worst: tuple | None
    sign_checks_ok: bool
    pair_identity_max_err: float

    @property
    def all_passed(self) -> bool:
        return self.passed == self.samples and self.sign_checks_ok


def _sample_box(rng: np.random.Generator, n: int, beta, a0, b0, c0, c1, a_max):
    """Draw (a, b) from the box: a log-uniform in [a_lo, a_max], b uniform in its slice."""
    a_lo = max(a0, b0 / c1)
    a = np.exp(rng.uniform(np.log(a_lo), np.log(a_max), size=n))
    b_lo = np.maximum(b0, c0 * a)
    b_hi = c1 * a
    b = b_lo + (b_hi - b_lo) * rng.uniform(0.0, 1.0, size=n)
    return a, b


def verify_localization(
    beta: float,
    a0: float,
    b0: float,
    c0: float,
    c1: float,
    samples: int = 10_000,
    seed: int = 0,
    a_max_factor: float = 1e3,
) -> LocalizationReport:
    """Sample the box and check every root real part lies in (-1/beta, -alpha).

    Also evaluates the sign checks q(-1/beta) < 0, q(-a/(beta*b)) > 0,
    r(-1/(2*beta)) < 0 and, for complex pairs, the identity
    Im(w)^2 = 3 Re(w)^2 + (2/beta) Re(w) + b.
    """
    alpha = alpha_bound(beta, a0, b0, c0, c1)
    rng = np.random.default_rng(seed)
    a_max = a_max_factor * a0
    a_s, b_s = _sample_box(rng, samples, beta, a0, b0, c0, c1, a_max)
    # boundary-adjacent corners of the admissible region
    a_lo = max(a0, b0 / c1)
    corners = [
        (a_lo, max(b0, c0 * a_lo)),
        (a_lo, c1 * a_lo),
        (a_max, c0 * a_max),
        (a_max, c1 * a_max),
    ]
    a_s = np.concatenate([a_s, [c[0] for c in corners]])
    b_s = np.concatenate([b_s, [c[1] for c in corners]])

    passed = 0
    min_left = np.inf
    min_right = np.inf
    worst = None
    signs_ok = True
    pair_err = 0.0
    for a, b in zip(a_s, b_s):
        spec = CubicSpec(beta, float(a), float(b), a0, b0, c0, c1)
        roots = solve_cubic(spec)
        re = roots.real
        left = re.min() + 1.0 / beta
        right = -alpha - re.max()
        ok = left > 0 and right > 0
        passed += ok
        if min(left, right) < min(min_left, min_right) or worst is None:
            worst = (float(a), float(b))
        min_left = min(min_left, left)
        min_right = min(min_right, right)

        q_at_minv_beta = a - b
        q_at_ratio = a**2 * (b - a) / (b**3 * beta**2)
        r_at_half = -a
        if not (q_at_minv_beta < 0 and q_at_ratio > 0 and r_at_half < 0):
            signs_ok = False
        im = np.abs(roots.imag)
        if im.max() > 1e-9 * (1 + np.abs(roots).max()):
            w = roots[np.argmax(roots.imag)]
            lhs = w.imag**2
            rhs = 3.0 * w.real**2 + (2.0 / beta) * w.real + b
            pair_err = max(pair_err, abs(lhs - rhs) / max(abs(lhs), 1e-300))
    return LocalizationReport(
        samples=len(a_s),
        passed=passed,
        min_slack_left=float(min_left),
        min_slack_right=float(min_right),
        worst=worst,
        sign_checks_ok=signs_ok,
        pair_identity_max_err=float(pair_err),
    )


def product_inequality(z: complex, w: complex) -> tuple[bool, float]:
    """Check |(z - w)(z - conj(w))| >= |Re w| |Im w| for Re z > 0 > Re w.

    Returns (holds, margin) with margin = lhs - rhs.
    """
    if not (np.real(z) > 0 and np.real(w) < 0):
        raise ValueError("need Re(z) > 0 and Re(w) < 0")
    lhs = abs((z - w) * (z - np.conj(w)))
    rhs = abs(np.real(w)) * abs(np.imag(w))
    return lhs >= rhs, float(lhs - rhs)
