"""Single-qubit system coupled to a single-qubit mixed-state environment.

A pure system qubit and an environment qubit
``rho_e = (1 - lam) 1/2 + lam |phi><phi|`` interact through the
three-parameter two-qubit unitary ``U_d(alpha, beta, gamma)``; the
environment is then traced out.  The module evaluates that circuit
numerically and also provides its closed-form affine map, the
characteristic polynomial of ``M^T M``, special-case eigenvalues, and the
canonical (SVD) forms used to decide which of these channels are
amplitude-damping-like.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from qca.channels import AffineChannel
from qca.constants import CASE_TOL
from qca.errors import DomainError
from qca.qmath import (
    IDENTITY2,
    dagger,
    density_to_bloch,
    partial_trace_env,
    svd3,
    symmetric_eigen3,
    tensor_product,
)

# radicand values in (-RADICAND_CLAMP, 0) are treated as exact zeros
RADICAND_CLAMP = 1e-12


@dataclass(frozen=True)
class EnvParams:
    """Coupling angles ``alpha, beta, gamma``, environment mixedness ``lam`` and
    environment pure-part angles ``xi, eta`` (all angles in radians)."""

    alpha: float
    beta: float
    gamma: float
    lam: float
    xi: float = 0.0
    eta: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "xi", "eta"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if not (math.isfinite(self.lam) and 0 <= self.lam <= 1):
            raise DomainError(f"lambda must lie in [0, 1], got {self.lam}")

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "lambda": self.lam,
            "xi": self.xi,
            "eta": self.eta,
        }


@dataclass(frozen=True)
class PureQubit:
    """``cos(theta/2)|0> + exp(-i phi) sin(theta/2)|1>``."""

    theta: float
    phi: float

    def ket(self) -> np.ndarray:
        return np.array(
            [math.cos(self.theta / 2), np.exp(-1j * self.phi) * math.sin(self.theta / 2)]
        )

    def density(self) -> np.ndarray:
        k = self.ket()
        return np.outer(k, k.conj())

    def bloch(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), -st * math.sin(self.phi), math.cos(self.theta)])


# the six Bloch axis states +x, -x, +y, -y, +z, -z
AXIS_STATES = (
    PureQubit(math.pi / 2, 0.0),
    PureQubit(math.pi / 2, math.pi),
    PureQubit(math.pi / 2, -math.pi / 2),
    PureQubit(math.pi / 2, math.pi / 2),
    PureQubit(0.0, 0.0),
    PureQubit(math.pi, 0.0),
)


class CubicCoeffs(NamedTuple):
    """Coefficients of ``-L^3 + f1 L^2 + f2 L + f3``."""

    f1: float
    f2: float
    f3: float

    def __call__(self, lam):
        return -(lam**3) + self.f1 * lam**2 + self.f2 * lam + self.f3


class AdPoint(NamedTuple):
    x: float
    y: float
    z: float


class Case(str, enum.Enum):
    XI_ZERO = "XiZero"
    ALPHA_EQ_BETA = "AlphaEqBeta"
    XI_HALF_PI = "XiHalfPi"
    BETA_ZERO = "BetaZero"
    GENERIC = "Generic"

    @property
    def admissible(self) -> bool:
        return self in (Case.XI_ZERO, Case.ALPHA_EQ_BETA)


@dataclass(frozen=True)
class CanonicalForm:
    u: np.ndarray
    d: np.ndarray
    v: np.ndarray
    t: np.ndarray
    case: Case

    @property
    def admissible(self) -> bool:
        return self.case.admissible


# ---------------------------------------------------------------------------
# circuit


def build_ud(p: EnvParams) -> np.ndarray:
    cp, sp = math.cos((p.alpha + p.gamma) / 2), math.sin((p.alpha + p.gamma) / 2)
    cm, sm = math.cos((p.alpha - p.gamma) / 2), math.sin((p.alpha - p.gamma) / 2)
    ph = np.exp(-1j * p.beta)
    return np.array(
        [
            [cp, 0, 0, 1j * sp],
            [0, cm * ph, 1j * sm * ph, 0],
            [0, 1j * sm * ph, cm * ph, 0],
            [1j * sp, 0, 0, cp],
        ],
        dtype=complex,
    )


def env_state(p: EnvParams) -> np.ndarray:
    phi = PureQubit(p.xi, p.eta).ket()
    return (1 - p.lam) * IDENTITY2 / 2 + p.lam * np.outer(phi, phi.conj())


def evolve_density(rho_in: np.ndarray, p: EnvParams) -> np.ndarray:
    u = build_ud(p)
    joint = u @ tensor_product(rho_in, env_state(p)) @ dagger(u)
    return partial_trace_env(joint)


def evolve(s: PureQubit, p: EnvParams) -> np.ndarray:
    """Output density matrix of the system qubit."""
    return evolve_density(s.density(), p)


def affine_from_evolution(p: EnvParams) -> AffineChannel:
    """Affine map fitted from the numerically evolved six axis states."""
    out = [density_to_bloch(evolve(s, p)) for s in AXIS_STATES]
    c = (out[4] + out[5]) / 2
    m = np.column_stack([(out[2 * k] - out[2 * k + 1]) / 2 for k in range(3)])
    return AffineChannel(m, c)


def affine_closed_form(p: EnvParams) -> AffineChannel:
    ca, sa = math.cos(p.alpha), math.sin(p.alpha)
    cb, sb = math.cos(p.beta), math.sin(p.beta)
    cg, sg = math.cos(p.gamma), math.sin(p.gamma)
    cx, sx = math.cos(p.xi), math.sin(p.xi)
    ce, se = math.cos(p.eta), math.sin(p.eta)
    lam = p.lam
    m = np.array(
        [
            [cb * cg, lam * cx * sb * cg, -lam * sx * se * cb * sg],
            [-lam * cx * ca * sb, ca * cb, lam * sx * ce * sa * cb],
            [lam * sx * se * ca * sg, -lam * sx * ce * sa * cg, ca * cg],
        ]
    )
    c = -lam * np.array([sx * ce * sb * sg, sx * se * sa * sb, cx * sa * sg])
    return AffineChannel(m, c)


# ---------------------------------------------------------------------------
# eigenvalues of M^T M


def charpoly_coeffs(p: EnvParams) -> CubicCoeffs:
    c2a, s2a = math.cos(p.alpha) ** 2, math.sin(p.alpha) ** 2
    c2b, s2b = math.cos(p.beta) ** 2, math.sin(p.beta) ** 2
    c2g, s2g = math.cos(p.gamma) ** 2, math.sin(p.gamma) ** 2
    c2x, s2x = math.cos(p.xi) ** 2, math.sin(p.xi) ** 2
    c2e, s2e = math.cos(p.eta) ** 2, math.sin(p.eta) ** 2
    l2 = p.lam**2

    f1 = c2a * c2b + c2b * c2g + c2g * c2a + l2 * (
        c2x * s2b * (c2a + c2g) + s2x * s2e * s2g * (c2a + c2b) + s2x * c2e * s2a * (c2b + c2g)
    )
    # |det M|, and the sum in the second factor of f2
    det_abs = c2a * c2b * c2g + l2 * (
        s2x * s2e * c2a * c2b * s2g + s2x * c2e * s2a * c2b * c2g + c2x * c2a * s2b * c2g
    )
    spread = (c2a + c2b + c2g) + l2 * (s2x * s2e * s2g + s2x * c2e * s2a + c2x * s2b)
    return CubicCoeffs(f1, -det_abs * spread, det_abs**2)


def mtm_eigenvalues(p: EnvParams) -> np.ndarray:
    m = affine_closed_form(p).m
    return symmetric_eigen3(m.T @ m)


def _require_alpha_eq_gamma(p: EnvParams, tol: float = CASE_TOL) -> None:
    if abs(p.alpha - p.gamma) > tol:
        raise DomainError(f"alpha must equal gamma (|alpha - gamma| = {abs(p.alpha - p.gamma):.3g})")


def eigen_alpha_eq_gamma(p: EnvParams) -> tuple[float, float, float]:
    """``(L1, L+, L-)`` for ``alpha == gamma``."""
    _require_alpha_eq_gamma(p)
    c2a, s2a = math.cos(p.alpha) ** 2, math.sin(p.alpha) ** 2
    c2b, s2b = math.cos(p.beta) ** 2, math.sin(p.beta) ** 2
    c2x, s2x = math.cos(p.xi) ** 2, math.sin(p.xi) ** 2
    l2 = p.lam**2

    lam1 = c2a * c2b + l2 * (c2x * c2a * s2b + s2x * s2a * c2b)
    mix = l2 * (c2x * s2b + s2x * s2a)
    radicand = ((c2a - c2b) + mix) ** 2 - 4 * l2 * c2x * s2b * (c2a - c2b)
    if radicand < 0:
        if radicand < -RADICAND_CLAMP:
            raise ArithmeticError(f"negative radicand {radicand:.3g}")
        radicand = 0.0
    root = math.sqrt(radicand)
    base = (c2a + c2b) + mix
    return lam1, c2a / 2 * (base + root), c2a / 2 * (base - root)


def eigen_xi_zero(p: EnvParams) -> tuple[float, float, float]:
    if abs(p.xi) > CASE_TOL:
        raise DomainError(f"xi must be 0 (got {p.xi})")
    c2a, c2g = math.cos(p.alpha) ** 2, math.cos(p.gamma) ** 2
    bracket = math.cos(p.beta) ** 2 + p.lam**2 * math.sin(p.beta) ** 2
    return c2a * bracket, c2g * bracket, c2a * c2g


# ---------------------------------------------------------------------------
# canonical forms


def classify_case(p: EnvParams, tol: float = CASE_TOL) -> Case:
    """Match the parameter pattern of ``p`` (which must have ``alpha == gamma``).

    Extra degeneracies outside the four named patterns are reported as
    ``Generic``.
    """
    _require_alpha_eq_gamma(p, tol)
    if abs(p.xi) <= tol:
        return Case.XI_ZERO
    if abs(p.alpha - p.beta) <= tol:
        return Case.ALPHA_EQ_BETA
    if abs(p.xi - math.pi / 2) <= tol:
        return Case.XI_HALF_PI
    if abs(p.beta) <= tol:
        return Case.BETA_ZERO
    return Case.GENERIC


def case_diagonal(p: EnvParams, case: Case | None = None) -> tuple[float, float, float]:
    """Closed-form ``(D11, D22, D33)`` for the four named cases."""
    case = case or classify_case(p)
    ca, sa = math.cos(p.alpha), math.sin(p.alpha)
    cb, sb = math.cos(p.beta), math.sin(p.beta)
    lam = p.lam
    if case is Case.XI_ZERO:
        x = ca * math.sqrt(cb**2 + lam**2 * sb**2)
        return x, x, ca**2
    if case is Case.ALPHA_EQ_BETA:
        x = ca * math.sqrt(ca**2 + lam**2 * sa**2)
        return x, x, ca**2
    if case is Case.XI_HALF_PI:
        q = math.sqrt(ca**2 + lam**2 * sa**2)
        return ca * q, cb * q, ca * cb
    if case is Case.BETA_ZERO:
        q = math.sqrt(ca**2 + lam**2 * math.sin(p.xi) ** 2 * sa**2)
        return q, ca * q, ca
    raise DomainError("no closed-form diagonal for the generic case")


def _svd_xi_zero(p: EnvParams):
    ca = math.cos(p.alpha)
    cb, sb = math.cos(p.beta), math.sin(p.beta)
    lam = p.lam
    root = math.sqrt(cb**2 + lam**2 * sb**2)
    u = np.array([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    d = np.diag([ca * root, ca * root, ca**2])
    v = np.array([[lam * sb, -cb, 0.0], [cb, lam * sb, 0.0], [0.0, 0.0, root]]) / root
    return u, d, v


def _svd_alpha_eq_beta(p: EnvParams):
    # every entry of U carries the 1/root prefactor; the third column's own
    # root factor cancels it, columns 1-2 have norm root before scaling
    ca, sa = math.cos(p.alpha), math.sin(p.alpha)
    cx, sx = math.cos(p.xi), math.sin(p.xi)
    ce, se = math.cos(p.eta), math.sin(p.eta)
    lam = p.lam
    root = math.sqrt(ca**2 + lam**2 * sa**2)
    u = np.array(
        [
            [se * ca - lam * cx * ce * sa, cx * ce * ca + lam * se * sa, sx * ce * root],
            [-(ce * ca + lam * cx * se * sa), cx * se * ca - lam * ce * sa, sx * se * root],
            [lam * sx * sa, -sx * ca, cx * root],
        ]
    ) / root
    d = np.diag([ca * root, ca * root, ca**2])
    v = np.array([[se, -ce, 0.0], [cx * ce, cx * se, -sx], [sx * ce, sx * se, cx]])
    return u, d, v


def _pair_first(u, d, v):
    """Permute so the two closest singular values occupy positions 1 and 2."""
    s = np.diag(d)
    gaps = [abs(s[0] - s[1]), abs(s[0] - s[2]), abs(s[1] - s[2])]
    order = [(0, 1, 2), (0, 2, 1), (1, 2, 0)][int(np.argmin(gaps))]
    order = list(order)
    return u[:, order], np.diag(s[order]), v[order, :]


def canonical_form(p: EnvParams) -> CanonicalForm:
    """``M = U D V`` with the degenerate singular pair (if any) in positions 1, 2.

    Admissible cases use the closed-form factors; the rest fall back to the
    numeric ``svd3``.  Negative closed-form singular values (``cos alpha < 0``)
    are made nonnegative by flipping the matching columns of ``U``.
    """
    case = classify_case(p)
    ch = affine_closed_form(p)
    if case is Case.XI_ZERO:
        u, d, v = _svd_xi_zero(p)
    elif case is Case.ALPHA_EQ_BETA:
        u, d, v = _svd_alpha_eq_beta(p)
    else:
        u, d, v = _pair_first(*svd3(ch.m))
    signs = np.where(np.diag(d) < 0, -1.0, 1.0)
    u = u * signs
    d = d * signs
    return CanonicalForm(u=u, d=d, v=v, t=u.T @ ch.c, case=case)


def ad_point(p: EnvParams) -> AdPoint:
    """``(D11, D33, (U^T C)_3)`` of an admissible channel."""
    case = classify_case(p)
    if not case.admissible:
        raise DomainError(f"case {case.value} is not amplitude-damping-like")
    beta = p.alpha if case is Case.ALPHA_EQ_BETA else p.beta
    ca, sa = math.cos(p.alpha), math.sin(p.alpha)
    x = ca * math.sqrt(math.cos(beta) ** 2 + p.lam**2 * math.sin(beta) ** 2)
    return AdPoint(x, ca**2, -p.lam * sa**2)


# ---------------------------------------------------------------------------
# report


def report(p: EnvParams, canonical: bool | None = None) -> dict:
    """JSON-ready summary of one parameter point.

    ``canonical=None`` adds the canonical-form fields only when
    ``alpha == gamma``; ``True`` requires it.
    """
    ch = affine_closed_form(p)
    coeffs = charpoly_coeffs(p)
    out = {
        "params": p.as_dict(),
        "m": ch.m.tolist(),
        "c": ch.c.tolist(),
        "charpoly": coeffs._asdict(),
        "eigenvalues": mtm_eigenvalues(p).tolist(),
        "case": None,
        "admissible": None,
        "d": None,
        "t": None,
        "ad_point": None,
    }
    aeg = abs(p.alpha - p.gamma) <= CASE_TOL
    if canonical and not aeg:
        raise DomainError("alpha must equal gamma for canonical-form output")
    if aeg and canonical is not False:
        cf = canonical_form(p)
        out["case"] = cf.case.value
        out["admissible"] = cf.admissible
        out["d"] = np.diag(cf.d).tolist()
        out["t"] = cf.t.tolist()
        if cf.admissible:
            out["ad_point"] = list(ad_point(p))
    return out


def evolution_residual(p: EnvParams) -> float:
    """Largest Bloch-component gap between closed form and circuit on the axis states."""
    ch = affine_closed_form(p)
    worst = 0.0
    for s in AXIS_STATES:
        got = density_to_bloch(evolve(s, p))
        worst = max(worst, float(np.max(np.abs(got - ch(s.bloch())))))
    return worst

