"""Qubit channels in Kraus (operator-sum) and affine (Bloch) form.

Named constructors cover standard amplitude damping, the four-element
generalized amplitude damping (GAD) family and phase damping.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from qca.constants import ALGEBRAIC_TOL, PSD_TOL, RECONSTRUCTION_TOL
from qca.errors import ContractError, DomainError, ShapeError, ValidationError
from qca.qmath import (
    IDENTITY2,
    PAULI,
    bloch_to_density,
    dagger,
    density_to_bloch,
    is_density_matrix,
)


@dataclass(frozen=True)
class KrausChannel:
    """Operator-sum channel ``rho -> sum_k E_k rho E_k^dagger``."""

    elements: tuple

    def __post_init__(self):
        els = tuple(np.array(e, dtype=complex) for e in self.elements)
        if not els:
            raise ShapeError("a Kraus channel needs at least one element")
        for e in els:
            if e.shape != (2, 2):
                raise ShapeError(f"Kraus elements must be 2x2, got {e.shape}")
            e.setflags(write=False)
        object.__setattr__(self, "elements", els)

    def __len__(self):
        return len(self.elements)


@dataclass(frozen=True)
class AffineChannel:
    """Bloch-vector map ``r -> m @ r + c``."""

    m: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        m = np.array(self.m, dtype=float)
        c = np.array(self.c, dtype=float)
        if m.shape != (3, 3) or c.shape != (3,):
            raise ShapeError(f"affine channel needs m 3x3 and c 3, got {m.shape}, {c.shape}")
        m.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "c", c)

    def __call__(self, r):
        return self.m @ np.asarray(r, dtype=float) + self.c


@dataclass(frozen=True)
class GadParams:
    """Free parameters of the GAD family.

    ``eps1*gamma1`` and ``eps3*gamma3`` are fixed by trace preservation, so
    only ``eps0, eps2, gamma0, gamma2`` are stored.
    """

    eps0: float
    eps2: float
    gamma0: float
    gamma2: float

    def __post_init__(self):
        validate_gad_params(self)

    @property
    def eps1_gamma1(self) -> float:
        return max(0.0, 1.0 - self.gamma0 * self.eps0 - self.eps2)

    @property
    def eps3_gamma3(self) -> float:
        return max(0.0, 1.0 - self.eps0 - self.gamma2 * self.eps2)


def validate_gad_params(p: GadParams, tol: float = ALGEBRAIC_TOL) -> None:
    for name in ("eps0", "eps2", "gamma0", "gamma2"):
        v = getattr(p, name)
        if not math.isfinite(v):
            raise DomainError(f"{name} must be finite, got {v}")
    if p.eps0 < 0 or p.eps2 < 0:
        raise DomainError(f"eps0 and eps2 must be >= 0, got {p.eps0}, {p.eps2}")
    for name in ("gamma0", "gamma2"):
        v = getattr(p, name)
        if not 0 <= v <= 1:
            raise DomainError(f"{name} must lie in [0, 1], got {v}")
    lhs = p.gamma0 * p.eps0 + p.eps2
    if lhs > 1 + tol:
        raise DomainError(f"gamma0*eps0 + eps2 <= 1 violated ({lhs:.6g} > 1)")
    lhs = p.eps0 + p.gamma2 * p.eps2
    if lhs > 1 + tol:
        raise DomainError(f"eps0 + gamma2*eps2 <= 1 violated ({lhs:.6g} > 1)")


def _probability(value: float, name: str) -> float:
    if not (math.isfinite(value) and 0 <= value <= 1):
        raise DomainError(f"{name} must lie in [0, 1], got {value}")
    return float(value)


# ---------------------------------------------------------------------------
# validity checks


def trace_preservation_defect(k: KrausChannel) -> float:
    s = sum(dagger(e) @ e for e in k.elements)
    return float(np.max(np.abs(s - IDENTITY2)))


def is_trace_preserving(k: KrausChannel, tol: float = RECONSTRUCTION_TOL) -> tuple[bool, float]:
    """Return ``(ok, defect)`` with ``defect = max|sum E^dagger E - 1|``."""
    defect = trace_preservation_defect(k)
    return defect < tol, defect


def choi_matrix(k: KrausChannel) -> np.ndarray:
    """``sum_k (E_k x 1)|Omega><Omega|(E_k x 1)^dagger`` with unnormalised ``|Omega> = |00> + |11>``."""
    omega = np.array([1, 0, 0, 1], dtype=complex)
    choi = np.zeros((4, 4), dtype=complex)
    for e in k.elements:
        v = np.kron(e, IDENTITY2) @ omega
        choi += np.outer(v, v.conj())
    return choi


def choi_psd_check(k: KrausChannel, tol: float = PSD_TOL) -> tuple[bool, float]:
    """Return ``(ok, min_eigenvalue)`` of the Choi matrix."""
    choi = choi_matrix(k)
    lo = float(np.linalg.eigvalsh((choi + dagger(choi)) / 2).min())
    return lo >= -tol, lo


# ---------------------------------------------------------------------------
# representations


def kraus_to_affine(k: KrausChannel) -> AffineChannel:
    """Pauli-transfer form: ``M_ij = Tr(s_i sum E s_j E^dagger)/2`` and ``C_i = Tr(s_i sum E E^dagger)/2``."""
    ok, defect = is_trace_preserving(k)
    if not ok:
        raise ValidationError(f"channel is not trace preserving (defect {defect:.3g})")
    m = np.empty((3, 3))
    for j, sj in enumerate(PAULI):
        out = sum(e @ sj @ dagger(e) for e in k.elements)
        for i, si in enumerate(PAULI):
            m[i, j] = 0.5 * np.trace(si @ out).real
    unital = sum(e @ dagger(e) for e in k.elements)
    c = np.array([0.5 * np.trace(si @ unital).real for si in PAULI])
    return AffineChannel(m, c)


def _is_bloch(state) -> bool:
    return np.shape(state) == (3,)


def apply(ch, state):
    """Apply a channel to a density matrix or a Bloch vector.

    The output has the same representation as the input.
    """
    if _is_bloch(state):
        r = np.asarray(state, dtype=float)
        if np.linalg.norm(r) > 1 + RECONSTRUCTION_TOL:
            raise ContractError(f"Bloch vector norm {np.linalg.norm(r):.6g} exceeds 1")
        if isinstance(ch, AffineChannel):
            return ch(r)
        return density_to_bloch(apply(ch, bloch_to_density(r)))

    rho = np.asarray(state, dtype=complex)
    if rho.shape != (2, 2):
        raise ShapeError(f"state must be a Bloch 3-vector or a 2x2 density matrix, got {rho.shape}")
    if not is_density_matrix(rho, tol=RECONSTRUCTION_TOL):
        raise ContractError("input is not a valid density matrix")
    if isinstance(ch, KrausChannel):
        return sum(e @ rho @ dagger(e) for e in ch.elements)
    if isinstance(ch, AffineChannel):
        return bloch_to_density(ch(density_to_bloch(rho)))
    raise TypeError(f"unsupported channel type {type(ch).__name__}")


# ---------------------------------------------------------------------------
# named channels


def identity_channel() -> KrausChannel:
    return KrausChannel((IDENTITY2,))


def standard_ad(gamma: float) -> KrausChannel:
    """Amplitude damping with decay probability ``gamma``."""
    g = _probability(gamma, "gamma")
    e0 = np.array([[1, 0], [0, math.sqrt(1 - g)]], dtype=complex)
    e1 = np.array([[0, math.sqrt(g)], [0, 0]], dtype=complex)
    return KrausChannel((e0, e1))


def gad(p: GadParams) -> KrausChannel:
    """Four-element generalized amplitude damping.

    ``gamma1 = gamma3 = 1`` is used when materialising E1 and E3; every
    choice with the same products ``eps1*gamma1`` and ``eps3*gamma3`` gives
    the same channel.
    """
    validate_gad_params(p)
    e0 = math.sqrt(p.eps0) * np.array([[1, 0], [0, math.sqrt(p.gamma0)]], dtype=complex)
    e1 = math.sqrt(p.eps1_gamma1) * np.array([[0, 1], [0, 0]], dtype=complex)
    e2 = math.sqrt(p.eps2) * np.array([[math.sqrt(p.gamma2), 0], [0, 1]], dtype=complex)
    e3 = math.sqrt(p.eps3_gamma3) * np.array([[0, 0], [1, 0]], dtype=complex)
    return KrausChannel((e0, e1, e2, e3))


def gad_affine_closed(p: GadParams) -> AffineChannel:
    validate_gad_params(p)
    x = p.eps0 * math.sqrt(p.gamma0) + p.eps2 * math.sqrt(p.gamma2)
    y = -1 + p.eps0 * (1 + p.gamma0) + p.eps2 * (1 + p.gamma2)
    z = p.eps0 * (1 - p.gamma0) - p.eps2 * (1 - p.gamma2)
    return AffineChannel(np.diag([x, x, y]), np.array([0.0, 0.0, z]))


def phase_damping(lam: float) -> KrausChannel:
    lam = _probability(lam, "lambda")
    e0 = np.array([[1, 0], [0, math.sqrt(1 - lam)]], dtype=complex)
    e1 = np.array([[0, 0], [0, math.sqrt(lam)]], dtype=complex)
    return KrausChannel((e0, e1))


# ---------------------------------------------------------------------------
# JSON


def channel_to_dict(k: KrausChannel, affine: AffineChannel | None = None) -> dict:
    if affine is None:
        affine = kraus_to_affine(k)
    return {
        "kraus": [[[[z.real, z.imag] for z in row] for row in e] for e in k.elements],
        "affine": {"m": affine.m.tolist(), "c": affine.c.tolist()},
    }


def channel_from_dict(d: dict) -> tuple[KrausChannel, AffineChannel]:
    elements = [np.array([[complex(re, im) for re, im in row] for row in e]) for e in d["kraus"]]
    return KrausChannel(tuple(elements)), AffineChannel(d["affine"]["m"], d["affine"]["c"])


def channel_to_json(k: KrausChannel, **kwargs) -> str:
    return json.dumps(channel_to_dict(k), **kwargs)


def channel_from_json(text: str) -> tuple[KrausChannel, AffineChannel]:
    return channel_from_dict(json.loads(text))
