"""Randomised property checks run by ``qca validate``.

Each check returns :class:`CheckResult` records holding the worst residual
seen over its draws and the tolerance it was held to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qca import channels as ch
from qca import envsim as es
from qca import geometry as geo
from qca.constants import (
    ALGEBRAIC_TOL,
    BALL_TOL,
    DEGENERACY_TOL,
    EIGEN_TOL,
    PSD_TOL,
    RECONSTRUCTION_TOL,
)
from qca.qmath import svd3, symmetric_eigen3
from qca.sampling import default_rng


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tol: float

    @property
    def ok(self) -> bool:
        return bool(self.residual <= self.tol)

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"{status}  {self.name:<40s} residual={self.residual:.3e}  tol={self.tol:.1e}"


def random_env_params(rng, alpha_eq_gamma=False, **fixed) -> es.EnvParams:
    a, b, g = rng.uniform(0, 2 * math.pi, 3)
    vals = dict(alpha=a, beta=b, gamma=a if alpha_eq_gamma else g, lam=rng.uniform(),
                xi=rng.uniform(0, math.pi), eta=rng.uniform(0, 2 * math.pi))
    vals.update(fixed)
    return es.EnvParams(**vals)


def random_admissible(rng) -> es.EnvParams:
    """Draw from the sweep ranges with ``alpha == gamma`` and a degenerate pattern."""
    a, b = rng.uniform(0, math.pi / 2, 2)
    lam, xi, eta = rng.uniform(), rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)
    if rng.random() < 0.5:
        return es.EnvParams(a, b, a, lam, 0.0, eta)
    return es.EnvParams(a, a, a, lam, xi, eta)


def _multiset_gap(a, b) -> float:
    return float(np.max(np.abs(np.sort(a) - np.sort(b))))


def check_affine_vs_evolution(rng, n) -> list[CheckResult]:
    worst = max(es.evolution_residual(random_env_params(rng)) for _ in range(n))
    return [CheckResult("closed-form affine map vs circuit", worst, RECONSTRUCTION_TOL)]


def check_charpoly(rng, n) -> list[CheckResult]:
    worst = 0.0
    for _ in range(n):
        p = random_env_params(rng)
        f = es.charpoly_coeffs(p)
        ev = es.mtm_eigenvalues(p)
        worst = max(worst, max(abs(f(x)) for x in ev) / max(abs(f.f1), 1.0))
    return [CheckResult("characteristic cubic residual", worst, EIGEN_TOL)]


def check_special_eigen(rng, n) -> list[CheckResult]:
    aeg = xi0 = 0.0
    for _ in range(n):
        p = random_env_params(rng, alpha_eq_gamma=True)
        aeg = max(aeg, _multiset_gap(es.eigen_alpha_eq_gamma(p), es.mtm_eigenvalues(p)))
        p = random_env_params(rng, xi=0.0)
        xi0 = max(xi0, _multiset_gap(es.eigen_xi_zero(p), es.mtm_eigenvalues(p)))
    return [
        CheckResult("eigenvalues for alpha == gamma", aeg, EIGEN_TOL),
        CheckResult("eigenvalues for xi == 0", xi0, EIGEN_TOL),
    ]


def check_canonical(rng, n) -> list[CheckResult]:
    recon = orth = degen = trans = 0.0
    for _ in range(n):
        p = random_admissible(rng)
        cf = es.canonical_form(p)
        m = es.affine_closed_form(p).m
        recon = max(recon, float(np.max(np.abs(cf.u @ cf.d @ cf.v - m))))
        orth = max(
            orth,
            float(np.max(np.abs(cf.u @ cf.u.T - np.eye(3)))),
            float(np.max(np.abs(cf.v @ cf.v.T - np.eye(3)))),
        )
        degen = max(degen, abs(cf.d[0, 0] - cf.d[1, 1]))
        trans = max(trans, abs(cf.t[0]), abs(cf.t[1]))
    return [
        CheckResult("canonical form reconstruction", recon, EIGEN_TOL),
        CheckResult("canonical form orthogonality", orth, RECONSTRUCTION_TOL),
        CheckResult("canonical form D11 == D22", degen, DEGENERACY_TOL),
        CheckResult("canonical form (U^T C)_1,2 == 0", trans, RECONSTRUCTION_TOL),
    ]


def check_svd3(rng, n) -> list[CheckResult]:
    recon = cross = 0.0
    for _ in range(n):
        m = rng.normal(size=(3, 3))
        u, d, v = svd3(m)
        recon = max(recon, float(np.max(np.abs(u @ d @ v - m))))
        cross = max(cross, _multiset_gap(np.diag(d) ** 2, symmetric_eigen3(m.T @ m)))
    return [
        CheckResult("svd3 reconstruction", recon, RECONSTRUCTION_TOL),
        CheckResult("svd3 D^2 vs symmetric_eigen3", cross, EIGEN_TOL),
    ]


def check_gad(rng, n) -> list[CheckResult]:
    gap = defect = neg = 0.0
    for _ in range(n):
        p = geo.sample_gad_params(rng)
        k = ch.gad(p)
        a = ch.kraus_to_affine(k)
        b = ch.gad_affine_closed(p)
        gap = max(gap, float(np.max(np.abs(a.m - b.m))), float(np.max(np.abs(a.c - b.c))))
        defect = max(defect, ch.is_trace_preserving(k)[1])
        neg = max(neg, -ch.choi_psd_check(k)[1])
    return [
        CheckResult("GAD closed form vs Kraus", gap, ALGEBRAIC_TOL),
        CheckResult("GAD trace preservation", defect, RECONSTRUCTION_TOL),
        CheckResult("GAD Choi positivity (-min eig)", max(neg, 0.0), PSD_TOL),
    ]


def check_image_containment(rng, n) -> list[CheckResult]:
    worst = 0.0
    for _ in range(n):
        a = ch.kraus_to_affine(ch.gad(geo.sample_gad_params(rng)))
        r = rng.normal(size=(100, 3))
        r *= (rng.random(100) ** (1 / 3) / np.linalg.norm(r, axis=1))[:, None]
        out = r @ a.m.T + a.c
        worst = max(worst, float(np.max(np.linalg.norm(out, axis=1))) - 1)
    return [CheckResult("channel image stays in Bloch ball", max(worst, 0.0), BALL_TOL)]


def check_single_env_membership(rng, n) -> list[CheckResult]:
    missed = 0
    for _ in range(n):
        pt = es.ad_point(random_admissible(rng))
        missed += not geo.single_env_contains(pt)
        missed += not geo.gad_contains(pt)
    return [CheckResult("admissible points inside both regions", float(missed), 0.0)]


CHECKS = (
    check_affine_vs_evolution,
    check_charpoly,
    check_special_eigen,
    check_canonical,
    check_svd3,
    check_gad,
    check_image_containment,
    check_single_env_membership,
)


def run_all(draws: int = 200, seed: int = 0) -> list[CheckResult]:
    results = []
    for i, check in enumerate(CHECKS):
        results.extend(check(default_rng(seed, stream=100 + i), draws))
    return results
