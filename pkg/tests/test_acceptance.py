"""Acceptance criteria, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -s`` to see one PASS/FAIL line per
criterion as it runs; the full table is printed again at the end of the
module.  Criteria that are not met fail loudly rather than being relaxed.
"""

import hashlib
import math
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from conftest import run_cli, run_json

from qca import channels as ch
from qca import envsim as es
from qca import geometry as geo
from qca.sampling import default_rng

DECISIONS = Path(__file__).resolve().parents[2] / "notes" / "decisions.md"
LINES = []


@pytest.fixture(scope="module", autouse=True)
def summary():
    yield
    print("\n" + "\n".join(line for _, line in sorted(LINES)))


def verdict(n, title, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  AC{n:02d} {title}: {detail}"
    LINES.append((n, line))
    print(line)
    assert ok, line


def timed_json(*args):
    t0 = time.perf_counter()
    doc = run_json(*args)
    return doc, time.perf_counter() - t0


def admissible_draws(rng, n):
    out = []
    for k in range(n):
        a, b = rng.uniform(0, 2 * math.pi, 2)
        lam, xi, eta = rng.random(), rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)
        out.append(es.EnvParams(a, b, a, lam, 0.0, eta) if k % 2 else es.EnvParams(a, a, a, lam, xi, eta))
    return out


def test_ac01_gad_volume():
    doc, secs = timed_json("volume", "gad", "--samples", "10000000", "--grid", "200", "--seed", "7")
    ok = abs(doc["estimate"] - 1.67) <= 0.10 and secs <= 300
    verdict(
        1, "GAD volume 1.67 +- 0.10", ok,
        f"estimate={doc['estimate']:.4f} (exact {doc['exact']}={8 / 9:.4f}), runtime={secs:.1f}s",
    )


def test_ac02_single_env_volume():
    doc, secs = timed_json("volume", "single-env", "--grid", "400")
    exact = geo.single_env_volume_analytic()
    gap = abs(doc["estimate"] - 2 / 15)
    ok = gap <= 0.005 and exact == Fraction(2, 15) and secs <= 60
    verdict(2, "single-env volume 2/15", ok, f"estimate={doc['estimate']:.5f}, |gap|={gap:.2e}, analytic={exact}, runtime={secs:.1f}s")


def test_ac03_ratio():
    doc = run_json("ratio", "--samples", "10000000", "--grid", "200", "--seed", "7")
    in_band = abs(doc["ratio"] - 0.08) <= 0.01
    below = doc["ratio"] < 3 / 8
    verdict(
        3, "ratio 0.08 +- 0.01 and < 3/8", in_band and below,
        f"ratio={doc['ratio']:.4f} (exact {doc['ratio_exact']}), in band={in_band}, below 3/8={below}",
    )


def test_ac04_embedding():
    doc = run_json("containment", "--samples", "100000", "--grid", "200", "--seed", "7")
    ok = doc["fraction"] >= 0.999 and doc["gad_samples"] == 10_000_000
    verdict(4, "embedding fraction >= 0.999", ok, f"fraction={doc['fraction']:.5f}, closed-form check={doc['exact_fraction']:.5f}")


def test_ac05_closed_form_affine():
    rng = default_rng(5, stream=200)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        a, b, g, xi, eta = rng.uniform(0, 2 * math.pi, 5)
        p = es.EnvParams(a, b, g, rng.random(), xi, eta)
        closed = es.affine_closed_form(p)
        for s in es.AXIS_STATES:
            rho = es.evolve(s, p)
            r = np.array([2 * rho[0, 1].real, -2 * rho[0, 1].imag, (rho[0, 0] - rho[1, 1]).real])
            worst = max(worst, float(np.max(np.abs(closed(s.bloch()) - r))))
    secs = time.perf_counter() - t0
    verdict(5, "closed-form affine map", worst <= 1e-10 and secs <= 10, f"max residual={worst:.2e}, runtime={secs:.2f}s")


def test_ac06_eigen_formulas():
    rng = default_rng(6, stream=200)
    cubic = aeg = xi0 = 0.0
    for _ in range(1000):
        a, b, g, xi, eta = rng.uniform(0, 2 * math.pi, 5)
        lam = rng.random()
        p = es.EnvParams(a, b, g, lam, xi, eta)
        m = es.affine_closed_form(p).m
        f = es.charpoly_coeffs(p)
        cubic = max(cubic, max(abs(f(x)) for x in np.linalg.eigvalsh(m.T @ m)))
        q = es.EnvParams(a, b, a, lam, xi, eta)
        m = es.affine_closed_form(q).m
        aeg = max(aeg, float(np.max(np.abs(np.sort(es.eigen_alpha_eq_gamma(q)) - np.linalg.eigvalsh(m.T @ m)))))
        q = es.EnvParams(a, b, g, lam, 0.0, eta)
        m = es.affine_closed_form(q).m
        xi0 = max(xi0, float(np.max(np.abs(np.sort(es.eigen_xi_zero(q)) - np.linalg.eigvalsh(m.T @ m)))))
    ok = max(cubic, aeg, xi0) <= 1e-9
    verdict(6, "eigen formulas", ok, f"cubic residual={cubic:.2e}, alpha=gamma gap={aeg:.2e}, xi=0 gap={xi0:.2e}")


def test_ac07_svd_closed_forms():
    rng = default_rng(7, stream=200)
    recon = orth = degen = trans = 0.0
    cases = set()
    for p in admissible_draws(rng, 1000):
        cf = es.canonical_form(p)
        aff = es.affine_closed_form(p)
        cases.add(cf.case)
        recon = max(recon, float(np.max(np.abs(cf.u @ cf.d @ cf.v - aff.m))))
        orth = max(orth, float(np.max(np.abs(cf.u @ cf.u.T - np.eye(3)))), float(np.max(np.abs(cf.v @ cf.v.T - np.eye(3)))))
        degen = max(degen, abs(cf.d[0, 0] - cf.d[1, 1]))
        t = cf.u.T @ aff.c
        trans = max(trans, abs(t[0]), abs(t[1]))
    ok = (
        recon <= 1e-9 and orth <= 1e-10 and degen <= 1e-10 and trans <= 1e-10
        and cases == {es.Case.XI_ZERO, es.Case.ALPHA_EQ_BETA}
    )
    verdict(
        7, "SVD closed forms", ok,
        f"reconstruction={recon:.2e}, orthogonality={orth:.2e}, |D11-D22|={degen:.2e}, max|(U^T C)_1,2|={trans:.2e}",
    )


def test_ac08_gad_consistency():
    rng = default_rng(8, stream=200)
    gap = defect = 0.0
    min_eig = math.inf
    for _ in range(1000):
        p = geo.sample_gad_params(rng)
        k = ch.gad(p)
        a, b = ch.gad_affine_closed(p), ch.kraus_to_affine(k)
        gap = max(gap, float(np.max(np.abs(a.m - b.m))), float(np.max(np.abs(a.c - b.c))))
        defect = max(defect, ch.trace_preservation_defect(k))
        min_eig = min(min_eig, ch.choi_psd_check(k)[1])
    ok = gap <= 1e-12 and defect <= 1e-10 and min_eig >= -1e-10
    verdict(8, "GAD consistency", ok, f"closed vs Kraus={gap:.2e}, trace defect={defect:.2e}, min Choi eig={min_eig:.2e}")


def test_ac09_amplitude_damping_affine():
    worst = 0.0
    differs = True
    for gamma in np.arange(1, 10) / 10:
        k = ch.standard_ad(gamma)
        out = []
        for s in es.AXIS_STATES:
            rho = sum(e @ s.density() @ e.conj().T for e in k.elements)
            out.append(np.array([2 * rho[0, 1].real, -2 * rho[0, 1].imag, (rho[0, 0] - rho[1, 1]).real]))
        m = np.column_stack([(out[2 * i] - out[2 * i + 1]) / 2 for i in range(3)])
        c = (out[4] + out[5]) / 2
        a = ch.kraus_to_affine(k)
        s = math.sqrt(1 - gamma)
        worst = max(
            worst,
            float(np.max(np.abs(a.m - m))), float(np.max(np.abs(a.c - c))),
            float(np.max(np.abs(a.m - np.diag([s, s, 1 - gamma])))), float(np.max(np.abs(a.c - [0, 0, gamma]))),
        )
        differs &= abs(a.m[2, 2] - (1 - gamma / 2)) > 1e-3 and abs(a.c[2] - gamma / 2) > 1e-3
    text = DECISIONS.read_text() if DECISIONS.exists() else ""
    recorded = "1-gamma/2" in text and "gamma/2" in text and "M33 = 1-gamma" in text
    ok = worst <= 1e-12 and differs and recorded
    verdict(
        9, "amplitude-damping affine map", ok,
        f"max gap={worst:.2e}, differs from 1-g/2, g/2={differs}, recorded in {DECISIONS}={recorded}",
    )


def _digest(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def test_ac10_determinism(tmp_path):
    commands = {
        "volume-gad": ["volume", "gad", "--samples", "3000000", "--grid", "200", "--seed", "3"],
        "volume-single-env": ["volume", "single-env", "--grid", "200"],
        "cloud-gad": ["cloud", "gad", "--samples", "2200000", "--seed", "3"],
        "cloud-single-env": ["cloud", "single-env", "--samples", "2200000", "--seed", "3", "--format", "json"],
    }
    mismatched = []
    for name, args in commands.items():
        digests = set()
        for run, workers in enumerate((1, 1, 2, 4)):
            out = tmp_path / f"{name}-{run}"
            run_cli(*args, "--workers", workers, "--out", out, check=True)
            digests.add(_digest(out))
        if len(digests) != 1:
            mismatched.append(name)
    verdict(10, "determinism across repeats and --workers", not mismatched, f"commands checked={len(commands)}, mismatched={mismatched}")
