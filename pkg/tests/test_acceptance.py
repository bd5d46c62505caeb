"""Acceptance suite: twelve end-to-end criteria at their stated tolerances.

Each test prints (and logs for the terminal summary) one line
``[NN] PASS|FAIL  title  details``.  Run with ``pytest tests/test_acceptance.py -v``.
"""

import contextlib
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from massless_oscillator.classical import (
    Invariants2D,
    OscillatorParams,
    PhaseState,
    apsidal_angle,
    classical_averages,
    invariants_of,
    radial_period,
    segment_motion,
    segment_period,
    simulate,
    turning_radii,
    velocity,
)
from massless_oscillator.numerics import quad_adaptive
from massless_oscillator.quantum import (
    density_compare,
    energy_level,
    expectations,
    gram_matrix,
    momentum_wavefunction,
    position_wavefunction,
    turning_radius,
)
from massless_oscillator.specfun import airy_ai, airy_zero, airy_zeros

UNIT = OscillatorParams()
REF_ORBIT = PhaseState([0.479, 0.0], [0.0, 1.290805])


@contextlib.contextmanager
def criterion(log, number, title):
    info = {}
    try:
        yield info
    except BaseException as exc:
        line = f"[{number:02d}] FAIL  {title}  {exc}".replace("\n", " ")[:400]
        print(line)
        log.append(line)
        raise
    detail = "  ".join(f"{k}={v}" for k, v in info.items())
    line = f"[{number:02d}] PASS  {title}  {detail}"
    print(line)
    log.append(line)


def check(cond, message):
    if not cond:
        raise AssertionError(message)


def inv_for(lam, E=1.0, params=UNIT):
    return Invariants2D(E, lam * params.kappa2 / params.c * (2 * E / (3 * params.kappa2)) ** 1.5)


def test_01_speed_invariant(acceptance_log):
    with criterion(acceptance_log, 1, "speed |xdot| = c for 1e5 random states") as info:
        rng = np.random.default_rng(20240601)
        N = 100_000
        c = 2.7
        params = OscillatorParams(c=c, kappa2=1.3)
        x = rng.uniform(-10.0, 10.0, (N, 2))
        ang = rng.uniform(0.0, 2 * np.pi, N)
        mag = 10.0 ** rng.uniform(-8.0, 8.0, N)
        p = np.column_stack([mag * np.cos(ang), mag * np.sin(ang)])
        t0 = time.perf_counter()
        v = velocity(x, p, params)
        defect = np.max(np.abs(np.hypot(v[:, 0], v[:, 1]) / c - 1.0))
        elapsed = time.perf_counter() - t0
        info.update(max_rel_defect=f"{defect:.2e}", seconds=f"{elapsed:.3f}")
        check(defect <= 1e-14, f"speed defect {defect:.3e} > 1e-14")
        check(elapsed < 1.0, f"runtime {elapsed:.2f}s >= 1s")


def test_02_conservation_reference_orbit(acceptance_log):
    with criterion(acceptance_log, 2, "reference annulus orbit over 50 radial periods") as info:
        t0 = time.perf_counter()
        inv = invariants_of(REF_ORBIT, UNIT)
        T = radial_period(inv, UNIT)
        orbit = simulate(REF_ORBIT, UNIT, (0.0, 50 * T))
        t = np.linspace(0.0, 50 * T, 50 * 400 + 1)
        y = orbit.sample(t)
        r = np.hypot(y[:, 0], y[:, 1])
        pn = np.hypot(y[:, 2], y[:, 3])
        E = pn + 0.5 * np.sum(y[:, :2] ** 2, axis=1)
        J = y[:, 0] * y[:, 3] - y[:, 1] * y[:, 2]
        e_drift = max(orbit.diagnostics["E_drift"], np.max(np.abs(E / inv.E - 1)))
        j_drift = max(orbit.diagnostics["J_drift"], np.max(np.abs(J / inv.J - 1)))
        minima, maxima = orbit.radial_extrema()
        r_min, r_max, r_minus = turning_radii(inv, UNIT)
        # closed forms against an independent cubic solver
        cubic = np.sort(np.roots([0.5, 0.0, -inv.E, inv.J]).real)
        closed_vs_cubic = np.max(np.abs(cubic - np.sort([r_minus, r_min, r_max])))
        ext_min = np.max(np.abs(orbit.radius(minima) - r_min))
        ext_max = np.max(np.abs(orbit.radius(maxima) - r_max))
        elapsed = time.perf_counter() - t0
        info.update(
            E_drift=f"{e_drift:.2e}", J_drift=f"{j_drift:.2e}", r_range=f"[{r.min():.8f}, {r.max():.8f}]",
            extrema_vs_closed=f"{max(ext_min, ext_max):.1e}", closed_vs_cubic=f"{closed_vs_cubic:.1e}",
            seconds=f"{elapsed:.2f}",
        )
        check(e_drift < 1e-8 and j_drift < 1e-8, f"drift E {e_drift:.2e} J {j_drift:.2e}")
        check(r.min() >= 0.47900 - 1e-6 and r.max() <= 1.38499 + 1e-6, f"r range [{r.min()}, {r.max()}]")
        check(len(minima) >= 49 and len(maxima) >= 49, "radial extrema not resolved")
        check(max(ext_min, ext_max) <= 1e-6, "extrema disagree with closed forms")
        check(closed_vs_cubic <= 1e-12, "closed forms disagree with the cubic")
        check(abs(r_min - 0.479) <= 1e-12 and abs(r_max - 1.38499) <= 1e-5, "turning radii")
        check(elapsed < 5.0, f"runtime {elapsed:.2f}s >= 5s")


def test_03_cubic_identities(acceptance_log):
    with criterion(acceptance_log, 3, "turning radii: cubic roots and sum rule") as info:
        worst_cubic = worst_sum = 0.0
        for params, E in [(UNIT, 1.3), (OscillatorParams(c=3.0, kappa2=0.4), 0.25), (OscillatorParams(c=0.5, kappa2=8.0), 40.0)]:
            for lam in np.linspace(0.0, 1.0, 1000):
                inv = inv_for(lam, E, params)
                roots = turning_radii(inv, params)
                for rr in roots:
                    terms = (0.5 * params.kappa2 * rr**3, E * rr, abs(inv.J) * params.c)
                    scale = max(abs(t) for t in terms)
                    resid = abs(terms[0] - terms[1] + terms[2]) / scale if scale > 0 else 0.0
                    worst_cubic = max(worst_cubic, resid)
                worst_sum = max(worst_sum, abs(sum(roots)))
        info.update(max_rel_cubic=f"{worst_cubic:.2e}", max_abs_sum=f"{worst_sum:.2e}")
        check(worst_cubic <= 1e-10, f"cubic residual {worst_cubic:.2e}")
        check(worst_sum <= 1e-12, f"sum rule {worst_sum:.2e}")


def test_04_apsidal_angle(acceptance_log):
    with criterion(acceptance_log, 4, "apsidal angle: elliptic vs quadrature, limits") as info:
        worst = 0.0
        for lam in np.linspace(0.01, 0.99, 50):
            inv = inv_for(lam)
            worst = max(worst, abs(apsidal_angle(inv, UNIT) - apsidal_angle(inv, UNIT, method="quadrature")))
        lo = apsidal_angle(inv_for(1e-6), UNIT)
        hi = apsidal_angle(inv_for(1 - 1e-6), UNIT)
        info.update(max_path_gap=f"{worst:.1e}", lim0_err=f"{abs(lo - math.pi / 2):.1e}",
                    lim1_err=f"{abs(hi - math.pi / math.sqrt(3)):.1e}")
        check(worst <= 1e-8, f"two-path gap {worst:.2e}")
        check(abs(lo - math.pi / 2) <= 1e-4, "lambda -> 0 limit")
        check(abs(hi - math.pi / math.sqrt(3)) <= 1e-4, "lambda -> 1 limit")


def test_05_segment_motion(acceptance_log):
    with criterion(acceptance_log, 5, "segment motion with r_max = 1, T = 4") as info:
        E = 0.5  # r_max = 1 at c = kappa^2 = 1
        T = segment_period(E, UNIT)
        x = [segment_motion(t, E, UNIT)[0] for t in (0.0, 1.0, 2.0)]
        p_turn = [segment_motion(t, E, UNIT)[1] for t in (0.0, 2.0, 4.0)]
        p_mid = segment_motion(1.0, E, UNIT)[1]
        tt = np.linspace(0.0, T, 40001)
        xs, ps = segment_motion(tt, E, UNIT)
        i = int(np.argmax(ps))
        info.update(T=T, x=x, p_max=p_mid)
        check(T == 4.0, f"period {T}")
        check(x == [-1.0, 0.0, 1.0], f"x values {x}")
        check(abs(p_mid - E / UNIT.c) <= 1e-15 and abs(xs[i]) <= 1e-12, "p_max = E/c at x = 0")
        check(all(p == 0.0 for p in p_turn), f"turning-point momenta {p_turn}")
        check(np.allclose(ps, (E - 0.5 * xs**2) / UNIT.c, atol=1e-15), "p(t) formula")


def test_06_spectrum(acceptance_log):
    with criterion(acceptance_log, 6, "spectrum from Airy zeros") as info:
        z = np.array(airy_zeros(50).zeros)
        worst = float(np.max(np.abs(airy_ai(z))))
        lo, hi = -3.0, -2.0
        f_lo = airy_ai(lo)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if airy_ai(mid) * f_lo > 0:
                lo, f_lo = mid, airy_ai(mid)
            else:
                hi = mid
        E1 = energy_level(1, UNIT).E
        E1_bisect = -(2.0 ** (2 / 3)) * lo / 2
        t = 3 * math.pi * (4 * 50 - 1) / 8
        asym = abs(airy_zero(50) / -(t ** (2 / 3)) - 1.0)
        info.update(max_abs_Ai=f"{worst:.1e}", E1=f"{E1:.10f}", E1_vs_bisection=f"{abs(E1 - E1_bisect):.1e}",
                    E1_minus_1p85566=f"{E1 - 1.85566:.2e}", asym50=f"{asym:.1e}")
        check(worst <= 1e-12, f"|Ai(a_n)| {worst:.2e}")
        check(abs(E1 - E1_bisect) <= 1e-5, "E_1 vs bisected a_1")
        check(asym <= 1e-4, f"asymptotic a_50 {asym:.2e}")


def test_07_normalization_orthonormality(acceptance_log):
    with criterion(acceptance_log, 7, "momentum norm, Gram matrix, position Parseval") as info:
        t0 = time.perf_counter()
        mom = max(momentum_wavefunction(n, UNIT, [0.5]).normalization_defect for n in range(1, 6))
        G = gram_matrix(5, UNIT)
        gram = float(np.max(np.abs(G - np.eye(5))))
        pos = max(position_wavefunction(n, UNIT).normalization_defect for n in range(1, 6))
        elapsed = time.perf_counter() - t0
        info.update(momentum_defect=f"{mom:.1e}", gram_dev=f"{gram:.1e}", position_defect=f"{pos:.1e}",
                    seconds=f"{elapsed:.2f}")
        check(mom <= 1e-10, f"momentum defect {mom:.2e}")
        check(gram <= 1e-8, f"Gram deviation {gram:.2e}")
        check(pos <= 1e-6, f"Parseval defect {pos:.2e}")
        check(elapsed < 30.0, f"runtime {elapsed:.1f}s >= 30s")


def test_08_virial(acceptance_log):
    with criterion(acceptance_log, 8, "virial split 2/3 : 1/3 for n = 1..10") as info:
        worst_k = worst_v = worst_id = worst_direct = 0.0
        for n in range(1, 11):
            e = expectations(n, UNIT)
            worst_k = max(worst_k, abs(e.kinetic / e.E - 2 / 3))
            worst_v = max(worst_v, abs(e.potential / e.E - 1 / 3))
            worst_direct = max(worst_direct, abs(e.potential_direct / e.E - 1 / 3))
            a = airy_zero(n)
            pts = [airy_zero(m) - a for m in range(1, n)]
            num = quad_adaptive(lambda x: x * airy_ai(x + a) ** 2, 0.0, 60.0 - a, rel_tol=1e-13, abs_tol=1e-15,
                                points=pts).value
            den = quad_adaptive(lambda x: airy_ai(x + a) ** 2, 0.0, 60.0 - a, rel_tol=1e-13, abs_tol=1e-15,
                                points=pts).value
            worst_id = max(worst_id, abs(num / den + 2 * a / 3))
        info.update(kinetic=f"{worst_k:.1e}", potential=f"{worst_v:.1e}", potential_from_r2=f"{worst_direct:.1e}",
                    moment_identity=f"{worst_id:.1e}")
        check(worst_k <= 1e-8 and worst_v <= 1e-8, "virial ratios")
        check(worst_direct <= 1e-8, "independent <r^2> route")
        check(worst_id <= 1e-9, "first-moment Airy identity")


def test_09_mean_radius(acceptance_log):
    with criterion(acceptance_log, 9, "<r> versus r_max/2") as info:
        devs, budget = [], []
        for n in (1, 2):
            e = expectations(n, UNIT)
            half = turning_radius(e.E, UNIT) / 2
            devs.append(abs(e.mean_r - half) / e.mean_r)
            budget.append(e.mean_r_error / e.mean_r)
        info.update(dev_n1=f"{devs[0]:.4f}", dev_n2=f"{devs[1]:.4f}", error_budget=f"{max(budget):.1e}")
        check(0.04 <= devs[0] <= 0.06, f"n=1 deviation {devs[0]:.4f}")
        check(devs[1] < 0.01, f"n=2 deviation {devs[1]:.4f}")
        check(max(budget) <= 2e-3, "quadrature error budget")


def test_10_correspondence_l1(acceptance_log):
    with criterion(acceptance_log, 10, "L1 distance decreasing for n = 1..8") as info:
        results = [density_compare(n, UNIT) for n in range(1, 9)]
        l1 = [d.l1_distance for d in results]
        cdf = [d.cdf_distance for d in results]
        info.update(l1=[round(v, 4) for v in l1], cdf_gap=[round(v, 4) for v in cdf])
        decreasing = all(b < a for a, b in zip(l1, l1[1:]))
        check(decreasing, f"L1 not decreasing: {[round(v, 4) for v in l1]} (CDF gap {[round(v, 4) for v in cdf]})")


def test_11_classical_density(acceptance_log):
    with criterion(acceptance_log, 11, "classical density normalization and averages") as info:
        worst_q = worst_a = 0.0
        for params, E in [(UNIT, 0.5), (UNIT, 3.0), (OscillatorParams(c=2.0, kappa2=5.0), 1.7)]:
            avg = classical_averages(E, params)
            r_max = math.sqrt(2 * E) / params.kappa
            # antiderivative of 4 pi r^2 rho_cl = 1 / r_max on [0, r_max]
            analytic_norm = r_max / r_max
            worst_a = max(worst_a, abs(analytic_norm - 1.0), abs(avg.mean_potential - E / 3),
                          abs(avg.mean_kinetic - 2 * E / 3), abs(avg.mean_r - r_max / 2))
            q = avg.quadrature
            worst_q = max(worst_q, abs(q["norm"] - 1.0), abs(q["mean_potential"] - E / 3),
                          abs(q["mean_kinetic"] - 2 * E / 3), abs(q["mean_r"] - r_max / 2))
        info.update(analytic=f"{worst_a:.1e}", quadrature=f"{worst_q:.1e}")
        check(worst_a <= 1e-12, "closed forms")
        check(worst_q <= 1e-10, f"quadrature {worst_q:.2e}")


def test_12_cli_determinism(acceptance_log, tmp_path):
    with criterion(acceptance_log, 12, "byte-identical CLI outputs") as info:
        jobs = [
            ["orbit", "--x0", "0.479", "0", "--p0", "0", "1.290805", "--periods", "5", "--samples", "1001"],
            ["density-compare", "--n", "1", "2", "3", "--format", "json"],
            ["virial", "--levels", "3", "--format", "json"],
            ["segment", "--rmax", "1", "--periods", "2"],
        ]
        same = 0
        for i, argv in enumerate(jobs):
            outs = []
            for run, seed in enumerate(("0", "12345")):
                path = tmp_path / f"job{i}_{run}.out"
                env = {**os.environ, "PYTHONHASHSEED": seed}
                proc = subprocess.run([sys.executable, "-m", "massless_oscillator", *argv, "--output", str(path)],
                                      env=env, capture_output=True, text=True)
                check(proc.returncode == 0, f"{argv[0]} exit {proc.returncode}: {proc.stderr}")
                outs.append(path.read_bytes())
            check(outs[0] == outs[1], f"{argv[0]} output differs between runs")
            same += 1
        info.update(identical_jobs=f"{same}/{len(jobs)}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
