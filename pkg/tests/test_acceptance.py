"""Acceptance criteria, one test each.

Run with ``pytest tests/test_acceptance.py -s`` to see one PASS/FAIL line
per criterion.
"""
import math

import numpy as np
import pytest

from symmetro import (
    BlochDirection,
    DistanceFunction,
    Pom,
    blend_family,
    build_moments,
    check_prior_invariance,
    closed_forms,
    dilog,
    estimate,
    evaluate_pom_error,
    figure1_sweep,
    haldane_prior,
    make_fmap,
    mobius,
    run_protocol,
    solve_optimal,
)
from symmetro.blend import KET0, optimal_eigenstates, tau
from symmetro.personick import pom_moments

from conftest import random_unitary

PI = math.pi
GRID = [(a, b, al) for a in (0.01, 0.1, 0.3) for b in (PI / 4, PI / 2, PI) for al in (0.0, PI / 3)]
WEIGHT = make_fmap("weight")


def report(n, title, ok, detail):
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n}: {title} ({detail})")
    assert ok, f"criterion {n} failed: {detail}"


@pytest.fixture(scope="module")
def grid_solutions():
    out = {}
    for a, beta, alpha in GRID:
        d = BlochDirection(alpha, beta)
        sol = solve_optimal(build_moments(blend_family(d), haldane_prior(a), WEIGHT), WEIGHT)
        out[a, beta, alpha] = (d, closed_forms(a, d), sol)
    return out


def test_criterion_01_closed_form_operator(grid_solutions):
    worst = max(np.linalg.norm(sol.S - 2 * cf.chi * (KET0 - tau(d)), 2)
                for d, cf, sol in grid_solutions.values())
    report(1, "S matches 2 chi (|0><0| - tau) on the 18-cell grid", worst <= 1e-8,
           f"max spectral-norm error {worst:.2e}")


def test_criterion_02_spectrum(grid_solutions):
    val_err, overlap = 0.0, 1.0
    for d, cf, sol in grid_solutions.values():
        val_err = max(val_err, np.max(np.abs(sol.eigenvalues - np.array([cf.s_minus, cf.s_plus]))))
        _, vecs = np.linalg.eigh(sol.S)
        plus, minus = optimal_eigenstates(d)
        overlap = min(overlap, abs(np.vdot(vecs[:, 1], plus)), abs(np.vdot(vecs[:, 0], minus)))
    ok = val_err <= 1e-8 and overlap >= 1 - 1e-8
    report(2, "eigenvalues +-2 chi sin(beta/2) and closed-form eigenvectors", ok,
           f"max eigenvalue error {val_err:.2e}, min overlap 1 - {1 - overlap:.2e}")


def test_criterion_03_min_error(grid_solutions):
    worst = max(abs(sol.min_error - cf.min_error) for _, cf, sol in grid_solutions.values())
    report(3, "min_error = kappa^2/12 - 4 chi^2 sin^2(beta/2)", worst <= 1e-8, f"max error {worst:.2e}")


def test_criterion_04_three_quarter_limit():
    d = BlochDirection(0.0, PI)
    a = 1e-6
    numeric = solve_optimal(build_moments(blend_family(d), haldane_prior(a), WEIGHT), WEIGHT).gain_ratio
    closed = closed_forms(a, d).gain_ratio
    per_beta = []
    for b in (0.3, PI / 4, PI / 2, 2.0):
        db = BlochDirection(0.0, b)
        sol = solve_optimal(build_moments(blend_family(db), haldane_prior(a), WEIGHT), WEIGHT)
        per_beta.append(sol.gain_ratio / math.sin(b / 2) ** 2)
    per_beta.append(numeric)
    spread = (max(per_beta) - min(per_beta)) / max(per_beta)
    in_band = 0.7425 <= numeric <= 0.75
    report(4, "gain_ratio at a=1e-6, beta=pi in [0.7425, 0.75]; ratio/sin^2 beta-independent",
           in_band and spread <= 1e-9,
           f"gain_ratio {numeric:.9f} (closed form {closed:.9f}), beta spread {spread:.1e}")


def test_criterion_05_local_regime():
    ratios = []
    for beta in (PI / 2, PI):
        cf = closed_forms(0.49, BlochDirection(0.0, beta))
        d = BlochDirection(0.0, beta)
        sol = solve_optimal(build_moments(blend_family(d), haldane_prior(0.49), WEIGHT), WEIGHT)
        ratios.append(sol.gain_ratio / (math.sin(beta / 2) ** 2 * (2 * 0.49 - 1) ** 2 / 3))
        assert abs(sol.gain_ratio - cf.gain_ratio) <= 1e-8
    ok = all(0.9 <= r <= 1.1 for r in ratios)
    report(5, "gain_ratio / [sin^2(beta/2)(2a-1)^2/3] in [0.9, 1.1] at a=0.49", ok,
           ", ".join(f"{r:.6f}" for r in ratios))


def test_criterion_06_figure1():
    eta0 = list(np.linspace(0.01, 0.99, 99))
    rows = figure1_sweep(0.01, PI / 2, [0.0, PI / 4, PI / 2], eta0)
    pick = lambda al, e: next(r for r in rows if abs(r.alpha - al) < 1e-12 and abs(r.eta0 - e) < 1e-12)
    r1, r2, r3 = pick(0.0, eta0[49]), pick(PI / 2, eta0[49]), pick(PI / 4, 0.01)
    c1 = abs(r1.mhe - r1.min_error) <= 1e-6
    c2 = abs(r2.mhe - r2.prior_error) <= 1e-6
    c3 = abs(r3.mhe - r3.prior_error) <= 0.05 * r3.prior_error
    c4 = all(r.min_error - 1e-9 <= r.mhe <= r.prior_error + 1e-9 for r in rows)
    report(6, "local SLD measurements: saturation, no-gain points and sandwich", c1 and c2 and c3 and c4,
           f"(i) {r1.mhe - r1.min_error:.1e} (ii) {r2.mhe - r2.prior_error:.1e} "
           f"(iii) {abs(r3.mhe - r3.prior_error) / r3.prior_error:.1e} rel (iv) {c4}")


def test_criterion_07_properties():
    rng = np.random.default_rng(7)
    failures = []

    # Jensen positivity on random general POMs
    for _ in range(50):
        n = int(rng.integers(1, 5))
        g = rng.normal(size=(n, 3, 3)) + 1j * rng.normal(size=(n, 3, 3))
        gs = [x @ x.conj().T for x in g]
        lam, v = np.linalg.eigh(sum(gs))
        t = v @ np.diag(lam ** -0.5) @ v.conj().T
        pom = Pom(tuple(t @ x @ t for x in gs))
        a1, a2 = pom_moments(pom, rng.normal(size=n))
        if np.linalg.eigvalsh(a2 - a1 @ a1)[0] < -1e-9:
            failures.append("jensen")

    # optimal POM structure
    sol = solve_optimal(build_moments(blend_family(BlochDirection(0.4, 1.2)), haldane_prior(0.05), WEIGHT), WEIGHT)
    ps = sol.pom.projectors
    if np.linalg.norm(sum(ps) - np.eye(2)) > 1e-9:
        failures.append("completeness")
    if any(np.linalg.norm(p @ p - p) > 1e-9 for p in ps) or np.linalg.norm(ps[0] @ ps[1]) > 1e-9:
        failures.append("projectors")

    # Haldane functional equation
    prior = haldane_prior(0.01)
    if check_prior_invariance(lambda t: 1 / (t * (1 - t)), 2.0, 200) > 1e-10:
        failures.append("haldane")

    # distance symmetry, Mobius invariance, vanishing at equality
    dist = DistanceFunction(WEIGHT, 2)
    x, y = rng.uniform(0.01, 0.99, (2, 100))
    gamma = rng.uniform(0.1, 10, 100)
    if np.max(np.abs(dist(x, y) - dist(y, x))) > 1e-12:
        failures.append("symmetry")
    inv = np.array([dist(mobius(a, g), mobius(b, g)) for a, b, g in zip(x, y, gamma)])
    if np.max(np.abs(inv - dist(x, y)) / np.maximum(1, dist(x, y))) > 1e-9:
        failures.append("mobius")
    if np.max(dist(x, x)) != 0:
        failures.append("equality")

    # offset covariance and the trace identity
    fam = blend_family(BlochDirection(0.0, PI / 2))
    m = build_moments(fam, prior, WEIGHT)
    base = solve_optimal(m, WEIGHT)
    for c in (-2.0, 3.5):
        sh = WEIGHT.shifted(c)
        s2 = solve_optimal(build_moments(fam, prior, sh), sh)
        if abs(s2.gain - base.gain) > 1e-9 or np.max(np.abs(s2.estimates - base.estimates)) > 1e-9:
            failures.append("offset")
    if abs(np.trace(m.rho0 @ base.S) - np.trace(m.rho1)) > 1e-12:
        failures.append("trace")

    report(7, "property suite", not failures, "all properties hold" if not failures else ", ".join(failures))


def test_criterion_08_sandwich():
    fam = blend_family(BlochDirection(0.0, PI / 2))
    m = build_moments(fam, haldane_prior(0.01), WEIGHT)
    sol = solve_optimal(m, WEIGHT)
    rng = np.random.default_rng(8)
    errs = [evaluate_pom_error(m, Pom.from_basis(random_unitary(rng, 2))) for _ in range(50)]
    margin = min(errs) - sol.min_error
    report(8, "50 random projective POMs never beat min_error", margin >= -1e-9, f"smallest excess {margin:.3e}")


def test_criterion_09_simulation():
    fam = blend_family(BlochDirection(0.0, PI / 2))
    prior = haldane_prior(0.01)
    res = run_protocol(fam, prior, WEIGHT, mu=500, theta_true=0.3, seed=42)
    g = res.posterior
    literal = (1 + math.tanh(np.sum(g.weights * np.arctanh(2 * g.theta_nodes - 1)))) / 2
    gap = abs(literal - estimate(g, WEIGHT))
    ok = abs(res.estimate - 0.3) <= 0.05 and gap <= 1e-10
    report(9, "500-shot estimate within 0.05 of 0.3; tanh/artanh form agrees", ok,
           f"estimate {res.estimate:.6f}, formula gap {gap:.1e}")


def test_criterion_10_dilog():
    special = [
        abs(dilog(0.0)),
        abs(dilog(1.0) - PI ** 2 / 6),
        abs(dilog(0.5) - (PI ** 2 / 12 - math.log(2) ** 2 / 2)),
    ]
    z = np.linspace(0, 1, 1001)
    refl = np.max(np.abs(_reflection_residual(z)))
    ok = max(special) <= 1e-12 and refl <= 1e-12
    report(10, "dilogarithm special values and reflection identity", ok,
           f"special-value error {max(special):.1e}, reflection residual {refl:.1e}")


def _reflection_residual(z):
    # Li2(z) + Li2(1-z) = pi^2/6 - ln z ln(1-z); the log product vanishes at the endpoints
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where((z > 0) & (z < 1), np.log(z) * np.log1p(-z), 0.0)
    return dilog(z) + dilog(1 - z) - (PI ** 2 / 6 - logs)
