"""Acceptance gate: every criterion runs at its stated tolerance.

Each test carries ``@pytest.mark.criterion(k, title)``; the terminal summary
prints one PASS/FAIL line per criterion.
"""

from __future__ import annotations

import io
import json
import math
import subprocess
import sys

import jsonschema
import numpy as np
import pytest
import sympy

from momenta import boundary_unitary as bu
from momenta import commuting_pairs as cp
from momenta import fractal_measure as fm
from momenta import momentum_operator as mo
from momenta import selfadjoint_extensions as sa
from momenta.cli import run
from momenta.io import schema_path
from momenta.phase_arith import UNIT_INTERVAL, IntervalConfig, unit_phase

from oracles import eigenvalue_multiset_distance, fd4_momentum_residual, random_samples

C1 = pytest.mark.criterion(1, "unitary-group laws")
C2 = pytest.mark.criterion(2, "period identity")
C3 = pytest.mark.criterion(3, "eigenvalue correspondence")
C4 = pytest.mark.criterion(4, "unitary-equivalence criterion")
C5 = pytest.mark.criterion(5, "resolvent cross-validation")
C6 = pytest.mark.criterion(6, "first resolvent identity")
C7 = pytest.mark.criterion(7, "Stone's formula")
C8 = pytest.mark.criterion(8, "projection algebra")
C9 = pytest.mark.criterion(9, "shift and ladder structure")
C10 = pytest.mark.criterion(10, "square commuting classification")
C11 = pytest.mark.criterion(11, "strip classification")
C12 = pytest.mark.criterion(12, "Cantor-4 spectral pair")
C13 = pytest.mark.criterion(13, "deficiency vectors, Cayley maps, domain check")
C14 = pytest.mark.criterion(14, "CLI determinism and schemas")


def constructors(N: int) -> dict[str, bu.BoundaryUnitary]:
    phases = np.linspace(0.05, 0.95, 2 * N + 1)
    return {
        "identity": bu.make_identity(N),
        "rotation": bu.make_rotation(1 / 3, N),
        # degree-1 twist needs N >= 1
        "twisted": bu.make_twisted_rotation([0.05, 0.0, 0.05], 0.5, N) if N else bu.make_scalar(0.3, 0),
        "diagonal": bu.make_diagonal(phases, N),
        "reflection": bu.make_reflection(N),
        "scalar": bu.make_scalar(0.3, N),
        "random": bu.random_unitary(N, seed=7 + N),
    }


ALL_KINDS = ["identity", "rotation", "twisted", "diagonal", "reflection", "scalar", "random"]


# --- 1 ---------------------------------------------------------------------


@C1
@pytest.mark.parametrize("N", [0, 2, 4])
@pytest.mark.parametrize("kind", ALL_KINDS)
def test_unitarity_and_group_law(N, kind):
    V = constructors(N)[kind]
    rng = np.random.default_rng(100 + N)
    f = mo.GridFunction(UNIT_INTERVAL, random_samples(rng, 128, V.dimension))
    h = f.step
    for ka, kb in [(1, 1), (5, 37), (128, 3), (-50, 211), (300, -7)]:
        a, b = ka * h, kb * h
        fa = mo.evolve(a, V, f)
        assert abs(fa.norm() - f.norm()) <= 1e-12
        composed = mo.evolve(a, V, mo.evolve(b, V, f))
        direct = mo.evolve((ka + kb) * h, V, f)
        assert np.max(np.abs(composed.values - direct.values)) <= 1e-12


# --- 2 ---------------------------------------------------------------------


@C2
@pytest.mark.parametrize("interval", [UNIT_INTERVAL, IntervalConfig(1.0, 3.0), IntervalConfig(-0.5, 0.25)])
@pytest.mark.parametrize("kind", ALL_KINDS)
def test_period_identity(kind, interval):
    V = constructors(3)[kind]
    rng = np.random.default_rng(5)
    f = mo.GridFunction(interval, random_samples(rng, 64, V.dimension))
    out = mo.evolve(interval.length, V, f)
    assert np.max(np.abs(out.values - f.values @ V.matrix.T)) <= 1e-12


# --- 3 ---------------------------------------------------------------------


ROTATIONS = [0.0, 0.5, 1 / 3, math.sqrt(2) - 1]


@C3
@pytest.mark.parametrize("r", ROTATIONS)
@pytest.mark.parametrize("interval", [UNIT_INTERVAL, IntervalConfig(0.0, 2.0)])
def test_one_band_spectrum_maps_onto_eigenvalues(r, interval):
    V = bu.make_rotation(r, 3)
    spec = mo.spectrum(bu.eigendecompose(V), interval, 0, 0)
    mapped = np.concatenate([[unit_phase(interval.length * v)] * k for v, k in spec.points()])
    assert eigenvalue_multiset_distance(mapped, np.linalg.eigvals(V.matrix)) <= 1e-10


@C3
@pytest.mark.parametrize("r", ROTATIONS)
def test_eigenfunction_residuals(r):
    V = bu.make_rotation(r, 2)
    model = bu.eigendecompose(V)
    G = 256
    for j, lam in enumerate(model.phases):
        h = model.vectors[:, j]
        for m in (-1, 0, 1):
            f = mo.eigenfunction(lam + m, h, UNIT_INTERVAL, G, V)
            assert mo.momentum_residual(f, lam + m, model) <= 1e-6
        # independent finite-difference oracle on the band-0 eigenfunction
        f0 = mo.eigenfunction(lam, h, UNIT_INTERVAL, G, V)
        assert fd4_momentum_residual(f0.values, f0.step, lam) <= 1e-6


# --- 4 ---------------------------------------------------------------------


@C4
@pytest.mark.parametrize("N", [2, 4, 8])
def test_reflection_equivalent_to_half_translation(N):
    assert bu.are_unitarily_equivalent(bu.make_reflection(N), bu.make_rotation(0.5, N))


@C4
@pytest.mark.parametrize("N", [2, 4, 8])
def test_third_and_half_rotation_inequivalent(N):
    assert not bu.are_unitarily_equivalent(bu.make_rotation(1 / 3, N), bu.make_rotation(0.5, N))


# --- 5 ---------------------------------------------------------------------


@C5
@pytest.mark.parametrize("N", [0, 1, 4, 8])
@pytest.mark.parametrize("z", [1j, 0.5 + 0.1j, -1 + 0.25j])
def test_greens_matches_spectral_resolvent(N, z):
    V = bu.random_unitary(N, seed=11 + N)
    model = bu.eigendecompose(V)
    f = mo.band_limited_function(model, UNIT_INTERVAL, 512, 8, seed=N)
    g = mo.resolvent_greens(z, V, f)
    s = mo.resolvent_spectral(z, model, f, m_bound=64)
    assert (g - s).norm() / s.norm() <= 1e-7


@C5
def test_branch_jump_symbolic():
    rng = np.random.default_rng(2024)
    z_sym = sympy.Symbol("z")
    L = sympy.Integer(1)
    for trial in range(20):
        d = 3 if trial % 2 else 1
        # exact unitary: Cayley transform of a rational skew-Hermitian matrix
        re = rng.integers(-3, 4, size=(d, d))
        im = rng.integers(-3, 4, size=(d, d))
        B = sympy.Matrix(d, d, lambda i, k: sympy.Rational(int(re[i, k]), 4) + sympy.I * sympy.Rational(int(im[i, k]), 4))
        A = (B - B.H) / 2
        eye = sympy.eye(d)
        Vs = (eye - A) * (eye + A).inv()
        assert (Vs.H * Vs - eye).applyfunc(sympy.expand) == sympy.zeros(d, d)
        M = (eye - sympy.exp(-2 * sympy.pi * sympy.I * L * z_sym) * Vs).inv()
        c1 = 2 * sympy.pi * sympy.I * M
        c2 = 2 * sympy.pi * sympy.I * (M - eye)
        assert (c2 - c1 + 2 * sympy.pi * sympy.I * eye).applyfunc(sympy.expand) == sympy.zeros(d, d)

        # the library's numeric branches agree with the symbolic ones
        z = complex(rng.normal(), rng.uniform(0.1, 1.0) * rng.choice([-1, 1]))
        V = bu.BoundaryUnitary.from_matrix(np.array(Vs.evalf(), dtype=complex))
        n1, n2 = mo.greens_branch_coefficients(z, V, UNIT_INTERVAL)
        c1_num = np.array(c1.subs(z_sym, z).evalf(), dtype=complex)
        assert np.allclose(n1, c1_num, rtol=1e-10, atol=1e-12)
        assert np.max(np.abs(n2 - n1 + 2j * np.pi * np.eye(d))) <= 1e-12


# --- 6 ---------------------------------------------------------------------


@C6
@pytest.mark.parametrize("z, w", [(1j, -1j), (0.5 + 0.1j, -1 + 0.25j), (0.3 - 0.4j, 2 + 1j)])
def test_first_resolvent_identity(z, w):
    V = bu.random_unitary(2, seed=3)
    f = mo.band_limited_function(bu.eigendecompose(V), UNIT_INTERVAL, 256, 6, seed=4)
    lhs = mo.resolvent_greens(z, V, f) - mo.resolvent_greens(w, V, f)
    rhs = (w - z) * mo.resolvent_greens(z, V, mo.resolvent_greens(w, V, f))
    assert (lhs - rhs).norm() / f.norm() <= 1e-7


# --- 7 ---------------------------------------------------------------------


@C7
def test_stone_converges_to_projection():
    V = bu.make_diagonal([0.25, 0.7, 0.25], 1)
    model = bu.eigendecompose(V)
    f = mo.band_limited_function(model, UNIT_INTERVAL, 128, 4, seed=5)
    exact = mo.spectral_projection(-0.5, 0.5, model, UNIT_INTERVAL).apply(f)
    errors = []
    for b in (1e-1, 1e-2, 1e-3):
        approx, info = mo.stone_projection(-0.5, 0.5, V, b, f, full_output=True)
        assert info["converged"]
        errors.append((approx - exact).norm() / f.norm())
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] <= 0.05


# --- 8 ---------------------------------------------------------------------


@C8
@pytest.mark.parametrize("kind", ALL_KINDS)
def test_projection_algebra(kind):
    V = constructors(2)[kind]
    model = bu.eigendecompose(V)
    rng = np.random.default_rng(8)
    f = mo.GridFunction(UNIT_INTERVAL, random_samples(rng, 64, V.dimension))
    g = mo.GridFunction(UNIT_INTERVAL, random_samples(rng, 64, V.dimension))
    P = mo.spectral_projection(-1.01, 1.49, model, UNIT_INTERVAL)
    Q = mo.spectral_projection(1.49 + 1e-3, 3.37, model, UNIT_INTERVAL)
    Pf = P.apply(f)
    assert (P.apply(Pf) - Pf).norm() <= 1e-10
    assert abs(Pf.inner(g) - f.inner(P.apply(g))) <= 1e-10
    assert abs(Pf.inner(Q.apply(g))) <= 1e-10
    assert Q.apply(Pf).norm() <= 1e-10


# --- 9 ---------------------------------------------------------------------


@C9
@pytest.mark.parametrize("kind", ALL_KINDS)
def test_bands_are_shifts_of_band_zero(kind):
    V = constructors(3)[kind]
    spec = mo.spectrum(bu.eigendecompose(V), UNIT_INTERVAL, -4, 4)
    bands = mo.band_partition(spec)
    assert [b.index for b in bands] == list(range(-4, 5))
    ref = next(b for b in bands if b.index == 0)
    for band in bands:
        assert np.max(np.abs(band.shifted() - ref.shifted())) <= 1e-10
        assert np.array_equal(band.multiplicities, ref.multiplicities)
    assert mo.bands_shift_consistent(bands, 1e-10)


# --- 10 --------------------------------------------------------------------


@C10
@pytest.mark.parametrize("seed", range(5))
def test_scalar_diagonal_pairs_read_back(seed):
    rng = np.random.default_rng(seed)
    N = 3
    alpha = float(rng.random())
    betas = rng.random(2 * N + 1)
    spec = cp.check_commuting_square(bu.make_scalar(alpha, N), bu.make_diagonal(betas, N))
    assert spec is not None and spec.case_tag is cp.CaseTag.U_SCALAR
    assert spec.alpha == pytest.approx(alpha, abs=1e-15)
    assert np.max(np.abs(spec.betas - betas)) <= 1e-15
    mirrored = cp.check_commuting_square(bu.make_diagonal(betas, N), bu.make_scalar(alpha, N))
    assert mirrored.case_tag is cp.CaseTag.V_SCALAR
    assert mirrored.alpha == pytest.approx(alpha, abs=1e-15)


@C10
@pytest.mark.parametrize("seed", range(10))
def test_non_scalar_pairs_rejected(seed):
    rng = np.random.default_rng(seed)
    N = 2
    pool = [
        bu.make_rotation(1 / 3, N),
        bu.make_rotation(0.5, N),
        bu.make_reflection(N),
        bu.make_diagonal(rng.random(2 * N + 1), N),
        bu.random_unitary(N, seed=seed),
    ]
    U, V = (pool[k] for k in rng.choice(len(pool), size=2))
    for W in (U, V):
        assert len(set(np.round(bu.eigendecompose(W).phases, 8))) >= 2
    assert cp.check_commuting_square(U, V) is None


@C10
def test_joint_spectrum_enumeration():
    spec = cp.geometric_spec(0.5, (0, 2))
    js = cp.joint_spectrum_square(spec, (0, 2), (0, 2))
    expected = {(0, 0), (0, 1), (0, 2), (1, 0.5), (1, 1.5), (1, 2.5), (2, 0), (2, 1), (2, 2)}
    assert js.point_set() == {(float(x), float(y)) for x, y in expected}
    mirrored = cp.CommutingPairSpec(cp.CaseTag.V_SCALAR, spec.alpha, spec.modes, spec.betas)
    assert cp.joint_spectrum_square(mirrored, (0, 2), (0, 2)).point_set() == js.transposed().point_set()


@C10
@pytest.mark.parametrize("r", [0.0, 0.5, 1 / 3])
@pytest.mark.parametrize("case", [cp.CaseTag.U_SCALAR, cp.CaseTag.V_SCALAR])
def test_geometric_joint_spectra_tile(r, case):
    window = (0.25, 3.75, 0.25, 3.75)
    m_range, n_range = cp.generation_ranges(window)
    if case is cp.CaseTag.V_SCALAR:
        m_range, n_range = n_range, m_range
    beta_range = n_range if case is cp.CaseTag.V_SCALAR else m_range
    spec = cp.geometric_spec(r, beta_range, case=case)
    assert cp.detect_geometric(spec) == pytest.approx(r, abs=1e-15)
    report = cp.tiling_check(cp.joint_spectrum_square(spec, m_range, n_range), window)
    assert report.is_tiling
    assert report.min_cover == report.max_cover == 1


# --- 11 --------------------------------------------------------------------


@C11
def test_strip_diagonal_multiplier_read_back():
    freqs = np.linspace(-2.0, 2.0, 41)
    gamma = np.mod(freqs**2, 1.0)
    out = cp.check_commuting_strip(np.diag(np.exp(2j * np.pi * gamma)), freqs)
    assert out is not None
    assert np.max(np.abs(np.exp(2j * np.pi * (out.values - gamma)) - 1)) <= 1e-12


@C11
def test_strip_frequency_shift_rejected():
    freqs = np.linspace(0.0, 4.0, 17)
    assert cp.check_commuting_strip(np.roll(np.eye(17), 1, axis=0), freqs) is None


@C11
def test_lambda_gamma_defining_property():
    freqs = np.arange(0.0, 9.0)
    gamma = cp.GammaFunction(freqs, np.mod(freqs / 2.0, 1.0))
    js = cp.joint_spectrum_strip(gamma, (-3, 3))
    lookup = dict(zip(gamma.freqs, gamma.values))
    for x, y in js.points:
        assert np.mod(x, 1.0) == lookup[y]
    assert {(0.0, 0.0), (0.5, 1.0), (0.0, 2.0)} <= js.point_set()


# --- 12 --------------------------------------------------------------------


@C12
def test_lambda_set_level_two():
    assert fm.lambda_set(2).values.tolist() == [0, 1, 4, 5]


@C12
@pytest.mark.parametrize("t", [1.0, 2.0, 5.0])
def test_product_formula_matches_midpoint_sum(t):
    assert abs(fm.cantor_fourier(t, 40) - fm.CantorLevel(12).midpoint_fourier(t)) <= 1e-6


@C12
@pytest.mark.parametrize("n", range(1, 7))
def test_gram_orthonormal(n):
    assert fm.gram_matrix(fm.lambda_set(n), 40).max_defect <= 1e-8


@C12
@pytest.mark.parametrize("seed", range(3))
def test_joint_gram_over_lambda_gamma(seed):
    lams = fm.lambda_set(3)
    gamma = np.random.default_rng(seed).random(len(lams))
    assert fm.joint_gram(gamma, lams, (0, 1), 40).max_defect <= 1e-8


# --- 13 --------------------------------------------------------------------


@C13
@pytest.mark.parametrize("sign", ["+", "-"])
@pytest.mark.parametrize("interval", [UNIT_INTERVAL, IntervalConfig(0.5, 1.25)])
def test_deficiency_vectors(sign, interval):
    h = np.zeros(5, dtype=complex)
    h[2] = 1.0
    dv = sa.deficiency_vector(sign, h, interval, 512)
    assert dv.residual <= 1e-6
    expected = 1j if sign == "+" else -1j
    assert fd4_momentum_residual(dv.samples.values, dv.samples.step, expected) <= 1e-6
    quad = 4 * math.pi * dv.norm_squared()
    closed = math.expm1(4 * math.pi * interval.length) * np.vdot(h, h).real
    assert abs(quad - closed) / closed <= 1e-8


@C13
def test_cayley_round_trips():
    for seed in range(100):
        N = seed % 9
        V = bu.random_unitary(N, seed=seed)
        for interval in (UNIT_INTERVAL, IntervalConfig(0.0, 0.3)):
            W = sa.cayley_boundary_to_vn(V, interval)
            assert W.unitarity_defect <= 1e-10
            assert np.linalg.norm(sa.cayley_vn_to_boundary(W, interval).matrix - V.matrix, 2) <= 1e-10
            B = sa.cayley_vn_to_boundary(V, interval)
            assert B.unitarity_defect <= 1e-10
            assert np.linalg.norm(sa.cayley_boundary_to_vn(B, interval).matrix - V.matrix, 2) <= 1e-10


@C13
@pytest.mark.parametrize("kind", ALL_KINDS)
def test_domain_check_accepts_exactly_eigenfunctions(kind):
    V = constructors(2)[kind]
    model = bu.eigendecompose(V)
    for j, lam in enumerate(model.phases):
        h = model.vectors[:, j]
        for m in (-2, 0, 2):
            assert sa.domain_check(mo.eigenfunction(lam + m, h, UNIT_INTERVAL, 256, V), V)
            for offset in (0.1, 0.5):
                off = mo.eigenfunction(lam + m + offset, h, UNIT_INTERVAL, 256)
                assert not sa.domain_check(off, V)


# --- 14 --------------------------------------------------------------------


CLI_CASES = {
    "spectrum": ["spectrum", "--boundary", "rotation", "--r", "0.5", "--N", "2", "--bands", "-2", "2"],
    "evolve": ["evolve", "--boundary", "random", "--N", "1", "--a", "0.375", "--grid", "16"],
    "resolvent": ["resolvent", "--boundary", "random", "--N", "1", "--z", "0.5+0.1j", "--method", "both", "--grid", "64"],
    "project": ["project", "--boundary", "diagonal", "--N", "1", "--phases", "0.25", "0.7", "0.25", "--mu", "-0.5", "--nu", "0.5", "--apply", "--grid", "32"],
    "stone": ["stone", "--boundary", "identity", "--N", "0", "--mu", "-0.5", "--nu", "0.5", "--b", "0.1", "--grid", "32"],
    "equivalent": ["equivalent", "--U", "reflection", "--V", "rotation:r=0.5", "--N", "2"],
    "commute-square": ["commute-square", "--U", "scalar:theta=0.3", "--V", "rotation:r=0.25", "--N", "2"],
    "commute-strip": ["commute-strip", "--gamma", "square"],
    "joint-spectrum": ["joint-spectrum", "--kind", "fractal", "--level", "2", "--m-range", "0", "1"],
    "tiling": ["tiling", "--spec", "geometric", "--r", "0.5", "--window", "0.25", "3.75"],
    "geometric": ["geometric", "--betas", "0", "0.3", "0.6", "0.9"],
    "cantor-lambda": ["cantor-lambda", "--level", "2"],
    "cantor-gram": ["cantor-gram", "--level", "4"],
    "fractal-commute": ["fractal-commute", "--level", "2"],
    "cayley": ["cayley", "--boundary", "random", "--N", "2"],
    "deficiency": ["deficiency", "--sign", "+", "--random-h"],
    "domain-check": ["domain-check", "--boundary", "scalar", "--theta", "0.3", "--N", "1", "--lam", "0.3"],
}


def _invoke(argv) -> tuple[int, str]:
    buf = io.StringIO()
    code = run(argv, stdout=buf, stderr=io.StringIO())
    return code, buf.getvalue()


@C14
@pytest.mark.parametrize("command", sorted(CLI_CASES))
def test_cli_repeatable_and_schema_valid(command):
    argv = CLI_CASES[command]
    code1, out1 = _invoke(argv + ["--format", "json"])
    code2, out2 = _invoke(argv + ["--format", "json"])
    assert code1 == code2 == 0
    assert out1 == out2
    schema = json.loads(schema_path(command).read_text())
    jsonschema.validate(json.loads(out1), schema)


@C14
@pytest.mark.parametrize("command", ["spectrum", "resolvent", "joint-spectrum"])
def test_cli_byte_identical_across_processes(command):
    argv = [sys.executable, "-m", "momenta.cli", *CLI_CASES[command]]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second and first
