"""Command-line interface: ``momenta <subcommand> [options]``.

Exit status is 0 on success, 2 on invalid input (including unknown
subcommands) and 1 on numerical failure.  Output goes to standard output or
``--output``; floats carry 17 significant digits.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import dataclass, fields

import numpy as np

from . import boundary_unitary as bu
from . import commuting_pairs as cp
from . import fractal_measure as fm
from . import momentum_operator as mo
from . import selfadjoint_extensions as sa
from .errors import ConvergenceWarning, NumericalError, ValidationError
from .io import csv_lines, dumps, load_json
from .phase_arith import IntervalConfig, canonical_phase

__all__ = ["RunConfig", "build_parser", "run", "main"]

BOUNDARY_NAMES = ("identity", "rotation", "twisted", "diagonal", "reflection", "scalar", "random")


@dataclass
class RunConfig:
    """Defaults shared by every subcommand; ``--config`` overrides them, explicit flags win."""

    N: int = 2
    grid_size: int = 128
    bands: tuple[int, int] = (-2, 2)
    tol: float = 1e-9
    seed: int = 42
    output: str | None = None
    format: str | None = None

    def __post_init__(self):
        if int(self.N) < 0:
            raise ValidationError("N must be nonnegative")
        if int(self.grid_size) < 2:
            raise ValidationError("grid_size must be at least 2")
        if not float(self.tol) > 0:
            raise ValidationError("tol must be positive")
        if self.format not in (None, "json", "csv"):
            raise ValidationError("format must be json or csv")
        lo, hi = (int(v) for v in self.bands)
        if lo > hi:
            raise ValidationError("bands must satisfy m_lo <= m_hi")
        self.N, self.grid_size, self.tol, self.seed = int(self.N), int(self.grid_size), float(self.tol), int(self.seed)
        self.bands = (lo, hi)

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        data = load_json(path)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"invalid config {path}: {exc}") from exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


class _UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument helpers


def _common(p: argparse.ArgumentParser, cfg: RunConfig, fmt: str = "json"):
    p.add_argument("--config", help="RunConfig JSON file")
    p.add_argument("--output", "-o", default=cfg.output, help="write output to this file")
    p.add_argument("--format", choices=("json", "csv"), default=cfg.format or fmt)
    p.add_argument("--seed", type=int, default=cfg.seed)
    p.add_argument("--tol", type=float, default=cfg.tol)


def _interval_arg(p):
    p.add_argument("--interval", type=float, nargs=2, default=(0.0, 1.0), metavar=("ALPHA", "BETA"))


def _boundary_args(p, cfg: RunConfig):
    p.add_argument("--boundary", choices=BOUNDARY_NAMES, help="named boundary unitary")
    p.add_argument("--matrix", help="boundary unitary JSON file {n, re, im}")
    p.add_argument("--N", type=int, default=cfg.N, help="Fourier truncation, dimension 2N+1")
    p.add_argument("--r", type=float, default=0.0, help="rotation parameter")
    p.add_argument("--theta", type=float, default=0.0, help="scalar phase")
    p.add_argument("--theta-coeffs", type=float, nargs="+", default=[0.0], help="Fourier coefficients of theta(y)")
    p.add_argument("--phases", type=float, nargs="+", help="diagonal phases, 2N+1 values")


def _function_args(p, cfg: RunConfig):
    p.add_argument("--function", help="grid function JSON file")
    p.add_argument("--grid", type=int, default=cfg.grid_size, help="grid size G for generated functions")
    p.add_argument("--max-band", type=int, default=4, help="bands used by the generated test function")


def _make_boundary(name: str, N: int, r=0.0, theta=0.0, coeffs=(0.0,), phases=None, seed=42) -> bu.BoundaryUnitary:
    if name == "identity":
        return bu.make_identity(N)
    if name == "rotation":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return bu.make_rotation(r, N)
    if name == "twisted":
        return bu.make_twisted_rotation(list(coeffs), r, N)
    if name == "diagonal":
        if phases is None:
            raise ValidationError("diagonal boundary needs phases")
        return bu.make_diagonal(list(phases), N)
    if name == "reflection":
        return bu.make_reflection(N)
    if name == "scalar":
        return bu.make_scalar(theta, N)
    if name == "random":
        return bu.random_unitary(N, seed)
    raise ValidationError(f"unknown boundary {name!r}")


def _boundary_from_args(args) -> bu.BoundaryUnitary:
    if args.boundary and args.matrix:
        raise ValidationError("give either --boundary or --matrix, not both")
    if args.matrix:
        return bu.BoundaryUnitary.from_dict(load_json(args.matrix))
    if not args.boundary:
        raise ValidationError("a boundary unitary is required (--boundary or --matrix)")
    return _make_boundary(args.boundary, args.N, args.r, args.theta, args.theta_coeffs, args.phases, args.seed)


def parse_compact_boundary(text: str, N: int, seed: int = 42) -> bu.BoundaryUnitary:
    """Parse ``name[:key=value,...]``; list values are ``;``-separated.

    >>> parse_compact_boundary("scalar:theta=0.5", 0).matrix.tolist()
    [[(-1+0j)]]
    """
    name, _, rest = text.partition(":")
    params: dict[str, str] = {}
    for item in filter(None, rest.split(",")):
        key, sep, value = item.partition("=")
        if not sep:
            raise ValidationError(f"malformed boundary parameter {item!r}")
        params[key.strip()] = value.strip()
    allowed = {"r", "theta", "coeffs", "phases", "seed"}
    if set(params) - allowed:
        raise ValidationError(f"unknown boundary parameters {sorted(set(params) - allowed)}")
    try:
        return _make_boundary(
            name.strip(),
            N,
            r=float(params.get("r", 0.0)),
            theta=float(params.get("theta", 0.0)),
            coeffs=[float(v) for v in params.get("coeffs", "0").split(";")],
            phases=[float(v) for v in params["phases"].split(";")] if "phases" in params else None,
            seed=int(params.get("seed", seed)),
        )
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"bad boundary {text!r}: {exc}") from exc


def _pair_from_args(args) -> tuple[bu.BoundaryUnitary, bu.BoundaryUnitary]:
    out = []
    for label, compact, path in (("U", args.U, args.U_matrix), ("V", args.V, args.V_matrix)):
        if compact and path:
            raise ValidationError(f"give either --{label} or --{label}-matrix, not both")
        if path:
            out.append(bu.BoundaryUnitary.from_dict(load_json(path)))
        elif compact:
            out.append(parse_compact_boundary(compact, args.N, args.seed))
        else:
            raise ValidationError(f"missing --{label}")
    return out[0], out[1]


def _interval(args) -> IntervalConfig:
    try:
        return IntervalConfig(*args.interval)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def _function_from_args(args, V: bu.BoundaryUnitary, interval: IntervalConfig) -> mo.GridFunction:
    if args.function:
        f = mo.GridFunction.from_dict(load_json(args.function))
        if f.interval != interval:
            raise ValidationError(f"function interval {f.interval.as_list()} differs from --interval")
        return f
    model = bu.eigendecompose(V)
    return mo.band_limited_function(model, interval, args.grid, args.max_band, args.seed)


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def _relerr(a: mo.GridFunction, b: mo.GridFunction) -> float:
    scale = b.norm()
    return float((a - b).norm() / scale) if scale else float((a - b).norm())


# ---------------------------------------------------------------------------
# subcommands: each returns (payload, csv_header, csv_rows) and an exit code


def cmd_spectrum(args):
    V = _boundary_from_args(args)
    interval = _interval(args)
    spec = mo.spectrum(bu.eigendecompose(V), interval, *args.bands)
    rows = spec.rows()
    payload = {
        "interval": interval.as_list(),
        "window": list(spec.window),
        "points": [{"value": v, "multiplicity": k, "band": b} for v, k, b in rows],
    }
    return payload, ("value", "multiplicity", "band"), rows


def cmd_evolve(args):
    V = _boundary_from_args(args)
    interval = _interval(args)
    f = _function_from_args(args, V, interval)
    g = mo.evolve(args.a, V, f, interpolate=args.interpolate)
    payload = {"a": args.a, "norm_in": f.norm(), "norm_out": g.norm(), "function": g.to_dict()}
    return payload, None, None


def cmd_resolvent(args):
    V = _boundary_from_args(args)
    interval = _interval(args)
    f = _function_from_args(args, V, interval)
    z = args.z
    if z.imag == 0:
        raise ValidationError("z must be off the real axis")
    payload = {"z": [z.real, z.imag], "method": args.method}
    if args.method in ("greens", "both"):
        g = mo.resolvent_greens(z, V, f)
    if args.method in ("spectral", "both"):
        m_bound = args.m_bound or min(64, (f.grid_size - 1) // 2)
        s, tail = mo.resolvent_spectral(z, bu.eigendecompose(V), f, m_bound, full_output=True)
        payload["tail_bound"] = tail
    if args.method == "both":
        payload["relative_difference"] = _relerr(g, s)
    out = g if args.method in ("greens", "both") else s
    payload["norm"] = out.norm()
    payload["function"] = out.to_dict()
    return payload, None, None


def cmd_project(args):
    V = _boundary_from_args(args)
    interval = _interval(args)
    model = bu.eigendecompose(V)
    proj = mo.spectral_projection(args.mu, args.nu, model, interval)
    payload = {
        "mu": args.mu,
        "nu": args.nu,
        "rank": proj.rank,
        "contributions": [
            {"eigen_index": c.eigen_index, "band": c.band, "frequency": c.frequency} for c in proj.contributions
        ],
    }
    if args.apply:
        f = _function_from_args(args, V, interval)
        pf = proj.apply(f)
        payload["idempotence_defect"] = (proj.apply(pf) - pf).norm()
        payload["function"] = pf.to_dict()
    return payload, None, None


def cmd_stone(args):
    V = _boundary_from_args(args)
    interval = _interval(args)
    f = _function_from_args(args, V, interval)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        out, info = mo.stone_projection(args.mu, args.nu, V, args.b, f, args.quad_points, full_output=True)
    exact = mo.spectral_projection(args.mu, args.nu, bu.eigendecompose(V), interval).apply(f)
    payload = {
        "mu": args.mu,
        "nu": args.nu,
        "b": args.b,
        "converged": info["converged"],
        "relative_change": info["relative_change"],
        "panels": info["panels"],
        "error_vs_projection": float((out - exact).norm() / f.norm()),
        "function": out.to_dict(),
    }
    return payload, None, None, (0 if info["converged"] else 1)


def cmd_equivalent(args):
    U, V = _pair_from_args(args)
    mu, mv = bu.eigendecompose(U), bu.eigendecompose(V)
    payload = {
        "equivalent": bu.are_unitarily_equivalent(mu, mv, args.tol),
        "phases_U": mu.phases.tolist(),
        "phases_V": mv.phases.tolist(),
    }
    return payload, None, None


def cmd_commute_square(args):
    U, V = _pair_from_args(args)
    spec = cp.check_commuting_square(U, V, args.tol)
    payload = {"commuting": spec is not None, "spec": None if spec is None else spec.to_dict()}
    if spec is not None:
        payload["geometric_r"] = cp.detect_geometric(spec, args.tol)
    return payload, None, None


def _gamma_values(kind: str, freqs: np.ndarray) -> np.ndarray:
    if kind == "zero":
        return np.zeros_like(freqs)
    if kind == "square":
        return canonical_phase(freqs**2)
    if kind == "half":
        return canonical_phase(freqs / 2.0)
    raise ValidationError(f"unknown gamma {kind!r}")


def _freq_grid(args) -> np.ndarray:
    lo, hi, count = args.freqs
    count = int(count)
    if count < 1:
        raise ValidationError("frequency count must be positive")
    return np.linspace(lo, hi, count)


def cmd_commute_strip(args):
    freqs = _freq_grid(args)
    if args.shift:
        mat = np.roll(np.eye(len(freqs)), 1, axis=0)
    elif args.matrix:
        data = load_json(args.matrix)
        mat = np.array(data["re"], dtype=float) + 1j * np.array(data["im"], dtype=float)
    else:
        mat = np.diag(np.exp(2j * np.pi * _gamma_values(args.gamma, freqs)))
    gamma = cp.check_commuting_strip(mat, freqs, args.tol)
    payload = {"commuting": gamma is not None, "gamma": None if gamma is None else gamma.to_dict()}
    return payload, None, None


def _square_spec(args, m_range) -> cp.CommutingPairSpec:
    case = cp.CaseTag.V_SCALAR if args.case == "V_scalar" else cp.CaseTag.U_SCALAR
    if args.spec == "geometric":
        return cp.geometric_spec(args.r, m_range, alpha=args.alpha, case=case)
    if args.betas is None:
        raise ValidationError("--spec diagonal needs --betas")
    modes = np.arange(args.beta_start, args.beta_start + len(args.betas))
    return cp.CommutingPairSpec(case, args.alpha, modes, args.betas)


def cmd_joint_spectrum(args):
    if args.kind == "square":
        beta_range = args.n_range if args.case == "V_scalar" else args.m_range
        spec = _square_spec(args, beta_range)
        js = cp.joint_spectrum_square(spec, args.m_range, args.n_range)
    elif args.kind == "strip":
        freqs = _freq_grid(args)
        js = cp.joint_spectrum_strip(cp.GammaFunction(freqs, _gamma_values(args.gamma, freqs)), args.m_range)
    else:
        lams = fm.lambda_set(args.level)
        if args.gamma_values is not None:
            gamma = np.asarray(args.gamma_values, dtype=float)
        else:
            gamma = np.random.default_rng(args.seed).random(len(lams))
        js = fm.joint_spectrum_fractal(gamma, lams, args.m_range)
    rows = [(float(x), float(y)) for x, y in js.points]
    payload = {"kind": args.kind, "window": list(js.window), "points": [list(r) for r in rows]}
    return payload, ("x", "y"), rows


def cmd_tiling(args):
    lo, hi = args.window
    window = (lo, hi, lo, hi)
    m_range, n_range = cp.generation_ranges(window, args.alpha)
    if args.spec == "geometric":
        spec = cp.geometric_spec(args.r, m_range, alpha=args.alpha)
    elif args.spec == "lattice":
        spec = cp.geometric_spec(0.0, m_range, alpha=args.alpha)
    else:
        raise ValidationError(f"unknown spec {args.spec!r}")
    js = cp.joint_spectrum_square(spec, m_range, n_range)
    for hole in args.remove or []:
        js = js.without(hole)
    report = cp.tiling_check(js, window, args.resolution)
    return report.to_dict(), None, None


def cmd_geometric(args):
    modes = np.arange(args.beta_start, args.beta_start + len(args.betas))
    spec = cp.CommutingPairSpec(cp.CaseTag.U_SCALAR, 0.0, modes, args.betas)
    r = cp.detect_geometric(spec, args.tol)
    return {"geometric": r is not None, "r": r}, None, None


def cmd_cantor_lambda(args):
    lams = fm.lambda_set(args.level)
    values = [int(v) for v in lams.values]
    return {"level": lams.level, "values": values}, None, [values]


def cmd_cantor_gram(args):
    report = fm.gram_matrix(fm.lambda_set(args.level), args.depth)
    return report.to_dict(), None, None


def cmd_fractal_commute(args):
    size = 2**args.level
    if args.matrix:
        data = load_json(args.matrix)
        mat = np.array(data["re"], dtype=float) + 1j * np.array(data["im"], dtype=float)
    else:
        phases = args.phases
        if phases is None:
            phases = np.random.default_rng(args.seed).random(size)
        if len(phases) != size:
            raise ValidationError(f"need {size} phases for level {args.level}")
        mat = np.diag(np.exp(2j * np.pi * np.asarray(phases, dtype=float)))
        if args.mix_block:
            c, s = np.cos(0.3), np.sin(0.3)
            mat[:2, :2] = mat[:2, :2] @ np.array([[c, -s], [s, c]])
    gamma = fm.check_commuting_fractal(mat, args.level, args.tol)
    return {"commuting": gamma is not None, "gamma": None if gamma is None else gamma.tolist()}, None, None


def cmd_cayley(args):
    V = _boundary_from_args(args)
    interval = _interval(args)
    if args.direction == "to-vn":
        W = sa.cayley_boundary_to_vn(V, interval)
        back = sa.cayley_vn_to_boundary(W, interval)
    else:
        W = sa.cayley_vn_to_boundary(V, interval)
        back = sa.cayley_boundary_to_vn(W, interval)
    payload = {
        "direction": args.direction,
        "unitarity_defect": W.unitarity_defect,
        "round_trip_error": float(np.linalg.norm(back.matrix - V.matrix, 2)),
        "matrix": W.to_dict(),
    }
    return payload, None, None


def cmd_deficiency(args):
    interval = _interval(args)
    trunc = bu.FourierTruncation(args.N)
    if args.random_h:
        rng = np.random.default_rng(args.seed)
        h = rng.standard_normal(trunc.dimension) + 1j * rng.standard_normal(trunc.dimension)
    else:
        h = np.zeros(trunc.dimension, dtype=complex)
        h[trunc.index(args.mode)] = 1.0
    dv = sa.deficiency_vector(args.sign, h, interval, args.grid)
    quad, closed = dv.norm_squared(), dv.norm_identity()
    payload = {
        "sign": "+" if dv.sign > 0 else "-",
        "residual": dv.residual,
        "norm_squared": quad,
        "norm_identity": closed,
        "norm_identity_relative_error": abs(quad - closed) / closed,
    }
    return payload, None, None


def cmd_domain_check(args):
    V = _boundary_from_args(args)
    interval = _interval(args)
    if args.function:
        f = mo.GridFunction.from_dict(load_json(args.function))
    else:
        trunc = V.truncation
        h = np.zeros(trunc.dimension, dtype=complex)
        h[trunc.index(args.mode)] = 1.0
        f = mo.eigenfunction(args.lam, h, interval, args.grid)
    mismatch = sa.boundary_mismatch(f, V)
    payload = {"in_domain": sa.domain_check(f, V, args.tol), "mismatch": mismatch, "norm": f.norm()}
    return payload, None, None


# ---------------------------------------------------------------------------


def build_parser(cfg: RunConfig | None = None) -> argparse.ArgumentParser:
    cfg = cfg or RunConfig()
    parser = _Parser(prog="momenta", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, handler, help_text, fmt="json"):
        p = sub.add_parser(name, help=help_text, description=help_text)
        _common(p, cfg, fmt)
        p.set_defaults(handler=handler)
        return p

    p = add("spectrum", cmd_spectrum, "eigenvalues of P_V in a band window", fmt="csv")
    _boundary_args(p, cfg)
    _interval_arg(p)
    p.add_argument("--bands", type=int, nargs=2, default=cfg.bands, metavar=("M_LO", "M_HI"))

    p = add("evolve", cmd_evolve, "apply the unitary group e(a P_V)")
    _boundary_args(p, cfg)
    _interval_arg(p)
    _function_args(p, cfg)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--interpolate", action="store_true", help="allow a off the grid")

    p = add("resolvent", cmd_resolvent, "apply (z - P_V)^-1")
    _boundary_args(p, cfg)
    _interval_arg(p)
    _function_args(p, cfg)
    p.add_argument("--z", type=_complex, required=True, help="e.g. 0.5+0.1j")
    p.add_argument("--method", choices=("greens", "spectral", "both"), default="greens")
    p.add_argument("--m-bound", type=int, help="eigen-expansion band cutoff (default min(64, (G-1)//2))")

    p = add("project", cmd_project, "spectral projection onto (mu, nu)")
    _boundary_args(p, cfg)
    _interval_arg(p)
    _function_args(p, cfg)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--apply", action="store_true", help="also apply it to a test function")

    p = add("stone", cmd_stone, "spectral projection by Stone's formula at finite b")
    _boundary_args(p, cfg)
    _interval_arg(p)
    _function_args(p, cfg)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--quad-points", type=int)

    for name, handler, text in (
        ("equivalent", cmd_equivalent, "unitary equivalence of two boundary unitaries"),
        ("commute-square", cmd_commute_square, "classify a commuting pair on the square"),
    ):
        p = add(name, handler, text)
        p.add_argument("--U", help="compact boundary, e.g. rotation:r=0.5")
        p.add_argument("--V", help="compact boundary, e.g. scalar:theta=0.3")
        p.add_argument("--U-matrix", dest="U_matrix")
        p.add_argument("--V-matrix", dest="V_matrix")
        p.add_argument("--N", type=int, default=cfg.N)

    p = add("commute-strip", cmd_commute_strip, "classify a multiplier on the strip's frequency samples")
    p.add_argument("--freqs", type=float, nargs=3, default=(0.0, 4.0, 9), metavar=("LO", "HI", "COUNT"))
    p.add_argument("--gamma", choices=("zero", "square", "half"), default="square")
    p.add_argument("--shift", action="store_true", help="use a frequency shift instead")
    p.add_argument("--matrix", help="operator JSON file {re, im}")

    p = add("joint-spectrum", cmd_joint_spectrum, "joint spectrum points", fmt="csv")
    p.add_argument("--kind", choices=("square", "strip", "fractal"), default="square")
    p.add_argument("--spec", choices=("geometric", "diagonal"), default="geometric")
    p.add_argument("--case", choices=("U_scalar", "V_scalar"), default="U_scalar")
    p.add_argument("--r", type=float, default=0.0)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--betas", type=float, nargs="+")
    p.add_argument("--beta-start", type=int, default=0, help="mode index of the first beta")
    p.add_argument("--m-range", type=int, nargs=2, default=(0, 2))
    p.add_argument("--n-range", type=int, nargs=2, default=(0, 2))
    p.add_argument("--freqs", type=float, nargs=3, default=(0.0, 2.0, 3), metavar=("LO", "HI", "COUNT"))
    p.add_argument("--gamma", choices=("zero", "square", "half"), default="half")
    p.add_argument("--level", type=int, default=2)
    p.add_argument("--gamma-values", type=float, nargs="+")

    p = add("tiling", cmd_tiling, "check that a joint spectrum tiles a square window")
    p.add_argument("--spec", choices=("geometric", "lattice"), default="geometric")
    p.add_argument("--r", type=float, default=0.0)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--window", type=float, nargs=2, default=(0.25, 3.75), metavar=("LO", "HI"))
    p.add_argument("--resolution", type=int, default=64)
    p.add_argument("--remove", type=float, nargs=2, action="append", metavar=("X", "Y"), help="drop a point")

    p = add("geometric", cmd_geometric, "detect beta_m = <r m>")
    p.add_argument("--betas", type=float, nargs="+", required=True)
    p.add_argument("--beta-start", type=int, default=0)

    p = add("cantor-lambda", cmd_cantor_lambda, "level-n spectrum of the quarter Cantor measure", fmt="csv")
    p.add_argument("--level", type=int, required=True)

    p = add("cantor-gram", cmd_cantor_gram, "Gram defect of the Cantor exponentials")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--depth", type=int, default=40)

    p = add("fractal-commute", cmd_fractal_commute, "check a unitary on {e_lam} for diagonality")
    p.add_argument("--level", type=int, default=2)
    p.add_argument("--phases", type=float, nargs="+")
    p.add_argument("--mix-block", action="store_true", help="rotate the first two basis vectors")
    p.add_argument("--matrix", help="operator JSON file {re, im}")

    p = add("cayley", cmd_cayley, "map between boundary and von Neumann unitaries")
    _boundary_args(p, cfg)
    _interval_arg(p)
    p.add_argument("--direction", choices=("to-vn", "to-boundary"), default="to-vn")

    p = add("deficiency", cmd_deficiency, "deficiency vector residual and norm identity")
    _interval_arg(p)
    p.add_argument("--sign", choices=("+", "-"), default="+")
    p.add_argument("--N", type=int, default=cfg.N)
    p.add_argument("--mode", type=int, default=0, help="h = e_mode")
    p.add_argument("--random-h", action="store_true")
    p.add_argument("--grid", type=int, default=512)

    p = add("domain-check", cmd_domain_check, "test f(beta) = V f(alpha)")
    _boundary_args(p, cfg)
    _interval_arg(p)
    p.add_argument("--function", help="grid function JSON file")
    p.add_argument("--lam", type=float, default=0.0, help="test f(x) = e(lam x) e_mode")
    p.add_argument("--mode", type=int, default=0)
    p.add_argument("--grid", type=int, default=cfg.grid_size)
    return parser


def _config_path(argv: list[str]) -> str | None:
    for k, arg in enumerate(argv):
        if arg == "--config" and k + 1 < len(argv):
            return argv[k + 1]
        if arg.startswith("--config="):
            return arg.split("=", 1)[1]
    return None


def _emit(text: str, path: str | None, stdout):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def run(argv=None, stdout=None, stderr=None) -> int:
    """Execute one CLI invocation and return its exit status."""
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        path = _config_path(argv)
        cfg = RunConfig.from_file(path) if path else RunConfig()
        parser = build_parser(cfg)
        try:
            args = parser.parse_args(argv)
        except _UsageError as exc:
            print(exc, file=stderr)
            return 2
        result = args.handler(args)
        payload, header, rows = result[:3]
        code = result[3] if len(result) > 3 else 0
        if args.format == "csv":
            if rows is None:
                raise ValidationError(f"{args.command} has no CSV output; use --format json")
            text = csv_lines(rows, header)
        else:
            text = dumps(payload)
        _emit(text, args.output, stdout)
        return code
    except (ValidationError, ValueError, KeyError, OSError) as exc:
        print(f"momenta: invalid input: {exc}", file=stderr)
        return 2
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"momenta: numerical failure: {exc}", file=stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
