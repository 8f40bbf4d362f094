"""Command line front end: JSON config in, CSV out.

Output is deterministic byte for byte for a given config, regardless
of --threads.  Numbers are printed with 17 significant digits so CSV
golden files round-trip through binary64 exactly.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from .errors import ConfigError, ToolkitError
from .estimators import (DepthPolicy, DistributionFunction, Scales,
                         coarse_spectrum, deep_policy, default_scale_base,
                         holder_exponent_estimate)
from .holder_lab import derivative_limit_probe, detrend_exponent_test
from .ifs_geometry import IfsSystem, stream_point
from .spectrum import (beta_of_q, endpoints, hausdorff_spectrum_prediction,
                       legendre, packing_spectrum_prediction, spectrum_curve)
from .symbolic import PeriodicWord, Word
from .thermodynamics import (BernoulliPotential, ComboPotential,
                             FiniteRangePotential, cohomology_diagnostic,
                             effective_range, normalize, pressure)

SCHEMA_VERSION = 1

# the default battery for verify-prop: short periodic codings mixing
# both letters in assorted proportions, plus the two fixed points
DEFAULT_BATTERY = (
    "0", "1", "01", "10", "001", "010", "100", "011", "110", "101",
    "0111", "1110", "1101", "1011", "00111", "01110", "11100", "11001",
    "10011", "01111")


def _num(value, where: str) -> float:
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        if "/" in value:
            p, _, q = value.partition("/")
            try:
                den = float(q)
                if den == 0.0:
                    raise ValueError
                return float(p) / den
            except ValueError:
                raise ConfigError(f"{where}: bad rational {value!r}") from None
        try:
            return float(value)
        except ValueError:
            raise ConfigError(f"{where}: bad number {value!r}") from None
    raise ConfigError(f"{where}: expected a number, got "
                      f"{type(value).__name__}")


def _get(mapping, key, where: str):
    if not isinstance(mapping, dict) or key not in mapping:
        raise ConfigError(f"{where}: missing field {key!r}")
    return mapping[key]


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: {exc.msg}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be an object")
    version = cfg.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version must be {SCHEMA_VERSION}, "
                          f"got {version!r}")
    return cfg


def build_system(cfg: dict) -> IfsSystem:
    sys_cfg = _get(cfg, "system", "config")
    family = _get(sys_cfg, "family", "system")
    dom = _get(sys_cfg, "domain", "system")
    if not isinstance(dom, list) or len(dom) != 2:
        raise ConfigError("system.domain: expected [lo, hi]")
    domain = (_num(dom[0], "system.domain"), _num(dom[1], "system.domain"))
    maps = _get(sys_cfg, "maps", "system")
    if not isinstance(maps, list) or len(maps) < 2:
        raise ConfigError("system.maps: need a list of at least two maps")
    try:
        if family == "affine":
            entries = [( _num(_get(mp, "ratio", f"maps[{i}]"), f"maps[{i}].ratio"),
                         _num(_get(mp, "offset", f"maps[{i}]"), f"maps[{i}].offset"))
                       for i, mp in enumerate(maps)]
            return IfsSystem.affine(domain, entries)
        if family == "moebius":
            entries = [tuple(_num(_get(mp, key, f"maps[{i}]"),
                                  f"maps[{i}].{key}")
                             for key in ("a", "b", "c", "d"))
                       for i, mp in enumerate(maps)]
            return IfsSystem.moebius(domain, entries)
    except ValueError as exc:
        raise ConfigError(f"system: {exc}") from None
    raise ConfigError(f"system.family: unknown family {family!r}")


def build_potential(cfg: dict, ifs: IfsSystem, threads: int,
                    depth: int = 10):
    pot_cfg = _get(cfg, "potential", "config")
    kind = _get(pot_cfg, "kind", "potential")
    m = ifs.alphabet_size
    try:
        if kind == "bernoulli":
            if "probabilities" in pot_cfg:
                vals = [_num(v, "potential.probabilities")
                        for v in pot_cfg["probabilities"]]
                psi = BernoulliPotential.from_probabilities(vals)
            else:
                vals = [_num(v, "potential.log_weights")
                        for v in _get(pot_cfg, "log_weights", "potential")]
                psi = BernoulliPotential(tuple(vals))
            if len(vals) != m:
                raise ConfigError(
                    f"potential: {len(vals)} weights for {m} maps")
        elif kind == "finite_range":
            r = int(_get(pot_cfg, "depth", "potential"))
            table = [_num(v, "potential.table")
                     for v in _get(pot_cfg, "table", "potential")]
            psi = FiniteRangePotential(r, m, tuple(table))
        elif kind == "geometric_multiple":
            coeff = _num(_get(pot_cfg, "coefficient", "potential"),
                         "potential.coefficient")
            shift = _num(pot_cfg.get("shift", 0.0), "potential.shift")
            psi = ComboPotential(geom_coeff=coeff, base=None, base_coeff=0.0,
                                 shift=shift, system=ifs)
        else:
            raise ConfigError(f"potential.kind: unknown kind {kind!r}")
    except ValueError as exc:
        raise ConfigError(f"potential: {exc}") from None
    if pot_cfg.get("normalize", False):
        psi = normalize(ifs, psi, k_max=depth, threads=threads)
    return psi


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


def _write_csv(out_path, header, rows) -> None:
    text = ",".join(header) + "\n" + "".join(
        ",".join(_fmt(v) for v in row) + "\n" for row in rows)
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _summary(line: str) -> None:
    print(line, file=sys.stderr)


def _parse_points(text: str, where: str) -> list[float]:
    return [_num(tok.strip(), where)
            for tok in text.split(",") if tok.strip()]


def _config_points(args, cfg, key: str) -> list[float]:
    if getattr(args, "points", None):
        return _parse_points(args.points, "--points")
    block = cfg.get(key, {})
    pts = block.get("points", cfg.get("points"))
    if pts is None:
        raise ConfigError(f"no points given: pass --points or set "
                          f"{key}.points in the config")
    return [_num(v, f"{key}.points") for v in pts]


def _scales_from(cfg: dict, ifs: IfsSystem) -> Scales:
    block = cfg.get("scales")
    if block is None:
        return Scales(default_scale_base(ifs))
    return Scales(_num(_get(block, "base", "scales"), "scales.base"),
                  int(block.get("j_min", 1)), int(block.get("j_max", 20)))


def _q_grid(args, cfg):
    block = cfg.get("q_grid", {})
    q_min = args.q_min if args.q_min is not None else _num(
        block.get("min", -10.0), "q_grid.min")
    q_max = args.q_max if args.q_max is not None else _num(
        block.get("max", 10.0), "q_grid.max")
    steps = args.q_steps if args.q_steps is not None else int(
        block.get("steps", 201))
    if steps < 2 or q_min >= q_max:
        raise ConfigError("bad q grid")
    return q_min, q_max, steps


def _cmd_check(args, cfg, ifs, psi):
    diag = cohomology_diagnostic(ifs, psi, threads=args.threads)
    rng = effective_range(ifs, psi)
    osc = ifs.osc_report
    rows = [
        ("family", "affine" if ifs.is_affine() else "moebius"),
        ("alphabet_size", ifs.alphabet_size),
        ("r_min", ifs.r_min),
        ("r_max", ifs.r_max),
        ("osc_satisfied", osc.satisfied),
        ("effective_range", "none" if rng is None else rng),
        ("ratio_min", diag.ratio_min),
        ("ratio_max", diag.ratio_max),
        ("degenerate", diag.degenerate),
    ]
    _write_csv(args.out, ("property", "value"), rows)
    _summary(f"check: osc={_fmt(osc.satisfied)} "
             f"degenerate={_fmt(diag.degenerate)}")
    return 0


def _cmd_pressure(args, cfg, ifs, psi):
    block = cfg.get("pressure", {})
    k_max = args.depth or int(block.get("depth", 10))
    tol = args.tol if args.tol is not None else _num(
        block.get("tol", 1e-12), "pressure.tol")
    result = pressure(ifs, psi, k_max=k_max, tol=tol, threads=args.threads)
    rows = [(i + 1, v) for i, v in enumerate(result.levels)]
    _write_csv(args.out, ("level", "pressure"), rows)
    _summary(f"pressure: value={_fmt(result.value)} "
             f"error_bound={_fmt(result.error_bound)} "
             f"levels={len(result.levels)}")
    return 0


def _cmd_beta(args, cfg, ifs, psi):
    q_min, q_max, steps = _q_grid(args, cfg)
    rows = []
    for i in range(steps):
        q = q_min + (q_max - q_min) * i / (steps - 1)
        rows.append((q, beta_of_q(ifs, psi, q, k=args.depth,
                                  threads=args.threads)))
    _write_csv(args.out, ("q", "beta"), rows)
    _summary(f"beta: {steps} points on [{q_min:g}, {q_max:g}]")
    return 0


def _cmd_spectrum(args, cfg, ifs, psi):
    q_min, q_max, steps = _q_grid(args, cfg)
    curve = spectrum_curve(ifs, psi, k=args.depth, q_min=q_min, q_max=q_max,
                           q_steps=steps, threads=args.threads)
    rows = [(s.q, s.beta, s.alpha, s.beta_star) for s in curve.samples]
    _write_csv(args.out, ("q", "beta", "alpha", "beta_star"), rows)
    plateau = legendre(curve, curve.alpha_zero).value
    _summary(f"spectrum: alpha_minus={curve.alpha_minus:.6f} "
             f"alpha_plus={curve.alpha_plus:.6f} "
             f"alpha_zero={curve.alpha_zero:.6f} "
             f"beta_star_alpha_zero={plateau:.6f} "
             f"degenerate={_fmt(curve.degenerate)}")
    return 0


def _cmd_endpoints(args, cfg, ifs, psi):
    ell_max = args.depth or int(cfg.get("endpoints", {}).get("ell_max", 6))
    lo, hi = endpoints(ifs, psi, ell_max=ell_max, threads=args.threads)
    _write_csv(args.out, ("alpha_minus", "alpha_plus"), [(lo, hi)])
    _summary(f"endpoints: [{lo:.6f}, {hi:.6f}] at ell_max={ell_max}")
    return 0


def _make_F(args, cfg, ifs, psi) -> DistributionFunction:
    policy = None
    if args.depth is not None or args.tol is not None:
        policy = DepthPolicy(
            max_depth=args.depth if args.depth is not None else 60,
            mass_tol=args.tol if args.tol is not None else 1e-8)
    return DistributionFunction(ifs, psi, policy)


def _cmd_cdf(args, cfg, ifs, psi):
    points = _config_points(args, cfg, "cdf")
    F = _make_F(args, cfg, ifs, psi)
    rows = []
    worst = 0.0
    for x in points:
        val = F.cdf(x)
        worst = max(worst, val.error_bound)
        rows.append((x, val.value, val.error_bound))
    _write_csv(args.out, ("x", "value", "error_bound"), rows)
    _summary(f"cdf: {len(points)} points, max error bound {_fmt(worst)}")
    return 0


def _cmd_holder(args, cfg, ifs, psi):
    points = _config_points(args, cfg, "holder")
    method = cfg.get("holder", {}).get("method", "regression_min")
    scales = _scales_from(cfg, ifs)
    F = DistributionFunction(ifs, psi, deep_policy(ifs))
    rows = []
    for t0 in points:
        est = holder_exponent_estimate(F, t0, scales, method=method)
        rows.append((t0, est.exponent, len(est.scale_pairs)))
    _write_csv(args.out, ("t0", "exponent", "usable_scales"), rows)
    _summary(f"holder: {len(points)} points, method={method}")
    return 0


def _cmd_coarse(args, cfg, ifs, psi):
    block = cfg.get("coarse", {})
    if args.depth is not None:
        base = default_scale_base(ifs)
        deltas = [base ** (-args.depth)]
    else:
        deltas = [_num(v, "coarse.deltas")
                  for v in _get(block, "deltas", "coarse")]
    width = _num(block.get("alpha_bin_width", 0.2), "coarse.alpha_bin_width")
    F = DistributionFunction(ifs, psi)
    rows = []
    kept = []
    for result in coarse_spectrum(F, deltas, alpha_bin_width=width):
        kept.append(result.kept_mass)
        for b in result.bins:
            rows.append((result.delta, b.alpha_center, b.count, b.f_alpha))
    _write_csv(args.out, ("delta", "alpha_center", "count", "f_alpha"), rows)
    _summary(f"coarse: {len(deltas)} deltas, {len(rows)} bins, "
             f"kept_mass_min={min(kept):.6f}")
    return 0


def _cmd_verify_prop(args, cfg, ifs, psi):
    block = cfg.get("probe", {})
    words = block.get("words", list(DEFAULT_BATTERY))
    ks = [int(v) for v in block.get("ks", (1, 3))]
    n_max = args.depth or int(block.get("n_max", 25))
    F = DistributionFunction(ifs, psi, deep_policy(ifs))
    scales = Scales(2.0, 1, n_max)
    rows = []
    finite = violations = 0
    for text in words:
        word = Word.parse(str(text))
        x = stream_point(ifs, PeriodicWord(word).stream())
        for k in ks:
            probe = derivative_limit_probe(F, x, k, scales)
            hit = probe.classification == "finite_limit"
            finite += hit
            violations += hit and not probe.degenerate_hypothesis
            rows.append((str(text), k, x, probe.classification,
                         math.nan if probe.limit_value is None
                         else probe.limit_value,
                         probe.degenerate_hypothesis))
    _write_csv(args.out, ("word", "k", "x", "classification", "limit_value",
                          "degenerate_hypothesis"), rows)
    _summary(f"verify-prop: {len(rows)} probes, finite_limit={finite}, "
             f"violations={violations}")
    return 1 if violations else 0


def _cmd_detrend(args, cfg, ifs, psi):
    block = cfg.get("detrend", {})
    if getattr(args, "points", None):
        t0 = _parse_points(args.points, "--points")[0]
    else:
        t0 = _num(_get(block, "t0", "detrend"), "detrend.t0")
    alpha_hat = block.get("alpha_hat")
    if alpha_hat is not None:
        alpha_hat = _num(alpha_hat, "detrend.alpha_hat")
    windows = int(block.get("windows", 8))
    F = DistributionFunction(ifs, psi, deep_policy(ifs))
    result = detrend_exponent_test(F, t0, alpha_hat, windows=windows)
    rows = []
    for j, per_window in enumerate(result.coefficients, start=1):
        for i, coeff in enumerate(per_window):
            rows.append((j, i + 1, result.window_radii[i], coeff))
    _write_csv(args.out, ("degree", "window", "radius", "coefficient"), rows)
    residual = (math.nan if result.residual_exponent is None
                else result.residual_exponent)
    _summary(f"detrend: t0={t0:g} alpha_hat={result.alpha_hat:.6f} "
             f"residual={residual:.6f} passed={_fmt(result.passed)} "
             f"skipped={_fmt(result.skipped)} "
             f"violation={_fmt(result.hypothesis_violation)}")
    return 0


def _cmd_predict_packing(args, cfg, ifs, psi):
    q_min, q_max, steps = _q_grid(args, cfg)
    curve = spectrum_curve(ifs, psi, k=args.depth, q_min=q_min, q_max=q_max,
                           q_steps=steps, threads=args.threads)
    block = cfg.get("packing", {})
    if "alphas" in block:
        alphas = [_num(v, "packing.alphas") for v in block["alphas"]]
    else:
        n = int(block.get("alpha_steps", 101))
        lo, hi = curve.alpha_minus, curve.alpha_plus
        alphas = [lo + (hi - lo) * i / (n - 1) for i in range(n)]
    haus = hausdorff_spectrum_prediction(curve, alphas)
    pack = packing_spectrum_prediction(curve, alphas)
    rows = [(h.alpha, h.dim, p.dim, h.empty)
            for h, p in zip(haus, pack)]
    _write_csv(args.out, ("alpha", "hausdorff", "packing", "empty"), rows)
    plateau = legendre(curve, curve.alpha_zero).value
    _summary(f"predict-packing: plateau={plateau:.6f} on "
             f"[{curve.alpha_minus:.6f}, {curve.alpha_zero:.6f}]")
    return 0


_DISPATCH = {
    "check": _cmd_check,
    "pressure": _cmd_pressure,
    "beta": _cmd_beta,
    "spectrum": _cmd_spectrum,
    "endpoints": _cmd_endpoints,
    "cdf": _cmd_cdf,
    "holder": _cmd_holder,
    "coarse": _cmd_coarse,
    "verify-prop": _cmd_verify_prop,
    "detrend": _cmd_detrend,
    "predict-packing": _cmd_predict_packing,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mfgibbs",
        description="Multifractal toolkit for Gibbs measures on "
                    "self-conformal sets")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _DISPATCH:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None)
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
        p.add_argument("--q-min", dest="q_min", type=float, default=None)
        p.add_argument("--q-max", dest="q_max", type=float, default=None)
        p.add_argument("--q-steps", dest="q_steps", type=int, default=None)
        p.add_argument("--depth", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        if name in ("cdf", "holder", "detrend"):
            p.add_argument("--points", default=None)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.threads < 1:
        print("config error: --threads must be positive", file=sys.stderr)
        return 2
    try:
        cfg = load_config(args.config)
        ifs = build_system(cfg)
        depth = args.depth or int(cfg.get("pressure", {}).get("depth", 10))
        psi = build_potential(cfg, ifs, args.threads, depth=depth)
        return _DISPATCH[args.command](args, cfg, ifs, psi)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ToolkitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
