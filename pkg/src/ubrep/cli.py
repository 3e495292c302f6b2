"""Command-line front end.

Exit codes: 0 pass, 1 error, 3 a verified condition failed.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import serialize as ser
from .cocycle import (cocycle_build, cocycle_identity_check, default_epsilons, min_is_monotone,
                      norm_growth_profile)
from .embeddings import default_embedding, make_embedding
from .errors import ParameterError, ParseError, SchemaError, UbrepError
from .groups import DEFAULT_CAP, ball_enumerate, full_ball, parse_group, sphere_sizes
from .kernels import (Kernel, ball_overlap_kernel, gaussian_kernel, gram_random_kernel, psd_check,
                      tree_ray_kernel)
from .path import path_sweep, schur_row_sums
from .renorm import (EXACT, adjoint_residual, build_T, norm_bounds, rep_norm, rep_norm_infimum, spectral_data,
                     sup_rep_norm)
from .theorem import coefficients, lemma_bound, verify_converse, verify_forward

EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 3
DEFAULT_RADIUS = 6
KERNEL_TYPES = ("ball-overlap", "tree-ray", "gaussian", "gram-random")


@dataclass
class RunConfig:
    group: str
    kernel: Optional[str] = None
    epsilon: Optional[float] = None
    S: Optional[float] = None
    window: Optional[int] = None
    radius: Optional[int] = None
    alphas: Optional[str] = None
    embedding: Optional[str] = None
    epsilons: Optional[str] = None
    target: Optional[float] = None
    schur_radius: int = 30
    seed: Optional[int] = None
    out_dir: str = "."
    tol_psd: float = 1e-8

    def to_string(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_string(cls, text: str) -> "RunConfig":
        data = json.loads(text)
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ParseError(f"unknown config keys {sorted(unknown)}")
        return cls(**data)


def parse_kernel_spec(text: str) -> tuple[str, float]:
    kind, sep, arg = (text or "").partition(":")
    if not sep or kind not in KERNEL_TYPES:
        raise ParseError(f"malformed kernel spec {text!r}; expected one of "
                         + ", ".join(f"{k}:<param>" for k in KERNEL_TYPES))
    try:
        value = float(arg) if kind == "gaussian" else int(arg)
    except ValueError:
        raise ParseError(f"bad kernel parameter {arg!r}") from None
    return kind, value


def parse_alphas(text: Optional[str]) -> list[float]:
    """``a:b:log:n``, ``a:b:lin:n``, a comma list, or a single value."""
    text = (text or "").strip()
    if not text:
        raise ParameterError("empty alpha list")
    parts = text.split(":")
    try:
        if len(parts) == 4:
            lo, hi, kind, n = float(parts[0]), float(parts[1]), parts[2], int(parts[3])
            if n < 1:
                raise ParameterError("alpha grid needs at least one point")
            if kind == "log":
                return np.logspace(math.log10(lo), math.log10(hi), n).tolist()
            if kind == "lin":
                return np.linspace(lo, hi, n).tolist()
            raise ParseError(f"unknown grid kind {kind!r}")
        if len(parts) == 1:
            return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        pass
    raise ParseError(f"malformed alpha grid {text!r}")


def _ball(cfg: RunConfig):
    group = parse_group(cfg.group)
    if cfg.radius is None and group.is_finite:
        return full_ball(group)
    return ball_enumerate(group, DEFAULT_RADIUS if cfg.radius is None else cfg.radius)


def _embedding(cfg: RunConfig, group):
    return make_embedding(cfg.embedding, group) if cfg.embedding else default_embedding(group)


def _kernel(cfg: RunConfig, ball) -> Kernel:
    if cfg.kernel is None:
        raise ParameterError("--kernel is required")
    kind, value = parse_kernel_spec(cfg.kernel)
    if kind == "ball-overlap":
        return ball_overlap_kernel(ball, int(value))
    if kind == "tree-ray":
        return tree_ray_kernel(ball, int(value))
    if kind == "gaussian":
        return gaussian_kernel(ball, _embedding(cfg, ball.group), value)
    if cfg.seed is None:
        raise ParameterError("gram-random kernels need --seed")
    return gram_random_kernel(ball, int(value), cfg.seed)


def _epsilon(cfg: RunConfig) -> float:
    if cfg.epsilon is None:
        raise ParameterError("--epsilon is required")
    return cfg.epsilon


def _out(cfg: RunConfig, name: str) -> Path:
    return Path(cfg.out_dir) / name


def cmd_ball(cfg: RunConfig) -> int:
    ball = _ball(cfg)
    data = ser.ball_to_json(ball)
    data["sphere_sizes"] = sphere_sizes(ball.group, ball.radius)
    path = ser.write_json(_out(cfg, "ball.json"), data)
    print(f"{ball.group.spec()} radius {ball.radius}: {len(ball)} elements -> {path}")
    return EXIT_OK


def cmd_kernel(cfg: RunConfig) -> int:
    ball = _ball(cfg)
    kernel = _kernel(cfg, ball)
    psd = psd_check(kernel, cfg.tol_psd)
    path = ser.write_json(_out(cfg, "kernel.json"), ser.kernel_to_json(kernel))
    verdict = "PASS" if psd.passed else "FAIL"
    print(f"{kernel.provenance} on {ball.group.spec()}: min eigenvalue {psd.min_eigenvalue:.3e} "
          f"[{verdict}] -> {path}")
    return EXIT_OK if psd.passed else EXIT_FAIL


def cmd_verify(cfg: RunConfig) -> int:
    ball = _ball(cfg)
    kernel = _kernel(cfg, ball)
    eps = _epsilon(cfg)
    space = build_T(kernel, eps, cfg.tol_psd)
    S = kernel.support if cfg.S is None else cfg.S
    target = lemma_bound(eps) if cfg.target is None else cfg.target
    coeffs = coefficients(space, cfg.window)
    forward = verify_forward(coeffs, target, S)
    converse = verify_converse(coeffs, 2 * eps if cfg.target is None else 2 * target, S, cfg.tol_psd)
    ser.write_json(_out(cfg, "certificate_forward.json"), ser.certificate_to_json(forward))
    ser.write_json(_out(cfg, "certificate_converse.json"), ser.certificate_to_json(converse))
    for cert in (forward, converse):
        print(f"{cert.direction:8s} eps'={cert.epsilon_measured:.6g} target={cert.epsilon_target:.6g} "
              f"S={cert.S_declared:g} {'PASS' if cert.passed else 'FAIL'}")
    return EXIT_OK if forward.passed and converse.passed else EXIT_FAIL


def cmd_rep(cfg: RunConfig) -> int:
    ball = _ball(cfg)
    kernel = _kernel(cfg, ball)
    space = build_T(kernel, _epsilon(cfg), cfg.tol_psd)
    lam, top = spectral_data(space)
    bounds = norm_bounds(space)
    group = ball.group
    exact = space.mode == EXACT
    per_gen = {group.format_element(s): rep_norm(space, s, estimate=not exact)
               for s in group.generators()}
    data = {
        "schema": ser.REP_SCHEMA,
        "group": group.spec(),
        "kernel_provenance": kernel.provenance,
        "kernel_parameters": kernel.params,
        "epsilon": space.epsilon,
        "lambda": lam,
        "opnorm": top,
        "bound_sqrt": bounds[0],
        "bound_ratio": bounds[1],
        "generator_rep_norms": per_gen,
        "generator_norm_kind": "certified" if exact else "lower_bound_estimate",
        "sup_norm": sup_rep_norm(space) if exact else None,
        "infimum_norm": rep_norm_infimum(space) if exact else None,
        "adjoint_residual_max": max(adjoint_residual(space, s, seed=cfg.seed or 0)
                                    for s in group.generators()) if exact else None,
        "mode": space.mode,
    }
    path = ser.write_json(_out(cfg, "representation.json"), data)
    print(f"lambda={lam:.6g} opnorm={top:.6g} mode={space.mode} -> {path}")
    return EXIT_OK


def cmd_path(cfg: RunConfig) -> int:
    alphas = parse_alphas(cfg.alphas)
    ball = _ball(cfg)
    emb = _embedding(cfg, ball.group)
    points = path_sweep(ball, emb, alphas, cfg.window, cfg.tol_psd)
    rows = [[p.alpha, p.m, p.normalizer, p.max_gap_near, p.max_offdiag, p.space.lam, p.space.opnorm]
            for p in points]
    header = ["alpha", "m", "normalizer", "max_abs_1_minus_c_d1", "max_abs_c_offdiag",
              "lambda", "opnorm"]
    ser.write_atomic(_out(cfg, "path.csv"), ser.csv_text(header, rows))

    reports = [schur_row_sums(ball.group, emb, a, cfg.schur_radius) for a in alphas]
    first = reports[0]
    if first.threshold:
        flag = f"divergent below ln {2 * ball.group.k - 1}"
    elif all(r.convergent for r in reports):
        flag = "convergent"
    else:
        flag = "divergent"
    data = {
        "schema": ser.SCHUR_SCHEMA,
        "group": first.group,
        "embedding": first.embedding,
        "radius": first.radius,
        "threshold": first.threshold,
        "compression_hypothesis": first.compression_hypothesis,
        "flag": flag,
        "entries": [{
            "alpha": r.alpha,
            "truncated": r.truncated,
            "enumerated_truncated": r.enumerated_sums[-1] if r.enumerated_sums else None,
            "closed_form": r.closed_form,
            "convergent": r.convergent,
            "tail_bound": r.tail_bound,
            "method": r.method,
        } for r in reports],
    }
    ser.write_json(_out(cfg, "schur.json"), data)
    print(f"{len(points)} path points, schur: {flag}")
    return EXIT_OK


def cmd_cocycle(cfg: RunConfig) -> int:
    ball = _ball(cfg)
    kernel = _kernel(cfg, ball)
    if cfg.epsilons:
        eps = [float(x) for x in cfg.epsilons.split(",")]
    else:
        eps = default_epsilons()
    model = cocycle_build([(e, build_T(kernel, e, cfg.tol_psd)) for e in eps])
    exact = all(s.mode == EXACT for s in model.spaces)
    profile = norm_growth_profile(model)
    data = {
        "schema": ser.COCYCLE_SCHEMA,
        "group": ball.group.spec(),
        "kernel_provenance": kernel.provenance,
        "summands": [{"epsilon": e, "rep_norm_sup": s, "rep_norm_infimum": i}
                     for e, s, i in zip(model.epsilons, model.rep_norm_sup, model.rep_norm_inf)],
        "C_measured": model.C_measured,
        "growth_profile": profile,
        "min_monotone": min_is_monotone(profile),
        "identity_residual_max": cocycle_identity_check(model, seed=cfg.seed or 0) if exact else None,
        "properness": "not certified",
    }
    path = ser.write_json(_out(cfg, "cocycle.json"), data)
    print(f"{len(eps)} summands, C={model.C_measured} -> {path}")
    return EXIT_OK


def _render(path: str, data: dict) -> tuple[list[str], Optional[bool]]:
    schema = data["schema"]
    lines = [f"== {path} ({schema})"]
    verdict = None

    def row(key, value):
        if isinstance(value, float):
            value = f"{value:.10g}"
        lines.append(f"  {key:<24} {value}")

    if schema == ser.CERTIFICATE_SCHEMA:
        for key in ("direction", "group", "window", "epsilon_target", "epsilon_measured",
                    "S_declared", "S_measured"):
            if key not in data:
                raise SchemaError(f"{path}: missing field {key!r}")
            row(key, data[key])
        for name, ok in data.get("verdicts", {}).items():
            row(f"verdict.{name}", "pass" if ok else "fail")
        for w in data.get("witnesses", [])[:5]:
            row("witness", f"{w.get('condition')} g={w.get('g')} h={w.get('h')} value={w.get('value')}")
        if "pass" not in data:
            raise SchemaError(f"{path}: missing field 'pass'")
        verdict = bool(data["pass"])
        lines.append("  PASS" if verdict else "  FAIL")
    elif schema == ser.KERNEL_SCHEMA:
        for key in ("group", "radius", "provenance", "parameters", "S", "seed", "size"):
            row(key, data.get(key))
    elif schema == ser.BALL_SCHEMA:
        for key in ("group", "radius", "size", "sphere_sizes"):
            row(key, data.get(key))
    elif schema == ser.REP_SCHEMA:
        for key in ("group", "kernel_provenance", "epsilon", "lambda", "opnorm", "bound_sqrt",
                    "sup_norm", "infimum_norm", "adjoint_residual_max", "mode"):
            row(key, data.get(key))
        for gen, val in data.get("generator_rep_norms", {}).items():
            row(f"norm[{gen}]", val)
    elif schema == ser.SCHUR_SCHEMA:
        for key in ("group", "embedding", "threshold", "compression_hypothesis", "flag"):
            row(key, data.get(key))
        for e in data.get("entries", []):
            row(f"alpha={e['alpha']:.6g}", f"sum={e['truncated']:.10g} convergent={e['convergent']}")
    elif schema == ser.COCYCLE_SCHEMA:
        for key in ("group", "C_measured", "identity_residual_max", "min_monotone", "properness"):
            row(key, data.get(key))
        for p in data.get("growth_profile", []):
            row(f"|g|={p['length']}", f"min={p['min']:.6g} mean={p['mean']:.6g} max={p['max']:.6g}")
    return lines, verdict


def cmd_report(paths: list[str]) -> int:
    if not paths:
        raise ParameterError("report needs at least one file")
    out, passed, failed = [], 0, 0
    for p in paths:
        lines, verdict = _render(p, ser.load_json(p))
        out.extend(lines)
        if verdict is True:
            passed += 1
        elif verdict is False:
            failed += 1
    if passed + failed > 1:
        out.append(f"certificates: {passed} pass, {failed} fail")
    print("\n".join(out))
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_ERROR)


def _global_flags(p: argparse.ArgumentParser, default):
    p.add_argument("--seed", type=int, default=default(None))
    p.add_argument("--out-dir", default=default("."))
    p.add_argument("--tol-psd", type=float, default=default(1e-8))
    p.add_argument("--window", type=int, default=default(None))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ubrep", description=__doc__)
    _global_flags(parser, lambda v: v)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _Parser(add_help=False)
    _global_flags(common, lambda v: argparse.SUPPRESS)

    def add(name, help_):
        p = sub.add_parser(name, help=help_, parents=[common])
        if name != "report":
            p.add_argument("--group", required=True)
            p.add_argument("--radius", type=int)
        return p

    add("ball", "enumerate a ball and its sphere sizes")
    for name, help_ in (("kernel", "build a kernel and write it"),
                        ("verify", "forward and converse certificates"),
                        ("rep", "representation norms on H_T"),
                        ("cocycle", "direct-sum cocycle report")):
        p = add(name, help_)
        p.add_argument("--kernel", required=True)
        p.add_argument("--embedding")
        if name != "kernel":
            p.add_argument("--epsilon", type=float, required=(name != "cocycle"))
        if name == "verify":
            p.add_argument("--S", type=float)
            p.add_argument("--target", type=float,
                           help="neighbour target for the forward certificate (default eps + eps/(1+eps))")
        if name == "cocycle":
            p.add_argument("--epsilons", help="comma list, strictly decreasing (default 2^-k, k=1..8)")
    p = add("path", "sweep the Gaussian family and write Schur row sums")
    p.add_argument("--alphas", required=True)
    p.add_argument("--embedding")
    p.add_argument("--schur-radius", type=int, default=30)
    p = add("report", "render JSON artifacts as text")
    p.add_argument("files", nargs="*")
    return parser


def config_from_args(args) -> RunConfig:
    values = {f.name: getattr(args, f.name) for f in fields(RunConfig) if hasattr(args, f.name)}
    return RunConfig(**values)


COMMANDS = {"ball": cmd_ball, "kernel": cmd_kernel, "verify": cmd_verify, "rep": cmd_rep,
            "path": cmd_path, "cocycle": cmd_cocycle}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "report":
            return cmd_report(args.files)
        return COMMANDS[args.command](config_from_args(args))
    except (UbrepError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
