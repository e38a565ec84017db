"""Command-line surface: hopf | simulate | sweep | lyapunov | portrait.

Every option can also come from a flat key=value config file (--config);
command-line flags win. Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import chaos, output
from .exceptions import FjerkError
from .hopf import hopf_commensurate, hopf_incommensurate
from .model import JerkParams, OrderSpec
from .solver import SolveConfig, integrate

_DEFAULTS = {
    "h": "0.005",
    "t_end": "300",
    "x0": "0,0,0",
    "memory": "full",
    "plane": "xy",
    "renorm_every": "200",
    "transient": "0.3",
}


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings of one CLI invocation."""

    params: JerkParams
    orders: OrderSpec
    orders_text: str
    solve: SolveConfig
    out_dir: str | None
    transient: float
    renorm_every: int
    extras: dict


class UsageError(Exception):
    pass


def _parse_orders(alpha: str | None, alphas: str | None) -> tuple[OrderSpec, str]:
    if (alpha is None) == (alphas is None):
        raise UsageError("exactly one of --alpha or --alphas is required")
    if alpha is not None:
        try:
            return OrderSpec.commensurate(float(alpha)), alpha
        except ValueError as err:
            raise UsageError(f"--alpha: {err}") from err
    parts = alphas.split(",")
    if len(parts) != 3:
        raise UsageError("--alphas needs three comma-separated rationals like 1,99/100,1")
    try:
        return OrderSpec.incommensurate(*parts), alphas
    except (ValueError, ZeroDivisionError, FjerkError) as err:
        raise UsageError(f"--alphas: {err}") from err


def _parse_memory(text: str) -> float | None:
    if text == "full":
        return None
    if text.startswith("short:"):
        try:
            return float(text.split(":", 1)[1])
        except ValueError as err:
            raise UsageError(f"--memory: bad window in {text!r}") from err
    raise UsageError(f"--memory must be 'full' or 'short:W', got {text!r}")


def _parse_x0(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError("--x0 needs three comma-separated numbers")
    try:
        return tuple(float(v) for v in parts)
    except ValueError as err:
        raise UsageError(f"--x0: {err}") from err


def _read_config(path: str) -> dict[str, str]:
    cfg = {}
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, _, value = line.partition("=")
                cfg[key.strip().replace("-", "_")] = value.strip()
    except OSError as err:
        raise UsageError(f"--config: cannot read {path}: {err}") from err
    return cfg


def _get(args, cfg: dict[str, str], key: str, required: bool = False) -> str | None:
    value = getattr(args, key, None)
    if value is None:
        value = cfg.get(key)
    if value is None:
        value = _DEFAULTS.get(key)
    if value is None and required:
        raise UsageError(f"missing required option --{key.replace('_', '-')}")
    return value


def _resolve(args) -> RunConfig:
    cfg = _read_config(args.config) if getattr(args, "config", None) else {}

    def need_float(key):
        text = _get(args, cfg, key, required=True)
        try:
            return float(text)
        except ValueError as err:
            raise UsageError(f"--{key.replace('_', '-')}: not a number: {text!r}") from err

    orders, orders_text = _parse_orders(
        _get(args, cfg, "alpha"), _get(args, cfg, "alphas")
    )
    a = need_float("a")
    b = need_float("b")
    eps = need_float("eps") if hasattr(args, "eps") or "eps" in cfg else 0.0
    h = need_float("h")
    t_end = need_float("t_end")
    x0 = _parse_x0(_get(args, cfg, "x0"))
    memory = _parse_memory(_get(args, cfg, "memory"))
    transient = need_float("transient")
    renorm_every = int(_get(args, cfg, "renorm_every"))
    try:
        solve = SolveConfig(h=h, t_end=t_end, initial_state=x0, memory_window=memory)
    except FjerkError as err:
        raise UsageError(str(err)) from err
    out_dir = _get(args, cfg, "out")
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        if not os.access(out_dir, os.W_OK):
            raise UsageError(f"--out: directory {out_dir!r} is not writable")
    return RunConfig(
        JerkParams(a, b, eps), orders, orders_text, solve, out_dir, transient,
        renorm_every, cfg,
    )


def _cmd_hopf(args) -> int:
    rc = _resolve(args)
    branch = args.branch or "plus"
    if rc.orders.is_commensurate:
        sol = hopf_commensurate(rc.params.a, rc.params.b, rc.orders.alpha, branch)
    else:
        sol = hopf_incommensurate(rc.params.a, rc.params.b, rc.orders, branch)
    print(output.hopf_key_value_block(sol, rc.orders_text))
    if rc.out_dir:
        output.write_hopf_csv(sol, os.path.join(rc.out_dir, "hopf.csv"), rc.orders_text)
    return 0


def _cmd_simulate(args) -> int:
    rc = _resolve(args)
    traj = integrate(rc.params, rc.orders, rc.solve)
    path = os.path.join(rc.out_dir, "trajectory.csv")
    output.write_trajectory_csv(traj, path)
    print(
        f"simulate: eps={rc.params.epsilon:g} orders={rc.orders_text} "
        f"steps={rc.solve.n_steps} x_range=[{traj.x.min():.6g},{traj.x.max():.6g}] -> {path}"
    )
    return 0


def _cmd_sweep(args) -> int:
    rc = _resolve(args)
    lo = float(_get(args, rc.extras, "eps_min", required=True))
    hi = float(_get(args, rc.extras, "eps_max", required=True))
    n = int(_get(args, rc.extras, "n", required=True))
    result = chaos.sweep_bifurcation(
        rc.params,
        rc.orders,
        (lo, hi),
        n,
        rc.solve,
        with_lyapunov=args.lyapunov,
        transient_fraction=rc.transient,
        renorm_every=rc.renorm_every,
    )
    sweep_path = os.path.join(rc.out_dir, "sweep.csv")
    output.write_sweep_csv(result, sweep_path)
    written = [sweep_path]
    if args.lyapunov:
        ly_path = os.path.join(rc.out_dir, "lyapunov.csv")
        output.write_lyapunov_csv(
            [(pt.epsilon, pt.spectrum) for pt in result.points], ly_path
        )
        written.append(ly_path)
    if args.svg:
        scatter = [
            (pt.epsilon, v)
            for pt in result.points
            if not pt.diverged
            for v in np.concatenate([pt.maxima, pt.minima])
        ]
        svg_path = os.path.join(rc.out_dir, "bifurcation.svg")
        output.render_svg(
            scatter,
            "bifurcation",
            svg_path,
            title=f"bifurcation a={rc.params.a:g} b={rc.params.b:g} orders={rc.orders_text}",
        )
        written.append(svg_path)
        if args.lyapunov:
            lines = [
                (pt.epsilon, pt.spectrum.exponents)
                for pt in result.points
                if pt.spectrum is not None
            ]
            if lines:
                ly_svg = os.path.join(rc.out_dir, "lyapunov.svg")
                output.render_svg(
                    lines,
                    "lyapunov",
                    ly_svg,
                    title=f"lyapunov exponents a={rc.params.a:g} b={rc.params.b:g} "
                    f"orders={rc.orders_text}",
                )
                written.append(ly_svg)
    n_div = sum(pt.diverged for pt in result.points)
    print(
        f"sweep: eps=[{lo:g},{hi:g}] n={n} orders={rc.orders_text} "
        f"divergent={n_div} -> {', '.join(written)}"
    )
    return 0


def _cmd_lyapunov(args) -> int:
    rc = _resolve(args)
    spec = chaos.lyapunov_spectrum(
        rc.params, rc.orders, rc.solve, rc.renorm_every, rc.transient
    )
    l1, l2, l3 = spec.exponents
    if rc.out_dir:
        path = os.path.join(rc.out_dir, "lyapunov.csv")
        output.write_lyapunov_csv([(rc.params.epsilon, spec)], path)
    print(
        f"lyapunov: eps={rc.params.epsilon:g} orders={rc.orders_text} "
        f"lambda=({l1:.6g},{l2:.6g},{l3:.6g}) converged={str(spec.converged).lower()}"
    )
    return 0


def _cmd_portrait(args) -> int:
    rc = _resolve(args)
    plane = _get(args, rc.extras, "plane")
    traj = integrate(rc.params, rc.orders, rc.solve)
    path = os.path.join(rc.out_dir, f"portrait_{plane}.svg")
    output.render_svg(
        traj,
        "portrait",
        path,
        title=f"phase portrait eps={rc.params.epsilon:g} orders={rc.orders_text}",
        plane=plane,
    )
    print(f"portrait: eps={rc.params.epsilon:g} plane={plane} -> {path}")
    return 0


def _add_common(sub, out_required: bool):
    sub.add_argument("--a", dest="a")
    sub.add_argument("--b", dest="b")
    sub.add_argument("--alpha")
    sub.add_argument("--alphas")
    sub.add_argument("--h", dest="h")
    sub.add_argument("--t-end", dest="t_end")
    sub.add_argument("--x0")
    sub.add_argument("--memory")
    sub.add_argument("--transient")
    sub.add_argument("--renorm-every", dest="renorm_every")
    sub.add_argument("--config")
    sub.add_argument("--out", dest="out", required=out_required)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fjerk",
        description="Fractional-order quadratic jerk system toolkit",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("hopf", help="Hopf critical pair (gamma_H, epsilon_H)")
    _add_common(p, out_required=False)
    p.add_argument("--branch", choices=["plus", "minus"], default="plus")
    p.set_defaults(func=_cmd_hopf)

    p = subs.add_parser("simulate", help="integrate one trajectory to CSV")
    _add_common(p, out_required=True)
    p.add_argument("--eps", dest="eps")
    p.set_defaults(func=_cmd_simulate)

    p = subs.add_parser("sweep", help="bifurcation sweep over epsilon")
    _add_common(p, out_required=True)
    p.add_argument("--eps-min", dest="eps_min")
    p.add_argument("--eps-max", dest="eps_max")
    p.add_argument("--n", dest="n")
    p.add_argument("--lyapunov", action="store_true")
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=_cmd_sweep)

    p = subs.add_parser("lyapunov", help="Lyapunov spectrum at one epsilon")
    _add_common(p, out_required=False)
    p.add_argument("--eps", dest="eps")
    p.set_defaults(func=_cmd_lyapunov)

    p = subs.add_parser("portrait", help="2-D phase portrait SVG")
    _add_common(p, out_required=True)
    p.add_argument("--eps", dest="eps")
    p.add_argument("--plane", choices=["xy", "xz", "yz"])
    p.set_defaults(func=_cmd_portrait)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return err.code if isinstance(err.code, int) else 2
    try:
        return args.func(args)
    except UsageError as err:
        print(f"fjerk: usage error: {err}", file=sys.stderr)
        return 2
    except FjerkError as err:
        print(f"fjerk: {type(err).__name__}: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
