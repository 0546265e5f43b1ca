"""Command line front end.

Exit codes: 0 on success, 1 when a verification check fails, 2 for usage
or configuration problems (argparse uses 2 natively).
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .elekes import (
    DEFAULT_CONSTANT_FLOOR,
    build_elekes,
    eq1_report,
    verify_tube_richness,
)
from .experiments import (
    JITTER,
    ExperimentConfig,
    admissible_jittered,
    load_config,
    render_csv,
    render_summary,
    run_apgp,
    run_richness_diagnostic,
    run_sumprod_sweep,
    write_report,
)
from .geometry import serialize_incidence_report
from .sets import (
    Scale,
    covering_number,
    load_values,
    make_ap,
    make_gp,
    make_jittered,
    save_values,
    snap_to_grid,
)


def _print_values(obj) -> None:
    delta = getattr(obj, "on_grid_delta", None)
    print(f"# n={len(obj.values)} delta={0.0 if delta is None else delta!r}")
    for v in obj.values:
        print(repr(v))


def _snapped_family(family: str, n: int, alpha: float, seed: int):
    """Grid-certified input set plus its scale, as the tube builder wants."""
    scale = Scale.from_alpha(n, alpha)
    if family == "ap":
        raw = make_ap(n)
    elif family == "jittered":
        raw = admissible_jittered(n, JITTER, seed, scale.delta)
    else:
        raise ValueError(f"unknown family {family!r}")
    return snap_to_grid(raw, scale.delta), scale


def cmd_gen(args) -> int:
    if args.family == "ap":
        obj = make_ap(args.n)
    elif args.family == "jittered":
        if args.alpha is not None:
            obj = admissible_jittered(
                args.n, args.jitter, args.seed, float(args.n) ** (-args.alpha)
            )
        else:
            obj = make_jittered(args.n, args.jitter, args.seed)
    else:
        q = args.q if args.q is not None else 2.0 ** (1.0 / args.n)
        obj = make_gp(args.n, q)
    if args.alpha is not None:
        if args.family == "gp":
            raise ValueError("grid snapping applies to separated sets, not gp")
        obj = snap_to_grid(obj, float(args.n) ** (-args.alpha))
    if args.out:
        save_values(args.out, obj)
    else:
        _print_values(obj)
    return 0


def cmd_cover(args) -> int:
    values, _ = load_values(args.file)
    print(covering_number(values, args.delta))
    return 0


def cmd_incidence(args) -> int:
    family, scale = _snapped_family(args.family, args.n, args.alpha, args.seed)
    system = build_elekes(family, scale)
    sys.stdout.write(
        serialize_incidence_report(system.incidence_report(), scale.delta, system.w)
    )
    return 0


def cmd_elekes(args) -> int:
    family, scale = _snapped_family(args.family, args.n, args.alpha, args.seed)
    system = build_elekes(family, scale)
    min_rich = verify_tube_richness(system)
    rich_ok = min_rich >= args.n
    print(f"min_richness={min_rich}")
    print(f"richness>=n: {'PASS' if rich_ok else 'FAIL'}")
    report = eq1_report(system, constant_floor=args.constant_floor)
    sys.stdout.write(report.serialize())
    ok = rich_ok and report.p_n_pass and report.ball_bound_pass
    return 0 if ok else 1


def _config_with_overrides(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.alpha is not None:
        updates["alpha"] = args.alpha
    if args.n is not None:
        updates["n_list"] = tuple(int(p) for p in args.n.split(",") if p.strip())
    if args.out is not None:
        updates["output_path"] = args.out
    return dataclasses.replace(cfg, **updates) if updates else cfg


def _emit(result, out_path: str | None) -> None:
    if out_path:
        sys.stdout.write(write_report(result, out_path))
    else:
        sys.stdout.write(render_csv(result))
        sys.stdout.write(render_summary(result))


def cmd_sweep(args) -> int:
    cfg = _config_with_overrides(args)
    result = run_sumprod_sweep(cfg)
    _emit(result, cfg.output_path)
    ok = result.slope_pass and result.cover_exact_pass is not False
    return 0 if ok else 1


def cmd_apgp(args) -> int:
    cfg = _config_with_overrides(args)
    result = run_apgp(cfg)
    _emit(result, cfg.output_path)
    return 0 if result.slope_pass and result.proof_step_pass else 1


def cmd_richness(args) -> int:
    cfg = ExperimentConfig(
        family=args.family, n_list=(args.n,), alpha=args.alpha, seed=args.seed
    )
    rows = run_richness_diagnostic(cfg)
    print("r p_r cum_ge_r normalized above_threshold")
    for row in rows:
        print(
            f"{row.r} {row.p_r} {row.cum_ge_r} {row.normalized!r} "
            f"{'yes' if row.above_threshold else 'no'}"
        )
    cums = [row.cum_ge_r for row in rows]
    ok = all(a >= b for a, b in zip(cums, cums[1:]))
    print(f"cumulative_nonincreasing: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sumprod",
        description="Discretized sum-product experiments: set generators, "
        "covering numbers, tube/ball incidences, growth-exponent sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a point set")
    gen.add_argument("--family", choices=("ap", "jittered", "gp"), required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--jitter", type=float, default=JITTER)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--q", type=float, help="gp ratio (default 2**(1/n))")
    gen.add_argument(
        "--alpha", type=float, help="snap onto the n**-alpha grid before output"
    )
    gen.add_argument("--out", help="write here instead of stdout")
    gen.set_defaults(func=cmd_gen)

    cover = sub.add_parser("cover", help="covering number of a value file")
    cover.add_argument("--file", required=True)
    cover.add_argument("--delta", type=float, required=True)
    cover.set_defaults(func=cmd_cover)

    common = dict(family="ap", seed=0)
    for name, func, text in (
        ("incidence", cmd_incidence, "serialized tube/ball incidence report"),
        ("elekes", cmd_elekes, "tube richness and the counting-chain report"),
        ("richness", cmd_richness, "dyadic ball-richness decay table"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--alpha", type=float, required=True)
        p.add_argument("--family", choices=("ap", "jittered"), default=common["family"])
        p.add_argument("--seed", type=int, default=common["seed"])
        if name == "elekes":
            p.add_argument(
                "--constant-floor", type=float, default=DEFAULT_CONSTANT_FLOOR
            )
        p.set_defaults(func=func)

    for name, func, text in (
        ("sweep", cmd_sweep, "sum/product covering sweep over n"),
        ("apgp", cmd_apgp, "progression/geometric intersection counts"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True)
        p.add_argument("--out", help="override the config output_path")
        p.add_argument("--seed", type=int)
        p.add_argument("--alpha", type=float)
        p.add_argument("--n", help="override n_list, comma separated")
        p.set_defaults(func=func)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
