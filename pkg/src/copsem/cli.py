"""Command line front end. Exit code 0 only if every asserted inequality held."""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys

from . import bounds as bounds_mod
from .bounds import ConcentrationParams, DecoderModel, EncoderModel
from .harness import (
    ExperimentConfig,
    run_axiom_table,
    run_channel_sweep,
    run_concentration,
    run_rd_curve,
    run_sla_pipeline,
    run_sla_surface,
)
from .image_io import read_pgm
from .metrics import d_pc, format_float, psnr, report_csv_header, report_csv_row, ssim
from .rank_copula import CopulaFamily, Displacement, extract_family


def _parse_delta(text: str) -> Displacement:
    try:
        dx, dy = text.split(",")
        return Displacement(int(dx), int(dy))
    except Exception:
        raise argparse.ArgumentTypeError(f"expected dx,dy got {text!r}") from None


def _common_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON or key=value experiment config file")
    p.add_argument("--bins", type=int, default=None)
    p.add_argument(
        "--delta",
        type=_parse_delta,
        action="append",
        default=None,
        help="displacement dx,dy; repeatable",
    )
    p.add_argument("--stride", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="output directory for CSVs")
    p.add_argument("--corpus", nargs="*", default=None, help="PGM files (default: builtin synthetics)")
    p.add_argument("--trials", type=int, default=None)


def _build_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if args.config:
        cfg = ExperimentConfig.from_file(args.config)
    updates = {}
    if args.bins is not None:
        updates["bins"] = args.bins
    if args.delta:
        updates["deltas"] = tuple(args.delta)
    if args.stride is not None:
        updates["stride"] = args.stride
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.out is not None:
        updates["out_dir"] = args.out
    if args.corpus is not None:
        updates["corpus"] = tuple(args.corpus)
    if args.trials is not None:
        updates["trials"] = args.trials
    if getattr(args, "ber", None):
        updates["bers"] = tuple(args.ber)
    if getattr(args, "alphas", None):
        updates["alphas"] = tuple(args.alphas)
    if updates:
        from dataclasses import replace

        cfg = replace(cfg, **updates)
    return cfg


def _load_family(path: str, cfg: ExperimentConfig):
    if path.endswith(".json"):
        with open(path, "r", encoding="utf-8") as fh:
            return CopulaFamily.from_json(fh.read()), None
    with open(path, "rb") as fh:
        img = read_pgm(fh.read())
    return extract_family(img, cfg.deltas, cfg.bins, cfg.stride), img


def _cmd_extract(args) -> int:
    cfg = _build_config(args)
    os.makedirs(cfg.out_dir, exist_ok=True)
    for path in args.images:
        with open(path, "rb") as fh:
            img = read_pgm(fh.read())
        fam = extract_family(img, cfg.deltas, cfg.bins, cfg.stride)
        stem = os.path.splitext(os.path.basename(path))[0]
        out_path = os.path.join(cfg.out_dir, f"{stem}.family.json")
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(fam.to_json())
        print(out_path)
    return 0


def _cmd_dpc(args) -> int:
    cfg = _build_config(args)
    fam_a, img_a = _load_family(args.a, cfg)
    fam_b, img_b = _load_family(args.b, cfg)
    report = d_pc(fam_a, fam_b)
    p = s = None
    if img_a is not None and img_b is not None:
        p, s = psnr(img_a, img_b), ssim(img_a, img_b)
    buf = io.StringIO()
    buf.write("#schema=copsem.distortion_report.v1\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report_csv_header(fam_a.deltas))
    writer.writerow(report_csv_row(args.a, args.b, report, p, s))
    sys.stdout.write(buf.getvalue())
    return 0


def _finish(name: str, result) -> int:
    print(f"{name}: ok={str(result.ok).lower()} rows={len(result.rows)} csv={result.csv_path}")
    for w in getattr(result, "warnings", ()):  # noqa: B007
        print(f"warning: {w}")
    return 0 if result.ok else 1


def _cmd_axioms(args) -> int:
    cfg = _build_config(args)
    return _finish("axioms", run_axiom_table(cfg, out_dir=cfg.out_dir))


def _cmd_rd(args) -> int:
    cfg = _build_config(args)
    return _finish("rd", run_rd_curve(cfg, out_dir=cfg.out_dir))


def _cmd_concentration(args) -> int:
    cfg = _build_config(args)
    params = ConcentrationParams(args.cbins, args.cdeltas, args.t, args.eta)
    result = run_concentration(
        cfg, params, trials=args.ctrials, control_n=args.control_n, out_dir=cfg.out_dir
    )
    return _finish("concentration", result)


def _cmd_channel(args) -> int:
    cfg = _build_config(args)
    result = run_channel_sweep(cfg, alpha=args.alpha, out_dir=cfg.out_dir)
    print(
        f"k_fit={format_float(result.k_fit)} k_lin={format_float(result.k_lin)} "
        f"r_squared={format_float(result.r_squared)} "
        f"doubling_ratio={format_float(result.doubling_ratio)}"
    )
    return _finish("channel", result)


def _cmd_sla_pipeline(args) -> int:
    cfg = _build_config(args)
    dec = DecoderModel(args.rho, args.delta0)
    t_grid = tuple(args.T) if args.T else (0.0, 5.0, 10.0, 20.0, 40.0)
    result = run_sla_pipeline(cfg, alpha=args.alpha, dec=dec, t_grid=t_grid, out_dir=cfg.out_dir)
    return _finish("sla-pipeline", result)


def _cmd_sla_surface(args) -> int:
    cfg = _build_config(args)
    dec = DecoderModel(args.rho, args.delta0)
    enc = None
    if args.c2 is not None and args.d is not None:
        enc = EncoderModel(args.c2, args.d)
    result = run_sla_surface(
        cfg, eps=args.eps, eps_est=args.eps_est, dec=dec, enc=enc, out_dir=cfg.out_dir
    )
    print(
        f"enc_c2={format_float(result.enc.c2)} enc_d={result.enc.d} "
        f"max_roundtrip_err={format_float(result.max_roundtrip_err)} "
        f"operating_r_min={'' if result.operating_r_min is None else format_float(result.operating_r_min)}"
    )
    return _finish("sla-surface", result)


def _cmd_bounds(args) -> int:
    cfg = _build_config(args)
    params = ConcentrationParams(args.cbins, args.cdeltas, args.t, args.eta)
    n_deltas = len(cfg.deltas)
    dec = DecoderModel(args.rho, args.delta0)
    enc = EncoderModel(args.c2, args.d if args.d is not None else n_deltas * (cfg.bins**2 - 1))
    n_eff = bounds_mod.sample_complexity(params)
    lines = [
        ("n_eff", str(n_eff)),
        ("eps_est_from_n_eff", format_float(bounds_mod.est_distortion_from_samples(n_eff, params))),
        (
            "rate_achievable_bits",
            format_float(bounds_mod.rate_achievability(n_deltas, cfg.bins, args.alpha)),
        ),
        ("enc_distortion_bound", format_float(bounds_mod.enc_distortion_bound(cfg.bins, args.alpha))),
        (
            "rate_converse_bits",
            format_float(bounds_mod.rate_converse(n_deltas, cfg.bins, args.eps_enc, args.c)),
        ),
    ]
    r = bounds_mod.r_min(args.T, args.eps, args.eps_est, dec, enc)
    t = bounds_mod.t_min(args.R, args.eps, args.eps_est, dec, enc)
    lines.append(("r_min_bits", "infeasible" if r is None else format_float(r)))
    lines.append(("t_min", "infeasible" if t is None else format_float(t)))
    for key, val in lines:
        print(f"{key}={val}")
    return 0


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(
        prog="copsem",
        description="rank-copula structural semantics toolkit",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="image -> copula family JSON")
    _common_flags(p)
    p.add_argument("images", nargs="+")
    p.set_defaults(fn=_cmd_extract)

    p = sub.add_parser("dpc", help="distortion report for two images or families")
    _common_flags(p)
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(fn=_cmd_dpc)

    p = sub.add_parser("axioms", help="invariance/severity table over a corpus")
    _common_flags(p)
    p.set_defaults(fn=_cmd_axioms)

    p = sub.add_parser("rd", help="rate-distortion sweep over a corpus")
    _common_flags(p)
    p.add_argument("--alphas", type=float, nargs="*", default=None)
    p.set_defaults(fn=_cmd_rd)

    p = sub.add_parser("concentration", help="estimation sample-size experiment")
    _common_flags(p)
    p.add_argument("--t", type=float, default=0.1)
    p.add_argument("--eta", type=float, default=0.05)
    p.add_argument("--cbins", type=int, default=4)
    p.add_argument("--cdeltas", type=int, default=2)
    p.add_argument("--ctrials", type=int, default=500)
    p.add_argument("--control-n", type=int, default=10)
    p.set_defaults(fn=_cmd_concentration)

    p = sub.add_parser("channel", help="bit-error-rate sweep")
    _common_flags(p)
    p.add_argument("--alpha", type=float, default=1 / 64)
    p.add_argument("--ber", type=float, action="append", default=None)
    p.set_defaults(fn=_cmd_channel)

    p = sub.add_parser("sla-pipeline", help="end-to-end stage composition check")
    _common_flags(p)
    p.add_argument("--alpha", type=float, default=1 / 64)
    p.add_argument("--rho", type=float, default=0.9)
    p.add_argument("--delta0", type=float, default=0.1)
    p.add_argument("--T", type=float, action="append", default=None)
    p.set_defaults(fn=_cmd_sla_pipeline)

    p = sub.add_parser("sla-surface", help="design surface eps(R, T) + inversions")
    _common_flags(p)
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--eps-est", type=float, default=0.01)
    p.add_argument("--rho", type=float, default=0.9)
    p.add_argument("--delta0", type=float, default=0.1)
    p.add_argument("--c2", type=float, default=None)
    p.add_argument("--d", type=int, default=None)
    p.set_defaults(fn=_cmd_sla_surface)

    p = sub.add_parser("bounds", help="closed-form calculators, name=value output")
    _common_flags(p)
    p.add_argument("--t", type=float, default=0.1)
    p.add_argument("--eta", type=float, default=0.05)
    p.add_argument("--cbins", type=int, default=4)
    p.add_argument("--cdeltas", type=int, default=2)
    p.add_argument("--alpha", type=float, default=1 / 64)
    p.add_argument("--eps-enc", type=float, default=0.5)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--eps-est", type=float, default=0.01)
    p.add_argument("--rho", type=float, default=0.9)
    p.add_argument("--delta0", type=float, default=0.1)
    p.add_argument("--T", type=float, default=20.0)
    p.add_argument("--R", type=float, default=731.0)
    p.add_argument("--c2", type=float, default=0.20814)
    p.add_argument("--d", type=int, default=None)
    p.set_defaults(fn=_cmd_bounds)

    args = ap.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
