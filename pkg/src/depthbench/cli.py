"""depthbench command line interface.

Subcommands: eval (run the benchmark protocol over a manifest),
boundaries (export depth-boundary maps), patches (panorama patch
extraction), losses (diagnostic forward-loss computation on an image
pair) and rank (re-rank methods from a report).

Every flag can also come from a key-value config file (--config FILE,
lines of "name = value" using the long flag names); explicit flags win.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .geometry import (
    DepthMap,
    DisparityMap,
    Intrinsics,
    axis_angle_to_transform,
    synthesize_view,
)
from .losses.photometric import (
    PhotometricConfig,
    aggregate_reconstruction,
    photometric_loss,
    static_automask,
)
from .losses.regularizers import SmoothnessConfig, smoothness_loss
from .manifest import load_manifest
from .metrics.edge import extract_depth_boundaries, save_edge_pgm
from .metrics.image import AlignmentMode
from .panorama import Panorama, PatchSpec, generate_scene_patches
from .report import emit_report, load_report, rank_methods
from .runner import Protocol, default_jobs, run_evaluation


def _read_config(path):
    values = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'name = value'")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _resolve(args, name, default, cast=str):
    """CLI value if given, else config value, else the default."""
    cli_value = getattr(args, name.replace("-", "_"))
    if cli_value is not None:
        return cli_value
    config = getattr(args, "_config", {})
    if name in config:
        raw = config[name]
        if cast is bool:
            return raw.lower() in ("1", "true", "yes", "on")
        return cast(raw)
    return default


def _add_config_flag(parser):
    parser.add_argument("--config", help="key-value config file mirroring the flags")


def _load_config(args):
    args._config = _read_config(args.config) if args.config else {}


def _build_eval_parser(sub):
    p = sub.add_parser("eval", help="run the evaluation protocol over a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--align", default=None,
                   help="median | fixed:<scale> | none (default median)")
    p.add_argument("--max-depth", type=float, default=None)
    p.add_argument("--min-depth", type=float, default=None)
    p.add_argument("--suites", default=None,
                   help="comma list from image,pointcloud,edge")
    p.add_argument("--edge-transform", default=None, choices=["raw", "log", "inverse"])
    p.add_argument("--edge-sigma", type=float, default=None)
    p.add_argument("--edge-trunc", type=float, default=None)
    p.add_argument("--tau3d", type=float, default=None)
    p.add_argument("--legacy-sqrel", action="store_const", const=True, default=None)
    p.add_argument("--allow-partial", action="store_const", const=True, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--format", default=None, help="comma list from json,csv,markdown")
    p.add_argument("--jobs", type=int, default=None)
    _add_config_flag(p)
    return p


def _cmd_eval(args):
    _load_config(args)
    protocol = Protocol(
        align=AlignmentMode.parse(_resolve(args, "align", "median")),
        min_depth=_resolve(args, "min-depth", 1e-3, float),
        max_depth=_resolve(args, "max-depth", 100.0, float),
        suites=tuple(s.strip() for s in
                     _resolve(args, "suites", "image,pointcloud,edge").split(",") if s.strip()),
        edge_transform=_resolve(args, "edge-transform", "log"),
        edge_sigma=_resolve(args, "edge-sigma", 1.0, float),
        edge_trunc=_resolve(args, "edge-trunc", 10.0, float),
        tau3d=_resolve(args, "tau3d", 0.1, float),
        legacy_sqrel=_resolve(args, "legacy-sqrel", False, bool),
        allow_partial=_resolve(args, "allow-partial", False, bool),
        jobs=_resolve(args, "jobs", default_jobs(), int),
    )
    manifest = load_manifest(args.manifest)
    report = run_evaluation(manifest, protocol)
    formats = [f.strip() for f in
               _resolve(args, "format", "json").split(",") if f.strip()]
    paths = emit_report(report, args.out, formats)
    for path in paths:
        print(path)
    if report.failures:
        print(f"warning: {len(report.failures)} per-image failure(s) recorded",
              file=sys.stderr)
    return 0


def _build_boundaries_parser(sub):
    p = sub.add_parser("boundaries", help="export depth-boundary edge maps (PGM)")
    p.add_argument("--manifest", help="extract boundaries for every ground truth")
    p.add_argument("--depth", help="extract boundaries for a single depth file")
    p.add_argument("--sky", help="sky mask PNG for the single-file mode")
    p.add_argument("--edge-transform", default=None, choices=["raw", "log", "inverse"])
    p.add_argument("--edge-sigma", type=float, default=None)
    p.add_argument("--out", required=True)
    _add_config_flag(p)
    return p


def _cmd_boundaries(args):
    _load_config(args)
    transform = _resolve(args, "edge-transform", "log")
    sigma = _resolve(args, "edge-sigma", 1.0, float)
    if bool(args.manifest) == bool(args.depth):
        raise SystemExit("boundaries: pass exactly one of --manifest / --depth")
    if args.depth:
        depth = io.load_depth_any(args.depth)
        sky = io.load_sky_mask(args.sky) if args.sky else None
        edge_map = extract_depth_boundaries(depth, sky, transform, sigma)
        save_edge_pgm(args.out, edge_map)
        print(args.out)
        return 0
    manifest = load_manifest(args.manifest)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for record in manifest.records:
        depth = io.load_depth_any(record.gt_depth)
        sky = io.load_sky_mask(record.sky_mask) if record.sky_mask else None
        edge_map = extract_depth_boundaries(depth, sky, transform, sigma)
        path = out_dir / f"{record.name}.pgm"
        save_edge_pgm(path, edge_map)
        print(path)
    return 0


def _build_patches_parser(sub):
    p = sub.add_parser("patches", help="sample perspective patches from a panorama")
    p.add_argument("--pano-image", required=True, help="equirectangular image (fmap or png)")
    p.add_argument("--pano-depth", required=True, help="equirectangular depth (fmap)")
    p.add_argument("--step", type=float, default=None, help="azimuth step in degrees")
    p.add_argument("--width", type=int, default=None)
    p.add_argument("--height", type=int, default=None)
    p.add_argument("--fx", type=float, default=None)
    p.add_argument("--fy", type=float, default=None)
    p.add_argument("--cx", type=float, default=None)
    p.add_argument("--cy", type=float, default=None)
    p.add_argument("--planar-depth", action="store_const", const=True, default=None,
                   help="panorama depth is z-depth already, skip radial conversion")
    p.add_argument("--out", required=True)
    _add_config_flag(p)
    return p


def _cmd_patches(args):
    _load_config(args)
    step = _resolve(args, "step", 20.0, float)
    width = _resolve(args, "width", 1242, int)
    height = _resolve(args, "height", 376, int)
    fx = _resolve(args, "fx", 721.5, float)
    fy = _resolve(args, "fy", 721.5, float)
    cx = _resolve(args, "cx", (width - 1) / 2.0, float)
    cy = _resolve(args, "cy", (height - 1) / 2.0, float)
    planar = _resolve(args, "planar-depth", False, bool)

    image = io.load_image(args.pano_image)
    depth_grid = io.load_float_map(args.pano_depth).astype(np.float64)
    valid = np.isfinite(depth_grid) & (depth_grid > 0.0)
    pano = Panorama(image, np.where(valid, depth_grid, 0.0), valid)
    base = PatchSpec(azimuth=0.0, out_width=width, out_height=height,
                     fx=fx, fy=fy, cx=cx, cy=cy)
    patches = generate_scene_patches(pano, step, base, radial_depth=not planar)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for image_patch, depth_patch, spec in patches:
        tag = f"{int(round(spec.azimuth)):03d}"
        img_path = out_dir / f"image_{tag}.png"
        depth_path = out_dir / f"depth_{tag}.png"
        io.save_image_png(img_path, image_patch)
        io.save_depth_png16(depth_path, depth_patch)
        entries.append({
            "azimuth": spec.azimuth,
            "image": img_path.name,
            "depth": depth_path.name,
            "intrinsics": {"fx": spec.fx, "fy": spec.fy, "cx": spec.cx, "cy": spec.cy},
        })
    manifest_path = out_dir / "patches.json"
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump({"step": step, "width": width, "height": height,
                   "radial_depth": not planar, "patches": entries},
                  fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(manifest_path)
    return 0


def _build_losses_parser(sub):
    p = sub.add_parser("losses", help="forward loss diagnostics on an image pair")
    p.add_argument("--target", required=True, help="target image")
    p.add_argument("--support", required=True, help="support image")
    p.add_argument("--depth", required=True, help="target depth (png16 or fmap)")
    p.add_argument("--pose", required=True,
                   help="rx,ry,rz,tx,ty,tz (axis-angle radians + meters)")
    p.add_argument("--fx", type=float, required=True)
    p.add_argument("--fy", type=float, required=True)
    p.add_argument("--cx", type=float, required=True)
    p.add_argument("--cy", type=float, required=True)
    p.add_argument("--ssim-weight", type=float, default=None)
    p.add_argument("--smooth-weight", type=float, default=None)
    p.add_argument("--out", help="write the JSON here instead of stdout")
    _add_config_flag(p)
    return p


def _cmd_losses(args):
    _load_config(args)
    target = io.load_image(args.target)
    support = io.load_image(args.support)
    depth = io.load_depth_any(args.depth)
    pose_vals = [float(tok) for tok in args.pose.split(",")]
    if len(pose_vals) != 6:
        raise SystemExit("losses: --pose needs 6 comma-separated numbers")
    transform = axis_angle_to_transform(pose_vals[:3], pose_vals[3:])
    h, w = depth.values.shape
    intrinsics = Intrinsics(args.fx, args.fy, args.cx, args.cy, w, h)
    config = PhotometricConfig(ssim_weight=_resolve(args, "ssim-weight", 0.85, float))
    smooth_weight = _resolve(args, "smooth-weight", 0.001, float)

    synth, synth_valid = synthesize_view(depth, support, intrinsics, transform)
    synth_loss = photometric_loss(target, synth, config, synth_valid)
    identity_loss = photometric_loss(target, support, config)
    agg, _ = aggregate_reconstruction([synth_loss], mode="minimum")
    keep = static_automask([synth_loss], [identity_loss])

    # smoothness treats normalized inverse depth as the disparity surrogate
    inv = np.where(depth.valid, 1.0 / np.maximum(depth.values, 1e-6), 0.0)
    peak = inv.max()
    disparity = DisparityMap(inv / peak if peak > 0 else inv)
    smooth = smoothness_loss(
        disparity, target,
        SmoothnessConfig(order=1, edge_aware=True, weight=smooth_weight),
    )

    valid = synth_loss.valid
    result = {
        "photometric_synth": float(synth_loss.values[valid].mean()) if valid.any() else None,
        "photometric_identity": float(identity_loss.values.mean()),
        "reconstruction_min": float(agg.values[agg.valid].mean()) if agg.valid.any() else None,
        "automask_keep_fraction": float(keep.mean()),
        "smoothness": smooth,
        "synth_valid_fraction": float(valid.mean()),
    }
    text = json.dumps(result, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(args.out)
    else:
        sys.stdout.write(text)
    return 0


def _build_rank_parser(sub):
    p = sub.add_parser("rank", help="rank methods from a report JSON")
    p.add_argument("--report", required=True)
    p.add_argument("--key", default="AbsRel")
    p.add_argument("--direction", choices=["lower", "higher"], default=None)
    return p


def _cmd_rank(args):
    report = load_report(args.report)
    entry = rank_methods(report.aggregates, args.key, args.direction)
    order = sorted(entry["ranks"].items(), key=lambda kv: (kv[1], kv[0]))
    print(f"{args.key} ({entry['direction']} is better)")
    for method, rank in order:
        value = report.aggregates[method][args.key]
        tie = " (tie)" if entry["ties"] else ""
        print(f"{rank:4d}  {method:24s} {value:.6g}{tie}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="depthbench",
        description="benchmarking engine for monocular depth estimation",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _build_eval_parser(sub)
    _build_boundaries_parser(sub)
    _build_patches_parser(sub)
    _build_losses_parser(sub)
    _build_rank_parser(sub)
    args = parser.parse_args(argv)
    commands = {
        "eval": _cmd_eval,
        "boundaries": _cmd_boundaries,
        "patches": _cmd_patches,
        "losses": _cmd_losses,
        "rank": _cmd_rank,
    }
    return commands[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
