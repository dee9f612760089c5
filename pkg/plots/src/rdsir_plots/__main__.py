"""Render figures from a run manifest.

    python -m rdsir_plots --manifest RUN/manifest.json --out figures/
    python -m rdsir_plots --manifest RUN/manifest.json --out figures/ \\
        --kind snapshot_grid --times 0 25 50 67.5 105 200
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import FigureSpec, render_snapshot_grid, render_timeseries
from .readers import SchemaError, read_manifest


def render(spec: FigureSpec, out_dir: Path) -> Path:
    manifest = read_manifest(spec.manifest_path)
    if spec.kind == "timeseries":
        return render_timeseries(manifest, out_dir, title=spec.title)
    if spec.kind == "snapshot_grid":
        return render_snapshot_grid(manifest, out_dir, times=spec.times,
                                    title=spec.title)
    raise SchemaError(f"unknown figure kind {spec.kind!r}")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="rdsir_plots", description="Render figures from rdsir run outputs."
    )
    parser.add_argument("--manifest", required=True, help="path to manifest.json")
    parser.add_argument("--out", required=True, help="output directory for images")
    parser.add_argument("--kind", choices=("timeseries", "snapshot_grid", "both"),
                        default="both")
    parser.add_argument("--times", type=float, nargs="*", default=None,
                        help="panel times for the snapshot grid (default: all)")
    parser.add_argument("--title", default="")
    args = parser.parse_args(argv)

    manifest_path = Path(args.manifest)
    specs = []
    if args.kind in ("timeseries", "both"):
        specs.append(FigureSpec(kind="timeseries", manifest_path=manifest_path,
                                title=args.title))
    if args.kind in ("snapshot_grid", "both"):
        times = tuple(args.times) if args.times else ()
        specs.append(FigureSpec(kind="snapshot_grid", manifest_path=manifest_path,
                                times=times, title=args.title))

    written = []
    try:
        manifest = read_manifest(manifest_path)
        for spec in specs:
            if spec.kind == "snapshot_grid" and not manifest.snapshot_times:
                continue
            written.append(render(spec, Path(args.out)))
    except (SchemaError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
