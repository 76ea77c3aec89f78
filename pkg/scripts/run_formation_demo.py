#!/usr/bin/env python3
"""Drive the shipped cross formation through the corridor world.

Writes the trajectory CSV and SVG into out/ and prints a one-line summary.
"""

import argparse
from pathlib import Path

from mereoml.geometry import (
    load_world,
    navigate,
    parse_formation,
    write_trajectory_csv,
    write_trajectory_svg,
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--world", default="data/corridor_world.txt")
    ap.add_argument("--formation", default="data/cross.frm")
    ap.add_argument("--steps", type=int, default=1000)
    ap.add_argument("--outdir", default="out")
    args = ap.parse_args()

    world = load_world(args.world)
    formation = parse_formation(
        Path(args.formation).read_text(encoding="utf-8"),
        robot_ids=[rid for rid, _ in world.robots],
    )
    log = navigate(world, formation, max_steps=args.steps)

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(log, outdir / "traj.csv")
    write_trajectory_svg(log, world, outdir / "traj.svg")

    last = log.steps[-1]
    print(
        f"{log.status} after {last.step} steps, "
        f"final violations {last.entries[0].violations}; "
        f"trajectory in {outdir}/traj.csv, plot in {outdir}/traj.svg"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
