import sys
from pathlib import Path

import click
import numpy as np

sys.path.append(str(Path(__file__).resolve().parents[1]))

from tube_hardy.boundary_decomposition import grid_from_modes, grid_to_frame, synthetic_grid
from tube_hardy.cone_geometry import Cone, build_cone, sample_interior
from utils import render_csv, render_json, write_atomic


# Boundary grids

def generate_two_cosine(points_per_axis=16):
    """u(x) = 2 cos x on [0, 2π)"""
    return grid_from_modes(1, points_per_axis, 2 * np.pi, [((1,), 1.0), ((-1,), 1.0)])


def generate_random_grid(cone: Cone, rng, points_per_axis=32, period=2 * np.pi):
    return synthetic_grid(cone, rng, points_per_axis=points_per_axis, period=period)


def grid_payload(grid):
    values = grid.samples.ravel()
    return {
        "period": grid.period,
        "dim": grid.dim,
        "points_per_axis": grid.points_per_axis,
        "re": values.real,
        "im": values.imag,
    }


# Discrete measures

def generate_measure(cone: Cone, rng, n):
    heights = sample_interior(cone, rng, n, scale=1.5)
    return [
        {
            "x": rng.uniform(-2, 2, size=cone.dim),
            "y": y,
            "mass": float(rng.uniform(0.1, 2.0)),
        }
        for y in heights
    ]


@click.command()
@click.option("--seed", type=int, default=0, help="Generator seed.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=str(Path(__file__).resolve().parent))
def main(seed, out_dir):
    """Write sample grids and measures used by the configs in configs/."""
    rng = np.random.default_rng(seed)
    out = Path(out_dir)
    half_line = build_cone({"kind": "orthant", "dim": 1})
    quadrant = build_cone({"kind": "orthant", "dim": 2})

    write_atomic(out / "two_cosine.csv", render_csv(grid_to_frame(generate_two_cosine())))
    write_atomic(out / "half_line_grid.csv", render_csv(grid_to_frame(generate_random_grid(half_line, rng, 64))))
    write_atomic(out / "quadrant_grid.json", render_json(grid_payload(generate_random_grid(quadrant, rng, 16))))
    write_atomic(out / "half_line_measure.json", render_json(generate_measure(half_line, rng, 6)))
    write_atomic(out / "quadrant_measure.json", render_json(generate_measure(quadrant, rng, 5)))
    click.echo(f"Wrote sample data to {out}")


# Entry point
if __name__ == "__main__":
    main()
