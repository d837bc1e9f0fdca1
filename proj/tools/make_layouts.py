#!/usr/bin/env python3
"""Generate the figure-approximate pore layouts used by the preset scenarios.

The layouts are drawn once from fixed seeds and written into scenarios/.
Re-running the script reproduces the shipped files exactly.
"""

import argparse
import math
import pathlib
import random

DOMAIN = (0.0, 0.0, 12.0, 10.0)
MARGIN = 0.3  # clearance between pores and the plate edges
GAP = 0.12  # clearance between neighbouring pores

ONE_ZOOM = [(3.5, 6.0, 2.0)]
TWO_ZOOMS = [(3.5, 6.0, 2.0), (8.5, 3.6, 2.0)]
LOCAL_ZOOM = [(6.0, 5.0, 2.5)]


def fits(pores, x, y, r):
    x0, y0, x1, y1 = DOMAIN
    if x - r < x0 + MARGIN or x + r > x1 - MARGIN:
        return False
    if y - r < y0 + MARGIN or y + r > y1 - MARGIN:
        return False
    return all(math.hypot(x - px, y - py) >= r + pr + GAP for px, py, pr in pores)


def scatter(rng, pores, count, region, rmin, rmax, tries=20000):
    """Add up to `count` non-overlapping pores whose centres fall in `region`."""
    added = 0
    for _ in range(tries):
        if added == count:
            break
        x, y = region(rng)
        r = rng.uniform(rmin, rmax)
        if fits(pores, x, y, r):
            pores.append((x, y, r))
            added += 1
    if added < count:
        raise SystemExit(f"could only place {added} of {count} pores")


def in_disc(cx, cy, rad):
    def draw(rng):
        while True:
            x, y = rng.uniform(cx - rad, cx + rad), rng.uniform(cy - rad, cy + rad)
            if math.hypot(x - cx, y - cy) < rad:
                return x, y

    return draw


def anywhere(rng):
    return rng.uniform(DOMAIN[0], DOMAIN[2]), rng.uniform(DOMAIN[1], DOMAIN[3])


def mmt(pores, area, eshelby=3.0):
    e = 1.0
    for _, _, r in pores:
        f = math.pi * r * r / area
        e = (1 - f) * e / (f * eshelby + 1 - f)
    return e


def inside(pores, zooms):
    return [p for p in pores if any(math.hypot(p[0] - z[0], p[1] - z[1]) < z[2] for z in zooms)]


def rounded(pores):
    return [(round(x, 3), round(y, 3), round(r, 3)) for x, y, r in pores]


def quasi_uniform():
    rng = random.Random(20240611)
    pores = []
    for cx, cy, rad in TWO_ZOOMS:
        scatter(rng, pores, 11, in_disc(cx, cy, rad - 0.15), 0.2, 0.32)
    scatter(rng, pores, 30, anywhere, 0.15, 0.3)
    return rounded(pores)


def local():
    rng = random.Random(20240612)
    pores = []
    cx, cy, rad = LOCAL_ZOOM[0]
    scatter(rng, pores, 14, in_disc(cx, cy, rad - 1.0), 0.18, 0.35)
    return rounded(pores)


def grazing_offset(pores, nx, ny, depth):
    """Rigid shift that leaves one mesh node just outside the largest pore.

    The node sits on the far corner, along the cell diagonal, of a patch that
    otherwise lies inside the pore, so its neighbour keeps only a sliver of
    matrix of size ~depth^2 in its support.
    """
    x0, y0, x1, y1 = DOMAIN
    hx, hy = (x1 - x0) / nx, (y1 - y0) / ny
    cx, cy, r = max(pores, key=lambda p: p[2])
    u = (1 / math.sqrt(2), 1 / math.sqrt(2))
    qx = x0 + round((cx + r * u[0] - x0) / hx) * hx
    qy = y0 + round((cy + r * u[1] - y0) / hy) * hy
    gap = r + depth * min(hx, hy)
    return round(qx - gap * u[0] - cx, 9), round(qy - gap * u[1] - cy, 9)


def yaml_list(rows, indent="    "):
    return "\n".join(f"{indent}- [{x}, {y}, {r}]" for x, y, r in rows)


HEADER = "# figure-approximate layout generated by tools/make_layouts.py\n"


def scenario(name, description, pores, zooms, body):
    text = HEADER
    text += f"name: {name}\n"
    text += f"description: {description}\n"
    text += "domain: {xmin: 0, ymin: 0, xmax: 12, ymax: 10}\n"
    text += "geometry:\n  pores:\n" + yaml_list(pores) + "\n"
    if zooms:
        text += "  zooms:\n" + yaml_list(zooms) + "\n"
    return text + body


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "scenarios"))
    ap.add_argument("--report", action="store_true", help="print porosity and MMT estimates only")
    args = ap.parse_args()

    quasi = quasi_uniform()
    loc = local()
    whole = mmt(quasi, 120.0)
    zoom_area = sum(math.pi * z[2] ** 2 for z in TWO_ZOOMS)
    zoomed = mmt(inside(quasi, TWO_ZOOMS), zoom_area)
    print(f"quasi-uniform: {len(quasi)} pores, porosity {sum(math.pi * r * r for *_, r in quasi) / 120:.4f}")
    print(f"  MMT whole domain {whole:.4f}, inside zooms {zoomed:.4f}")
    print(f"local: {len(loc)} pores")
    if args.report:
        return

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    materials_auto = (
        "materials:\n"
        "  plane: strain\n"
        "  micro: {{E: 1, nu: 0.3}}\n"
        "  macro: {{E: auto, nu: 0.3}}\n"
        "  homogenization: {{rve: {rve}, eshelby: 3, porosity: incremental}}\n"
    )
    clamp_disp = "boundary:\n  clamped: bottom\n  loaded: top\n  displacement: [0, -0.1]\n"
    clamp_trac = "boundary:\n  clamped: bottom\n  loaded: top\n  traction: [0, -0.01]\n"

    files = {
        "local_pores.yaml": scenario(
            "local_pores", "locally porous plate with one zoom, 2eps = 0.1", loc, LOCAL_ZOOM,
            "mesh: {nx: 24, ny: 20, refine_levels: 2, refine_band: 0.5}\n"
            "model: mixed\nmixing: {width: 0.1}\n"
            "stabilization: {beta: 0.005, mode: cut_only}\n"
            "materials:\n  plane: strain\n  micro: {E: 1, nu: 0.3}\n  macro: {E: 1, nu: 0.3}\n"
            + clamp_disp),
        "local_pores_wide.yaml": scenario(
            "local_pores_wide", "locally porous plate with one zoom, 2eps = 1", loc, LOCAL_ZOOM,
            "mesh: {nx: 24, ny: 20, refine_levels: 2, refine_band: 0.5}\n"
            "model: mixed\nmixing: {width: 1}\n"
            "stabilization: {beta: 0.005, mode: cut_only}\n"
            "materials:\n  plane: strain\n  micro: {E: 1, nu: 0.3}\n  macro: {E: 1, nu: 0.3}\n"
            + clamp_disp),
        "adaptive_cutfem_baseline.yaml": scenario(
            "adaptive_cutfem_baseline",
            "single-scale CutFEM on a mesh refined around the region of interest",
            quasi, ONE_ZOOM,
            "mesh: {nx: 24, ny: 20, refine_levels: 2, refine_band: 0.25}\n"
            "model: micro_only\n"
            "stabilization: {beta: 0.005, mode: cut_only}\n"
            "materials:\n  plane: strain\n  micro: {E: 1, nu: 0.3}\n"
            + clamp_trac),
        "quasi_uniform_one_zoom.yaml": scenario(
            "quasi_uniform_one_zoom", "quasi-uniform pores, one zoom, whole-domain RVE", quasi, ONE_ZOOM,
            "mesh: {nx: 24, ny: 20, refine_levels: 2, refine_band: 0.5}\n"
            "model: mixed\nmixing: {width: 0.2}\n"
            "stabilization: {beta: 0.005, mode: cut_only}\n"
            + materials_auto.format(rve="whole_domain") + clamp_trac),
        "quasi_uniform_two_zooms.yaml": scenario(
            "quasi_uniform_two_zooms", "quasi-uniform pores, two zooms, RVE inside the zooms, 2eps = 0.1",
            quasi, TWO_ZOOMS,
            "mesh: {nx: 24, ny: 20, refine_levels: 2, refine_band: 0.5}\n"
            "model: mixed\nmixing: {width: 0.1}\n"
            "stabilization: {beta: 0.005, mode: cut_only}\n"
            + materials_auto.format(rve="inside_zooms") + clamp_disp
            + "reference: {scenario: quasi_uniform_reference.yaml, component: y}\n"),
        "quasi_uniform_two_zooms_wide.yaml": scenario(
            "quasi_uniform_two_zooms_wide", "quasi-uniform pores, two zooms, RVE inside the zooms, 2eps = 1",
            quasi, TWO_ZOOMS,
            "mesh: {nx: 24, ny: 20, refine_levels: 2, refine_band: 0.5}\n"
            "model: mixed\nmixing: {width: 1}\n"
            "stabilization: {beta: 0.005, mode: cut_only}\n"
            + materials_auto.format(rve="inside_zooms") + clamp_disp
            + "reference: {scenario: quasi_uniform_reference.yaml, component: y}\n"),
        "quasi_uniform_reference.yaml": scenario(
            "quasi_uniform_reference", "fully resolved microscale reference for the two-zoom plate",
            quasi, [],
            "mesh: {nx: 96, ny: 80}\n"
            "model: micro_only\n"
            "stabilization: {beta: 0.005, mode: cut_only}\n"
            "materials:\n  plane: strain\n  micro: {E: 1, nu: 0.3}\n"
            + clamp_disp),
    }
    offsets = [(0.0, 0.0), (0.031, -0.017)]
    offsets += [grazing_offset(loc, 96, 80, d) for d in (1e-2, 1e-3)]
    uniform_local = (
        "scenario:\n"
        "  name: local_pores_uniform\n"
        "  domain: {xmin: 0, ymin: 0, xmax: 12, ymax: 10}\n"
        "  geometry:\n    pores:\n" + yaml_list(loc, "      ") + "\n"
        "    zooms:\n" + yaml_list(LOCAL_ZOOM, "      ") + "\n"
        "  model: mixed\n  mixing: {width: 0.1}\n"
        "  materials:\n    plane: strain\n    micro: {E: 1, nu: 0.3}\n    macro: {E: 1, nu: 0.3}\n"
        "  boundary: {clamped: bottom, loaded: top, displacement: [0, -0.1]}\n"
    )
    files["condstudy_regularization.yaml"] = (
        "# kappa against h for the local-pore plate on uniform meshes\n" + uniform_local
        + "meshes: [[12, 10], [24, 20], [48, 40], [96, 80], [144, 120]]\n"
        "modes: [cut_only, all_pore_elements]\n"
        "betas: [0.005]\n")
    files["condstudy_stabilization.yaml"] = (
        "# kappa with and without ghost penalty under small rigid shifts of the pores\n" + uniform_local
        + "meshes: [[48, 40], [96, 80]]\n"
        "modes: [cut_only]\n"
        "betas: [0, 0.005]\n"
        "offsets: [" + ", ".join(f"[{x}, {y}]" for x, y in offsets) + "]\n")
    for name, text in files.items():
        (out / name).write_text(text)
        print(f"wrote {out / name}")


if __name__ == "__main__":
    main()
