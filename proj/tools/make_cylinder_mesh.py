#!/usr/bin/env python3
"""Triangulation of the channel [0, 2.2] x [0, 0.41] around a cylinder of radius 0.05 at (0.2, 0.2).

Writes the gdrom-mesh text format with inflow, outflow, wall and cylinder boundary tags.
Points are relaxed with a spring model (Persson-Strang) against a size function that grows
linearly away from the cylinder.
"""

import argparse
import sys

import numpy as np
from scipy.spatial import Delaunay

LENGTH, HEIGHT = 2.2, 0.41
CENTER = np.array([0.2, 0.2])
RADIUS = 0.05


def distance(p):
    rect = -np.minimum.reduce([p[:, 0], LENGTH - p[:, 0], p[:, 1], HEIGHT - p[:, 1]])
    circle = np.linalg.norm(p - CENTER, axis=1) - RADIUS
    return np.maximum(rect, -circle)


def size(p, h_min, h_max, growth):
    return np.minimum(h_min + growth * (np.linalg.norm(p - CENTER, axis=1) - RADIUS), h_max)


def boundary_points(h_min, h_max, growth):
    n_circle = int(np.ceil(2 * np.pi * RADIUS / h_min))
    angles = 2 * np.pi * np.arange(n_circle) / n_circle
    pts = [CENTER + RADIUS * np.column_stack([np.cos(angles), np.sin(angles)])]
    corners = np.array([[0, 0], [LENGTH, 0], [LENGTH, HEIGHT], [0, HEIGHT], [0, 0]], dtype=float)
    for a, b in zip(corners[:-1], corners[1:]):
        side = [a]
        length = np.linalg.norm(b - a)
        s = 0.0
        while True:
            s += size(side[-1][None, :], h_min, h_max, growth)[0]
            if s > length - 0.5 * size(b[None, :], h_min, h_max, growth)[0]:
                break
            side.append(a + (b - a) * s / length)
        pts.append(np.array(side))
    return np.vstack(pts)


def triangulate(p, geps):
    tri = Delaunay(p).simplices
    centroids = p[tri].mean(axis=1)
    return tri[distance(centroids) < -geps]


def relax(h_min, h_max, growth, iterations, seed):
    rng = np.random.default_rng(seed)
    fixed = boundary_points(h_min, h_max, growth)
    area = LENGTH * HEIGHT
    candidates = rng.uniform([0, 0], [LENGTH, HEIGHT], size=(int(1.2 * area / h_min**2), 2))
    candidates = candidates[distance(candidates) < -0.5 * h_min]
    keep = rng.random(len(candidates)) < (h_min / size(candidates, h_min, h_max, growth)) ** 2
    free = candidates[keep]

    geps = 1e-3 * h_min
    for _ in range(iterations):
        p = np.vstack([fixed, free])
        tri = triangulate(p, geps)
        edges = np.unique(np.sort(np.vstack([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]]), axis=1), axis=0)
        vec = p[edges[:, 0]] - p[edges[:, 1]]
        length = np.linalg.norm(vec, axis=1)
        h = size(0.5 * (p[edges[:, 0]] + p[edges[:, 1]]), h_min, h_max, growth)
        target = h * 1.2 * np.sqrt((length**2).sum() / (h**2).sum())
        force = np.maximum(target - length, 0.0) / length
        fvec = vec * force[:, None]
        total = np.zeros_like(p)
        np.add.at(total, edges[:, 0], fvec)
        np.add.at(total, edges[:, 1], -fvec)
        step = 0.2 * total[len(fixed):]
        moved = np.max(np.linalg.norm(step, axis=1) / size(free, h_min, h_max, growth))
        free = free + step
        free = free[distance(free) < -0.25 * h_min]
        if moved < 1e-3:
            break
    p = np.vstack([fixed, free])
    return p, triangulate(p, geps)


def tag_of(midpoint, tol):
    x, y = midpoint
    if np.linalg.norm(midpoint - CENTER) < RADIUS + tol:
        return "cylinder"
    if abs(x) < tol:
        return "inflow"
    if abs(x - LENGTH) < tol:
        return "outflow"
    if abs(y) < tol or abs(y - HEIGHT) < tol:
        return "wall"
    return None


def boundary_edges(tri):
    edges = np.vstack([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])
    _, index, count = np.unique(np.sort(edges, axis=1), axis=0, return_index=True, return_counts=True)
    return edges[index[count == 1]]


def orient(p, tri):
    a, b, c = p[tri[:, 0]], p[tri[:, 1]], p[tri[:, 2]]
    signed = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    tri = tri.copy()
    tri[signed < 0] = tri[signed < 0][:, [0, 2, 1]]
    return tri


def quality(p, tri):
    a, b, c = p[tri[:, 0]], p[tri[:, 1]], p[tri[:, 2]]
    angles = []
    for u, v, w in ((a, b, c), (b, c, a), (c, a, b)):
        e1, e2 = v - u, w - u
        cos = (e1 * e2).sum(1) / (np.linalg.norm(e1, axis=1) * np.linalg.norm(e2, axis=1))
        angles.append(np.degrees(np.arccos(np.clip(cos, -1, 1))))
    return np.min(angles)


def write_mesh(path, h_min, h_max, args):
    p, tri = relax(h_min, h_max, args.growth, args.iterations, args.seed)
    used = np.unique(tri)
    remap = -np.ones(len(p), dtype=int)
    remap[used] = np.arange(len(used))
    p, tri = p[used], orient(p[used], remap[tri])

    tol = 1e-9
    boundary = []
    for e in boundary_edges(tri):
        tag = tag_of(0.5 * (p[e[0]] + p[e[1]]), tol)
        if tag is None:
            sys.exit(f"untagged boundary edge at {0.5 * (p[e[0]] + p[e[1]])}")
        boundary.append((e[0], e[1], tag))

    with open(path, "w") as f:
        f.write("gdrom-mesh 1\n")
        f.write(f"{len(p)} {len(tri)} {len(boundary)}\n")
        for x, y in p:
            f.write(f"{float(x)!r} {float(y)!r}\n")
        for t in tri:
            f.write(f"{t[0]} {t[1]} {t[2]}\n")
        for a, b, tag in boundary:
            f.write(f"{a} {b} {tag}\n")

    n_edges = len(np.unique(np.sort(np.vstack([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]]), axis=1), axis=0))
    print(f"{path}: {len(p)} vertices, {len(tri)} triangles, {2 * (len(p) + n_edges)} velocity dofs, "
          f"min angle {quality(p, tri):.1f} deg")



def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", required=True)
    parser.add_argument("--h-min", type=float, default=0.0038)
    parser.add_argument("--h-max", type=float, default=0.0185)
    parser.add_argument("--growth", type=float, default=0.12)
    parser.add_argument("--iterations", type=int, default=300)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--coarse-out", help="also write a coarse observation mesh")
    parser.add_argument("--coarse-factor", type=float, default=4.0)
    args = parser.parse_args()

    write_mesh(args.out, args.h_min, args.h_max, args)
    if args.coarse_out:
        write_mesh(args.coarse_out, args.coarse_factor * args.h_min, args.coarse_factor * args.h_max, args)


if __name__ == "__main__":
    main()
