"""Husimi-map sphere projections.

The input table has columns (theta, phi, q) on a regular grid: theta in
[0, pi] inclusive, phi in [0, 2 pi) periodic.  Mollweide projection shows the
whole sphere; orthographic shows the hemisphere facing the viewer.
"""

from __future__ import annotations

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .csvio import PlotDataError, Table  # noqa: E402


def _grid(table: Table):
    theta = np.asarray(table.column("theta"))
    phi = np.asarray(table.column("phi"))
    q = np.asarray(table.column("q"))
    thetas = np.unique(theta)
    phis = np.unique(phi)
    if len(thetas) * len(phis) != len(q):
        raise PlotDataError("husimi table is not a regular (theta, phi) grid")
    values = q.reshape(len(thetas), len(phis))
    return thetas, phis, values


def render_sphere(table: Table, projection: str, title, out_path: str) -> None:
    thetas, phis, values = _grid(table)
    if projection == "mollweide":
        fig = plt.figure(figsize=(4.0, 2.6))
        ax = fig.add_subplot(111, projection="mollweide")
        lon = np.where(phis <= np.pi, phis, phis - 2 * np.pi)
        order = np.argsort(lon)
        lat = np.pi / 2 - thetas
        mesh_lon, mesh_lat = np.meshgrid(lon[order], lat)
        ax.pcolormesh(mesh_lon, mesh_lat, values[:, order], shading="nearest",
                      cmap="viridis", rasterized=True)
        ax.set_xticks([])
        ax.set_yticks([])
    elif projection == "orthographic":
        # hemisphere facing +x: project (y, z) components of the grid points
        fig, ax = plt.subplots(figsize=(3.2, 3.2))
        mesh_theta, mesh_phi = np.meshgrid(thetas, phis, indexing="ij")
        front = np.sin(mesh_theta) * np.cos(mesh_phi) >= 0
        ys = np.sin(mesh_theta) * np.sin(mesh_phi)
        zs = np.cos(mesh_theta)
        masked = np.where(front, values, np.nan)
        ax.scatter(ys.ravel(), zs.ravel(), c=masked.ravel(), s=4, cmap="viridis",
                   plotnonfinite=False, rasterized=True)
        circle = np.linspace(0, 2 * np.pi, 200)
        ax.plot(np.cos(circle), np.sin(circle), color="0.6", linewidth=0.7)
        ax.set_aspect("equal")
        ax.axis("off")
    else:
        raise PlotDataError(f"unknown sphere projection {projection!r}")
    checkpoint = table.metadata.get("checkpoint")
    if title or checkpoint:
        ax.set_title(title or checkpoint, fontsize=9)
    fig.tight_layout()
    fig.savefig(out_path, metadata={"Date": None})
    plt.close(fig)
