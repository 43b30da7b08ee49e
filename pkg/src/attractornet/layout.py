"""Node placement for plotting networks.

Two-dimensional problems are drawn at their representative genotypes.
Higher dimensions use classical (Torgerson) MDS on Euclidean distances:
double-centre the squared distance matrix and keep the top two
eigenpairs. Each axis is sign-fixed so its first non-negligible loading is
positive, which makes the layout deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .netbuild import Network, NodeKey

_SIGN_TOL = 1e-12


@dataclass(frozen=True)
class LayoutedNetwork:
    network: Network
    positions: Mapping[NodeKey, tuple[float, float]]
    layout_method: str


def classical_mds(points: np.ndarray, n_components: int = 2) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    n = points.shape[0]
    if n == 0:
        return np.zeros((0, n_components))
    diff = points[:, None, :] - points[None, :, :]
    sq = np.sum(diff * diff, axis=2)
    centring = np.eye(n) - np.ones((n, n)) / n
    gram = -0.5 * centring @ sq @ centring
    gram = (gram + gram.T) / 2
    eigvals, eigvecs = np.linalg.eigh(gram)
    order = np.argsort(eigvals, kind="stable")[::-1][:n_components]
    coords = np.zeros((n, n_components))
    scale = max(1.0, float(np.max(np.abs(eigvals))))
    for col, idx in enumerate(order):
        lam = eigvals[idx]
        if lam <= _SIGN_TOL * scale:
            continue
        axis = eigvecs[:, idx] * np.sqrt(lam)
        nonzero = np.flatnonzero(np.abs(axis) > _SIGN_TOL * max(1.0, np.max(np.abs(axis))))
        if nonzero.size and axis[nonzero[0]] < 0:
            axis = -axis
        coords[:, col] = axis
    return coords


def layout(net: Network, dimension: int) -> LayoutedNetwork:
    if dimension < 2:
        raise ValueError("layout needs dimension >= 2")
    keys = list(net.nodes)
    genotypes = np.array([net.nodes[k].genotype for k in keys], dtype=float).reshape(len(keys), -1 if keys else dimension)
    if dimension == 2:
        coords, method = genotypes[:, :2], "direct_2d"
    else:
        coords, method = classical_mds(genotypes), "classical_mds"
    positions = {k: (float(c[0]), float(c[1])) for k, c in zip(keys, coords)}
    return LayoutedNetwork(net, positions, method)
