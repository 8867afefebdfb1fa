import math

import numpy as np
import pytest
from scipy.special import roots_legendre

from bec_merge.schedule import Direction

D_GRID = (0.0, 0.5, 1.0, 2.0, 4.0, 6.0)


def boson_sector_operators(n_total):
    """a1^+ a1, a2^+ a2, a1^+ a2 restricted to the N-atom sector, from explicit ladder matrices.

    Built on the full (N+1)^2 two-mode Fock space and projected, so it shares
    no code with the spin-ladder formulas under test.  Sector ordering matches
    the package: index k <-> |N-k, k>.
    """
    dim = n_total + 1
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    eye = np.eye(dim)
    a1 = np.kron(a, eye)
    a2 = np.kron(eye, a)
    idx = [(n_total - k) * dim + k for k in range(dim)]
    proj = np.zeros((dim * dim, dim))
    proj[idx, np.arange(dim)] = 1.0

    def restrict(op):
        return proj.T @ op @ proj

    return restrict(a1.T @ a1), restrict(a2.T @ a2), restrict(a1.T @ a2)


def spin_matrices(n_total):
    n11, n22, c12 = boson_sector_operators(n_total)
    sx = 0.5 * (c12 + c12.T)
    sy = 0.5j * (c12 - c12.T)
    sz = 0.5 * (n22 - n11)
    return sx, sy, sz


def gaussian_packet(x, y, z, centre, geometry):
    """Unit-normalized cigar Gaussian displaced by ``centre`` along the merge axis."""
    sr, sz = geometry.sigma_r, geometry.sigma_z
    if geometry.direction is Direction.RADIAL:
        x = x - centre
    else:
        z = z - centre
    norm = (math.pi**1.5 * sr * sr * sz) ** -0.5
    return norm * np.exp(-(x**2 + y**2) / (2 * sr**2) - z**2 / (2 * sz**2))


def quadrature(geometry, d, kind, order=140):
    """Tensor-product Gauss-Legendre integral over a box that covers both packets."""
    nodes, weights = roots_legendre(order)
    sr, sz = geometry.sigma_r, geometry.sigma_z
    half = {"x": 10 * sr, "y": 10 * sr, "z": 10 * sz}
    axis = "x" if geometry.direction is Direction.RADIAL else "z"
    half[axis] += d / 2
    grids = {}
    for name, h in half.items():
        grids[name] = (nodes * h, weights * h)
    x, wx = grids["x"]
    y, wy = grids["y"]
    z, wz = grids["z"]
    X, Y, Z = np.meshgrid(x, y, z, indexing="ij")
    p1 = gaussian_packet(X, Y, Z, d / 2, geometry)
    p2 = gaussian_packet(X, Y, Z, -d / 2, geometry)
    if kind == "u":
        integrand = 0.5 * (p1**4 + p2**4 - 2 * p1**2 * p2**2)
    else:
        integrand = p1 * p2
    return float(np.einsum("ijk,i,j,k->", integrand, wx, wy, wz))


def random_state(rng, dim):
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_acceptance_lines = []


def record_acceptance(line):
    _acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
