"""P1 Galerkin assembly on triangle meshes.

Consistent (non-lumped) mass matrix, diffusion stiffness matrix with a
one-point centroid quadrature for the conductivity tensor, nodal
interpolation, and the mass-matrix L2 norm.
"""
from __future__ import annotations

import numpy as np

from .mesh import TriMesh, all_triangle_geometry
from .sparse import CsrMatrix, DimensionMismatch, from_triplets, spmv

# Reference-triangle integrals of products of the three P1 basis functions,
# scaled by 1/area: int phi_i phi_j = area/12 * (1 + delta_ij).
_LOCAL_MASS = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0


class NonFiniteValue(ValueError):
    pass


class DiffusionTensor:
    """Symmetric positive definite conductivity field D(x, y).

    Wraps a callable (x, y) -> 2x2 symmetric matrix.  Constant tensors keep
    their value in ``constant`` so assembly can skip per-triangle evaluation.
    """

    def __init__(self, fn, constant: np.ndarray | None = None):
        self._fn = fn
        self.constant = None if constant is None else np.asarray(constant, dtype=float)

    @classmethod
    def isotropic(cls, sigma: float = 1.0) -> "DiffusionTensor":
        mat = sigma * np.eye(2)
        return cls(lambda x, y: mat, constant=mat)

    @classmethod
    def diagonal(cls, dxx: float, dyy: float) -> "DiffusionTensor":
        mat = np.diag([float(dxx), float(dyy)])
        return cls(lambda x, y: mat, constant=mat)

    @classmethod
    def from_function(cls, fn) -> "DiffusionTensor":
        return cls(fn)

    def __call__(self, x: float, y: float) -> np.ndarray:
        return np.asarray(self._fn(x, y), dtype=float)

    def min_eigenvalue_on(self, mesh: TriMesh) -> float:
        """Smallest eigenvalue over all centroid quadrature points of the mesh.

        A positive return value certifies uniform ellipticity on this mesh
        (for the quadrature actually used by assemble_stiffness).
        """
        if self.constant is not None:
            return float(np.linalg.eigvalsh(self.constant).min())
        lo = np.inf
        for cx, cy in mesh.centroids:
            d = self(cx, cy)
            if not np.allclose(d, d.T, atol=1e-14):
                raise ValueError(f"diffusion tensor not symmetric at ({cx}, {cy})")
            lo = min(lo, np.linalg.eigvalsh(d).min())
        return float(lo)


IDENTITY_DIFFUSION = DiffusionTensor.isotropic(1.0)


def assemble_mass(mesh: TriMesh) -> CsrMatrix:
    """Consistent P1 mass matrix M_ij = int phi_i phi_j."""
    areas, _ = all_triangle_geometry(mesh)
    local = areas[:, None, None] * _LOCAL_MASS  # (T, 3, 3)
    return _scatter(mesh, local)


def assemble_stiffness(mesh: TriMesh, D: DiffusionTensor = IDENTITY_DIFFUSION) -> CsrMatrix:
    """Stiffness matrix A_ij = int (D grad phi_j) . grad phi_i.

    D is evaluated at each triangle centroid (one-point rule, exact for
    constant D).  Row sums vanish: the kernel contains the constants, which
    is the pure-Neumann setting.
    """
    areas, grads = all_triangle_geometry(mesh)
    if D.constant is not None:
        Dc = np.broadcast_to(D.constant, (mesh.n_triangles, 2, 2))
    else:
        Dc = np.stack([D(cx, cy) for cx, cy in mesh.centroids])
    # K[t, i, j] = area_t * grad_i . D_t grad_j
    local = areas[:, None, None] * np.einsum("tia,tab,tjb->tij", grads, Dc, grads)
    return _scatter(mesh, local)


def _scatter(mesh: TriMesh, local: np.ndarray) -> CsrMatrix:
    tri = mesh.triangles
    rows = np.repeat(tri, 3, axis=1).ravel()  # i index varies slower
    cols = np.tile(tri, (1, 3)).ravel()
    return from_triplets(mesh.n_nodes, mesh.n_nodes, rows, cols, local.ravel())


def interpolate_nodal(mesh: TriMesh, f) -> np.ndarray:
    """Vector of f evaluated at the mesh nodes, in node order.

    ``f`` may be a scalar constant, a vectorized callable of (x, y) arrays,
    or a plain scalar callable.
    """
    x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
    if np.isscalar(f):
        vals = np.full(mesh.n_nodes, float(f))
    else:
        vals = np.asarray(f(x, y), dtype=float)
        if vals.shape == ():
            vals = np.full(mesh.n_nodes, float(vals))
        elif vals.shape != (mesh.n_nodes,):
            vals = np.array([float(f(xi, yi)) for xi, yi in mesh.nodes])
    if not np.all(np.isfinite(vals)):
        raise NonFiniteValue("interpolated function is not finite at some node")
    return vals


def l2_norm(M: CsrMatrix, e: np.ndarray) -> float:
    """sqrt(e^T M e), the L2 norm of the P1 function with nodal values e."""
    e = np.asarray(e, dtype=float)
    if e.shape != (M.ncols,):
        raise DimensionMismatch(f"expected vector of length {M.ncols}, got shape {e.shape}")
    return float(np.sqrt(max(e @ spmv(M, e), 0.0)))
