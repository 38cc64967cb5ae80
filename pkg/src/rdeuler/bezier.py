"""Bernstein-Bezier bases on triangles and the bilinear basis on quads.

Degrees of freedom are Bezier control coefficients, not nodal values. What
makes these bases attractive for residual distribution is that every basis
function is non-negative with a strictly positive integral, so the lumped
masses |C_sigma| used in explicit updates cannot degenerate. On a triangle
of degree n every basis function integrates to the same fraction
2 / ((n+1)(n+2)) of the element area.

Each table also carries first moment data: `moment_coeffs` gives, per DOF,
the affine combination of element vertex coordinates that equals
(1/|K|) int_K x B_sigma dx. These exact moments feed the angular momentum
bookkeeping, where they play the role of generalised DOF positions.
"""

from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .errors import ConfigError

_F = factorial

# (1/|K|) int_K x B dx as affine weights on the element vertices.
# Triangle degree 1, DOF order (100)(010)(001):
_TRI1_MOMENTS = np.array([
    [1 / 6, 1 / 12, 1 / 12],
    [1 / 12, 1 / 6, 1 / 12],
    [1 / 12, 1 / 12, 1 / 6],
])
# Triangle degree 2, DOF order (200)(020)(002)(110)(101)(011):
_TRI2_MOMENTS = np.array([
    [1 / 10, 1 / 30, 1 / 30],
    [1 / 30, 1 / 10, 1 / 30],
    [1 / 30, 1 / 30, 1 / 10],
    [1 / 15, 1 / 15, 1 / 30],
    [1 / 15, 1 / 30, 1 / 15],
    [1 / 30, 1 / 15, 1 / 15],
])
# Bilinear quad, DOF order = CCW corners:
_QUAD_MOMENTS = np.array([
    [1 / 9, 1 / 18, 1 / 36, 1 / 18],
    [1 / 18, 1 / 9, 1 / 18, 1 / 36],
    [1 / 36, 1 / 18, 1 / 9, 1 / 18],
    [1 / 18, 1 / 36, 1 / 18, 1 / 9],
])


def multi_indices(kind, degree):
    """DOF multi-indices, vertices first, remaining ones lexicographic."""
    if kind == "tri":
        verts = [(degree, 0, 0), (0, degree, 0), (0, 0, degree)]
        rest = [
            (i, j, degree - i - j)
            for i in range(degree, -1, -1)
            for j in range(degree - i, -1, -1)
        ]
        rest = [mi for mi in rest if mi not in verts]
        return verts + rest
    if kind == "quad":
        if degree != 1:
            raise ConfigError("quad elements support degree 1 only")
        return [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]
    raise ConfigError(f"unknown element kind {kind!r}")


@dataclass
class BasisTable:
    """Evaluation and moment tables for one (kind, degree) pair."""

    kind: str
    degree: int
    mindices: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.kind == "tri" and self.degree not in (1, 2):
            raise ConfigError(f"triangle degree {self.degree} not supported")
        self.mindices = np.array(multi_indices(self.kind, self.degree))
        if self.kind == "tri":
            self._coef = np.array(
                [_F(self.degree) / (_F(a) * _F(b) * _F(c)) for a, b, c in self.mindices],
                dtype=float,
            )

    @property
    def n_loc(self):
        return len(self.mindices)

    @property
    def integral_fraction(self):
        """int_K B_sigma dx / |K|, identical for every DOF of the table."""
        if self.kind == "tri":
            n = self.degree
            return 2.0 / ((n + 1) * (n + 2))
        return 0.25

    # -- evaluation ---------------------------------------------------------

    def values(self, bary):
        """All basis values at barycentric points, shape (..., n_loc)."""
        bary = np.asarray(bary, dtype=float)
        if self.kind == "tri":
            powers = bary[..., None, :] ** self.mindices[None, :, :]
            return self._coef * powers.prod(axis=-1)
        return bary  # bilinear basis functions are the lambdas themselves

    def eval_basis(self, mi, bary):
        """Value of the basis function with multi-index `mi` at `bary`."""
        mi = tuple(mi)
        if sum(mi) != self.degree:
            raise ConfigError(f"multi-index {mi} does not match degree {self.degree}")
        rows = [tuple(r) for r in self.mindices]
        if mi not in rows:
            raise ConfigError(f"multi-index {mi} not in table")
        return self.values(bary)[..., rows.index(mi)]

    def bary_grads(self, bary):
        """d B_sigma / d lambda_i at barycentric points, shape (..., n_loc, 3).

        Triangles only; physical gradients follow by chain rule with the
        (constant) barycentric gradients of the element.
        """
        bary = np.asarray(bary, dtype=float)
        out = np.zeros(bary.shape[:-1] + (self.n_loc, 3))
        for i in range(3):
            k = self.mindices[:, i]
            exps = self.mindices.copy()
            exps[:, i] = np.maximum(exps[:, i] - 1, 0)
            powers = (bary[..., None, :] ** exps[None, :, :]).prod(axis=-1)
            out[..., i] = self._coef * k * powers * (k > 0)
        return out

    def quad_ref_values(self, xi):
        """Bilinear basis values at reference points xi in [0,1]^2."""
        x, y = xi[..., 0], xi[..., 1]
        return np.stack([(1 - x) * (1 - y), x * (1 - y), x * y, (1 - x) * y], axis=-1)

    def quad_ref_grads(self, xi):
        """d lambda / d (xi, eta), shape (..., 4, 2)."""
        x, y = xi[..., 0], xi[..., 1]
        gx = np.stack([-(1 - y), (1 - y), y, -y], axis=-1)
        gy = np.stack([-(1 - x), -x, x, (1 - x)], axis=-1)
        return np.stack([gx, gy], axis=-1)

    # -- geometry attached to DOFs ------------------------------------------

    def greville(self):
        """Greville abscissae in reference coordinates, shape (n_loc, dim).

        Triangles: barycentric triples mi / degree. Quads: corner coordinates.
        """
        if self.kind == "tri":
            return self.mindices / self.degree
        return np.array([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])

    @property
    def moment_coeffs(self):
        """Affine vertex weights for (1/|K|) int_K x B_sigma dx, (n_loc, n_verts)."""
        if self.kind == "quad":
            return _QUAD_MOMENTS
        return _TRI1_MOMENTS if self.degree == 1 else _TRI2_MOMENTS

    def moment_z(self, verts):
        """(1/|K|) int_K x B_sigma dx for an element, shape (..., n_loc, 2).

        `verts` holds the element vertex coordinates, shape (..., n_verts, 2).
        Exact for straight triangles and parallelogram quads.
        """
        return np.einsum("sv,...vd->...sd", self.moment_coeffs, np.asarray(verts))


def assemble_lumped(n_dof, elem_dofs, areas, moment_z, fraction):
    """Lumped measures |C_sigma| and global moment anchors y_sigma.

    |C_sigma| = sum_K |K| * fraction and
    y_sigma = (1 / |C_sigma|) sum_K |K| * z_sigma^K,
    accumulated over the elements containing each DOF.

    Args:
        n_dof: total DOF count.
        elem_dofs: (n_e, n_loc) global DOF ids.
        areas: (n_e,) element measures.
        moment_z: (n_e, n_loc, 2) per-element moment vectors.
        fraction: integral fraction of the basis table.

    Returns:
        (c_sigma, y_sigma) with shapes (n_dof,) and (n_dof, 2).
    """
    c = np.zeros(n_dof)
    np.add.at(c, elem_dofs.ravel(), np.repeat(areas * fraction, elem_dofs.shape[1]))
    y = np.zeros((n_dof, 2))
    np.add.at(y, elem_dofs.ravel(), (areas[:, None, None] * moment_z).reshape(-1, 2))
    if np.any(c <= 0):
        raise ConfigError("non-positive lumped measure; mesh is degenerate")
    return c, y / c[:, None]
