"""Conforming 2D meshes and their degree-of-freedom bookkeeping.

A mesh holds straight-sided triangles or quads, all of one kind. Periodic
boundaries are realised by identifying DOFs across translated face pairs,
so a periodic run simply has fewer unknowns and no boundary faces on the
identified seams. The `Discretization` class precomputes every geometric
table the residual assembly needs (quadrature points, basis values and
physical gradients, face normals, lumped measures, moment anchors), keeping
the per-step code free of mesh traversal.
"""

from dataclasses import dataclass, field

import numpy as np

from .bezier import BasisTable, assemble_lumped
from .errors import (
    ConfigError,
    DegenerateElementError,
    MeshError,
    MeshFormatError,
    PeriodicityError,
)
from .quadrature import edge_rule, quad_rule, triangle_rule

TRI_FACES = ((0, 1), (1, 2), (2, 0))
QUAD_FACES = ((0, 1), (1, 2), (2, 3), (3, 0))
# Local DOFs sitting on each face, matching the basis table DOF order.
FACE_DOFS = {
    ("tri", 1): ((0, 1), (1, 2), (2, 0)),
    ("tri", 2): ((0, 1, 3), (1, 2, 5), (2, 0, 4)),
    ("quad", 1): ((0, 1), (1, 2), (2, 3), (3, 0)),
}
# Element edge carrying each degree-2 midpoint DOF (local slots 3, 4, 5).
TRI2_EDGE_OF_DOF = ((0, 1), (0, 2), (1, 2))


def _wedge(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


@dataclass
class Mesh:
    """Vertices, elements and boundary metadata of one conforming mesh."""

    verts: np.ndarray
    elems: np.ndarray
    kind: str
    boundary_faces: list = field(default_factory=list)  # (elem, lface, tag)
    periodic_pairs: list = field(default_factory=list)  # (eA, fA, eB, fB, shift)
    vertex_alias: np.ndarray = None

    def __post_init__(self):
        self.verts = np.asarray(self.verts, dtype=float)
        self.elems = np.asarray(self.elems, dtype=np.int64)
        if self.kind not in ("tri", "quad"):
            raise ConfigError(f"unknown element kind {self.kind!r}")
        if self.vertex_alias is None:
            self.vertex_alias = np.arange(len(self.verts))

    @property
    def n_elems(self):
        return len(self.elems)

    @property
    def faces_per_elem(self):
        return TRI_FACES if self.kind == "tri" else QUAD_FACES

    @property
    def diameter(self):
        lo, hi = self.verts.min(axis=0), self.verts.max(axis=0)
        return float(np.hypot(*(hi - lo)))

    def areas(self):
        v = self.verts[self.elems]
        if self.kind == "tri":
            return 0.5 * _wedge(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])
        # Shoelace for quads.
        a = 0.5 * (_wedge(v[:, 0], v[:, 1]) + _wedge(v[:, 1], v[:, 2])
                   + _wedge(v[:, 2], v[:, 3]) + _wedge(v[:, 3], v[:, 0]))
        return a

    def interior_edges(self):
        """Shared faces as (eL, fL, eR, fR, shift) records.

        Periodic pairs appear with the translation that maps the L face
        onto the R face; plain interior edges carry a zero shift.
        """
        owners = {}
        for e in range(self.n_elems):
            for f, (a, b) in enumerate(self.faces_per_elem):
                va, vb = self.elems[e, a], self.elems[e, b]
                key = (min(va, vb), max(va, vb))
                owners.setdefault(key, []).append((e, f))
        out = []
        for key, lst in owners.items():
            if len(lst) > 2:
                raise MeshError(f"edge {key} shared by {len(lst)} elements")
            if len(lst) == 2:
                (eL, fL), (eR, fR) = lst
                out.append((eL, fL, eR, fR, np.zeros(2)))
        for eA, fA, eB, fB, shift in self.periodic_pairs:
            out.append((eA, fA, eB, fB, np.asarray(shift, dtype=float)))
        return out


def _check_and_orient(verts, elems, kind):
    """Flip negatively oriented elements in place; reject degenerate ones."""
    v = verts[elems]
    if kind == "tri":
        areas = 0.5 * _wedge(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])
        flip = areas < 0
        elems[flip] = elems[flip][:, [0, 2, 1]]
    else:
        areas = 0.5 * (_wedge(v[:, 0], v[:, 1]) + _wedge(v[:, 1], v[:, 2])
                       + _wedge(v[:, 2], v[:, 3]) + _wedge(v[:, 3], v[:, 0]))
        flip = areas < 0
        elems[flip] = elems[flip][:, [0, 3, 2, 1]]
    scale = max(np.abs(verts).max(), 1.0)
    if np.any(np.abs(areas) <= 1e-14 * scale**2):
        bad = int(np.argmin(np.abs(areas)))
        raise DegenerateElementError(f"element {bad} has vanishing area")
    return elems


def _derive_boundary(elems, kind):
    """Local faces owned by exactly one element, as (elem, lface) pairs."""
    faces = TRI_FACES if kind == "tri" else QUAD_FACES
    owners = {}
    for e in range(len(elems)):
        for f, (a, b) in enumerate(faces):
            va, vb = elems[e, a], elems[e, b]
            key = (min(va, vb), max(va, vb))
            owners.setdefault(key, []).append((e, f))
    out = []
    for key, lst in owners.items():
        if len(lst) > 2:
            raise MeshError(f"edge {key} shared by {len(lst)} elements")
        if len(lst) == 1:
            out.append(lst[0])
    return out


# -- generators --------------------------------------------------------------


def rect_mesh(nx, ny, bounds=(0.0, 1.0, 0.0, 1.0), kind="tri"):
    """Structured grid on a rectangle, tagged left/right/bottom/top.

    Triangles come from splitting each cell along the same diagonal.
    """
    x0, x1, y0, y1 = bounds
    if nx < 1 or ny < 1 or x1 <= x0 or y1 <= y0:
        raise ConfigError("invalid rectangle grid request")
    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    verts = np.column_stack([X.ravel(), Y.ravel()])

    def vid(i, j):
        return j * (nx + 1) + i

    elems = []
    for j in range(ny):
        for i in range(nx):
            q = (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1))
            if kind == "quad":
                elems.append(q)
            else:
                elems.append((q[0], q[1], q[2]))
                elems.append((q[0], q[2], q[3]))
    elems = _check_and_orient(verts, np.array(elems, dtype=np.int64), kind)
    mesh = Mesh(verts, elems, kind)
    tol = 1e-9 * max(x1 - x0, y1 - y0)
    for e, f in _derive_boundary(elems, kind):
        a, b = mesh.faces_per_elem[f]
        mid = 0.5 * (verts[elems[e, a]] + verts[elems[e, b]])
        if abs(mid[0] - x0) < tol:
            tag = "left"
        elif abs(mid[0] - x1) < tol:
            tag = "right"
        elif abs(mid[1] - y0) < tol:
            tag = "bottom"
        else:
            tag = "top"
        mesh.boundary_faces.append((e, f, tag))
    return mesh


def disc_mesh(radius, n_rings):
    """Triangulated disc centred at the origin, boundary tagged 'boundary'.

    Ring k carries 6k vertices, giving 6 * n_rings^2 nearly uniform
    triangles with all boundary vertices exactly on the circle.
    """
    if n_rings < 1 or radius <= 0:
        raise ConfigError("invalid disc mesh request")
    verts = [(0.0, 0.0)]
    ring_start = [None, 1]
    for k in range(1, n_rings + 1):
        r = radius * k / n_rings
        ang = 2 * np.pi * np.arange(6 * k) / (6 * k)
        verts.extend(zip(r * np.cos(ang), r * np.sin(ang)))
        ring_start.append(ring_start[k] + 6 * k)
    verts = np.array(verts)

    def ring(k, i):
        if k == 0:
            return 0
        return ring_start[k] + i % (6 * k)

    elems = []
    for i in range(6):
        elems.append((0, ring(1, i), ring(1, i + 1)))
    for k in range(2, n_rings + 1):
        for s in range(6):
            for i in range(k):
                o = s * k + i
                elems.append((ring(k, o), ring(k, o + 1), ring(k - 1, s * (k - 1) + i)))
            for i in range(k - 1):
                o = s * (k - 1) + i
                elems.append((ring(k - 1, o), ring(k, s * k + i + 1), ring(k - 1, o + 1)))
    elems = _check_and_orient(verts, np.array(elems, dtype=np.int64), "tri")
    mesh = Mesh(verts, elems, "tri")
    for e, f in _derive_boundary(elems, "tri"):
        mesh.boundary_faces.append((e, f, "boundary"))
    return mesh


# -- gmsh ASCII v2.2 ----------------------------------------------------------


def load_gmsh(path):
    """Read a gmsh ASCII v2.2 file with one element kind plus boundary lines."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh]
    phys = {}
    nodes = {}
    tris, quads, blines = [], [], []
    i = 0
    n_lines = len(lines)
    while i < n_lines:
        ln = lines[i]
        if ln == "$MeshFormat":
            parts = lines[i + 1].split()
            if not parts or not parts[0].startswith("2."):
                raise MeshFormatError(f"unsupported gmsh format {lines[i+1]!r}", i + 2)
            i += 3
        elif ln == "$PhysicalNames":
            cnt = int(lines[i + 1])
            for k in range(cnt):
                parts = lines[i + 2 + k].split(maxsplit=2)
                phys[(int(parts[0]), int(parts[1]))] = parts[2].strip('"')
            i += cnt + 3
        elif ln == "$Nodes":
            cnt = int(lines[i + 1])
            for k in range(cnt):
                parts = lines[i + 2 + k].split()
                nodes[int(parts[0])] = (float(parts[1]), float(parts[2]))
            i += cnt + 3
        elif ln == "$Elements":
            cnt = int(lines[i + 1])
            for k in range(cnt):
                parts = [int(p) for p in lines[i + 2 + k].split()]
                etype, ntags = parts[1], parts[2]
                tags, conn = parts[3:3 + ntags], parts[3 + ntags:]
                ptag = tags[0] if tags else 0
                if etype == 1:
                    blines.append((ptag, conn))
                elif etype == 2:
                    tris.append(conn)
                elif etype == 3:
                    quads.append(conn)
                elif etype == 15:
                    pass  # isolated points are ignored
                else:
                    raise MeshFormatError(f"unsupported element type {etype}", i + 3 + k)
            i += cnt + 3
        elif ln.startswith("$"):
            # Skip unknown sections up to their matching end marker.
            end = "$End" + ln[1:]
            j = i + 1
            while j < n_lines and lines[j] != end:
                j += 1
            i = j + 1
        else:
            i += 1
    if not nodes:
        raise MeshFormatError("no $Nodes section found")
    if tris and quads:
        raise MeshError("mixed triangle/quad meshes are not supported")
    if not tris and not quads:
        raise MeshError("no 2D elements found")
    ids = sorted(nodes)
    remap = {nid: k for k, nid in enumerate(ids)}
    verts = np.array([nodes[nid] for nid in ids])
    kind = "tri" if tris else "quad"
    elems = np.array([[remap[n] for n in conn] for conn in (tris or quads)], dtype=np.int64)
    elems = _check_and_orient(verts, elems, kind)
    mesh = Mesh(verts, elems, kind)

    tag_of_edge = {}
    for ptag, conn in blines:
        a, b = remap[conn[0]], remap[conn[1]]
        name = phys.get((1, ptag), f"tag{ptag}")
        tag_of_edge[(min(a, b), max(a, b))] = name
    for e, f in _derive_boundary(elems, kind):
        a, b = mesh.faces_per_elem[f]
        va, vb = elems[e, a], elems[e, b]
        tag = tag_of_edge.get((min(va, vb), max(va, vb)), "boundary")
        mesh.boundary_faces.append((e, f, tag))
    return mesh


# -- periodic identification --------------------------------------------------


def make_periodic(mesh, tag_pairs):
    """Identify DOFs across translated boundary face pairs.

    Each (tag_a, tag_b) pair must describe two face sets that match under a
    single translation. The returned mesh has those faces removed from the
    boundary set, recorded as periodic interior edges, and the matched
    vertices unified in `vertex_alias` (a union-find representative map, so
    corners shared by two pairs collapse to a single DOF).
    """
    parent = mesh.vertex_alias.copy()

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    tol = 1e-9 * mesh.diameter
    faces = mesh.faces_per_elem
    boundary = list(mesh.boundary_faces)
    pairs = list(mesh.periodic_pairs)
    for tag_a, tag_b in tag_pairs:
        side_a = [(e, f) for e, f, t in boundary if t == tag_a]
        side_b = [(e, f) for e, f, t in boundary if t == tag_b]
        if not side_a or len(side_a) != len(side_b):
            raise PeriodicityError(
                f"periodic tags {tag_a!r}/{tag_b!r} have {len(side_a)} and "
                f"{len(side_b)} faces")

        def centroid(ef):
            a, b = faces[ef[1]]
            return 0.5 * (mesh.verts[mesh.elems[ef[0], a]] + mesh.verts[mesh.elems[ef[0], b]])

        cen_a = np.array([centroid(ef) for ef in side_a])
        cen_b = np.array([centroid(ef) for ef in side_b])
        shift = cen_b.mean(axis=0) - cen_a.mean(axis=0)
        key_a = np.lexsort(np.round((cen_a + shift) / tol).T)
        key_b = np.lexsort(np.round(cen_b / tol).T)
        for ia, ib in zip(key_a, key_b):
            if np.abs(cen_a[ia] + shift - cen_b[ib]).max() > 10 * tol:
                raise PeriodicityError(
                    f"faces tagged {tag_a!r}/{tag_b!r} do not match under "
                    f"translation {shift}")
            eA, fA = side_a[ia]
            eB, fB = side_b[ib]
            pairs.append((eA, fA, eB, fB, shift.copy()))
            va = [mesh.elems[eA, k] for k in faces[fA]]
            vb = [mesh.elems[eB, k] for k in faces[fB]]
            for v in va:
                hits = [w for w in vb
                        if np.abs(mesh.verts[v] + shift - mesh.verts[w]).max() < 10 * tol]
                if len(hits) != 1:
                    raise PeriodicityError("vertex match failed on periodic faces")
                union(v, hits[0])
        done = {(e, f) for e, f in side_a} | {(e, f) for e, f in side_b}
        boundary = [(e, f, t) for e, f, t in boundary if (e, f) not in done]
    for v in range(len(parent)):
        parent[v] = find(v)
    return Mesh(mesh.verts, mesh.elems.copy(), mesh.kind,
                boundary_faces=boundary, periodic_pairs=pairs, vertex_alias=parent)


# -- DOF numbering -------------------------------------------------------------


class DofMap:
    """Global DOF ids for (mesh, degree), honouring vertex identification."""

    def __init__(self, mesh, degree):
        if degree == 2 and mesh.kind != "tri":
            raise ConfigError("degree 2 is only supported on triangle meshes")
        self.mesh = mesh
        self.degree = degree
        alias = mesh.vertex_alias
        reps = np.unique(alias)
        compress = {int(r): k for k, r in enumerate(reps)}
        vdof = np.array([compress[int(alias[v])] for v in range(len(mesh.verts))])
        n_dof = len(reps)
        pos = {compress[int(r)]: mesh.verts[r] for r in reps}

        n_loc = {("tri", 1): 3, ("tri", 2): 6, ("quad", 1): 4}[(mesh.kind, degree)]
        elem_dofs = np.zeros((mesh.n_elems, n_loc), dtype=np.int64)
        elem_dofs[:, : mesh.elems.shape[1]] = vdof[mesh.elems]
        if degree == 2:
            edge_ids = {}
            for e in range(mesh.n_elems):
                for slot, (a, b) in enumerate(TRI2_EDGE_OF_DOF):
                    va, vb = vdof[mesh.elems[e, a]], vdof[mesh.elems[e, b]]
                    key = (min(va, vb), max(va, vb))
                    if key not in edge_ids:
                        edge_ids[key] = n_dof
                        pos[n_dof] = 0.5 * (mesh.verts[mesh.elems[e, a]]
                                            + mesh.verts[mesh.elems[e, b]])
                        n_dof += 1
                    elem_dofs[e, 3 + slot] = edge_ids[key]
        self.n_dof = n_dof
        self.elem_dofs = elem_dofs
        self.positions = np.array([pos[k] for k in range(n_dof)])


# -- precomputed assembly geometry ---------------------------------------------


class Discretization:
    """Everything geometric the assembly kernels need, precomputed once."""

    def __init__(self, mesh, degree):
        self.mesh = mesh
        self.degree = degree
        self.table = BasisTable(mesh.kind, degree)
        self.dofmap = DofMap(mesh, degree)
        self.elem_dofs = self.dofmap.elem_dofs
        self.n_loc = self.table.n_loc
        self.n_dof = self.dofmap.n_dof
        ev = mesh.verts[mesh.elems]  # (n_e, n_vert, 2)
        self.elem_verts = ev
        nqf = 3 if degree == 1 else 4
        self._build_volume(ev)
        self._build_faces(ev, nqf)
        self._build_interior_edges(nqf)
        self._build_boundary(nqf)
        self._build_measures()

    # volume quadrature, basis values/gradients, mass matrices
    def _build_volume(self, ev):
        kind = self.mesh.kind
        if kind == "tri":
            bary, w = triangle_rule(4 if self.degree == 1 else 6)
            self.vol_B = self.table.values(bary)  # (nq, n_loc)
            e1 = ev[:, 1] - ev[:, 0]
            e2 = ev[:, 2] - ev[:, 0]
            area = 0.5 * _wedge(e1, e2)
            if np.any(area <= 0):
                raise DegenerateElementError("negatively oriented or flat triangle")
            self.areas = area
            # grad lambda_i = perp(x_j - x_k) / (2A), (i, j, k) cyclic
            perp = lambda v: np.stack([v[..., 1], -v[..., 0]], axis=-1)
            gl = np.stack([
                perp(ev[:, 1] - ev[:, 2]),
                perp(ev[:, 2] - ev[:, 0]),
                perp(ev[:, 0] - ev[:, 1]),
            ], axis=1) / (2 * area)[:, None, None]
            self.grad_lam = gl  # (n_e, 3, 2)
            bg = self.table.bary_grads(bary)  # (nq, n_loc, 3)
            self.vol_dB = np.einsum("qsb,ebd->eqsd", bg, gl)
            self.vol_x = np.einsum("qv,evd->eqd", bary, ev)
            self.vol_w = w[None, :] * area[:, None]
        else:
            xi, w = quad_rule(3)
            self.vol_B = self.table.quad_ref_values(xi)  # (nq, 4)
            rg = self.table.quad_ref_grads(xi)  # (nq, 4, 2)
            J = np.einsum("evd,qvr->eqdr", ev, rg)
            detJ = J[..., 0, 0] * J[..., 1, 1] - J[..., 0, 1] * J[..., 1, 0]
            if np.any(detJ <= 0):
                raise DegenerateElementError("non-convex or inverted quad")
            Jinv = np.empty_like(J)
            Jinv[..., 0, 0] = J[..., 1, 1]
            Jinv[..., 0, 1] = -J[..., 0, 1]
            Jinv[..., 1, 0] = -J[..., 1, 0]
            Jinv[..., 1, 1] = J[..., 0, 0]
            Jinv /= detJ[..., None, None]
            self.vol_dB = np.einsum("qvr,eqrd->eqvd", rg, Jinv)
            self.vol_x = np.einsum("qv,evd->eqd", self.vol_B, ev)
            self.vol_w = w[None, :] * detJ
            self.areas = self.vol_w.sum(axis=1)
        self.mass = np.einsum("eq,qs,qt->est", self.vol_w, self.vol_B, self.vol_B)
        cmat = np.einsum("eq,qs,eqtd->estd", self.vol_w, self.vol_B, self.vol_dB)
        self.cmat_norm = np.sqrt((cmat**2).sum(axis=-1)).max(axis=(1, 2))

    # per-face quadrature data on all element faces
    def _build_faces(self, ev, nqf):
        kind = self.mesh.kind
        faces = self.mesh.faces_per_elem
        t, tw = edge_rule(nqf)
        self.face_t, self.face_tw = t, tw
        nf = len(faces)
        if kind == "tri":
            corners = np.eye(3)
        else:
            corners = np.array([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
        ref_pts = np.stack([
            (1 - t)[:, None] * corners[a] + t[:, None] * corners[b]
            for a, b in faces
        ])  # (nf, nqf, refdim)
        if kind == "tri":
            self.face_B = self.table.values(ref_pts)  # (nf, nqf, n_loc)
            bg = self.table.bary_grads(ref_pts)  # (nf, nqf, n_loc, 3)
            self.face_dB = np.einsum("fqsb,ebd->efqsd", bg, self.grad_lam)
        else:
            self.face_B = self.table.quad_ref_values(ref_pts)
            rg = self.table.quad_ref_grads(ref_pts)  # (nf, nqf, 4, 2)
            J = np.einsum("evd,fqvr->efqdr", ev, rg)
            detJ = J[..., 0, 0] * J[..., 1, 1] - J[..., 0, 1] * J[..., 1, 0]
            Jinv = np.empty_like(J)
            Jinv[..., 0, 0] = J[..., 1, 1]
            Jinv[..., 0, 1] = -J[..., 0, 1]
            Jinv[..., 1, 0] = -J[..., 1, 0]
            Jinv[..., 1, 1] = J[..., 0, 0]
            Jinv /= detJ[..., None, None]
            self.face_dB = np.einsum("fqvr,efqrd->efqvd", rg, Jinv)
        lam = self.face_B if self.degree == 1 else None
        if lam is None:
            # geometry stays affine for degree 2: use vertex barycentrics
            lam = np.stack([
                (1 - t)[:, None] * np.eye(3)[a] + t[:, None] * np.eye(3)[b]
                for a, b in faces
            ])
        self.face_x = np.einsum("fqv,evd->efqd", lam, ev)
        edge_vec = np.stack([ev[:, b] - ev[:, a] for a, b in faces], axis=1)
        lens = np.hypot(edge_vec[..., 0], edge_vec[..., 1])
        self.face_len = lens  # (n_e, nf)
        self.face_n = np.stack([edge_vec[..., 1], -edge_vec[..., 0]], axis=-1) / lens[..., None]
        self.face_w = tw[None, None, :] * lens[..., None]
        self.face_dofs = np.array(FACE_DOFS[(kind, self.degree)])

    # interior edge tables for jump stabilisation
    def _build_interior_edges(self, nqf):
        records = self.mesh.interior_edges()
        self.n_ie = len(records)
        if self.n_ie == 0:
            return
        eL = np.array([r[0] for r in records])
        fL = np.array([r[1] for r in records])
        eR = np.array([r[2] for r in records])
        fR = np.array([r[3] for r in records])
        shift = np.array([r[4] for r in records])
        self.ie_eL, self.ie_fL, self.ie_eR, self.ie_fR = eL, fL, eR, fR
        xL = self.face_x[eL, fL]  # (n_ie, nqf, 2)
        xR = self.face_x[eR, fR]
        # Decide, per edge, whether the R-side parametrisation runs opposite
        # to the L side; Gauss points are symmetric so a flip is a reversal.
        same = np.abs(xL + shift[:, None] - xR).max(axis=(1, 2))
        flip = np.abs(xL + shift[:, None] - xR[:, ::-1]).max(axis=(1, 2))
        use_flip = flip < same
        tol = 1e-8 * max(self.mesh.diameter, 1.0)
        if np.any(np.minimum(same, flip) > tol):
            raise MeshError("interior edge quadrature points do not coincide")
        gradR = self.face_dB[eR, fR]
        BR = np.broadcast_to(self.face_B[fR], gradR.shape[:3]).copy()
        gradR[use_flip] = gradR[use_flip][:, ::-1]
        BR[use_flip] = BR[use_flip][:, ::-1]
        self.ie_gradL = self.face_dB[eL, fL]  # (n_ie, nqf, n_loc, 2)
        self.ie_gradR = gradR
        self.ie_BL = np.broadcast_to(self.face_B[fL], gradR.shape[:3]).copy()
        self.ie_BR = BR
        self.ie_w = self.face_w[eL, fL]
        self.ie_h = self.face_len[eL, fL]

    # boundary face tables
    def _build_boundary(self, nqf):
        bf = self.mesh.boundary_faces
        self.n_bf = len(bf)
        self.bf_tags = sorted({t for _, _, t in bf})
        if self.n_bf == 0:
            return
        tag_id = {t: k for k, t in enumerate(self.bf_tags)}
        self.bf_elem = np.array([e for e, _, _ in bf])
        self.bf_face = np.array([f for _, f, _ in bf])
        self.bf_tag = np.array([tag_id[t] for _, _, t in bf])
        self.bf_B = self.face_B[self.bf_face]  # (n_bf, nqf, n_loc)
        self.bf_x = self.face_x[self.bf_elem, self.bf_face]
        self.bf_n = self.face_n[self.bf_elem, self.bf_face]
        self.bf_w = self.face_w[self.bf_elem, self.bf_face]
        self.bf_fdofs = self.face_dofs[self.bf_face]  # (n_bf, n_fd) local slots

    # lumped measures, moment anchors, element length scales
    def _build_measures(self):
        kind = self.mesh.kind
        self.z_moment = self.table.moment_z(self.elem_verts)  # (n_e, n_loc, 2)
        self.c_sigma, self.y_sigma = assemble_lumped(
            self.n_dof, self.elem_dofs, self.areas, self.z_moment,
            self.table.integral_fraction)
        grev = self.table.greville()
        if kind == "tri":
            self.x_anchor = np.einsum("sv,evd->esd", grev, self.elem_verts)
        else:
            lam = self.table.quad_ref_values(grev)
            self.x_anchor = np.einsum("sv,evd->esd", lam, self.elem_verts)
        peri = self.face_len.sum(axis=1)
        if kind == "tri":
            self.h_elem = 2.0 * self.areas / peri
        else:
            self.h_elem = self.face_len.min(axis=1)
        # Wedge anchors for angular momentum work. These must be
        # single-valued per DOF so that assembled wedge sums telescope; on a
        # periodic mesh the element-local coordinates of a glued DOF differ
        # between its two sides, which would leak a spurious contribution
        # proportional to the identification shift. Interpolating the same
        # per-DOF values along faces keeps the angular flux of every shared
        # face cancelling pairwise, identified faces included.
        pos = self.dofmap.positions
        self.a_el = pos[self.elem_dofs]  # (n_e, n_loc, 2)
        self.face_ax = np.einsum("fqs,esd->efqd", self.face_B, self.a_el)
        if self.n_bf:
            self.bf_ax = self.face_ax[self.bf_elem, self.bf_face]

    def dof_positions(self):
        return self.dofmap.positions

    def interpolate(self, values):
        """Basis coefficients whose expansion matches point values at DOFs.

        Degree-1 coefficients are the point values themselves. For the
        quadratic basis the vertex functions are the only ones alive at
        vertices, while an edge midpoint mixes the bubble with the two
        endpoint functions, so the bubble coefficient must compensate:
        c_mid = 2 v_mid - (v_a + v_b) / 2.
        """
        if self.degree == 1:
            return np.array(values, dtype=float, copy=True)
        coeff = np.array(values, dtype=float, copy=True)
        ed = self.elem_dofs
        for slot, (a, b) in enumerate(TRI2_EDGE_OF_DOF, start=3):
            coeff[ed[:, slot]] = 2.0 * values[ed[:, slot]] - 0.5 * (
                values[ed[:, a]] + values[ed[:, b]])
        return coeff
