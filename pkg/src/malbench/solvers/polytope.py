"""Payoff polytope, its faces, and the Pareto front.

The polytope is the convex hull of the joint payoff points of a 2- or
3-player game. Lower-dimensional hulls (collinear or coplanar payoffs, a
single repeated point) are handled by working in an orthonormal basis of
the affine hull. Faces of every dimension are listed, including the body
itself, because the efficient set of a polytope is a union of faces of
mixed dimension.

A face belongs to the Pareto front iff a relative-interior point of it is
efficient; efficiency of a point is decided by a small linear programme
(no feasible payoff point dominates it).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from ..games import RepeatedGame

GEOM_TOL = 1e-9


@dataclass(frozen=True)
class Face:
    """A face given by indices into ``PayoffPolytope.points``.

    Polygon vertices are stored in cyclic order.
    """

    vertices: tuple[int, ...]
    dim: int


@dataclass
class PayoffPolytope:
    points: np.ndarray  # distinct payoff points, one row each
    provenance: list[list[int]]  # flat joint actions mapping to each point
    dim: int  # affine dimension of the hull
    vertices: list[int]
    faces: list[Face]
    # outward unit normals and offsets (n . x <= b) when the hull is full-dimensional
    normals: np.ndarray | None = None
    offsets: np.ndarray | None = None

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]

    def vertex_points(self) -> np.ndarray:
        return self.points[self.vertices]

    def face_points(self, face: Face) -> np.ndarray:
        return self.points[list(face.vertices)]

    def contains(self, x, tol: float = GEOM_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        if self.normals is not None:
            return bool(np.all(self.normals @ x <= self.offsets + tol))
        body = max(self.faces, key=lambda f: f.dim)
        return bool(np.linalg.norm(closest_point_on_face(self.face_points(body), x) - x) <= tol)

    def project(self, x) -> np.ndarray:
        """Nearest point of the polytope to ``x``."""
        x = np.asarray(x, dtype=float)
        if self.contains(x):
            return x.copy()
        if self.normals is not None:
            candidates = [f for f in self.faces if f.dim == self.dim - 1]
        else:
            candidates = [max(self.faces, key=lambda f: f.dim)]
        best, best_d = None, np.inf
        for f in candidates:
            c = closest_point_on_face(self.face_points(f), x)
            d = np.linalg.norm(c - x)
            if d < best_d:
                best, best_d = c, d
        return best


@dataclass
class ParetoFront:
    polytope: PayoffPolytope
    faces: list[Face] = field(default_factory=list)

    def maximal_faces(self) -> list[Face]:
        """Efficient faces not contained in a larger efficient face."""
        sets = [set(f.vertices) for f in self.faces]
        return [
            f for f, s in zip(self.faces, sets)
            if not any(s < other for other in sets)
        ]

    def face_points(self, face: Face) -> np.ndarray:
        return self.polytope.face_points(face)

    def segments(self) -> list[tuple[tuple[float, ...], tuple[float, ...]]]:
        out = []
        for f in self.maximal_faces():
            if f.dim == 1:
                a, b = self.face_points(f)
                out.append((tuple(a), tuple(b)))
        return out


# -- hull construction ------------------------------------------------------


def _monotone_chain(pts: np.ndarray) -> list[int]:
    """Indices of the 2D hull vertices in counter-clockwise order."""
    order = sorted(range(len(pts)), key=lambda i: (pts[i][0], pts[i][1]))

    def cross(o, a, b):
        return (pts[a][0] - pts[o][0]) * (pts[b][1] - pts[o][1]) - (pts[a][1] - pts[o][1]) * (pts[b][0] - pts[o][0])

    lower: list[int] = []
    for i in order:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], i) <= GEOM_TOL:
            lower.pop()
        lower.append(i)
    upper: list[int] = []
    for i in reversed(order):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], i) <= GEOM_TOL:
            upper.pop()
        upper.append(i)
    return lower[:-1] + upper[:-1]


def _affine_frame(points: np.ndarray):
    origin = points[0]
    centered = points - origin
    if len(points) == 1:
        return origin, np.zeros((0, points.shape[1]))
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    scale = max(1.0, float(np.abs(points).max()))
    rank = int(np.sum(s > GEOM_TOL * scale))
    return origin, vt[:rank]


def _polygon_faces(ring: list[int]) -> list[Face]:
    faces = [Face(tuple(ring), 2)]
    for a, b in zip(ring, ring[1:] + ring[:1]):
        faces.append(Face(tuple(sorted((a, b))), 1))
    return faces


def build_payoff_polytope(game: RepeatedGame) -> PayoffPolytope:
    if game.player_count not in (2, 3):
        raise ValueError("payoff polytopes are built for 2 or 3 players")
    return polytope_from_points(game.flat_payoffs().T)


def polytope_from_points(raw: np.ndarray) -> PayoffPolytope:
    raw = np.asarray(raw, dtype=float)
    points: list[np.ndarray] = []
    provenance: list[list[int]] = []
    for j, p in enumerate(raw):
        for i, q in enumerate(points):
            if np.max(np.abs(p - q)) <= GEOM_TOL:
                provenance[i].append(j)
                break
        else:
            points.append(p)
            provenance.append([j])
    pts = np.array(points)
    origin, basis = _affine_frame(pts)
    dim = basis.shape[0]
    local = (pts - origin) @ basis.T
    normals = offsets = None

    if dim == 0:
        faces = [Face((0,), 0)]
    elif dim == 1:
        lo, hi = int(np.argmin(local[:, 0])), int(np.argmax(local[:, 0]))
        faces = [Face(tuple(sorted((lo, hi))), 1)]
    elif dim == 2:
        full = pts.shape[1] == 2
        # in the plane keep original coordinates so the ring is counter-clockwise
        ring = _monotone_chain(pts if full else local)
        faces = _polygon_faces(ring)
        if full:
            normals, offsets = [], []
            for a, b in zip(ring, ring[1:] + ring[:1]):
                d = pts[b] - pts[a]
                nrm = np.array([d[1], -d[0]]) / np.linalg.norm(d)
                normals.append(nrm)
                offsets.append(nrm @ pts[a])
    else:
        faces, normals, offsets = _hull3(pts)
    # every vertex of a listed face is a 0-face
    vertices = sorted({v for f in faces for v in f.vertices})
    faces = faces + [Face((v,), 0) for v in vertices if Face((v,), 0) not in faces]
    return PayoffPolytope(
        points=pts,
        provenance=provenance,
        dim=dim,
        vertices=vertices,
        faces=faces,
        normals=None if normals is None else np.array(normals),
        offsets=None if offsets is None else np.array(offsets),
    )


def _hull3(pts: np.ndarray):
    """Full-dimensional 3D hull by supporting-plane enumeration (k <= 8 points)."""
    scale = max(1.0, float(np.abs(pts).max()))
    seen: dict[frozenset, tuple[np.ndarray, float]] = {}
    for i, j, l in itertools.combinations(range(len(pts)), 3):
        nrm = np.cross(pts[j] - pts[i], pts[l] - pts[i])
        norm = np.linalg.norm(nrm)
        if norm <= GEOM_TOL * scale:
            continue
        nrm = nrm / norm
        side = (pts - pts[i]) @ nrm
        if np.all(side <= GEOM_TOL * scale):
            pass
        elif np.all(side >= -GEOM_TOL * scale):
            nrm, side = -nrm, -side
        else:
            continue
        on = frozenset(np.flatnonzero(np.abs(side) <= GEOM_TOL * scale).tolist())
        seen.setdefault(on, (nrm, float(nrm @ pts[i])))
    faces: list[Face] = []
    edges: set[tuple[int, int]] = set()
    normals, offsets = [], []
    for on in sorted(seen, key=sorted):
        nrm, off = seen[on]
        idx = sorted(on)
        sub = pts[idx]
        # order the facet's points in its own plane
        u = sub[1] - sub[0]
        u /= np.linalg.norm(u)
        w = np.cross(nrm, u)
        ring = [idx[r] for r in _monotone_chain((sub - sub[0]) @ np.stack([u, w]).T)]
        faces.append(Face(tuple(ring), 2))
        normals.append(nrm)
        offsets.append(off)
        for a, b in zip(ring, ring[1:] + ring[:1]):
            edges.add(tuple(sorted((a, b))))
    body = sorted({v for f in faces for v in f.vertices})
    faces = [Face(tuple(body), 3)] + faces + [Face(e, 1) for e in sorted(edges)]
    return faces, normals, offsets


# -- closest points ---------------------------------------------------------


def _closest_on_segment(a, b, x):
    d = b - a
    dd = d @ d
    if dd == 0:
        return a.copy()
    t = np.clip((x - a) @ d / dd, 0.0, 1.0)
    return a + t * d


def _closest_on_triangle(a, b, c, x):
    nrm = np.cross(b - a, c - a)
    nn = nrm @ nrm
    if nn <= 1e-24:
        cands = [_closest_on_segment(p, q, x) for p, q in ((a, b), (b, c), (a, c))]
        return min(cands, key=lambda y: np.linalg.norm(y - x))
    proj = x - ((x - a) @ nrm) / nn * nrm
    # barycentric coordinates of the projection
    v0, v1, v2 = b - a, c - a, proj - a
    d00, d01, d11 = v0 @ v0, v0 @ v1, v1 @ v1
    d20, d21 = v2 @ v0, v2 @ v1
    den = d00 * d11 - d01 * d01
    s = (d11 * d20 - d01 * d21) / den
    t = (d00 * d21 - d01 * d20) / den
    if s >= 0 and t >= 0 and s + t <= 1:
        return proj
    cands = [_closest_on_segment(p, q, x) for p, q in ((a, b), (b, c), (a, c))]
    return min(cands, key=lambda y: np.linalg.norm(y - x))


def closest_point_on_face(coords: np.ndarray, x) -> np.ndarray:
    """Nearest point to ``x`` on the convex hull of ordered face vertices ``coords``."""
    x = np.asarray(x, dtype=float)
    coords = np.asarray(coords, dtype=float)
    if len(coords) == 1:
        return coords[0].copy()
    if len(coords) == 2:
        return _closest_on_segment(coords[0], coords[1], x)
    if coords.shape[1] == 2:
        # a polygon in the plane: inside means zero distance
        ring = coords
        inside = True
        for a, b in zip(ring, np.roll(ring, -1, axis=0)):
            d = b - a
            if d[0] * (x[1] - a[1]) - d[1] * (x[0] - a[0]) < -GEOM_TOL:
                inside = False
                break
        if inside:
            return x.copy()
        cands = [_closest_on_segment(a, b, x) for a, b in zip(ring, np.roll(ring, -1, axis=0))]
        return min(cands, key=lambda y: np.linalg.norm(y - x))
    cands = [
        _closest_on_triangle(coords[0], coords[i], coords[i + 1], x)
        for i in range(1, len(coords) - 1)
    ]
    return min(cands, key=lambda y: np.linalg.norm(y - x))


# -- efficiency and the front -------------------------------------------------


def dominance_slack(points: np.ndarray, x) -> float:
    """Largest total improvement over ``x`` achievable inside conv(points) without loss."""
    points = np.asarray(points, dtype=float)
    x = np.asarray(x, dtype=float)
    k, n = points.shape
    # maximize sum_i y_i with y = points^T lam, y >= x, lam in the simplex
    res = linprog(
        c=-points.sum(axis=1),
        A_ub=-points.T,
        b_ub=-x,
        A_eq=np.ones((1, k)),
        b_eq=[1.0],
        bounds=[(0, None)] * k,
        method="highs",
    )
    if res.status != 0:
        return np.inf if res.status == 2 else 0.0
    return float(-res.fun - x.sum())


def is_efficient(points: np.ndarray, x, tol: float = 1e-7) -> bool:
    return dominance_slack(points, x) <= tol * max(1.0, float(np.abs(points).max()))


def pareto_front(polytope: PayoffPolytope) -> ParetoFront:
    front = ParetoFront(polytope)
    good = {v for v in polytope.vertices if is_efficient(polytope.points, polytope.points[v])}
    for face in sorted(polytope.faces, key=lambda f: f.dim):
        # a face with a dominated vertex cannot be efficient
        if not set(face.vertices) <= good:
            continue
        if face.dim == 0:
            front.faces.append(face)
            continue
        centre = polytope.face_points(face).mean(axis=0)
        if is_efficient(polytope.points, centre):
            front.faces.append(face)
    assert front.faces, "a nonempty polytope always has an efficient point"
    return front


def distance_to_pareto_front(point, front: ParetoFront) -> float:
    """Euclidean distance from ``point`` (projected onto the polytope) to the front."""
    x = front.polytope.project(np.asarray(point, dtype=float))
    faces = front.maximal_faces()
    assert faces, "empty Pareto front"
    return min(
        float(np.linalg.norm(closest_point_on_face(front.face_points(f), x) - x)) for f in faces
    )
