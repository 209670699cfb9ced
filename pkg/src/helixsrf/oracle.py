"""Finite point-set check of the closed forms.

Builds the 3-sausage Steiner tree on ``n`` helix terminals, relaxes its Steiner
points with the topology held fixed, and compares the resulting length ratio
against an exact Euclidean minimum spanning tree.

Vertex numbering: terminals are ``0..n-1``; Steiner point S_k (k = 1..n-2) is
vertex ``n + k - 1``.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .analytic import GRAHAM_HWANG, a_coefficient, srf
from .errors import DegenerateError, DomainError, NonConvergence, SpecError
from .helix import HelixParams, Point3, recover_angle, steiner_points_ansatz, terminal_points

DEGENERATE_EDGE = 1e-9
SKIP_RADIUS = 1e-12
DEFAULT_SWEEPS = 100_000


@dataclass(frozen=True)
class SausageTopology:
    n: int
    edges: tuple[tuple[int, int], ...]

    @property
    def steiner_count(self) -> int:
        return self.n - 2

    def steiner_vertex(self, k: int) -> int:
        return self.n + k - 1

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {v: [] for v in range(self.n + self.steiner_count)}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def steiner_neighbors(self) -> np.ndarray:
        """``(n-2, 3)`` array of the neighbours of S_1..S_{n-2}, in edge order."""
        adj = self.adjacency()
        return np.array([adj[self.steiner_vertex(k)] for k in range(1, self.n - 1)], dtype=int)

    def is_full_tree(self) -> bool:
        """Degree 1 at terminals, 3 at Steiner points, 2n - 3 edges, connected."""
        adj = self.adjacency()
        if len(self.edges) != 2 * self.n - 3:
            return False
        if any(len(adj[v]) != 1 for v in range(self.n)):
            return False
        if any(len(adj[v]) != 3 for v in range(self.n, self.n + self.steiner_count)):
            return False
        seen, todo = {0}, [0]
        while todo:
            for w in adj[todo.pop()]:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return len(seen) == len(adj)


def build_sausage_topology(n: int) -> SausageTopology:
    """Path S_1 - ... - S_{n-2}; S_k carries T_k, the ends also carry T_0 and T_{n-1}."""
    if n < 3:
        raise SpecError(f"a sausage tree needs at least 3 terminals, got {n}")
    s = lambda k: n + k - 1  # noqa: E731
    if n == 3:
        return SausageTopology(3, ((0, s(1)), (1, s(1)), (2, s(1))))
    edges = [(0, s(1))]
    for k in range(1, n - 1):
        edges.append((k, s(k)))
        if k < n - 2:
            edges.append((s(k), s(k + 1)))
    edges.append((n - 1, s(n - 2)))
    return SausageTopology(n, tuple(edges))


def _positions(terminals, steiner, topo: SausageTopology) -> np.ndarray:
    terminals = np.asarray(terminals, dtype=float).reshape(-1, 3)
    steiner = np.asarray(steiner, dtype=float).reshape(-1, 3)
    if len(terminals) != topo.n or len(steiner) != topo.steiner_count:
        raise SpecError(
            f"topology expects {topo.n} terminals and {topo.steiner_count} Steiner points, "
            f"got {len(terminals)} and {len(steiner)}"
        )
    return np.vstack([terminals, steiner])


def _edge_lengths(pos: np.ndarray, edges: np.ndarray) -> np.ndarray:
    return np.linalg.norm(pos[edges[:, 0]] - pos[edges[:, 1]], axis=1)


def tree_length(terminals, steiner, topo: SausageTopology) -> float:
    pos = _positions(terminals, steiner, topo)
    return math.fsum(_edge_lengths(pos, np.array(topo.edges)))


def mst_length(points) -> float:
    """Exact Euclidean MST length by dense Prim, O(n^2) time and O(n) memory."""
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    n = len(pts)
    if n < 2:
        raise SpecError("an MST needs at least two points")
    in_tree = np.zeros(n, dtype=bool)
    best = np.full(n, np.inf)
    best[0] = 0.0
    chosen = []
    for _ in range(n):
        i = int(np.argmin(np.where(in_tree, np.inf, best)))
        in_tree[i] = True
        chosen.append(best[i])
        best = np.minimum(best, np.linalg.norm(pts - pts[i], axis=1))
    return math.fsum(chosen)


def angles_at_steiner(center, neighbors) -> tuple[float, float, float]:
    """Pairwise angles (degrees) between the three edges leaving ``center``."""
    c = np.asarray(center, dtype=float)
    vecs = [np.asarray(q, dtype=float) - c for q in neighbors]
    if len(vecs) != 3:
        raise SpecError("a Steiner point has exactly three neighbours")
    if any(np.linalg.norm(v) == 0.0 for v in vecs):
        raise DegenerateError("zero-length edge at Steiner point")

    def angle(a, b):
        return math.degrees(math.atan2(np.linalg.norm(np.cross(a, b)), float(np.dot(a, b))))

    return (angle(vecs[0], vecs[1]), angle(vecs[0], vecs[2]), angle(vecs[1], vecs[2]))


def _two_colouring(topo: SausageTopology, nbr: np.ndarray) -> list[np.ndarray]:
    """Split Steiner points into two classes with no Steiner-Steiner edge inside a class."""
    n, s = topo.n, topo.steiner_count
    colour = [-1] * s
    for root in range(s):
        if colour[root] >= 0:
            continue
        colour[root] = 0
        queue = deque([root])
        while queue:
            i = queue.popleft()
            for v in nbr[i]:
                j = v - n
                if j >= 0 and colour[j] < 0:
                    colour[j] = 1 - colour[i]
                    queue.append(j)
    colour = np.array(colour)
    return [np.nonzero(colour == c)[0] for c in (0, 1)]


def _block_update(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One Weiszfeld step for ``k`` independent Steiner points.

    ``x`` is (k, 3), ``y`` the (k, 3, 3) neighbour positions. A point whose
    optimum is one of its neighbours (the other two edges meet there at 120
    degrees or more) jumps straight onto it, since plain Weiszfeld only creeps
    towards such optima. A point sitting on a neighbour that is not optimal
    there takes the Vardi-Zhang step off it. Every case is non-increasing in
    length. Returns the new positions and a mask of points left on a neighbour.
    """
    diff = y - x[:, None, :]
    dist = np.linalg.norm(diff, axis=2)
    on_vertex = dist < SKIP_RADIUS

    # vertex optimality: |sum of unit vectors from y_i to the other two| <= 1
    e = y[:, None, :, :] - y[:, :, None, :]  # e[a, i, j] = y_j - y_i
    le = np.linalg.norm(e, axis=3)
    with np.errstate(invalid="ignore", divide="ignore"):
        unit = np.where(le[..., None] > 0.0, e / le[..., None], 0.0)
    vertex_opt = np.linalg.norm(unit.sum(axis=2), axis=2) <= 1.0
    snap = vertex_opt.any(axis=1)
    target = y[np.arange(len(x)), np.argmax(vertex_opt, axis=1)]

    w = np.where(on_vertex, 0.0, 1.0 / np.where(on_vertex, 1.0, dist))
    with np.errstate(invalid="ignore", divide="ignore"):  # all-coincident rows snap below
        mean = (w[:, :, None] * y).sum(axis=1) / w.sum(axis=1)[:, None]
    # Vardi-Zhang: blend back towards x by 1/|R| when x is on a neighbour
    r = np.linalg.norm((w[:, :, None] * diff).sum(axis=1), axis=1)
    stuck = on_vertex.any(axis=1)
    blend = np.where(stuck, 1.0 / np.maximum(r, 1.0), 0.0)[:, None]
    new = (1.0 - blend) * mean + blend * x
    new = np.where(snap[:, None], target, new)
    left_on = snap | (stuck & (r <= 1.0))
    return new, left_on


@dataclass
class RelaxResult:
    positions: np.ndarray  # (n-2, 3) Steiner positions
    length: float
    iterations: int
    history: list[float] = field(default_factory=list)
    degenerate_edges: list[tuple[int, int]] = field(default_factory=list)
    pinned: list[int] = field(default_factory=list)  # Steiner indices k left on a neighbour
    collinear: list[int] = field(default_factory=list)  # Steiner indices k with a straight angle


def optimize_steiner_points(
    terminals,
    topo: SausageTopology,
    init,
    tol: float = 1e-12,
    max_sweeps: int = DEFAULT_SWEEPS,
) -> RelaxResult:
    """Weiszfeld relaxation of the Steiner points with the topology held fixed.

    Each sweep moves every Steiner point to the distance-weighted mean of its
    three neighbours. Steiner points are updated in two colour classes (the
    Steiner subgraph of a tree is bipartite), so points updated together share
    no edge and every sweep is a true block-coordinate descent: the total
    length never increases. Points whose optimum is a neighbour are moved onto
    it exactly; see :func:`_block_update`.
    """
    if not tol > 0.0:
        raise SpecError(f"tolerance must be positive, got {tol}")
    pos = _positions(terminals, init, topo)
    if not np.all(np.isfinite(pos)):
        raise SpecError("non-finite initial positions")
    n = topo.n
    edges = np.array(topo.edges)
    nbr = topo.steiner_neighbors()
    classes = _two_colouring(topo, nbr)

    length = math.fsum(_edge_lengths(pos, edges))
    history = [length]
    pinned = np.zeros(topo.steiner_count, dtype=bool)
    for sweep in range(1, max_sweeps + 1):
        for idx in classes:
            pos[n + idx], pinned[idx] = _block_update(pos[n + idx], pos[nbr[idx]])
        new_length = math.fsum(_edge_lengths(pos, edges))
        history.append(new_length)
        if length - new_length < tol:
            length = new_length
            break
        length = new_length
    else:
        raise NonConvergence(
            f"Steiner relaxation did not settle within {max_sweeps} sweeps "
            f"(length {length!r}, last decrease {history[-2] - history[-1]:.3g})",
            best=length,
        )

    lengths = _edge_lengths(pos, edges)
    degenerate = [tuple(map(int, e)) for e, l in zip(edges, lengths) if l < DEGENERATE_EDGE]
    collinear = []
    for i in range(topo.steiner_count):
        try:
            ang = angles_at_steiner(pos[n + i], pos[nbr[i]])
        except DegenerateError:
            continue
        if max(ang) > 180.0 - 1e-6:
            collinear.append(i + 1)
    return RelaxResult(
        positions=pos[n:].copy(),
        length=length,
        iterations=sweep,
        history=history,
        degenerate_edges=degenerate,
        pinned=[int(i) + 1 for i in np.nonzero(pinned)[0]],
        collinear=collinear,
    )


def interior_steiner(topo: SausageTopology) -> list[int]:
    """Steiner indices k whose neighbours are two Steiner points and one terminal."""
    nbr = topo.steiner_neighbors()
    return [i + 1 for i, row in enumerate(nbr) if int((row >= topo.n).sum()) == 2]


def max_angle_error(terminals, steiner, topo: SausageTopology, which=None) -> float | None:
    """Worst deviation from 120 degrees over the given (default: interior) Steiner points."""
    which = interior_steiner(topo) if which is None else which
    if not which:
        return None
    pos = _positions(terminals, steiner, topo)
    nbr = topo.steiner_neighbors()
    worst = 0.0
    for k in which:
        ang = angles_at_steiner(pos[topo.steiner_vertex(k)], pos[nbr[k - 1]])
        worst = max(worst, max(abs(a - 120.0) for a in ang))
    return worst


def collapsed_steiner(terminals, topo: SausageTopology) -> np.ndarray:
    """Each Steiner point placed on its own terminal: the tree becomes the terminal path."""
    terminals = np.asarray(terminals, dtype=float)
    return terminals[1 : topo.n - 1].copy()


@dataclass
class OracleReport:
    n: int
    omega: float
    alpha: float
    mst_length: float
    steiner_length: float
    ansatz_length: float
    ratio: float
    rho_analytic: float
    max_angle_error_deg: float | None
    iterations: int
    degenerate_edges: list[tuple[int, int]]
    graham_hwang_ok: bool
    angle_step_mean: float | None  # mean recovered angular step over the middle third, over omega
    angle_step_spread: float | None  # max minus min recovered step
    steiner_positions: np.ndarray | None = field(default=None, repr=False)
    history: list[float] = field(default_factory=list, repr=False)

    @property
    def params(self) -> HelixParams:
        return HelixParams(self.omega, self.alpha)


def steiner_ratio_finite(
    n: int,
    p: HelixParams,
    tol: float = 1e-12,
    max_sweeps: int = DEFAULT_SWEEPS,
) -> OracleReport:
    """Relaxed 3-sausage Steiner length over exact MST length for ``n`` helix terminals.

    The relaxation starts from the helical Ansatz. If it ends longer than the
    terminal path (the sausage tree with every Steiner point collapsed onto its
    terminal), the path start is relaxed too and the shorter tree kept.
    """
    if n < 3:
        raise SpecError(f"need at least 3 terminals, got {n}")
    if not p.alpha > 0.0:
        raise DomainError("oracle runs need alpha > 0")
    if a_coefficient(1, p.omega) <= 0.0:
        raise DomainError(f"omega = {p.omega:.10g} outside the numerator domain (A_1 <= 0)")

    terms = terminal_points(n, p)
    ansatz = steiner_points_ansatz(n, p, 1)
    topo = build_sausage_topology(n)
    ansatz_len = tree_length(terms, ansatz, topo)
    angle_err = max_angle_error(terms, ansatz, topo)

    best = optimize_steiner_points(terms, topo, ansatz, tol, max_sweeps)
    path = collapsed_steiner(terms, topo)
    if best.length > tree_length(terms, path, topo):
        alt = optimize_steiner_points(terms, topo, path, tol, max_sweeps)
        if alt.length < best.length:
            best = alt

    mst = mst_length(terms)
    ratio = best.length / mst

    steps = None
    if n >= 11:
        # middle third only: end effects decay roughly by half per Steiner point
        s = n - 2
        thetas = [recover_angle(Point3(*q), p.alpha) for q in best.positions[s // 3 : 2 * s // 3 + 1]]
        steps = np.diff(thetas) / p.omega

    return OracleReport(
        n=n,
        omega=p.omega,
        alpha=p.alpha,
        mst_length=mst,
        steiner_length=best.length,
        ansatz_length=ansatz_len,
        ratio=ratio,
        rho_analytic=srf(p).rho,
        max_angle_error_deg=angle_err,
        iterations=best.iterations,
        degenerate_edges=best.degenerate_edges,
        graham_hwang_ok=best.length >= (GRAHAM_HWANG - 1e-9) * mst,
        angle_step_mean=None if steps is None else float(np.mean(steps)),
        angle_step_spread=None if steps is None else float(np.ptp(steps)),
        steiner_positions=best.positions,
        history=best.history,
    )
