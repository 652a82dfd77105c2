"""Boustrophedon cell decomposition and single-vehicle coverage paths.

The sweep runs along +x with vertical passes. A cell ends wherever the set of
free row runs changes between neighbouring columns (a split, a merge, or a
step in a run's extent), so every cell is an axis-aligned rectangle of free
masked cells. Passes sit on cell-center columns; waypoints are the centers of
every cell a pass or transit visits.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from agcvg import kernels

# corner index -> (side, end): side 0 = first pass column, 1 = last;
# end 0 = bottom row of the cell, 1 = top row
CORNERS = ((0, 0), (0, 1), (1, 0), (1, 1))
_EXIT_ODD = (3, 2, 1, 0)
_EXIT_EVEN = (2, 3, 0, 1)
EXHAUSTIVE_LIMIT = 8


@dataclass(frozen=True)
class BcdCell:
    id: int
    col_lo: int
    col_hi: int
    row_lo: int
    row_hi: int
    neighbors: tuple = ()

    @property
    def column_range(self):
        return (self.col_lo, self.col_hi)

    @property
    def intervals(self):
        """Per-column inclusive free row interval."""
        return {c: (self.row_lo, self.row_hi) for c in range(self.col_lo, self.col_hi + 1)}

    @property
    def n_cells(self):
        return (self.col_hi - self.col_lo + 1) * (self.row_hi - self.row_lo + 1)

    def raster(self, shape):
        out = np.zeros(shape, bool)
        out[self.row_lo:self.row_hi + 1, self.col_lo:self.col_hi + 1] = True
        return out


@dataclass(frozen=True, eq=False)
class CoveragePath:
    waypoints: np.ndarray
    role: str = ""

    def __post_init__(self):
        wp = np.array(self.waypoints, dtype=np.float64, copy=True).reshape(-1, 2)
        wp.setflags(write=False)
        object.__setattr__(self, "waypoints", wp)

    def __len__(self):
        return len(self.waypoints)

    def __eq__(self, other):
        return (isinstance(other, CoveragePath) and self.role == other.role
                and np.array_equal(self.waypoints, other.waypoints))

    @property
    def segment_lengths(self):
        if len(self.waypoints) < 2:
            return np.zeros(0)
        d = np.diff(self.waypoints, axis=0)
        return np.hypot(d[:, 0], d[:, 1])

    @property
    def total_length(self):
        return float(self.segment_lengths.sum())

    @property
    def arc_lengths(self):
        """Cumulative arc length at each waypoint."""
        return np.concatenate([[0.0], np.cumsum(self.segment_lengths)])

    def to_dict(self):
        return {"role": self.role, "total_length": self.total_length,
                "waypoints": self.waypoints.tolist()}

    @classmethod
    def from_dict(cls, doc):
        return cls(np.asarray(doc["waypoints"], dtype=np.float64).reshape(-1, 2), doc.get("role", ""))


# ---------------------------------------------------------------------------
# decomposition
# ---------------------------------------------------------------------------

def _runs(column):
    """Inclusive (lo, hi) runs of True values in a 1-D bool array."""
    padded = np.concatenate([[False], column, [False]]).astype(np.int8)
    edges = np.diff(padded)
    starts = np.nonzero(edges == 1)[0]
    stops = np.nonzero(edges == -1)[0] - 1
    return list(zip(starts.tolist(), stops.tolist()))


def decompose(grid, mask):
    """Split the free masked cells into rectangular boustrophedon cells."""
    cells_mask = mask.cells & ~grid.occupancy
    bounds = []       # [col_lo, col_hi, row_lo, row_hi]
    adjacency = []
    prev = []         # (lo, hi, cell id) runs of the previous column
    for col in range(grid.width):
        cur = []
        for lo, hi in _runs(cells_mask[:, col]):
            overlaps = [p for p in prev if p[0] <= hi and lo <= p[1]]
            if len(overlaps) == 1 and overlaps[0][:2] == (lo, hi):
                cid = overlaps[0][2]
                bounds[cid][1] = col
            else:
                cid = len(bounds)
                bounds.append([col, col, lo, hi])
                adjacency.append(set())
                for p in overlaps:
                    adjacency[cid].add(p[2])
                    adjacency[p[2]].add(cid)
            cur.append((lo, hi, cid))
        prev = cur
    return [BcdCell(i, b[0], b[1], b[2], b[3], tuple(sorted(adjacency[i])))
            for i, b in enumerate(bounds)]


# ---------------------------------------------------------------------------
# passes
# ---------------------------------------------------------------------------

def pass_columns(cell, footprint_width, resolution):
    """Grid columns carrying a pass, spaced by the footprint width."""
    step = max(1, int(np.floor(footprint_width / resolution + 1e-9)))
    cols = list(range(cell.col_lo, cell.col_hi + 1, step))
    if (cell.col_hi - cols[-1]) * resolution > footprint_width / 2 + 1e-9:
        cols.append(cell.col_hi)
    return cols


def generate_passes(cell, footprint_width, resolution=1.0):
    """Vertical pass segments ``(P, 2, 2)`` as ``[[x, y_bottom], [x, y_top]]``."""
    if not footprint_width > 0:
        raise ValueError("footprint_width must be > 0")
    out = []
    for c in pass_columns(cell, footprint_width, resolution):
        x = (c + 0.5) * resolution
        out.append([[x, (cell.row_lo + 0.5) * resolution], [x, (cell.row_hi + 0.5) * resolution]])
    return np.array(out)


def exit_corner(entry, n_passes):
    return (_EXIT_ODD if n_passes % 2 else _EXIT_EVEN)[entry]


def corner_cell(cell, cols, corner):
    side, end = CORNERS[corner]
    return (cell.row_hi if end else cell.row_lo), (cols[-1] if side else cols[0])


def traverse_cell(cell, cols, entry):
    """Serpentine (row, col) sequence through ``cell`` starting at corner ``entry``."""
    order = cols if CORNERS[entry][0] == 0 else cols[::-1]
    up = CORNERS[entry][1] == 0
    seq = []
    for i, c in enumerate(order):
        rows = range(cell.row_lo, cell.row_hi + 1) if up else range(cell.row_hi, cell.row_lo - 1, -1)
        seq.extend((r, c) for r in rows)
        if i + 1 < len(order):
            r = cell.row_hi if up else cell.row_lo
            nxt = order[i + 1]
            stride = 1 if nxt > c else -1
            seq.extend((r, cc) for cc in range(c + stride, nxt, stride))
            up = not up
    return seq


# ---------------------------------------------------------------------------
# ordering
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CellOrder:
    order: tuple          # cell ids in visiting order
    entries: tuple        # entry corner per visited cell
    exits: tuple          # exit corner per visited cell
    transit_length: float


def _transition_matrix(cells, grid, footprint_width):
    w = grid.width
    cols = [pass_columns(c, footprint_width, grid.resolution) for c in cells]
    flat = np.array([[r * w + c for r, c in (corner_cell(cell, cs, k) for k in range(4))]
                     for cell, cs in zip(cells, cols)], dtype=np.int64)
    uniq, inv = np.unique(flat.ravel(), return_inverse=True)
    dist = kernels.grid_distance_matrix(grid.free, uniq, uniq, grid.resolution)
    dist = np.minimum(dist, dist.T)
    inv = inv.reshape(-1, 4)
    n = len(cells)
    exits = np.array([[exit_corner(e, len(cs)) for e in range(4)] for cs in cols], dtype=np.int64)
    exit_pt = inv[np.arange(n)[:, None], exits]           # (n, 4)
    trans = dist[exit_pt.reshape(-1)][:, inv.reshape(-1)]  # (4n, 4n)
    for i in range(n):
        trans[4 * i:4 * i + 4, 4 * i:4 * i + 4] = np.inf
    if not np.isfinite(trans[~np.eye(n, dtype=bool).repeat(4, 0).repeat(4, 1)]).all():
        raise ValueError("cells are not mutually reachable through free space")
    return trans, exits.reshape(-1)


def _best_entries(seq_cells, trans):
    """Optimal entry corners for a fixed cell order (exact DP over 4 states)."""
    n = len(seq_cells)
    cost = np.zeros(4)
    back = np.zeros((n, 4), dtype=np.int64)
    for k in range(1, n):
        a, b = seq_cells[k - 1], seq_cells[k]
        block = cost[:, None] + trans[4 * a:4 * a + 4, 4 * b:4 * b + 4]
        back[k] = np.argmin(block, axis=0)
        cost = block[back[k], np.arange(4)]
    e = int(np.argmin(cost))
    entries = [e]
    for k in range(n - 1, 0, -1):
        e = int(back[k, e])
        entries.append(e)
    return entries[::-1], float(cost.min())


def _nearest_neighbor(trans, n):
    seq = [0]
    visited = np.zeros(n, bool)
    visited[0] = True
    cur = 0
    for _ in range(n - 1):
        row = trans[cur].reshape(n, 4).copy()
        row[visited] = np.inf
        nxt = int(np.argmin(row))
        seq.append(nxt)
        visited[nxt // 4] = True
        cur = nxt
    return np.array(seq, dtype=np.int64)


def order_cells(cells, grid, footprint_width):
    """Visiting order for ``cells`` minimizing inter-cell transit length.

    Exact (dynamic programming over subsets) for up to ``EXHAUSTIVE_LIMIT``
    cells; nearest neighbour followed by 2-opt and an exact entry-corner pass
    above that.
    """
    n = len(cells)
    if n == 0:
        return CellOrder((), (), (), 0.0)
    npass = [len(pass_columns(c, footprint_width, grid.resolution)) for c in cells]
    if n == 1:
        return CellOrder((cells[0].id,), (0,), (exit_corner(0, npass[0]),), 0.0)
    trans, exit_of = _transition_matrix(cells, grid, footprint_width)
    if n <= EXHAUSTIVE_LIMIT:
        seq, _ = kernels.held_karp(trans, n)
    else:
        seq = kernels.two_opt(_nearest_neighbor(trans, n), trans, exit_of)
    seq_cells = [int(s) // 4 for s in seq]
    entries, total = _best_entries(seq_cells, trans)
    exits = [exit_corner(e, npass[c]) for c, e in zip(seq_cells, entries)]
    return CellOrder(tuple(cells[c].id for c in seq_cells), tuple(entries), tuple(exits), total)


# ---------------------------------------------------------------------------
# full coverage path
# ---------------------------------------------------------------------------

def grid_route(grid, start, goal):
    """Shortest obstacle-free (row, col) route from ``start`` to ``goal`` inclusive."""
    w = grid.width
    src = start[0] * w + start[1]
    dst = goal[0] * w + goal[1]
    if src == dst:
        return [start]
    dist, pred = kernels.grid_dijkstra(grid.free, src, grid.resolution, target=dst)
    if not np.isfinite(dist[dst]):
        raise ValueError(f"no obstacle-free route from {start} to {goal}")
    route = [dst]
    while route[-1] != src:
        route.append(int(pred[route[-1]]))
    return [(u // w, u % w) for u in reversed(route)]


def plan_coverage(grid, mask, footprint_width, role=""):
    """Boustrophedon coverage path over the free cells of ``mask``."""
    cells = decompose(grid, mask)
    by_id = {c.id: c for c in cells}
    order = order_cells(cells, grid, footprint_width)
    seq = []
    for cid, entry in zip(order.order, order.entries):
        cell = by_id[cid]
        cols = pass_columns(cell, footprint_width, grid.resolution)
        part = traverse_cell(cell, cols, entry)
        if seq:
            seq.extend(grid_route(grid, seq[-1], part[0])[1:-1])
            if seq[-1] == part[0]:
                part = part[1:]
        seq.extend(part)
    rc = np.array(seq, dtype=np.float64).reshape(-1, 2)
    pts = (rc[:, ::-1] + 0.5) * grid.resolution
    return CoveragePath(pts, role)
