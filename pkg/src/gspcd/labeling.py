"""Connected-component labelling over horizontal runs.

Each row of the mask is split into maximal runs of ``True`` pixels. Runs on
adjacent rows that touch (sharing a column for 4-connectivity, or within
one column for 8-connectivity) are merged with a union-find. Work scales
with the number of runs rather than the number of pixels, which keeps sparse
full-size detection masks cheap.
"""

from __future__ import annotations

import numpy as np

from .core import BinaryMask, Detection


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # smaller index wins so roots follow raster order
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb


def find_runs(mask: np.ndarray):
    """Return ``(row, start, stop)`` arrays of runs in raster order; ``stop`` is exclusive."""
    rows, cols = mask.shape
    padded = np.zeros((rows, cols + 2), dtype=np.int8)
    padded[:, 1:-1] = mask
    edges = np.diff(padded, axis=1)
    run_rows, starts = np.nonzero(edges == 1)
    _, stops = np.nonzero(edges == -1)
    return run_rows, starts, stops


def _run_components(mask: np.ndarray, connectivity: int):
    if connectivity not in (4, 8):
        raise ValueError("connectivity must be 4 or 8")
    run_rows, starts, stops = find_runs(mask)
    n_runs = run_rows.size
    uf = UnionFind(n_runs)
    # 8-connectivity lets runs touch diagonally
    reach = 1 if connectivity == 8 else 0
    row_first = np.searchsorted(run_rows, np.arange(mask.shape[0] + 1))

    rr, ss, ee = run_rows.tolist(), starts.tolist(), stops.tolist()
    for row in range(1, mask.shape[0]):
        i, i_end = row_first[row - 1], row_first[row]
        j, j_end = row_first[row], row_first[row + 1]
        # two-pointer sweep over the runs of the previous and current row
        while i < i_end and j < j_end:
            if ss[i] < ee[j] + reach and ss[j] < ee[i] + reach:
                uf.union(i, j)
            if ee[i] < ee[j]:
                i += 1
            else:
                j += 1
    roots = np.fromiter((uf.find(k) for k in range(n_runs)), dtype=np.int64, count=n_runs)
    _, component = np.unique(roots, return_inverse=True)
    return run_rows, starts, stops, component.reshape(-1)


def label(mask: BinaryMask, connectivity: int = 8) -> tuple[np.ndarray, int]:
    """Label image (0 = background, components numbered from 1 in raster order)."""
    mask = np.asarray(mask, dtype=bool)
    run_rows, starts, stops, component = _run_components(mask, connectivity)
    labels = np.zeros(mask.shape, dtype=np.int32)
    for r, s, e, c in zip(run_rows.tolist(), starts.tolist(), stops.tolist(), component.tolist()):
        labels[r, s:e] = c + 1
    n = int(component.max()) + 1 if component.size else 0
    return labels, n


def connected_components(mask: BinaryMask, connectivity: int = 8) -> list[Detection]:
    """Extract connected true regions as detections, ordered by (min_row, min_col)."""
    mask = np.asarray(mask, dtype=bool)
    run_rows, starts, stops, component = _run_components(mask, connectivity)
    if component.size == 0:
        return []
    n = int(component.max()) + 1
    lengths = (stops - starts).astype(np.float64)
    rows_f = run_rows.astype(np.float64)
    # sum of column indices over [start, stop)
    col_sums = (starts + stops - 1) * lengths / 2

    count = np.bincount(component, weights=lengths, minlength=n)
    row_sum = np.bincount(component, weights=rows_f * lengths, minlength=n)
    col_sum = np.bincount(component, weights=col_sums, minlength=n)
    min_row = np.full(n, np.iinfo(np.int64).max)
    min_col = min_row.copy()
    max_row = np.full(n, -1)
    max_col = max_row.copy()
    np.minimum.at(min_row, component, run_rows)
    np.minimum.at(min_col, component, starts)
    np.maximum.at(max_row, component, run_rows)
    np.maximum.at(max_col, component, stops - 1)

    order = np.lexsort((min_col, min_row))
    return [
        Detection(
            centroid_row=float(row_sum[k] / count[k]),
            centroid_col=float(col_sum[k] / count[k]),
            pixel_count=int(count[k]),
            bounding_box=(int(min_row[k]), int(min_col[k]), int(max_row[k]), int(max_col[k])),
        )
        for k in order
    ]
