"""Scoring detections against ground-truth targets."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .cda import detect_sweep
from .core import CdaParams, Detection, Image, Target

DEFAULT_C_VALUES = (2.0, 3.0, 4.0, 5.0, 6.0)
DEFAULT_MATCH_RADIUS_PX = 10.0


@dataclass(frozen=True)
class MatchResult:
    matched_pairs: tuple[tuple[str, int, float], ...]
    missed_targets: tuple[str, ...]
    false_alarms: tuple[int, ...]

    @property
    def detected(self) -> int:
        return len(self.matched_pairs)


@dataclass(frozen=True)
class RocRow:
    c_constant: float
    lam: float
    detected: int
    known: int
    pd: float
    false_alarms: int
    area_km2: float
    far: float


@dataclass(frozen=True)
class RocTable:
    rows: tuple[RocRow, ...]

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)


@dataclass(frozen=True)
class CaseRow:
    mission: str
    pass_: str
    known: int
    detected: int
    pd: float
    false_alarms: int


class Case(NamedTuple):
    surveillance: Image
    reference: Image
    targets: Sequence[Target]
    mission: str = ""
    pass_: str = ""


def match(detections: Sequence[Detection], targets: Sequence[Target],
          radius_px: float = DEFAULT_MATCH_RADIUS_PX) -> MatchResult:
    """Greedy one-to-one matching, closest centroid-target pair first.

    Pairs farther apart than ``radius_px`` are never matched. Ties on
    distance go to the lower target id, then the lower detection index.
    """
    if not radius_px > 0:
        raise ValueError("radius_px must be positive")
    candidates = []
    for ti, t in enumerate(targets):
        for di, d in enumerate(detections):
            dist = math.hypot(d.centroid_row - t.row, d.centroid_col - t.col)
            if dist <= radius_px:
                candidates.append((dist, t.id, ti, di))
    candidates.sort()

    used_targets, used_dets, pairs = set(), set(), []
    for dist, tid, ti, di in candidates:
        if ti in used_targets or di in used_dets:
            continue
        used_targets.add(ti)
        used_dets.add(di)
        pairs.append((tid, di, dist))
    return MatchResult(
        matched_pairs=tuple(pairs),
        missed_targets=tuple(t.id for ti, t in enumerate(targets) if ti not in used_targets),
        false_alarms=tuple(di for di in range(len(detections)) if di not in used_dets),
    )


def score(result: MatchResult, known_count: int, area_km2: float) -> tuple[float, float]:
    """Return ``(pd, far)``: matched / known and false alarms per km^2."""
    if known_count <= 0:
        raise ValueError("known_count must be positive")
    if not area_km2 > 0:
        raise ValueError("area_km2 must be positive")
    return result.detected / known_count, len(result.false_alarms) / area_km2


def _sweep_case(case, c_values, params, radius_px):
    out = []
    for spec, detections, _ in detect_sweep(case.surveillance, case.reference, c_values, params):
        result = match(detections, case.targets, radius_px)
        out.append((spec.lam, result.detected, len(case.targets), len(result.false_alarms)))
    return out


def sweep_cases(cases: Sequence, c_values: Sequence[float], params: CdaParams,
                radius_px: float = DEFAULT_MATCH_RADIUS_PX, threads: int = 1):
    """Per-case ``(lambda, detected, known, false_alarms)`` for every C.

    Returns ``results[case_index][c_index]``.
    """
    cases = [c if isinstance(c, Case) else Case(*c) for c in cases]
    if not cases:
        raise ValueError("no cases given")
    if len(c_values) == 0:
        raise ValueError("no threshold constants given")

    def run(case):
        return _sweep_case(case, c_values, params, radius_px)

    if threads > 1 and len(cases) > 1:
        with ThreadPoolExecutor(max_workers=min(threads, len(cases))) as pool:
            return list(pool.map(run, cases))
    return [run(case) for case in cases]


def roc_table(per_case, c_values: Sequence[float], area_km2_per_image: float) -> RocTable:
    """Aggregate per-case sweep results into one ROC row per C.

    The reported lambda is the mean of the per-case thresholds, since each
    case thresholds its own difference image.
    """
    area = len(per_case) * area_km2_per_image
    rows = []
    for k, c in enumerate(c_values):
        detected = sum(res[k][1] for res in per_case)
        known = sum(res[k][2] for res in per_case)
        fa = sum(res[k][3] for res in per_case)
        lam = math.fsum(res[k][0] for res in per_case) / len(per_case)
        rows.append(RocRow(float(c), lam, detected, known,
                           detected / known if known else 0.0, fa, area, fa / area))
    return RocTable(tuple(rows))


def roc_sweep(cases: Sequence, c_values: Sequence[float], params: CdaParams,
              radius_px: float = DEFAULT_MATCH_RADIUS_PX, area_km2_per_image: float = 6.0,
              threads: int = 1) -> RocTable:
    if not area_km2_per_image > 0:
        raise ValueError("area_km2_per_image must be positive")
    per_case = sweep_cases(cases, c_values, params, radius_px, threads)
    return roc_table(per_case, c_values, area_km2_per_image)


def case_table(cases: Sequence, per_case, c_index: int) -> list[CaseRow]:
    """Per-case detection summary for one swept C (one row per case)."""
    rows = []
    for i, (case, res) in enumerate(zip(cases, per_case)):
        _, detected, known, fa = res[c_index]
        mission = getattr(case, "mission", "") or str(i + 1)
        pass_ = getattr(case, "pass_", "") or "1"
        rows.append(CaseRow(mission, pass_, known, detected,
                            detected / known if known else 0.0, fa))
    return rows
