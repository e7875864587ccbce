"""Interaction-log aggregation, per-condition study summaries, and the
Friedman rank test.

Pose logs are 0.1 s samples of head and controller position (metres) and
orientation (unit quaternions, w-first). Movement aggregates sum consecutive
Euclidean steps; rotation aggregates sum consecutive quaternion geodesic
angles, which makes both additive over log concatenation and invariant under
a global rigid transform.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import stats as sstats

from .errors import DegenerateInput, EmptyLog
from .stimuli import accuracy_score

LOG_SAMPLE_PERIOD_S = 0.1
LARGE_GAP_S = 0.5

LOG_COLUMNS = [
    "t",
    "head_x", "head_y", "head_z", "head_qw", "head_qx", "head_qy", "head_qz",
    "ctrl_x", "ctrl_y", "ctrl_z", "ctrl_qw", "ctrl_qx", "ctrl_qy", "ctrl_qz",
]

RESPONSE_COLUMNS = [
    "participant", "visualisation", "task", "difficulty", "stimulus_id",
    "chosen", "correct", "response_time",
]


@dataclass(frozen=True)
class PoseSample:
    t: float
    head_pos: tuple[float, float, float]
    head_rot: tuple[float, float, float, float]
    ctrl_pos: tuple[float, float, float]
    ctrl_rot: tuple[float, float, float, float]

    def __post_init__(self):
        for q in (self.head_rot, self.ctrl_rot):
            n = math.sqrt(sum(c * c for c in q))
            if abs(n - 1.0) > 1e-6:
                raise ValueError(f"quaternion {q} is not unit-norm")


@dataclass(frozen=True)
class AggregateInteraction:
    head_move_m: float
    ctrl_move_m: float
    head_rot_deg: float
    ctrl_rot_deg: float
    large_gap_count: int = 0


@dataclass(frozen=True)
class ResponseRecord:
    participant: str
    visualisation: str
    task: str
    difficulty: str
    stimulus_id: str
    chosen: str
    correct: bool
    response_time: float

    def __post_init__(self):
        if not self.response_time > 0.0:
            raise ValueError("response_time must be positive")


def _quat_angles_deg(quats: np.ndarray) -> np.ndarray:
    dots = np.abs(np.sum(quats[:-1] * quats[1:], axis=1))
    return np.degrees(2.0 * np.arccos(np.clip(dots, -1.0, 1.0)))


def aggregate(log: list[PoseSample]) -> AggregateInteraction:
    """Total movement (m) and rotation (deg) of head and controller over a log."""
    if not log:
        raise EmptyLog("no pose samples")
    ts = np.array([s.t for s in log])
    if np.any(np.diff(ts) < 0.0):
        raise ValueError("sample times must be non-decreasing")
    if len(log) == 1:
        return AggregateInteraction(0.0, 0.0, 0.0, 0.0, 0)
    head = np.array([s.head_pos for s in log])
    ctrl = np.array([s.ctrl_pos for s in log])
    head_q = np.array([s.head_rot for s in log])
    ctrl_q = np.array([s.ctrl_rot for s in log])
    gaps = int(np.sum(np.diff(ts) > LARGE_GAP_S))
    return AggregateInteraction(
        float(np.sum(np.linalg.norm(np.diff(head, axis=0), axis=1))),
        float(np.sum(np.linalg.norm(np.diff(ctrl, axis=0), axis=1))),
        float(np.sum(_quat_angles_deg(head_q))),
        float(np.sum(_quat_angles_deg(ctrl_q))),
        gaps,
    )


def friedman(matrix) -> tuple[float, int, float]:
    """Friedman rank test over an (n subjects x k conditions) matrix.

    Ties are mid-ranked and the statistic carries the standard tie
    correction; returns (chi2, dof, p) with the p-value from the chi-square
    upper tail. A matrix whose rows are all constant has no rank information
    and comes back as (0, k-1, 1).
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] < 2 or m.shape[1] < 2:
        raise DegenerateInput("need at least 2 subjects and 2 conditions")
    n, k = m.shape
    ranks = sstats.rankdata(m, axis=1)
    col_sums = ranks.sum(axis=0)
    ssbn = float(np.sum(col_sums ** 2))
    chi2 = 12.0 / (n * k * (k + 1)) * ssbn - 3.0 * n * (k + 1)
    ties = 0.0
    for row in m:
        _, counts = np.unique(row, return_counts=True)
        ties += float(np.sum(counts ** 3 - counts))
    c = 1.0 - ties / (n * k * (k * k - 1))
    if c <= 0.0:
        return 0.0, k - 1, 1.0
    chi2 /= c
    chi2 = max(0.0, chi2)
    return float(chi2), k - 1, float(sstats.chi2.sf(chi2, k - 1))


@dataclass(frozen=True)
class CellSummary:
    visualisation: str
    task: str
    difficulty: str
    n_participants: int
    accuracy_mean: float
    accuracy_ci95: tuple[float, float] | None
    time_mean: float | None
    time_ci95: tuple[float, float] | None
    interaction: AggregateInteraction | None


def _t_ci(values: np.ndarray) -> tuple[float, float] | None:
    if len(values) < 2:
        return None
    mean = float(np.mean(values))
    sem = float(np.std(values, ddof=1)) / math.sqrt(len(values))
    if sem == 0.0:
        return (mean, mean)
    tcrit = float(sstats.t.ppf(0.975, len(values) - 1))
    return (mean - tcrit * sem, mean + tcrit * sem)


def _mean_agg(aggs: list[AggregateInteraction]) -> AggregateInteraction | None:
    if not aggs:
        return None
    return AggregateInteraction(
        float(np.mean([a.head_move_m for a in aggs])),
        float(np.mean([a.ctrl_move_m for a in aggs])),
        float(np.mean([a.head_rot_deg for a in aggs])),
        float(np.mean([a.ctrl_rot_deg for a in aggs])),
        int(sum(a.large_gap_count for a in aggs)),
    )


def summarize(records: list[ResponseRecord],
              logs: dict[tuple[str, str], AggregateInteraction] | None = None
              ) -> list[CellSummary]:
    """Per (visualisation x task x difficulty) cell means with 95 % CIs.

    Accuracy is the chance-corrected score per participant, averaged over
    participants; response time (and interaction, when logs keyed by
    (participant, stimulus_id) are given) averages correct responses only.
    CIs are Student-t intervals over the participant means.
    """
    if not records:
        raise ValueError("no response records")
    cells: dict[tuple[str, str, str], dict[str, list[ResponseRecord]]] = {}
    for r in records:
        by_participant = cells.setdefault((r.visualisation, r.task, r.difficulty), {})
        by_participant.setdefault(r.participant, []).append(r)
    out = []
    for (vis, task, diff) in sorted(cells):
        by_participant = cells[(vis, task, diff)]
        acc, times, aggs = [], [], []
        for _, rs in sorted(by_participant.items()):
            acc.append(accuracy_score(sum(r.correct for r in rs), len(rs)))
            correct_rs = [r for r in rs if r.correct]
            if correct_rs:
                times.append(float(np.mean([r.response_time for r in correct_rs])))
            if logs is not None:
                got = [logs[(r.participant, r.stimulus_id)] for r in correct_rs
                       if (r.participant, r.stimulus_id) in logs]
                if got:
                    aggs.append(_mean_agg(got))
        acc_arr = np.array(acc)
        time_arr = np.array(times) if times else None
        out.append(CellSummary(
            vis, task, diff, len(by_participant),
            float(np.mean(acc_arr)), _t_ci(acc_arr),
            float(np.mean(time_arr)) if time_arr is not None else None,
            _t_ci(time_arr) if time_arr is not None else None,
            _mean_agg(aggs) if aggs else None,
        ))
    return out


def friedman_by_task(records: list[ResponseRecord]) -> dict[str, dict]:
    """Per task: Friedman test of per-participant accuracy scores across
    visualisations. Tasks where some participant misses a visualisation are
    reported as null (unbalanced rows cannot be ranked)."""
    tasks = sorted({r.task for r in records})
    results: dict[str, dict] = {}
    for task in tasks:
        rows: dict[str, dict[str, list[ResponseRecord]]] = {}
        for r in records:
            if r.task == task:
                rows.setdefault(r.participant, {}).setdefault(r.visualisation, []).append(r)
        vis_names = sorted({v for by_vis in rows.values() for v in by_vis})
        matrix = []
        for _, by_vis in sorted(rows.items()):
            if set(by_vis) != set(vis_names):
                matrix = None
                break
            matrix.append([accuracy_score(sum(r.correct for r in by_vis[v]),
                                          len(by_vis[v])) for v in vis_names])
        if not matrix or len(matrix) < 2 or len(vis_names) < 2:
            results[task] = {"chi2": None, "dof": None, "p": None,
                             "conditions": vis_names}
            continue
        chi2, dof, p = friedman(np.array(matrix))
        results[task] = {"chi2": chi2, "dof": dof, "p": p, "conditions": vis_names}
    return results


# ---------------------------------------------------------------------------
# CSV interfaces
# ---------------------------------------------------------------------------

def read_pose_log(path: str | Path) -> list[PoseSample]:
    """Load a pose-sample CSV (see LOG_COLUMNS for the layout)."""
    samples = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(LOG_COLUMNS) - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        for row in reader:
            samples.append(PoseSample(
                float(row["t"]),
                (float(row["head_x"]), float(row["head_y"]), float(row["head_z"])),
                (float(row["head_qw"]), float(row["head_qx"]),
                 float(row["head_qy"]), float(row["head_qz"])),
                (float(row["ctrl_x"]), float(row["ctrl_y"]), float(row["ctrl_z"])),
                (float(row["ctrl_qw"]), float(row["ctrl_qx"]),
                 float(row["ctrl_qy"]), float(row["ctrl_qz"])),
            ))
    return samples


def write_pose_log(path: str | Path, samples: list[PoseSample]):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(LOG_COLUMNS)
        for s in samples:
            w.writerow([s.t, *s.head_pos, *s.head_rot, *s.ctrl_pos, *s.ctrl_rot])


def read_responses(path: str | Path) -> list[ResponseRecord]:
    """Load a response CSV (see RESPONSE_COLUMNS for the layout)."""
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(RESPONSE_COLUMNS) - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        for row in reader:
            records.append(ResponseRecord(
                row["participant"], row["visualisation"], row["task"],
                row["difficulty"], row["stimulus_id"], row["chosen"],
                row["correct"].strip().lower() in ("1", "true", "yes"),
                float(row["response_time"]),
            ))
    return records


def load_log_dir(logs_dir: str | Path) -> dict[tuple[str, str], AggregateInteraction]:
    """Aggregate every `<participant>__<stimulus_id>.csv` under a directory."""
    out = {}
    for p in sorted(Path(logs_dir).glob("*.csv")):
        stem = p.stem
        if "__" not in stem:
            continue
        participant, stimulus_id = stem.split("__", 1)
        out[(participant, stimulus_id)] = aggregate(read_pose_log(p))
    return out
