"""Seeded random search for rep-tiles with dedup and an append-only store.

Reproducibility contract: the system tried at trial t is a pure function of
(seed, t) - each trial gets its own Mersenne Twister seeded from
SHA-256(seed, t) - and results are reduced in trial order, so the set of
stored records does not depend on the worker count.
"""

from __future__ import annotations

import hashlib
import json
import logging
import multiprocessing
import os
import random
import time
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError
from .isometry import LatticeIsometry, enumerate_matrices
from .neighbors import analyze
from .system import (
    BlockSystem,
    RepTileSystem,
    block_expand,
    system_from_document,
    system_to_document,
)

log = logging.getLogger(__name__)

# Lower than the standalone default: keeps throughput up during bulk search;
# inconclusive candidates can be re-run with a bigger budget afterwards.
SEARCH_NODE_BUDGET = 50_000


@dataclass(frozen=True, slots=True)
class FilterSpec:
    """Acceptance filters applied after a candidate verifies as a rep-tile."""

    require_connected: bool = False
    boundary_dim_target: float | None = None
    boundary_dim_tol: float = 1e-6
    neighbor_count_range: tuple[int, int] | None = None

    def __post_init__(self):
        if self.neighbor_count_range is not None:
            lo, hi = self.neighbor_count_range
            if lo > hi:
                raise ValidationError(
                    "lower bound exceeds upper bound", field="neighbor_count_range"
                )

    def admits(self, neighbor_count: int, boundary_dim: float, connected: bool) -> bool:
        if self.require_connected and not connected:
            return False
        if self.boundary_dim_target is not None and not (
            abs(boundary_dim - self.boundary_dim_target) <= self.boundary_dim_tol
        ):
            return False
        if self.neighbor_count_range is not None:
            lo, hi = self.neighbor_count_range
            if not lo <= neighbor_count <= hi:
                return False
        return True


@dataclass(frozen=True, slots=True)
class SearchConfig:
    dim: int
    mode: str = "free"  # "free" or "block"
    translation_range: int = 1
    seed: int = 0
    trials: int | None = None
    time_limit: float | None = None
    filters: FilterSpec = field(default_factory=FilterSpec)
    node_budget: int = SEARCH_NODE_BUDGET
    output_path: str | None = None

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValidationError(f"dim must be 2 or 3, got {self.dim}", field="dim")
        if self.mode not in ("free", "block"):
            raise ValidationError(f"unknown mode {self.mode!r}", field="mode")
        if self.mode == "block" and self.dim != 3:
            raise ValidationError("block mode requires dim 3", field="mode")
        if self.translation_range < 0:
            raise ValidationError("range must be >= 0", field="translation_range")
        if self.trials is None and self.time_limit is None:
            raise ValidationError("need a trials count or a time limit", field="trials")
        if self.trials is not None and self.trials < 0:
            raise ValidationError("trials must be >= 0", field="trials")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValidationError("time limit must be positive", field="time_limit")


def trial_rng(seed: int, trial_index: int) -> random.Random:
    """Independent per-trial generator; stable across platforms and runs."""
    digest = hashlib.sha256(f"{seed}:{trial_index}".encode("ascii")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _draw_map(dim: int, range_: int, rng: random.Random) -> LatticeIsometry:
    # Draw order is part of the reproducibility contract: matrix, then the
    # translation coordinates in axis order.
    mats = enumerate_matrices(dim)
    matrix = mats[rng.randrange(len(mats))]
    v = tuple(rng.randint(-range_, range_) for _ in range(dim))
    return LatticeIsometry(matrix, v)


def random_system(config: SearchConfig, rng: random.Random) -> RepTileSystem:
    """One uniform draw from the configured data space."""
    r = config.translation_range
    if config.mode == "block":
        f1, f2, f3, f4 = (_draw_map(3, r, rng) for _ in range(4))
        return block_expand(BlockSystem(f1, f2, f3, f4))
    return RepTileSystem(
        tuple(_draw_map(config.dim, r, rng) for _ in range(2**config.dim))
    )


@dataclass(frozen=True, slots=True)
class Fingerprint:
    """Invariant tuple used to skip rediscoveries of "the same" tile.

    This is parameter equality, not geometric congruence: two genuinely
    different tiles may collide, and any reordering or recoding of the same
    attractor collides on purpose.  Boundary dimension is kept in integer
    micro-units so equality stays exact.
    """

    dim: int
    m: int
    neighbor_count: int
    boundary_dim_micro: int
    connected: bool
    degree_sequence: tuple[int, ...]

    @classmethod
    def from_analysis(
        cls,
        dim: int,
        m: int,
        neighbor_count: int,
        boundary_dim: float,
        connected: bool,
        degree_sequence: tuple[int, ...],
    ) -> "Fingerprint":
        return cls(
            dim=dim,
            m=m,
            neighbor_count=neighbor_count,
            boundary_dim_micro=round(boundary_dim * 1e6),
            connected=connected,
            degree_sequence=tuple(degree_sequence),
        )

    def key(self) -> tuple:
        return (
            self.dim,
            self.m,
            self.neighbor_count,
            self.boundary_dim_micro,
            self.connected,
            self.degree_sequence,
        )

    def to_obj(self) -> dict:
        return {
            "dim": self.dim,
            "m": self.m,
            "neighbor_count": self.neighbor_count,
            "boundary_dim_micro": self.boundary_dim_micro,
            "connected": self.connected,
            "degree_sequence": list(self.degree_sequence),
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "Fingerprint":
        return cls(
            dim=obj["dim"],
            m=obj["m"],
            neighbor_count=obj["neighbor_count"],
            boundary_dim_micro=obj["boundary_dim_micro"],
            connected=obj["connected"],
            degree_sequence=tuple(obj["degree_sequence"]),
        )


def degree_sequence(piece_adjacency: tuple[tuple[bool, ...], ...]) -> tuple[int, ...]:
    """Sorted off-diagonal degree sequence of the piece graph."""
    return tuple(
        sorted(sum(1 for j, v in enumerate(row) if v and j != i) for i, row in enumerate(piece_adjacency))
    )


@dataclass(frozen=True, slots=True)
class ResultRecord:
    """Self-contained discovery: enough to re-verify without the original run."""

    fingerprint: Fingerprint
    system: RepTileSystem
    seed: int
    trial_index: int
    report: dict
    found_at: str

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "fingerprint": self.fingerprint.to_obj(),
                "system": system_to_document(self.system),
                "seed": self.seed,
                "trial_index": self.trial_index,
                "found_at": self.found_at,
                "report": self.report,
            },
            separators=(",", ":"),
        )

    @classmethod
    def from_json_line(cls, line: str) -> "ResultRecord":
        obj = json.loads(line)
        system = system_from_document(obj["system"])
        if isinstance(system, BlockSystem):
            system = block_expand(system)
        return cls(
            fingerprint=Fingerprint.from_obj(obj["fingerprint"]),
            system=system,
            seed=obj["seed"],
            trial_index=obj["trial_index"],
            report=obj["report"],
            found_at=obj.get("found_at", ""),
        )


class ResultStore:
    """Append-only line store of :class:`ResultRecord`; one JSON object per line.

    The in-memory fingerprint index is rebuilt by scanning on open; corrupt
    lines are skipped with a warning so a torn write cannot poison a run.
    """

    def __init__(self, path):
        self.path = Path(path)
        self._keys: set[tuple] = set()
        self._records: list[ResultRecord] = []
        if self.path.exists():
            with self.path.open("r", encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        record = ResultRecord.from_json_line(line)
                    except (ValueError, KeyError) as exc:
                        log.warning(
                            "%s:%d: skipping corrupt record (%s)", self.path, lineno, exc
                        )
                        continue
                    self._keys.add(record.fingerprint.key())
                    self._records.append(record)
        self._fh = None

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, fingerprint: Fingerprint) -> bool:
        return fingerprint.key() in self._keys

    def records(self) -> list[ResultRecord]:
        return list(self._records)

    def insert(self, record: ResultRecord) -> bool:
        key = record.fingerprint.key()
        if key in self._keys:
            return False
        if self._fh is None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._fh = self.path.open("a", encoding="utf-8")
        self._fh.write(record.to_json_line() + "\n")
        self._fh.flush()
        self._keys.add(key)
        self._records.append(record)
        return True

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    @staticmethod
    def canonical_bytes(path) -> bytes:
        """Content-stable form for comparing stores: records sorted by
        (trial index, fingerprint), volatile timestamps dropped."""
        records = ResultStore(path).records()
        records.sort(key=lambda r: (r.trial_index, r.fingerprint.key()))
        lines = []
        for r in records:
            obj = json.loads(r.to_json_line())
            obj.pop("found_at", None)
            lines.append(json.dumps(obj, separators=(",", ":"), sort_keys=True))
        return ("\n".join(lines) + "\n").encode("utf-8") if lines else b""


@dataclass(slots=True)
class SearchSummary:
    trials: int = 0
    rep_tiles: int = 0
    not_rep_tiles: int = 0
    inconclusive: int = 0
    filtered_out: int = 0
    duplicates: int = 0
    stored: int = 0
    elapsed: float = 0.0
    new_records: list = field(default_factory=list)

    @property
    def rate(self) -> float:
        return self.trials / self.elapsed if self.elapsed > 0 else 0.0

    def counts_consistent(self) -> bool:
        return (
            self.trials == self.rep_tiles + self.not_rep_tiles + self.inconclusive
            and self.rep_tiles == self.stored + self.duplicates + self.filtered_out
        )


# Trial outcome wire codes used between workers and the reducer.
_NO, _TILE, _INCONCLUSIVE = 0, 1, 2


def _run_trials(config: SearchConfig, start: int, stop: int) -> list:
    out = []
    for t in range(start, stop):
        system = random_system(config, trial_rng(config.seed, t))
        report = analyze(system, node_budget=config.node_budget)
        if report.node_budget_exceeded:
            out.append((t, _INCONCLUSIVE, None))
        elif not report.is_rep_tile:
            out.append((t, _NO, None))
        else:
            payload = (
                system_to_document(system),
                report.neighbor_count,
                report.boundary_dimension,
                report.connected,
                degree_sequence(report.piece_adjacency),
            )
            out.append((t, _TILE, payload))
    return out


def _worker(args) -> list:
    config, start, stop = args
    return _run_trials(config, start, stop)


def _utc_now() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


def run_search(
    config: SearchConfig,
    workers: int | None = None,
    on_record=None,
) -> SearchSummary:
    """Run the configured search; returns the summary with new records.

    Records are persisted to ``config.output_path`` (when set) as they are
    found.  Identical (config, seed) runs produce identical record sets for
    any worker count; wall-clock limited runs are inherently not
    reproducible and are intended for exploration.
    """
    if workers is None:
        workers = os.cpu_count() or 1
    summary = SearchSummary()
    store = ResultStore(config.output_path) if config.output_path else None
    seen: set[tuple] = set()
    deadline = time.monotonic() + config.time_limit if config.time_limit else None
    started = time.monotonic()

    def reduce_batch(batch) -> None:
        for trial, code, payload in batch:
            summary.trials += 1
            if code == _INCONCLUSIVE:
                summary.inconclusive += 1
                continue
            if code == _NO:
                summary.not_rep_tiles += 1
                continue
            summary.rep_tiles += 1
            doc, count, bdim, connected, degrees = payload
            if not config.filters.admits(count, bdim, connected):
                summary.filtered_out += 1
                continue
            fp = Fingerprint.from_analysis(
                config.dim, 2**config.dim, count, bdim, connected, degrees
            )
            key = fp.key()
            known = key in seen or (store is not None and fp in store)
            if known:
                summary.duplicates += 1
                continue
            seen.add(key)
            record = ResultRecord(
                fingerprint=fp,
                system=system_from_document(doc),
                seed=config.seed,
                trial_index=trial,
                report={
                    "is_rep_tile": True,
                    "neighbor_count": count,
                    "boundary_dimension": bdim,
                    "connected": connected,
                    "node_budget_exceeded": False,
                },
                found_at=_utc_now(),
            )
            if store is not None:
                store.insert(record)
            summary.stored += 1
            summary.new_records.append(record)
            if on_record is not None:
                on_record(record)

    try:
        total = config.trials
        if workers <= 1:
            chunk = 256
            t = 0
            while total is None or t < total:
                if deadline is not None and time.monotonic() >= deadline:
                    break
                stop = t + chunk if total is None else min(t + chunk, total)
                reduce_batch(_run_trials(config, t, stop))
                t = stop
        else:
            chunk = 64
            with multiprocessing.Pool(processes=workers) as pool:
                if total is not None:
                    tasks = [
                        (config, t, min(t + chunk, total)) for t in range(0, total, chunk)
                    ]
                    for batch in pool.imap(_worker, tasks):
                        reduce_batch(batch)
                        if deadline is not None and time.monotonic() >= deadline:
                            break
                else:
                    t = 0
                    while deadline is None or time.monotonic() < deadline:
                        tasks = [(config, t + i * chunk, t + (i + 1) * chunk) for i in range(workers)]
                        for batch in pool.imap(_worker, tasks):
                            reduce_batch(batch)
                        t += workers * chunk
    finally:
        if store is not None:
            store.close()
    summary.elapsed = time.monotonic() - started
    return summary
