"""Deterministic map-reduce over datastore chunks.

Chunks are read sequentially from the datastore's cursor, mapped (possibly
on several worker threads), and their keyed outputs merged into an
:class:`IntermediateStore`.  Each value is tagged with the index of the
chunk that produced it, and per-key values are sorted by (chunk index,
insertion order) before reduction, so results do not depend on how map
tasks were scheduled.

Progress is reported as whole percentages: an initial (0, 0) event, one
event after every mapped chunk, and one after every reduced key; the final
event is always (100, 100).
"""

from __future__ import annotations

from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .datastore import NUMERIC, Datastore, TableChunk
from .errors import EmptyJob, TypeMismatch

MAX_KEY = "MaxElapsedTime"  # key under which the built-in max job reports


@dataclass(frozen=True)
class ProgressEvent:
    map_pct: int
    reduce_pct: int


@dataclass(frozen=True)
class JobResult:
    """Reduced (key, value) pairs, keys in lexicographic order."""

    pairs: tuple[tuple[str, object], ...]

    def readall(self) -> list[tuple[str, object]]:
        return list(self.pairs)

    def value(self, key: str):
        for k, v in self.pairs:
            if k == key:
                return v
        raise KeyError(key)


class _ChunkWriter:
    """Collects one map task's (key, value) pairs in emission order."""

    def __init__(self):
        self.pairs: list[tuple[str, object]] = []

    def add(self, key: str, value) -> None:
        self.pairs.append((str(key), value))


class IntermediateStore:
    """Multi-map from key to chunk-tagged values, ordered deterministically."""

    def __init__(self):
        self._values: dict[str, list] = defaultdict(list)

    def add(self, key: str, value, chunk_index: int, order: int) -> None:
        self._values[key].append((chunk_index, order, value))

    def keys(self) -> list[str]:
        return sorted(self._values)

    def values(self, key: str) -> list:
        """Values for a key, sorted by (source chunk index, insertion order)."""
        return [v for _, _, v in sorted(self._values[key], key=lambda t: t[:2])]


Mapper = Callable[[TableChunk, _ChunkWriter], None]
Reducer = Callable[[str, list], object]
ProgressSink = Optional[Callable[[ProgressEvent], None]]


def map_reduce(
    ds: Datastore,
    mapper: Mapper,
    reducer: Reducer,
    progress_sink: ProgressSink = None,
    workers: int = 1,
) -> JobResult:
    """Run ``mapper`` over every remaining chunk of ``ds``, then ``reducer``.

    ``workers`` > 1 maps chunks concurrently; the result and the progress
    trace are identical either way.  Raises ``EmptyJob`` if the cursor has
    nothing left to read.
    """
    chunks = []
    while ds.has_data():
        chunks.append(ds.read())
    if not chunks:
        raise EmptyJob("the datastore has no chunks left to map")

    def emit(map_pct: int, reduce_pct: int) -> None:
        if progress_sink is not None:
            progress_sink(ProgressEvent(map_pct, reduce_pct))

    emit(0, 0)
    n = len(chunks)
    writers: list[_ChunkWriter] = [_ChunkWriter() for _ in chunks]

    def run_map(index: int) -> int:
        mapper(chunks[index], writers[index])
        return index

    if workers <= 1:
        for done, index in enumerate(range(n), start=1):
            run_map(index)
            emit(100 * done // n, 0)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            done = 0
            for _ in pool.map(run_map, range(n)):
                done += 1
                emit(100 * done // n, 0)

    store = IntermediateStore()
    for chunk_index, writer in enumerate(writers):
        for order, (key, value) in enumerate(writer.pairs):
            store.add(key, value, chunk_index, order)

    keys = store.keys()
    pairs = []
    for done, key in enumerate(keys, start=1):
        pairs.append((key, reducer(key, store.values(key))))
        emit(100, 100 * done // len(keys))
    if not keys:
        emit(100, 100)  # nothing to reduce still finishes the job
    return JobResult(pairs=tuple(pairs))


# -- built-in jobs -------------------------------------------------------------


def _numeric_cells(chunk: TableChunk, column: str) -> list[float]:
    i = chunk.column_index(column)
    if chunk.schema[i].kind != NUMERIC:
        raise TypeMismatch(f"column {column!r} is not numeric")
    return [row[i] for row, flags in zip(chunk.rows, chunk.missing) if not flags[i]]


def builtin_max_mapper(column: str) -> Mapper:
    """Per-chunk maximum of a numeric column; all-missing chunks emit nothing."""

    def mapper(chunk: TableChunk, store: _ChunkWriter) -> None:
        cells = _numeric_cells(chunk, column)
        if cells:
            store.add(MAX_KEY, max(cells))

    return mapper


def builtin_max_reducer(key: str, values: list) -> float:
    return max(values)


def builtin_keycount_mapper(key_column: str, value_column: str | None = None) -> Mapper:
    """Per-chunk row counts grouped by ``key_column``.

    When ``value_column`` is given, only rows with a non-missing cell there
    are counted.  Rows whose key cell is missing are skipped.
    """

    def mapper(chunk: TableChunk, store: _ChunkWriter) -> None:
        key_i = chunk.column_index(key_column)
        val_i = chunk.column_index(value_column) if value_column is not None else None
        counts: dict[str, int] = defaultdict(int)
        for row, flags in zip(chunk.rows, chunk.missing):
            if flags[key_i]:
                continue
            if val_i is not None and flags[val_i]:
                continue
            counts[_key_text(row[key_i])] += 1
        for key in sorted(counts):
            store.add(key, counts[key])

    return mapper


def builtin_sum_reducer(key: str, values: Iterable) -> float:
    return sum(values)


def _key_text(value) -> str:
    if isinstance(value, float) and value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return str(value)
