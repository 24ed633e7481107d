"""Exhaustive verification of the vanishing condition.

For a partition P of the coordinates {1..d} let α(P, v) count the blocks that
contain a coordinate where v is 1. The condition asks that ldeg(F_{v_0} ⋯ F_{v_d})
vanishes whenever Σ_i α(P, v_i) < d + |P| for some partition P.
"""
import itertools
import logging
import random
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import pandas as pd
from tqdm import tqdm

from chow_calculus.core.fourier import (
  TupleOrbitKey,
  canonical_tuple,
  canonical_tuples,
  degree_f,
  render_tuple,
  vector_key,
)
from chow_calculus.core.schema import Field
from chow_calculus.core.simplicial import CubeVertex, DimensionMismatch, InvalidBitstring, parse_bitstring, to_bitstring
from chow_calculus.core.table import ResultTable
from chow_calculus.core.utils import ChowCalculusError, ConsistencyError, setting

log = logging.getLogger("main")

CACHE_HEADER = "chowcache v1 d={d}"
CACHE_HEADER_PATTERN = re.compile(r"^chowcache v(\d+) d=(\d+)$")


class InvalidPartition(ChowCalculusError):
  pass

class PartitionCapExceeded(ChowCalculusError):
  pass

class LongRunNotAllowed(ChowCalculusError):
  pass

class CacheFormatError(ChowCalculusError):
  pass

class CacheCorruption(ConsistencyError):
  pass

class CacheConflict(ConsistencyError):
  pass


@dataclass(frozen=True)
class Partition:
  """A set partition of the coordinates {1, ..., d}, blocks sorted by their smallest element."""
  blocks: Tuple[Tuple[int, ...], ...]

  def __post_init__(self):
    blocks = tuple(sorted((tuple(sorted(block)) for block in self.blocks), key=lambda block: block[0] if block else 0))
    elements = [j for block in blocks for j in block]
    if any(not block for block in blocks):
      raise InvalidPartition("partition blocks must be nonempty")
    if sorted(elements) != list(range(1, len(elements) + 1)):
      raise InvalidPartition(f"{self.blocks} does not partition {{1..{len(elements)}}}")
    object.__setattr__(self, "blocks", blocks)

  def __len__(self) -> int:
    return len(self.blocks)

  def __str__(self) -> str:
    return self.render()

  @property
  def d(self) -> int:
    return sum(len(block) for block in self.blocks)

  @property
  def masks(self) -> Tuple[int, ...]:
    return tuple(sum(1 << (j - 1) for j in block) for block in self.blocks)

  def permute(self, tau: Sequence[int]) -> "Partition":
    """Image under the coordinate permutation moving coordinate i to tau[i] (0-based)."""
    return Partition(tuple(tuple(tau[j - 1] + 1 for j in block) for block in self.blocks))

  def render(self) -> str:
    return "".join("{" + ",".join(str(j) for j in block) + "}" for block in self.blocks)


def trivial_partition(d: int) -> Partition:
  return Partition((tuple(range(1, d + 1)),))


def partitions(d: int, max_dimension: int = None) -> Iterator[Partition]:
  """All Bell(d) partitions of {1..d}, in the order of their restricted growth strings."""
  cap = setting("max_partition_dimension", max_dimension)
  if not isinstance(d, int) or d < 1:
    raise DimensionMismatch(f"dimension must be a positive integer, got {d!r}")
  if d > cap:
    raise PartitionCapExceeded(f"partitions are enumerated up to d={cap}, got d={d}")

  def grow(prefix: List[int], blocks: int) -> Iterator[List[int]]:
    if len(prefix) == d:
      yield prefix
      return
    for b in range(blocks + 1):
      yield from grow(prefix + [b], max(blocks, b + 1))

  for labels in grow([0], 1):
    blocks = [[] for _ in range(max(labels) + 1)]
    for j, b in enumerate(labels):
      blocks[b].append(j + 1)
    yield Partition(tuple(tuple(block) for block in blocks))


def alpha(P: Partition, v: CubeVertex) -> int:
  return sum(1 for mask in P.masks if v & mask)


def hypothesis_holds(P: Partition, vectors: Sequence[CubeVertex]) -> bool:
  return sum(alpha(P, v) for v in vectors) < P.d + len(P)


def triggering_partitions(vectors: Sequence[CubeVertex], parts: Sequence[Partition]) -> List[Partition]:
  return [P for P in parts if hypothesis_holds(P, vectors)]


# --- degree cache ---

class DegreeCache:
  """Degrees of canonical tuples for one dimension."""

  def __init__(self, d: int, entries: Dict[TupleOrbitKey, int] = None) -> None:
    self.d = d
    self.entries: Dict[TupleOrbitKey, int] = dict(entries or {})

  def __repr__(self) -> str:
    return f"DegreeCache(d={self.d}, entries={len(self.entries)})"

  def __len__(self) -> int:
    return len(self.entries)

  def __contains__(self, key: TupleOrbitKey) -> bool:
    return key in self.entries

  def __eq__(self, other: object) -> bool:
    if not isinstance(other, DegreeCache):
      return NotImplemented
    return self.d == other.d and self.entries == other.entries

  def get(self, key: TupleOrbitKey) -> Optional[int]:
    return self.entries.get(key)

  def put(self, key: TupleOrbitKey, value: int) -> None:
    self.entries[tuple(key)] = int(value)

  def merge(self, shard: "DegreeCache") -> None:
    """Fold a worker shard in.

    Raises:
        CacheConflict: If the shard disagrees with a stored degree.
    """
    if shard.d != self.d:
      raise DimensionMismatch(f"cannot merge a d={shard.d} shard into a d={self.d} cache")
    for key, value in shard.entries.items():
      stored = self.entries.get(key)
      if stored is not None and stored != value:
        raise CacheConflict(
          f"degree of {render_tuple(key, self.d)} is {stored} in the cache but {value} in a shard"
        )
      self.entries[key] = value
    log.debug("Merged %d cache entries, %d in total", len(shard), len(self))

  def sorted_items(self) -> List[Tuple[TupleOrbitKey, int]]:
    return sorted(self.entries.items(), key=lambda item: [vector_key(v, self.d) for v in item[0]])


def cache_store(cache: DegreeCache, path: Union[str, Path]) -> None:
  df = pd.DataFrame.from_records(
    [(",".join(to_bitstring(v, cache.d) for v in key), value) for key, value in cache.sorted_items()],
    columns=["vectors", "degree"]
  )
  with open(path, "w") as f:
    f.write(CACHE_HEADER.format(d=cache.d) + "\n")
    if len(df):
      f.write(df.to_csv(sep="\t", header=False, index=False))


def _parse_cache_key(token: str, d: int) -> TupleOrbitKey:
  if not isinstance(token, str):
    raise CacheFormatError(f"missing cache key in record {token!r}")
  try:
    key = tuple(parse_bitstring(part, d) for part in token.split(","))
  except (InvalidBitstring, DimensionMismatch) as e:
    raise CacheFormatError(f"malformed cache key {token!r}: {e}")
  if len(key) != d + 1:
    raise CacheFormatError(f"cache key {token!r} does not hold {d + 1} vectors")
  if key != canonical_tuple(d, key):
    raise CacheFormatError(f"cache key {token!r} is not an orbit representative")
  return key


def cache_load(
  path: Union[str, Path],
  d: int = None,
  spot_checks: int = None,
  rng: random.Random = None) -> DegreeCache:
    """Load a degree cache and spot-check it against recomputation.

    Args:
        path (Union[str, Path]): The cache file.
        d (int, optional): Expected dimension. Required to load a 0-byte file.
        spot_checks (int, optional): Number of entries to recompute. Defaults to the engine setting.
        rng (random.Random, optional): Picks the spot-checked entries.

    Raises:
        CacheFormatError: On a bad header, a dimension mismatch or malformed records.
        CacheCorruption: If a spot-checked entry disagrees with degree_f.

    Returns:
        DegreeCache: The loaded cache.
    """
    with open(path) as f:
      header = f.readline()
      if not header:
        if d is None:
          raise CacheFormatError(f"{path}: empty cache file and no dimension given")
        return DegreeCache(d)

      match = CACHE_HEADER_PATTERN.match(header.rstrip("\n"))
      if not match:
        raise CacheFormatError(f"{path}: not a degree cache, header is {header.strip()!r}")
      version, file_d = int(match.group(1)), int(match.group(2))
      if version != 1:
        raise CacheFormatError(f"{path}: unsupported cache version {version}")
      if d is not None and file_d != d:
        raise CacheFormatError(f"{path}: cache is for d={file_d}, expected d={d}")

      try:
        df = pd.read_csv(f, sep="\t", header=None, names=["vectors", "degree"], dtype={"vectors": str})
      except pd.errors.EmptyDataError:
        df = pd.DataFrame({"vectors": [], "degree": []})
      except (pd.errors.ParserError, ValueError) as e:
        raise CacheFormatError(f"{path}: malformed cache records: {e}")

    cache = DegreeCache(file_d)
    for token, value in zip(df["vectors"], df["degree"]):
      if pd.isna(value) or float(value) != int(value):
        raise CacheFormatError(f"{path}: degree of {token} is not an integer")
      key = _parse_cache_key(token, file_d)
      if key in cache:
        raise CacheFormatError(f"{path}: duplicate record for {token}")
      cache.put(key, int(value))

    k = min(setting("cache_spot_checks", spot_checks), len(cache))
    rng = rng or random.Random()
    for key in rng.sample(sorted(cache.entries), k):
      stored, actual = cache.get(key), degree_f(file_d, key)
      if stored != actual:
        raise CacheCorruption(
          f"{path}: stored degree {stored} of {render_tuple(key, file_d)} differs from recomputed {actual}"
        )
    log.debug("Loaded %d cache entries from %s, %d spot-checked", len(cache), path, k)
    return cache


# --- the sweep ---

@dataclass(frozen=True)
class Counterexample:
  partition: Partition
  vectors: TupleOrbitKey
  degree: int


class CounterexampleTable(ResultTable):

  name = "counterexamples"
  description = "Tuples whose degree does not vanish although a partition predicts it."

  def __init__(self) -> None:
    super().__init__()
    self.schema.add_field(Field(name="partition", type="string"))
    self.schema.add_field(Field(name="representative", type="array", form="tuple"))
    self.schema.add_field(Field(name="degree", type="integer"))


@dataclass
class VanishingReport:
  d: int
  partitions_checked: int
  tuples_checked: int
  tuples_visited: int
  counterexamples: List[Counterexample] = field(default_factory=list)
  elapsed: float = 0.0
  reduced: bool = True

  @property
  def verified(self) -> bool:
    return not self.counterexamples

  def as_text(self) -> str:
    lines = [
      f"vanishing condition d={self.d}: {'verified' if self.verified else 'VIOLATED'}",
      f"partitions checked: {self.partitions_checked}",
      f"{'orbits' if self.reduced else 'tuples'} visited: {self.tuples_visited}",
      f"tuples checked: {self.tuples_checked}",
      f"counterexamples: {len(self.counterexamples)}",
    ]
    for c in self.counterexamples:
      lines.append(f"  P={c.partition.render()} V={render_tuple(c.vectors, self.d)} degree={c.degree}")
    lines.append(f"elapsed: {self.elapsed:.2f}s")
    return "\n".join(lines)

  def as_records(self) -> str:
    records = [
      ("d", self.d),
      ("verified", str(self.verified).lower()),
      ("reduced", str(self.reduced).lower()),
      ("partitions_checked", self.partitions_checked),
      ("tuples_visited", self.tuples_visited),
      ("tuples_checked", self.tuples_checked),
      ("counterexamples", len(self.counterexamples)),
      ("elapsed", f"{self.elapsed:.3f}"),
    ]
    return "\n".join(f"{key}={value}" for key, value in records)

  def counterexample_table(self) -> CounterexampleTable:
    return CounterexampleTable().from_records([
      {
        "partition": c.partition.render(),
        "representative": tuple(to_bitstring(v, self.d) for v in c.vectors),
        "degree": c.degree,
      }
      for c in self.counterexamples
    ])


def _degree_batch(d: int, batch: List[TupleOrbitKey]) -> List[Tuple[TupleOrbitKey, int]]:
  return [(vectors, degree_f(d, vectors)) for vectors in batch]


def _batches(items: List, size: int) -> Iterator[List]:
  for start in range(0, len(items), size):
    yield items[start:start + size]


def check_vanishing(
  d: int,
  cache: DegreeCache = None,
  jobs: int = 1,
  allow_long: bool = False,
  progress: bool = False,
  reduce_orbits: bool = True,
  batch_size: int = None) -> VanishingReport:
    """Check the vanishing condition for every partition of {1..d}.

    With reduce_orbits only the canonical representatives of the
    S_{d+1} × S_d orbits are visited; degree_f is orbit invariant and the
    set of partitions is closed under coordinate permutation, so no case is
    lost. Degrees of triggered tuples come from the cache or are computed in
    batches, on jobs worker processes when jobs > 1.

    Raises:
        LongRunNotAllowed: For d at or above the long-run threshold without allow_long.
        CacheConflict: If freshly computed degrees disagree with the cache.
    """
    parts = list(partitions(d))
    long_run = setting("long_run_dimension")
    if d >= long_run:
      if not allow_long:
        raise LongRunNotAllowed(f"d={d} is a long run, it has to be allowed explicitly")
      log.warning("Starting a long-running vanishing sweep for d=%d", d)
      progress = True

    cache = cache if cache is not None else DegreeCache(d)
    if cache.d != d:
      raise DimensionMismatch(f"a d={cache.d} cache cannot serve a d={d} sweep")
    size = setting("batch_size", batch_size)
    start = time.perf_counter()

    if reduce_orbits:
      candidates = list(canonical_tuples(d))
    else:
      candidates = list(itertools.product(range(1 << d), repeat=d + 1))

    triggered: Dict[Tuple[CubeVertex, ...], List[Partition]] = {}
    for vectors in candidates:
      hits = triggering_partitions(vectors, parts)
      if hits:
        triggered[vectors] = hits

    degrees: Dict[Tuple[CubeVertex, ...], int] = {}
    missing = []
    for vectors in triggered:
      if reduce_orbits and vectors in cache:
        degrees[vectors] = cache.get(vectors)
      else:
        missing.append(vectors)
    log.debug("d=%d: %d of %d tuples triggered, %d cache hits", d, len(triggered), len(candidates), len(degrees))

    bar = tqdm(total=len(triggered), initial=len(degrees), disable=not progress, unit="orbit" if reduce_orbits else "tuple", desc=f"vanishing d={d}")
    batches = list(_batches(missing, size))
    if jobs > 1 and len(batches) > 1:
      with ProcessPoolExecutor(max_workers=jobs) as pool:
        results = pool.map(_degree_batch, [d] * len(batches), batches)
        shards = []
        for result in results:
          shards.append(result)
          bar.update(len(result))
    else:
      shards = []
      for batch in batches:
        result = _degree_batch(d, batch)
        shards.append(result)
        bar.update(len(result))
    bar.close()

    for result in shards:
      degrees.update(result)
      if reduce_orbits:
        cache.merge(DegreeCache(d, dict(result)))

    counterexamples = []
    for vectors, hits in triggered.items():
      value = degrees[vectors]
      if value != 0:
        for P in hits:
          counterexamples.append(Counterexample(P, tuple(vectors), value))

    report = VanishingReport(
      d=d,
      partitions_checked=len(parts),
      tuples_checked=len(triggered),
      tuples_visited=len(candidates),
      counterexamples=counterexamples,
      elapsed=time.perf_counter() - start,
      reduced=reduce_orbits,
    )
    log.info(
      "Vanishing sweep d=%d: %d tuples checked, %d counterexamples in %.2fs",
      d, report.tuples_checked, len(counterexamples), report.elapsed
    )
    return report
