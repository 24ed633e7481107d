"""Ordered graphs, their d-fold products and the covering by standard cubes.

Vertices of the standard cube I^d are elements of F_2^d packed as bitmasks
(bit i is the coordinate v_{i+1}). Vertices of a product Γ^d are tuples of
vertex indices. The total order of a graph is the position in its vertex list.
"""
import itertools
import json
import logging
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, Iterator, Optional, Sequence, Set, Tuple, Union

import yaml

from chow_calculus.core.utils import ChowCalculusError, setting

CubeVertex = int
ProductVertex = Tuple[int, ...]

log = logging.getLogger("main")


class InvalidGraph(ChowCalculusError):
  pass

class DimensionMismatch(ChowCalculusError):
  pass

class DimensionCapExceeded(ChowCalculusError):
  pass

class InvalidBitstring(ChowCalculusError):
  pass

class InvalidSubdivision(ChowCalculusError):
  pass


def check_dimension(d: int, max_dimension: int = None) -> int:
  cap = setting("max_dimension", max_dimension)
  if not isinstance(d, int) or d < 1:
    raise DimensionMismatch(f"dimension must be a positive integer, got {d!r}")
  if d > cap:
    raise DimensionCapExceeded(f"dimension {d} exceeds the configured cap {cap}")
  return d


# --- cube vertices ---

def popcount(v: CubeVertex) -> int:
  return bin(v).count("1")

def cube_leq(a: CubeVertex, b: CubeVertex) -> bool:
  """Product order on F_2^d."""
  return a & ~b == 0

def cube_comparable(a: CubeVertex, b: CubeVertex) -> bool:
  return a & ~b == 0 or b & ~a == 0

def is_cube_chain(vertices: Iterable[CubeVertex]) -> bool:
  ordered = sorted(set(vertices), key=lambda v: (popcount(v), v))
  return all(cube_leq(a, b) for a, b in zip(ordered, ordered[1:]))

def to_bitstring(v: CubeVertex, d: int) -> str:
  """Render v as concatenated digits, "101" is the vector (1,0,1)."""
  return "".join(str((v >> i) & 1) for i in range(d))

def parse_bitstring(token: str, d: int = None) -> CubeVertex:
  if not token or any(c not in "01" for c in token):
    raise InvalidBitstring(f"not a bitstring: {token!r}")
  if d is not None and len(token) != d:
    raise DimensionMismatch(f"vector {token!r} does not have {d} coordinates")
  return sum(1 << i for i, c in enumerate(token) if c == "1")

def permute_vertex(v: CubeVertex, tau: Sequence[int]) -> CubeVertex:
  """Move coordinate i of v to position tau[i] (0-based)."""
  w = 0
  for i, target in enumerate(tau):
    if (v >> i) & 1:
      w |= 1 << target
  return w


# --- ordered graphs ---

@dataclass(frozen=True)
class OrderedGraph:
  """A finite simple graph with a total order on its vertices.

  Edges are ascending index pairs (i, j), i < j.
  """
  vertices: Tuple[str, ...]
  edges: Tuple[Tuple[int, int], ...]

  def __str__(self) -> str:
    return f"OrderedGraph(vertices={len(self.vertices)}, edges={len(self.edges)})"

  @property
  def num_vertices(self) -> int:
    return len(self.vertices)

  @cached_property
  def edge_set(self) -> FrozenSet[Tuple[int, int]]:
    return frozenset(self.edges)

  def has_edge(self, i: int, j: int) -> bool:
    return (min(i, j), max(i, j)) in self.edge_set

  def as_dict(self) -> Dict:
    return {
      "vertices": list(self.vertices),
      "edges": [list(edge) for edge in self.edges]
    }

  def as_text(self, fmt: str = "json") -> str:
    if fmt == "json":
      return json.dumps(self.as_dict(), indent=2) + "\n"
    elif fmt == "yaml":
      return yaml.safe_dump(self.as_dict(), default_flow_style=None, sort_keys=False)
    else:
      raise InvalidGraph(f"Unknown graph format: {fmt}")


def validate_graph(vertices: Sequence, edges: Iterable[Sequence[int]]) -> OrderedGraph:
  """Build an OrderedGraph from a vertex list and a list of index pairs.

  Args:
      vertices (Sequence): Vertex labels, the total order is the list position.
      edges (Iterable[Sequence[int]]): Index pairs (i, j), each ascending.

  Raises:
      InvalidGraph: On duplicate labels, unknown indices, loops, descending or duplicate edges.

  Returns:
      OrderedGraph: The validated graph.
  """
  labels = tuple(str(label) for label in vertices)
  if len(set(labels)) != len(labels):
    raise InvalidGraph("vertex labels must be pairwise distinct")

  seen = set()
  normalized = []
  for edge in edges:
    edge = tuple(edge)
    if len(edge) != 2 or not all(isinstance(x, int) and not isinstance(x, bool) for x in edge):
      raise InvalidGraph(f"edge {list(edge)} is not a pair of vertex indices")
    i, j = edge
    for index in (i, j):
      if not 0 <= index < len(labels):
        raise InvalidGraph(f"edge {[i, j]} refers to unknown vertex index {index}")
    if i == j:
      raise InvalidGraph(f"loop at vertex {i}")
    if i > j:
      raise InvalidGraph(
        f"edge {[i, j]} descends, edges must ascend in the declared vertex order"
      )
    if (i, j) in seen:
      raise InvalidGraph(f"duplicate edge {[i, j]}")
    seen.add((i, j))
    normalized.append((i, j))

  return OrderedGraph(vertices=labels, edges=tuple(normalized))


def graph_from_dict(raw: Dict) -> OrderedGraph:
  if not isinstance(raw, dict) or set(raw) != {"vertices", "edges"}:
    raise InvalidGraph('a graph document needs exactly the keys "vertices" and "edges"')
  return validate_graph(raw["vertices"] or [], raw["edges"] or [])


def _graph_format(path: Path) -> str:
  return "yaml" if path.suffix in (".yml", ".yaml") else "json"


def read_graph(path: Union[str, Path]) -> OrderedGraph:
  path = Path(path)
  with open(path) as f:
    try:
      if _graph_format(path) == "yaml":
        raw = yaml.safe_load(f)
      else:
        raw = json.load(f)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
      raise InvalidGraph(f"{path}: {e}")
  log.debug("Read graph from %s", path)
  return graph_from_dict(raw)


def write_graph(g: OrderedGraph, path: Union[str, Path]) -> None:
  path = Path(path)
  with open(path, "w") as f:
    f.write(g.as_text(_graph_format(path)))


def standard_simplex() -> OrderedGraph:
  """The standard 1-simplex I, one edge between vertices 0 < 1."""
  return validate_graph(["0", "1"], [(0, 1)])

def path_graph(m: int) -> OrderedGraph:
  return validate_graph([str(i) for i in range(m + 1)], [(i, i + 1) for i in range(m)])

def cycle_graph(m: int) -> OrderedGraph:
  if m < 3:
    raise InvalidGraph("a simple cycle needs at least 3 vertices")
  edges = sorted([(i, i + 1) for i in range(m - 1)] + [(0, m - 1)])
  return validate_graph([str(i) for i in range(m)], edges)


def _unique_label(base: str, taken: Set[str]) -> str:
  label, k = base, 1
  while label in taken:
    k += 1
    label = f"{base}#{k}"
  taken.add(label)
  return label


def subdivide(g: OrderedGraph, n: int) -> OrderedGraph:
  """The n-fold subdivision sd_n(g).

  Every vertex w is encoded as the n-tuple (w,...,w), the j-th interior point of
  an edge u < v as (u,...,u,v,...,v) with j trailing copies of v. The new order
  is the lexicographic order of these encodings.

  Interior points are labelled <u>:<v>:<j>. A label already in use gets the
  first free suffix #2, #3, ... so that arbitrary input labels stay legal.
  """
  if not isinstance(n, int) or n < 1:
    raise InvalidSubdivision(f"subdivision factor must be a positive integer, got {n!r}")

  taken = set(g.vertices)
  encoded = [((w,) * n, g.vertices[w]) for w in range(g.num_vertices)]
  paths = []
  for u, v in g.edges:
    path = [(u,) * n]
    for j in range(1, n):
      code = (u,) * (n - j) + (v,) * j
      encoded.append((code, _unique_label(f"{g.vertices[u]}:{g.vertices[v]}:{j}", taken)))
      path.append(code)
    path.append((v,) * n)
    paths.append(path)

  encoded.sort(key=lambda item: item[0])
  position = {code: index for index, (code, _) in enumerate(encoded)}

  edges = []
  for path in paths:
    for a, b in zip(path, path[1:]):
      edges.append((position[a], position[b]))

  return validate_graph([label for _, label in encoded], sorted(edges))


# --- products and cubes ---

def product_leq(a: ProductVertex, b: ProductVertex) -> bool:
  return all(x <= y for x, y in zip(a, b))


@dataclass(frozen=True)
class CubeEmbedding:
  """The injection i_γ: I^d → Γ^d given by a d-tuple of edge indices.

  Edge γ_i supplies the i-th cube axis, its low endpoint for bit 0 and its high
  endpoint for bit 1.
  """
  edges: Tuple[int, ...]

  @property
  def dimension(self) -> int:
    return len(self.edges)

  def embed(self, v: CubeVertex, g: OrderedGraph) -> ProductVertex:
    return embed_vertex(self, v, g)

  def image(self, g: OrderedGraph) -> Dict[ProductVertex, CubeVertex]:
    return {self.embed(v, g): v for v in range(1 << self.dimension)}

  def preimage(self, p: ProductVertex, g: OrderedGraph) -> Optional[CubeVertex]:
    if len(p) != self.dimension:
      raise DimensionMismatch(f"vertex {p} does not live in a product of dimension {self.dimension}")
    v = 0
    for i, (coordinate, edge_index) in enumerate(zip(p, self.edges)):
      low, high = g.edges[edge_index]
      if coordinate == high:
        v |= 1 << i
      elif coordinate != low:
        return None
    return v


def cube_embeddings(g: OrderedGraph, d: int) -> Iterator[CubeEmbedding]:
  """All |E|^d embeddings of the standard cube, lexicographic in the edge indices."""
  check_dimension(d)
  for edges in itertools.product(range(len(g.edges)), repeat=d):
    yield CubeEmbedding(edges=edges)


def embed_vertex(gamma: CubeEmbedding, v: CubeVertex, g: OrderedGraph) -> ProductVertex:
  d = gamma.dimension
  if v < 0 or v >> d:
    raise DimensionMismatch(f"cube vertex {v:b} has more than {d} coordinates")
  return tuple(
    g.edges[edge_index][(v >> i) & 1]
    for i, edge_index in enumerate(gamma.edges)
  )


def is_simplex(g: OrderedGraph, d: int, s: Iterable[ProductVertex]) -> bool:
  """Whether the vertex set s spans a simplex of g^d.

  Every coordinate projection must hit a vertex or the two endpoints of one
  edge, and s must be a chain in the coordinatewise order.
  """
  vertices = sorted(set(s))
  for p in vertices:
    if len(p) != d:
      raise DimensionMismatch(f"vertex {p} does not live in a product of dimension {d}")

  for i in range(d):
    values = {p[i] for p in vertices}
    if len(values) > 2:
      return False
    if len(values) == 2 and not g.has_edge(*values):
      return False

  # sorted tuples: a chain must ascend in list order
  return all(product_leq(a, b) for a, b in zip(vertices, vertices[1:]))
