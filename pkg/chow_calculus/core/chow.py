"""Exact arithmetic in the combinatorial Chow ring of Γ^d.

Cycles are sparse maps monomial -> Fraction. A monomial is a tuple of
(vertex, multiplicity) pairs sorted by the ambient's vertex key. Over the
standard cube the key is (popcount, bitmask), so the factors of a simplex
monomial are listed along its chain.
"""
import itertools
import logging
import math
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from chow_calculus.core.simplicial import (
  CubeEmbedding,
  CubeVertex,
  DimensionMismatch,
  OrderedGraph,
  ProductVertex,
  check_dimension,
  cube_comparable,
  cube_embeddings,
  cube_leq,
  is_simplex,
  popcount,
  to_bitstring,
)
from chow_calculus.core.utils import ChowCalculusError, ConsistencyError, setting

Vertex = Union[CubeVertex, ProductVertex]
Monomial = Tuple[Tuple[Vertex, int], ...]
Rational = Union[int, Fraction]

log = logging.getLogger("main")


class AmbientMismatch(ChowCalculusError):
  pass

class DegreeMismatch(ChowCalculusError):
  pass

class InvalidMorphism(ChowCalculusError):
  pass

class BasisTooLarge(ChowCalculusError):
  pass

class AlreadyProper(ChowCalculusError):
  pass

class NormalizationDiverged(ChowCalculusError):
  pass

class OracleInconsistent(ConsistencyError):
  pass

class OracleUnderdetermined(ChowCalculusError):
  pass


# --- ambients ---

@dataclass(frozen=True)
class CubeAmbient:
  """The standard cube I^d."""
  d: int

  def __post_init__(self):
    check_dimension(self.d)

  @property
  def num_vertices(self) -> int:
    return 1 << self.d

  def vertices(self) -> List[CubeVertex]:
    return list(range(1 << self.d))

  def contains(self, v) -> bool:
    return isinstance(v, int) and 0 <= v < (1 << self.d)

  def key(self, v: CubeVertex):
    return (popcount(v), v)

  def coordinate(self, v: CubeVertex, i: int) -> int:
    return (v >> i) & 1

  def is_simplex(self, support: Sequence[CubeVertex]) -> bool:
    """Support must be sorted by key, as monomial factors are."""
    return all(cube_leq(a, b) for a, b in zip(support, support[1:]))

  def render_vertex(self, v: CubeVertex) -> str:
    return to_bitstring(v, self.d)


@dataclass(frozen=True)
class ProductAmbient:
  """The d-fold product Γ^d of an ordered graph."""
  graph: OrderedGraph
  d: int

  def __post_init__(self):
    check_dimension(self.d)

  @property
  def num_vertices(self) -> int:
    return self.graph.num_vertices ** self.d

  def vertices(self) -> List[ProductVertex]:
    return list(itertools.product(range(self.graph.num_vertices), repeat=self.d))

  def contains(self, v) -> bool:
    return (
      isinstance(v, tuple) and len(v) == self.d
      and all(isinstance(x, int) and 0 <= x < self.graph.num_vertices for x in v)
    )

  def key(self, v: ProductVertex):
    return v

  def coordinate(self, v: ProductVertex, i: int) -> int:
    return v[i]

  def is_simplex(self, support: Sequence[ProductVertex]) -> bool:
    return is_simplex(self.graph, self.d, support)

  def render_vertex(self, v: ProductVertex) -> str:
    return ",".join(str(x) for x in v)


Ambient = Union[CubeAmbient, ProductAmbient]


# --- monomials ---

def make_monomial(ambient: Ambient, factors: Iterable[Vertex]) -> Monomial:
  counts = Counter(factors)
  for v in counts:
    if not ambient.contains(v):
      raise DimensionMismatch(f"{v!r} is not a vertex of {ambient}")
  return tuple(sorted(counts.items(), key=lambda item: ambient.key(item[0])))

def _from_counts(ambient: Ambient, counts: Dict[Vertex, int]) -> Monomial:
  return tuple(sorted(counts.items(), key=lambda item: ambient.key(item[0])))

def monomial_mul(ambient: Ambient, a: Monomial, b: Monomial) -> Monomial:
  counts = dict(a)
  for v, k in b:
    counts[v] = counts.get(v, 0) + k
  return _from_counts(ambient, counts)

def total_degree(m: Monomial) -> int:
  return sum(k for _, k in m)

def support(m: Monomial) -> List[Vertex]:
  return [v for v, _ in m]

def is_proper(m: Monomial) -> bool:
  return all(k == 1 for _, k in m)

def render_monomial(ambient: Ambient, m: Monomial) -> str:
  if not m:
    return "1"
  return " ".join(
    ambient.render_vertex(v) + (f"^{k}" if k > 1 else "")
    for v, k in m
  )


# --- cycles ---

class Cycle:
  """An element of Z(Γ^d) ⊗ Q, homogeneous of one total degree.

  A zero cycle built without an explicit degree has degree None and adapts to
  whatever it is added to.
  """

  def __init__(
    self,
    ambient: Ambient,
    terms: Dict[Monomial, Rational] = None,
    degree: int = None) -> None:

      self.ambient = ambient
      self.degree = degree
      self.terms: Dict[Monomial, Fraction] = {}

      for m, c in (terms or {}).items():
        c = Fraction(c)
        if c == 0:
          continue
        k = total_degree(m)
        if self.degree is None:
          self.degree = k
        elif k != self.degree:
          raise DegreeMismatch(
            f"mixed degrees {self.degree} and {k}, cycles must be homogeneous"
          )
        self.terms[m] = c

  @classmethod
  def _trusted(cls, ambient: Ambient, terms: Dict[Monomial, Fraction], degree: int) -> "Cycle":
    cycle = cls.__new__(cls)
    cycle.ambient = ambient
    cycle.degree = degree
    cycle.terms = terms
    return cycle

  @classmethod
  def zero(cls, ambient: Ambient, degree: int = None) -> "Cycle":
    return cls._trusted(ambient, {}, degree)

  @classmethod
  def one(cls, ambient: Ambient) -> "Cycle":
    return cls._trusted(ambient, {(): Fraction(1)}, 0)

  @classmethod
  def vertex(cls, ambient: Ambient, v: Vertex) -> "Cycle":
    return cls.monomial(ambient, [v])

  @classmethod
  def monomial(cls, ambient: Ambient, factors: Iterable[Vertex], coefficient: Rational = 1) -> "Cycle":
    m = make_monomial(ambient, factors)
    return cls(ambient, {m: coefficient}, degree=total_degree(m))

  def __str__(self) -> str:
    return self.render()

  def __repr__(self) -> str:
    return f"Cycle({self.render()!r}, degree={self.degree})"

  def __len__(self) -> int:
    return len(self.terms)

  def __eq__(self, other: object) -> bool:
    if not isinstance(other, Cycle):
      return NotImplemented
    return self.ambient == other.ambient and self.terms == other.terms

  def __add__(self, other: "Cycle") -> "Cycle":
    return cycle_add(self, other)

  def __radd__(self, other) -> "Cycle":
    # lets sum() start from 0
    if other == 0:
      return self
    return NotImplemented

  def __neg__(self) -> "Cycle":
    return cycle_scale(-1, self)

  def __sub__(self, other: "Cycle") -> "Cycle":
    return cycle_add(self, cycle_scale(-1, other))

  def __mul__(self, other) -> "Cycle":
    if isinstance(other, Cycle):
      return cycle_mul(self, other)
    if isinstance(other, (int, Fraction)):
      return cycle_scale(other, self)
    return NotImplemented

  def __rmul__(self, other) -> "Cycle":
    if isinstance(other, (int, Fraction)):
      return cycle_scale(other, self)
    return NotImplemented

  def is_zero(self) -> bool:
    return not self.terms

  def coefficient(self, m: Monomial) -> Fraction:
    return self.terms.get(m, Fraction(0))

  def items(self):
    return self.terms.items()

  def render(self) -> str:
    """Render in the cycle literal grammar of the CLI."""
    if not self.terms:
      return "0"
    ordered = sorted(self.terms, key=lambda m: [(self.ambient.key(v), k) for v, k in m])
    return " + ".join(
      f"{self.terms[m]}* {render_monomial(self.ambient, m)}" for m in ordered
    )


def _check_ambient(a: Cycle, b: Cycle) -> None:
  if a.ambient != b.ambient:
    raise AmbientMismatch(f"cycles live over different ambients: {a.ambient} and {b.ambient}")


def cycle_add(a: Cycle, b: Cycle) -> Cycle:
  _check_ambient(a, b)
  if a.degree is not None and b.degree is not None and a.degree != b.degree:
    raise DegreeMismatch(f"cannot add cycles of degree {a.degree} and {b.degree}")
  terms = dict(a.terms)
  for m, c in b.terms.items():
    value = terms.get(m, 0) + c
    if value:
      terms[m] = value
    else:
      terms.pop(m, None)
  degree = a.degree if a.degree is not None else b.degree
  return Cycle._trusted(a.ambient, terms, degree)


def cycle_scale(q: Rational, a: Cycle) -> Cycle:
  q = Fraction(q)
  if q == 0:
    return Cycle.zero(a.ambient, a.degree)
  return Cycle._trusted(a.ambient, {m: q * c for m, c in a.terms.items()}, a.degree)


def cycle_mul(a: Cycle, b: Cycle, prune: bool = True) -> Cycle:
  """Product in Z(Γ^d). With prune, monomials whose support is no simplex are
  dropped (they are generators of Rat).
  """
  _check_ambient(a, b)
  ambient = a.ambient
  degree = None if a.degree is None or b.degree is None else a.degree + b.degree
  terms: Dict[Monomial, Fraction] = {}
  for ma, ca in a.terms.items():
    for mb, cb in b.terms.items():
      m = monomial_mul(ambient, ma, mb)
      if prune and not ambient.is_simplex(support(m)):
        continue
      value = terms.get(m, 0) + ca * cb
      if value:
        terms[m] = value
      else:
        del terms[m]
  return Cycle._trusted(ambient, terms, degree)


def total_sum(ambient: Ambient) -> Cycle:
  """Σ C' over all vertices."""
  return Cycle(ambient, {((v, 1),): 1 for v in ambient.vertices()}, degree=1)


def fibre_sum(ambient: Ambient, i: int, value: int) -> Cycle:
  """Σ C' over the vertices whose i-th coordinate equals value."""
  return Cycle(
    ambient,
    {((v, 1),): 1 for v in ambient.vertices() if ambient.coordinate(v, i) == value},
    degree=1
  )


def monomial_basis(ambient: Ambient, k: int) -> Iterator[Monomial]:
  for factors in itertools.combinations_with_replacement(ambient.vertices(), k):
    yield make_monomial(ambient, factors)


def basis_size(ambient: Ambient, k: int) -> int:
  return math.comb(ambient.num_vertices + k - 1, k)


def relation_generators(ambient: Ambient, k: int, max_basis_size: int = None) -> Iterator[Cycle]:
  """Generators of Rat in degree k, each multiplied by every complementary monomial.

  The three families are the products over non-simplices (pairs suffice), the
  total sum times a vertex, and the projection sums C1 C2 Σ_{pr_i C' = pr_i C2} C'.

  Raises:
      BasisTooLarge: If the degree-k monomial basis exceeds the configured bound.
  """
  bound = setting("max_basis_size", max_basis_size)
  size = basis_size(ambient, k)
  if size > bound:
    raise BasisTooLarge(f"degree {k} basis of {ambient} has {size} monomials, the bound is {bound}")

  vertices = ambient.vertices()
  fillers = {j: [Cycle._trusted(ambient, {m: Fraction(1)}, j) for m in monomial_basis(ambient, j)]
    for j in range(max(k - 1, 0))}

  def with_fillers(base: Cycle, j: int) -> Iterator[Cycle]:
    for filler in fillers[j]:
      product = cycle_mul(base, filler, prune=False)
      if not product.is_zero():
        yield product

  if k >= 2:
    for a, b in itertools.combinations(vertices, 2):
      pair = make_monomial(ambient, [a, b])
      if not ambient.is_simplex(support(pair)):
        yield from with_fillers(Cycle._trusted(ambient, {pair: Fraction(1)}, 2), k - 2)

    everything = total_sum(ambient)
    for v in vertices:
      yield from with_fillers(cycle_mul(everything, Cycle.vertex(ambient, v), prune=False), k - 2)

  if k >= 3:
    for c1, c2 in itertools.permutations(vertices, 2):
      for i in range(ambient.d):
        value = ambient.coordinate(c2, i)
        if ambient.coordinate(c1, i) == value:
          continue
        base = cycle_mul(
          Cycle.monomial(ambient, [c1, c2]), fibre_sum(ambient, i, value), prune=False
        )
        yield from with_fillers(base, k - 3)


# --- morphisms and pullback ---

@dataclass(frozen=True)
class GraphMorphism:
  """An order preserving morphism of ordered graphs, determined by its vertex images."""
  source: OrderedGraph
  target: OrderedGraph
  vertex_map: Tuple[int, ...]

  def __post_init__(self):
    vertex_map = tuple(self.vertex_map)
    object.__setattr__(self, "vertex_map", vertex_map)
    if len(vertex_map) != self.source.num_vertices:
      raise InvalidMorphism("the vertex map needs one image per source vertex")
    for w in vertex_map:
      if not 0 <= w < self.target.num_vertices:
        raise InvalidMorphism(f"image {w} is not a vertex of the target")
    if any(a > b for a, b in zip(vertex_map, vertex_map[1:])):
      raise InvalidMorphism("the vertex map is not order preserving")
    for i, j in self.source.edges:
      a, b = vertex_map[i], vertex_map[j]
      if a != b and not self.target.has_edge(a, b):
        raise InvalidMorphism(f"edge ({i},{j}) maps to the non-edge ({a},{b})")

  @classmethod
  def identity(cls, g: OrderedGraph) -> "GraphMorphism":
    return cls(g, g, tuple(range(g.num_vertices)))

  def __call__(self, i: int) -> int:
    return self.vertex_map[i]

  def compose(self, inner: "GraphMorphism") -> "GraphMorphism":
    """self ∘ inner."""
    if inner.target != self.source:
      raise InvalidMorphism("cannot compose, inner target differs from outer source")
    return GraphMorphism(inner.source, self.target, tuple(self(inner(i)) for i in range(inner.source.num_vertices)))

  def preimages(self, w: int) -> List[int]:
    return [i for i, image in enumerate(self.vertex_map) if image == w]


@dataclass(frozen=True)
class ProductMorphism:
  """f = (f_1, ..., f_d): Γ'^d → Γ^d."""
  components: Tuple[GraphMorphism, ...]

  def __post_init__(self):
    object.__setattr__(self, "components", tuple(self.components))
    if not self.components:
      raise InvalidMorphism("a product morphism needs at least one component")
    first = self.components[0]
    for f in self.components:
      if f.source != first.source or f.target != first.target:
        raise InvalidMorphism("all components must share source and target")

  @classmethod
  def diagonal(cls, f: GraphMorphism, d: int) -> "ProductMorphism":
    return cls((f,) * d)

  @property
  def dimension(self) -> int:
    return len(self.components)

  @property
  def source(self) -> OrderedGraph:
    return self.components[0].source

  @property
  def target(self) -> OrderedGraph:
    return self.components[0].target

  def __call__(self, p: ProductVertex) -> ProductVertex:
    return tuple(f(x) for f, x in zip(self.components, p))

  def compose(self, inner: "ProductMorphism") -> "ProductMorphism":
    if inner.dimension != self.dimension:
      raise DimensionMismatch("cannot compose product morphisms of different dimensions")
    return ProductMorphism(tuple(f.compose(g) for f, g in zip(self.components, inner.components)))

  def preimages(self, p: ProductVertex) -> List[ProductVertex]:
    return list(itertools.product(*[f.preimages(x) for f, x in zip(self.components, p)]))


def _pullback_embedding(gamma: CubeEmbedding, a: Cycle) -> Cycle:
  ambient = a.ambient
  if not isinstance(ambient, ProductAmbient) or ambient.d != gamma.dimension:
    raise DimensionMismatch(f"embedding of dimension {gamma.dimension} cannot pull back a cycle over {ambient}")
  cube = CubeAmbient(ambient.d)
  g = ambient.graph
  terms: Dict[Monomial, Fraction] = {}
  for m, c in a.terms.items():
    counts = {}
    for p, k in m:
      v = gamma.preimage(p, g)
      if v is None:
        break
      counts[v] = k
    else:
      restricted = _from_counts(cube, counts)
      if cube.is_simplex(support(restricted)):
        terms[restricted] = terms.get(restricted, 0) + c
  return Cycle._trusted(cube, {m: c for m, c in terms.items() if c}, a.degree)


def _pullback_morphism(f: ProductMorphism, a: Cycle) -> Cycle:
  ambient = a.ambient
  if not isinstance(ambient, ProductAmbient) or ambient.d != f.dimension:
    raise DimensionMismatch(f"morphism of dimension {f.dimension} cannot pull back a cycle over {ambient}")
  if ambient.graph != f.target:
    raise AmbientMismatch("the cycle does not live over the target of the morphism")
  source = ProductAmbient(f.source, f.dimension)
  result = Cycle.zero(source, a.degree)
  for m, c in a.terms.items():
    product = Cycle.one(source)
    for p, k in m:
      fibre = Cycle(source, {((q, 1),): 1 for q in f.preimages(p)}, degree=1)
      for _ in range(k):
        product = cycle_mul(product, fibre)
    result = cycle_add(result, cycle_scale(c, product))
  return result


def pullback(f: Union[CubeEmbedding, ProductMorphism, GraphMorphism], a: Cycle) -> Cycle:
  """f^*: C ↦ Σ_{f(C') = C} C', a ring homomorphism.

  A single GraphMorphism acts diagonally on every coordinate.
  """
  if isinstance(f, CubeEmbedding):
    return _pullback_embedding(f, a)
  if isinstance(f, GraphMorphism):
    f = ProductMorphism.diagonal(f, a.ambient.d)
  if isinstance(f, ProductMorphism):
    return _pullback_morphism(f, a)
  raise TypeError(f"cannot pull back along {type(f).__name__}")


# --- moving lemma over the standard cube ---

def _check_cube(d: int, a: Cycle) -> CubeAmbient:
  ambient = CubeAmbient(d)
  if a.ambient != ambient:
    raise AmbientMismatch(f"expected a cycle over I^{d}, got one over {a.ambient}")
  return ambient


def rewrite_step(d: int, m: Monomial, rng: Optional[random.Random] = None) -> List[Tuple[Monomial, Fraction]]:
  """One substitution of the moving lemma on a non-proper chain monomial of I^d.

  A repeated factor C is reduced against a chain neighbour N that differs from it
  in coordinate i: the projection relation C N Σ_{w_i = C_i} C_w gives
  C² N = -Σ_{w ≠ C, w_i = C_i} C_w C N. The upper neighbour is used whenever one
  exists, the lower one only for the top factor; a pure power uses the total sum.
  Replacements incomparable to some factor are pruned immediately.

  Without rng the lowest repeated factor and the lowest differing coordinate
  are taken. Every choice moves multiplicity down the chain or adds a new
  factor, so repeated application terminates.
  """
  vertices = [v for v, _ in m]
  counts = dict(m)
  repeated = [j for j, (_, k) in enumerate(m) if k >= 2]
  if not repeated:
    raise AlreadyProper("monomial is already proper")

  j = rng.choice(repeated) if rng else repeated[0]
  c = vertices[j]
  if len(vertices) == 1:
    candidates = [w for w in range(1 << d) if w != c]
  else:
    if j < len(vertices) - 1:
      differing = vertices[j + 1] & ~c
    else:
      differing = c & ~vertices[j - 1]
    bits = [i for i in range(d) if (differing >> i) & 1]
    i = rng.choice(bits) if rng else bits[0]
    mask = 1 << i
    candidates = [w for w in range(1 << d) if w != c and (w & mask) == (c & mask)]

  counts[c] -= 1
  children = []
  for w in candidates:
    if not all(cube_comparable(w, u) for u in vertices):
      continue
    child = dict(counts)
    child[w] = child.get(w, 0) + 1
    children.append((tuple(sorted(child.items(), key=lambda item: (popcount(item[0]), item[0]))), Fraction(-1)))
  return children


def _is_chain(m: Monomial) -> bool:
  return all(cube_leq(a, b) for (a, _), (b, _) in zip(m, m[1:]))


def normalize_cube(d: int, a: Cycle, rng: Optional[random.Random] = None, max_steps: int = None) -> Cycle:
  """A proper cycle congruent to a modulo Rat(I^d).

  Every monomial of the result has pairwise distinct factors forming a chain.
  The representative depends on the tie-breaking, its degree does not.

  Raises:
      NormalizationDiverged: If more than max_steps substitutions are needed.
  """
  ambient = _check_cube(d, a)
  cap = setting("max_rewrite_steps", max_steps)
  pending = dict(a.terms)
  result: Dict[Monomial, Fraction] = {}
  steps = 0

  while pending:
    m, coeff = pending.popitem()
    if not _is_chain(m):
      continue
    if is_proper(m):
      value = result.get(m, 0) + coeff
      if value:
        result[m] = value
      else:
        del result[m]
      continue

    steps += 1
    if steps > cap:
      raise NormalizationDiverged(f"normalization exceeded {cap} rewrite steps")
    for child, c in rewrite_step(d, m, rng):
      value = pending.get(child, 0) + coeff * c
      if value:
        pending[child] = value
      else:
        pending.pop(child, None)

  log.debug("Normalized a cycle over I^%d in %d steps", d, steps)
  return Cycle._trusted(ambient, result, a.degree)


_monomial_degrees: Dict[int, Dict[Monomial, Fraction]] = {}


def monomial_degree(d: int, m: Monomial) -> Fraction:
  """Local degree of a single degree d+1 monomial over I^d, memoised per dimension."""
  memo = _monomial_degrees.setdefault(d, {})
  value = memo.get(m)
  if value is not None:
    return value

  if total_degree(m) != d + 1:
    raise DegreeMismatch(f"the local degree lives in degree {d + 1}, got {total_degree(m)}")
  if not _is_chain(m):
    value = Fraction(0)
  elif is_proper(m):
    # d+1 distinct chain elements of I^d form a maximal chain
    value = Fraction(1)
  else:
    value = sum((c * monomial_degree(d, child) for child, c in rewrite_step(d, m)), Fraction(0))

  memo[m] = value
  return value


def degree_cube(d: int, a: Cycle, rng: Optional[random.Random] = None) -> Fraction:
  """ldeg on C(I^d): normalize, then count maximal chains with their coefficients."""
  _check_cube(d, a)
  if a.is_zero():
    return Fraction(0)
  if a.degree != d + 1:
    raise DegreeMismatch(f"the local degree lives in degree {d + 1}, got {a.degree}")

  if rng is None:
    return sum((c * monomial_degree(d, m) for m, c in a.terms.items()), Fraction(0))

  normalized = normalize_cube(d, a, rng)
  return sum(
    (c for m, c in normalized.terms.items() if len(m) == d + 1),
    Fraction(0)
  )


def degree_product_contributions(g: OrderedGraph, d: int, a: Cycle) -> Dict[CubeEmbedding, Fraction]:
  """Non-zero summands ldeg(i_γ^* a) of the local degree on Γ^d, per cube."""
  ambient = ProductAmbient(g, d)
  if a.ambient != ambient:
    raise AmbientMismatch(f"expected a cycle over {ambient}, got one over {a.ambient}")
  if not a.is_zero() and a.degree != d + 1:
    raise DegreeMismatch(f"the local degree lives in degree {d + 1}, got {a.degree}")

  contributions = {}
  for gamma in cube_embeddings(g, d):
    value = degree_cube(d, pullback(gamma, a))
    if value:
      contributions[gamma] = value
  return contributions


def degree_product(g: OrderedGraph, d: int, a: Cycle) -> Fraction:
  """ldeg on C(Γ^d) as the sum of the cube degrees of all restrictions i_γ^*."""
  return sum(degree_product_contributions(g, d, a).values(), Fraction(0))


# --- independent linear-algebra oracle ---

@lru_cache(maxsize=None)
def _oracle_system(d: int):
  """Row-reduced constraints on the functional L over the degree d+1 basis of I^d.

  Returns the basis index and the pivot rows as (pivot column, sparse row, right hand side).
  """
  from sympy import QQ
  from sympy.polys.matrices import DomainMatrix

  ambient = CubeAmbient(d)
  k = d + 1
  basis = list(monomial_basis(ambient, k))
  index = {m: i for i, m in enumerate(basis)}
  n = len(basis)

  rows = set()
  for generator in relation_generators(ambient, k):
    rows.add((tuple(sorted((index[m], c) for m, c in generator.terms.items())), Fraction(0)))
  for m in basis:
    if is_proper(m):
      value = Fraction(1) if _is_chain(m) else Fraction(0)
      rows.add((((index[m], Fraction(1)),), value))

  log.debug("Oracle for I^%d: %d constraints on %d monomials", d, len(rows), n)
  elements = {}
  for r, (entries, rhs) in enumerate(sorted(rows, key=lambda row: (row[0], row[1]))):
    row = {col: QQ(c.numerator, c.denominator) for col, c in entries}
    if rhs:
      row[n] = QQ(rhs.numerator, rhs.denominator)
    elements[r] = row

  matrix = DomainMatrix(elements, (len(elements), n + 1), QQ)
  reduced, pivots = matrix.rref()
  if n in pivots:
    raise OracleInconsistent(f"the degree constraints over I^{d} are inconsistent")

  dense = reduced[:len(pivots), :].to_Matrix()
  pivot_rows = []
  for r, col in enumerate(pivots):
    row = {}
    for j in range(n + 1):
      x = dense[r, j]
      if x != 0:
        row[j] = Fraction(int(x.p), int(x.q))
    rhs = row.pop(n, Fraction(0))
    pivot_rows.append((col, row, rhs))
  return index, pivot_rows


def oracle_degree(d: int, a: Cycle, max_dimension: int = None) -> Fraction:
  """ldeg(a) read off a solved linear system, independent of the rewriting.

  Raises:
      BasisTooLarge: Beyond the oracle dimension cap.
      OracleInconsistent: If the constraints contradict each other.
      OracleUnderdetermined: If the constraints do not fix L on a.
  """
  cap = setting("max_oracle_dimension", max_dimension)
  if d > cap:
    raise BasisTooLarge(f"the oracle is limited to d <= {cap}")
  _check_cube(d, a)
  if a.is_zero():
    return Fraction(0)
  if a.degree != d + 1:
    raise DegreeMismatch(f"the local degree lives in degree {d + 1}, got {a.degree}")

  index, pivot_rows = _oracle_system(d)
  residual = {index[m]: c for m, c in a.terms.items()}
  value = Fraction(0)
  for col, row, rhs in pivot_rows:
    coeff = residual.get(col)
    if not coeff:
      continue
    for j, x in row.items():
      updated = residual.get(j, 0) - coeff * x
      if updated:
        residual[j] = updated
      else:
        residual.pop(j, None)
    value += coeff * rhs

  if residual:
    raise OracleUnderdetermined(f"the constraints over I^{d} do not determine the degree of {a}")
  return value
