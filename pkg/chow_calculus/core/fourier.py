"""The Fourier basis F_v = Σ_w (-1)^<v,w> C_w of the degree one piece of C(I^d)_Q,
its symmetries and the degrees of products of F_v's.
"""
import itertools
import logging
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, Optional, Sequence, Set, Tuple, Union

from chow_calculus.core.chow import (
  CubeAmbient,
  Cycle,
  DegreeMismatch,
  cycle_mul,
  degree_cube,
  make_monomial,
)
from chow_calculus.core.schema import Field
from chow_calculus.core.simplicial import (
  CubeVertex,
  DimensionMismatch,
  check_dimension,
  permute_vertex,
  popcount,
  to_bitstring,
)
from chow_calculus.core.table import ResultTable
from chow_calculus.core.utils import ChowCalculusError, ConsistencyError

TupleOrbitKey = Tuple[CubeVertex, ...]

log = logging.getLogger("main")


class NonIntegralDegree(ConsistencyError):
  pass

class TupleLengthMismatch(ChowCalculusError):
  pass

class InvalidPermutation(ChowCalculusError):
  pass


def _sign(v: CubeVertex, w: CubeVertex) -> int:
  return -1 if popcount(v & w) % 2 else 1


class FourierCycle:
  """A degree one element of C(I^d)_Q written in the F basis."""

  def __init__(self, d: int, terms: Dict[CubeVertex, Union[int, Fraction]] = None) -> None:
    self.d = check_dimension(d)
    self.terms: Dict[CubeVertex, Fraction] = {}
    for v, c in (terms or {}).items():
      if not 0 <= v < (1 << d):
        raise DimensionMismatch(f"{v:b} is not a vector of F_2^{d}")
      c = Fraction(c)
      if c:
        self.terms[v] = c

  def __repr__(self) -> str:
    inner = " + ".join(f"{c}*F_{to_bitstring(v, self.d)}" for v, c in sorted(self.terms.items()))
    return f"FourierCycle({inner or '0'})"

  def __eq__(self, other: object) -> bool:
    if not isinstance(other, FourierCycle):
      return NotImplemented
    return self.d == other.d and self.terms == other.terms

  def __add__(self, other: "FourierCycle") -> "FourierCycle":
    if self.d != other.d:
      raise DimensionMismatch(f"cannot add F-basis cycles of dimensions {self.d} and {other.d}")
    terms = dict(self.terms)
    for v, c in other.terms.items():
      terms[v] = terms.get(v, 0) + c
    return FourierCycle(self.d, terms)

  def __neg__(self) -> "FourierCycle":
    return FourierCycle(self.d, {v: -c for v, c in self.terms.items()})

  def __sub__(self, other: "FourierCycle") -> "FourierCycle":
    return self + (-other)

  def __rmul__(self, q) -> "FourierCycle":
    if isinstance(q, (int, Fraction)):
      return FourierCycle(self.d, {v: q * c for v, c in self.terms.items()})
    return NotImplemented

  __mul__ = __rmul__


def fourier_vertex(d: int, v: CubeVertex) -> FourierCycle:
  return FourierCycle(d, {v: 1})


def f_to_c(x: FourierCycle) -> Cycle:
  ambient = CubeAmbient(x.d)
  terms: Dict[Tuple, Fraction] = {}
  for v, c in x.terms.items():
    for w in range(1 << x.d):
      m = ((w, 1),)
      terms[m] = terms.get(m, 0) + _sign(v, w) * c
  return Cycle(ambient, terms, degree=1)


def c_to_f(a: Cycle) -> FourierCycle:
  if not isinstance(a.ambient, CubeAmbient):
    raise DimensionMismatch("the F basis only exists over the standard cube")
  if not a.is_zero() and a.degree != 1:
    raise DegreeMismatch(f"c_to_f takes degree one cycles, got degree {a.degree}")
  d = a.ambient.d
  scale = Fraction(1, 1 << d)
  terms: Dict[CubeVertex, Fraction] = {}
  for ((v, _),), c in a.terms.items():
    for w in range(1 << d):
      terms[w] = terms.get(w, 0) + scale * _sign(v, w) * c
  return FourierCycle(d, terms)


def degree_f_cycle(d: int, factors: Sequence[FourierCycle], filler: Optional[Cycle] = None) -> Fraction:
  """ldeg of the product of degree one F-basis cycles, times an optional C-basis filler.

  The factors are multiplied into a C-basis cycle one at a time, dropping
  non-simplex monomials on the way.
  """
  ambient = CubeAmbient(d)
  product = Cycle.one(ambient) if filler is None else filler
  for factor in factors:
    if factor.d != d:
      raise DimensionMismatch(f"factor over I^{factor.d} in a product over I^{d}")
    product = cycle_mul(product, f_to_c(factor))
  if product.degree != d + 1:
    raise DegreeMismatch(f"the local degree lives in degree {d + 1}, got {product.degree}")
  return degree_cube(d, product)


@lru_cache(maxsize=None)
def _degree_f_sorted(d: int, vectors: TupleOrbitKey) -> int:
  value = degree_f_cycle(d, [fourier_vertex(d, v) for v in vectors])
  if value.denominator != 1:
    raise NonIntegralDegree(
      f"ldeg of F-product {render_tuple(vectors, d)} is {value}, not an integer"
    )
  return int(value)


def degree_f(d: int, vectors: Sequence[CubeVertex]) -> int:
  """ldeg(F_{v_0} ⋯ F_{v_d}).

  Raises:
      TupleLengthMismatch: Unless exactly d+1 vectors are given.
      NonIntegralDegree: If the exact result is not an integer.
  """
  check_dimension(d)
  if len(vectors) != d + 1:
    raise TupleLengthMismatch(f"expected {d + 1} vectors for d={d}, got {len(vectors)}")
  for v in vectors:
    if not 0 <= v < (1 << d):
      raise DimensionMismatch(f"{v:b} is not a vector of F_2^{d}")
  return _degree_f_sorted(d, tuple(sorted(vectors)))


# --- symmetries ---

def psi(a: Union[Cycle, FourierCycle]) -> Union[Cycle, FourierCycle]:
  """Translation by 1...1, C_v -> C_{v+1...1}."""
  if isinstance(a, FourierCycle):
    return FourierCycle(a.d, {v: (-1) ** popcount(v) * c for v, c in a.terms.items()})
  ambient = a.ambient
  if not isinstance(ambient, CubeAmbient):
    raise DimensionMismatch("psi acts on cycles over the standard cube")
  ones = (1 << ambient.d) - 1
  terms = {}
  for m, c in a.terms.items():
    factors = [v ^ ones for v, k in m for _ in range(k)]
    terms[make_monomial(ambient, factors)] = c
  return Cycle(ambient, terms, degree=a.degree)


def _check_permutation(tau: Sequence[int], d: int) -> Tuple[int, ...]:
  tau = tuple(tau)
  if sorted(tau) != list(range(d)):
    raise InvalidPermutation(f"{tau} is not a permutation of the {d} coordinates")
  return tau


def sigma_act(tau: Sequence[int], a: Union[Cycle, FourierCycle]) -> Union[Cycle, FourierCycle]:
  """Coordinate permutation, coordinate i moves to position tau[i] (0-based)."""
  if isinstance(a, FourierCycle):
    tau = _check_permutation(tau, a.d)
    return FourierCycle(a.d, {permute_vertex(v, tau): c for v, c in a.terms.items()})
  ambient = a.ambient
  if not isinstance(ambient, CubeAmbient):
    raise DimensionMismatch("coordinate permutations act on cycles over the standard cube")
  tau = _check_permutation(tau, ambient.d)
  terms = {}
  for m, c in a.terms.items():
    factors = [permute_vertex(v, tau) for v, k in m for _ in range(k)]
    terms[make_monomial(ambient, factors)] = c
  return Cycle(ambient, terms, degree=a.degree)


def vector_key(v: CubeVertex, d: int) -> Tuple:
  """Order vectors by number of ones, then lexicographically with 1 before 0.

  For d=3: 100, 010, 001, 110, 101, 011, 111 after 000.
  """
  return (popcount(v), tuple(1 - ((v >> i) & 1) for i in range(d)))


@lru_cache(maxsize=None)
def _permutations(d: int) -> Tuple[Tuple[int, ...], ...]:
  return tuple(itertools.permutations(range(d)))


def _tuple_key(vectors: Sequence[CubeVertex], d: int) -> Tuple:
  return tuple(vector_key(v, d) for v in vectors)


def act_on_tuple(vectors: Sequence[CubeVertex], sigma: Sequence[int], tau: Sequence[int]) -> TupleOrbitKey:
  """(v_0, ..., v_d)^{σ,τ} = (v_{σ(0)}^τ, ..., v_{σ(d)}^τ)."""
  if sorted(sigma) != list(range(len(vectors))):
    raise InvalidPermutation(f"{tuple(sigma)} does not permute {len(vectors)} positions")
  return tuple(permute_vertex(vectors[s], tau) for s in sigma)


def canonical_tuple(d: int, vectors: Sequence[CubeVertex]) -> TupleOrbitKey:
  """The ≼-minimal image of the tuple under S_{d+1} × S_d.

  Sorting realises the minimum over position permutations, so only the d!
  coordinate permutations are enumerated.
  """
  best, best_key = None, None
  for tau in _permutations(d):
    image = sorted((permute_vertex(v, tau) for v in vectors), key=lambda v: vector_key(v, d))
    key = _tuple_key(image, d)
    if best_key is None or key < best_key:
      best, best_key = tuple(image), key
  return best


def is_canonical(d: int, vectors: Sequence[CubeVertex]) -> bool:
  return tuple(vectors) == canonical_tuple(d, vectors)


def orbit(d: int, vectors: Sequence[CubeVertex]) -> Set[TupleOrbitKey]:
  images = set()
  for tau in _permutations(d):
    permuted = [permute_vertex(v, tau) for v in vectors]
    images.update(itertools.permutations(permuted))
  return images


def orbit_size(d: int, vectors: Sequence[CubeVertex]) -> int:
  return len(orbit(d, vectors))


def canonical_tuples(d: int) -> Iterator[TupleOrbitKey]:
  """All canonical (d+1)-tuples, ascending in the ≼ order."""
  ordered = sorted(range(1 << d), key=lambda v: vector_key(v, d))
  for vectors in itertools.combinations_with_replacement(ordered, d + 1):
    if is_canonical(d, vectors):
      yield vectors


def render_tuple(vectors: Iterable[CubeVertex], d: int) -> str:
  return "(" + ",".join(to_bitstring(v, d) for v in vectors) + ")"


class DegreeTable(ResultTable):

  name = "degree_table"
  description = """
  Local degrees ldeg(F_{v_0} ⋯ F_{v_d}) per orbit of (d+1)-tuples under
  permutations of the factors and of the coordinates.
  """

  def __init__(self, d: int) -> None:
    super().__init__()
    self.d = d
    self.schema.add_field(Field(
      name="representative", type="array", form="tuple",
      description="The canonical tuple of the orbit, vectors as bitstrings."
    ))
    self.schema.add_field(Field(
      name="degree", type="integer",
      description="The local degree of the product of the F_v."
    ))
    self.schema.add_field(Field(
      name="orbit_size", type="integer",
      description="Number of ordered tuples in the orbit."
    ))


def degree_table(d: int, nonzero_only: bool = True) -> DegreeTable:
  table = DegreeTable(d)
  records = []
  for vectors in canonical_tuples(d):
    value = degree_f(d, vectors)
    if nonzero_only and value == 0:
      continue
    records.append({
      "representative": tuple(to_bitstring(v, d) for v in vectors),
      "degree": value,
      "orbit_size": orbit_size(d, vectors),
    })
  log.info("Degree table for d=%d: %d rows", d, len(records))
  return table.from_records(records)
