"""
Command line front door of the chow-calculus engine.

Usage:
    chow-calculus degree --d 2 --basis C 00 10 11
    chow-calculus degree --d 2 --basis F 10 01 11
    chow-calculus degree --d 2 -- -2*00^2 11 + 1/2* 00 01 11
    chow-calculus graph-degree --graph data/graphs/triangle.json --d 2 0,0 0,1 1,1
    chow-calculus table --d 3
    chow-calculus vanishing --d 4 --cache data/cache/d4.chowcache --jobs 4
    chow-calculus subdivide --graph data/graphs/triangle.json --n 3 --out sd3.json
    chow-calculus orbits --d 3 111,100,010,001

A coefficient that starts with "-" has to follow a "--" separator.
"""

import argparse
import re
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Sequence

from chow_calculus.core.chow import Ambient, CubeAmbient, Cycle, ProductAmbient, degree_cube, degree_product
from chow_calculus.core.fourier import (
  canonical_tuple,
  canonical_tuples,
  degree_f,
  degree_table,
  orbit_size,
  render_tuple,
)
from chow_calculus.core.simplicial import (
  DimensionMismatch,
  InvalidBitstring,
  check_dimension,
  parse_bitstring,
  read_graph,
  subdivide,
  write_graph,
)
from chow_calculus.core.utils import ChowCalculusError, ConsistencyError, setup_logging
from chow_calculus.core.vanishing import DegreeCache, cache_load, cache_store, check_vanishing

PROGRAM = "chow-calculus"

COEFFICIENT = re.compile(r"^([+-]?\d+(?:/\d+)?)\*(.*)$")
FACTOR = re.compile(r"^([^^]+)(?:\^(\d+))?$")


class CycleParseError(ChowCalculusError):
  pass


def parse_vertex(ambient: Ambient, token: str):
  try:
    if isinstance(ambient, CubeAmbient):
      return parse_bitstring(token, ambient.d)
    vertex = tuple(int(x) for x in token.split(","))
  except (ValueError, InvalidBitstring, DimensionMismatch) as e:
    raise CycleParseError(f"bad vertex {token!r}: {e}")
  if not ambient.contains(vertex):
    raise CycleParseError(f"{token!r} is not a vertex of {ambient.graph} to the power {ambient.d}")
  return vertex


def parse_factors(ambient: Ambient, tokens: Sequence[str]) -> List:
  factors = []
  for token in tokens:
    match = FACTOR.match(token)
    if not match:
      raise CycleParseError(f"bad factor {token!r}")
    power = int(match.group(2) or 1)
    if power < 1:
      raise CycleParseError(f"bad multiplicity in {token!r}")
    factors.extend([parse_vertex(ambient, match.group(1))] * power)
  return factors


def parse_cycle(ambient: Ambient, tokens: Sequence[str]) -> Cycle:
  """Parse "<coeff>* v^k w ... + ..." into a Cycle over ambient."""
  terms = [[]]
  for token in tokens:
    if token == "+":
      terms.append([])
    else:
      terms[-1].append(token)

  result = None
  for term in terms:
    if not term:
      raise CycleParseError("empty term in cycle literal")
    coefficient = Fraction(1)
    match = COEFFICIENT.match(term[0])
    if match:
      try:
        coefficient = Fraction(match.group(1))
      except ZeroDivisionError:
        raise CycleParseError(f"bad coefficient {match.group(1)!r}")
      term = ([match.group(2)] if match.group(2) else []) + term[1:]
    if not term:
      raise CycleParseError("a term needs at least one factor")
    summand = Cycle.monomial(ambient, parse_factors(ambient, term), coefficient)
    try:
      result = summand if result is None else result + summand
    except ChowCalculusError as e:
      raise CycleParseError(str(e))
  return result


def cmd_degree(args: argparse.Namespace) -> int:
  ambient = CubeAmbient(check_dimension(args.d))
  if args.basis == "F":
    vectors = parse_factors(ambient, args.tokens)
    print(degree_f(args.d, vectors))
  else:
    print(degree_cube(args.d, parse_cycle(ambient, args.tokens)))
  return 0


def cmd_graph_degree(args: argparse.Namespace) -> int:
  g = read_graph(args.graph)
  ambient = ProductAmbient(g, check_dimension(args.d))
  print(degree_product(g, args.d, parse_cycle(ambient, args.tokens)))
  return 0


def cmd_table(args: argparse.Namespace) -> int:
  table = degree_table(args.d, nonzero_only=not args.all)
  print(table.render(header=args.header))
  return 0


def cmd_vanishing(args: argparse.Namespace) -> int:
  cache = None
  if args.cache and Path(args.cache).exists():
    cache = cache_load(args.cache, d=args.d)
  elif args.cache:
    cache = DegreeCache(args.d)

  report = check_vanishing(
    args.d,
    cache=cache,
    jobs=args.jobs,
    allow_long=args.allow_long,
    progress=args.progress,
  )
  if args.cache:
    cache_store(cache, args.cache)

  print(report.as_text() if args.format == "text" else report.as_records())
  return 0 if report.verified else 1


def cmd_subdivide(args: argparse.Namespace) -> int:
  sd = subdivide(read_graph(args.graph), args.n)
  if args.out:
    write_graph(sd, args.out)
  else:
    sys.stdout.write(sd.as_text(args.format))
  return 0


def parse_tuple(d: int, token: str):
  try:
    return tuple(parse_bitstring(part, d) for part in token.split(","))
  except (InvalidBitstring, DimensionMismatch) as e:
    raise CycleParseError(f"bad tuple {token!r}: {e}")


def cmd_orbits(args: argparse.Namespace) -> int:
  d = check_dimension(args.d)
  if args.tuples:
    tuples = [parse_tuple(d, token) for token in args.tuples]
  else:
    tuples = list(canonical_tuples(d))
  for vectors in tuples:
    if len(vectors) != d + 1:
      raise CycleParseError(f"{render_tuple(vectors, d)} does not hold {d + 1} vectors")
    print(f"{render_tuple(canonical_tuple(d, vectors), d)}\t{orbit_size(d, vectors)}")
  return 0


def build_parser() -> argparse.ArgumentParser:
  parser = argparse.ArgumentParser(
    prog=PROGRAM,
    description="Local intersection numbers in combinatorial Chow rings of products of ordered graphs.",
    formatter_class=argparse.RawDescriptionHelpFormatter,
  )
  subparsers = parser.add_subparsers(dest="command")
  subparsers.required = True

  p_degree = subparsers.add_parser("degree", help="Local degree of a cycle over the standard cube")
  p_degree.add_argument("--d", type=int, required=True, help="Cube dimension")
  p_degree.add_argument("--basis", choices=["C", "F"], default="C", help="C: cycle literal, F: d+1 Fourier vectors")
  p_degree.add_argument("tokens", nargs="+", help="Cycle literal or vector tokens")
  p_degree.set_defaults(func=cmd_degree)

  p_graph = subparsers.add_parser("graph-degree", help="Local degree of a cycle over a graph product")
  p_graph.add_argument("--graph", required=True, help="Graph file (.json, .yml)")
  p_graph.add_argument("--d", type=int, required=True, help="Product dimension")
  p_graph.add_argument("tokens", nargs="+", help="Cycle literal, vertices as index tuples like 0,2")
  p_graph.set_defaults(func=cmd_graph_degree)

  p_table = subparsers.add_parser("table", help="Degrees of products of Fourier vectors per orbit")
  p_table.add_argument("--d", type=int, required=True, choices=[1, 2, 3, 4], help="Cube dimension")
  p_table.add_argument("--all", action="store_true", help="Also list orbits of degree 0")
  p_table.add_argument("--header", action="store_true", help="Print a header line")
  p_table.set_defaults(func=cmd_table)

  p_vanishing = subparsers.add_parser("vanishing", help="Verify the vanishing condition")
  p_vanishing.add_argument("--d", type=int, required=True, help="Cube dimension")
  p_vanishing.add_argument("--cache", help="Degree cache file, created if missing")
  p_vanishing.add_argument("--jobs", type=int, default=1, help="Worker processes (default: 1)")
  p_vanishing.add_argument("--allow-long", action="store_true", help="Allow long-running dimensions")
  p_vanishing.add_argument("--progress", action="store_true", help="Show a progress heartbeat")
  p_vanishing.add_argument("--format", choices=["text", "records"], default="text", help="Report format")
  p_vanishing.set_defaults(func=cmd_vanishing)

  p_subdivide = subparsers.add_parser("subdivide", help="n-fold subdivision of a graph")
  p_subdivide.add_argument("--graph", required=True, help="Graph file (.json, .yml)")
  p_subdivide.add_argument("--n", type=int, required=True, help="Subdivision factor")
  p_subdivide.add_argument("--out", help="Output file, format by suffix; stdout if omitted")
  p_subdivide.add_argument("--format", choices=["json", "yaml"], default="json", help="Format on stdout")
  p_subdivide.set_defaults(func=cmd_subdivide)

  p_orbits = subparsers.add_parser("orbits", help="Canonical representatives and orbit sizes")
  p_orbits.add_argument("--d", type=int, required=True, help="Cube dimension")
  p_orbits.add_argument("tuples", nargs="*", help="Tuples as comma separated bitstrings; all orbits if omitted")
  p_orbits.set_defaults(func=cmd_orbits)

  return parser


def report_error(e: Exception) -> None:
  print(f"{PROGRAM}: error[{type(e).__name__}]: {e}", file=sys.stderr)


def run(argv: Sequence[str] = None) -> int:
  parser = build_parser()
  try:
    args = parser.parse_args(argv)
  except SystemExit as e:
    return e.code if isinstance(e.code, int) else 2

  setup_logging()
  try:
    return args.func(args)
  except ConsistencyError as e:
    report_error(e)
    return 1
  except (ChowCalculusError, ValueError, OSError) as e:
    report_error(e)
    return 2


def main() -> None:
  sys.exit(run())


if __name__ == "__main__":
  main()
