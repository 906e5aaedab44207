"""Multi-terminal decision diagrams with terminals 0..r-1.

Hash-consed, ordered and reduced: structurally equal subgraphs share one
handle, no decision node has identical children, and levels strictly increase
from root to terminals.  Terminal j is the handle j itself, so handles below
the modulus are terminal values.  All walks are iterative; diagram depth is
bounded only by the variable count, which can reach tens of thousands.

Counting uses Python's native arbitrary-precision integers throughout; there
is no floating-point fallback anywhere in this module.
"""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from typing import Iterable, Sequence

from .sop import SopPolynomial, SopTensor

__all__ = [
    "DdStore",
    "Root",
    "DEFAULT_GC_WATERMARK",
    "qubit_order",
    "gate_order",
    "explicit_order",
    "sift",
]

DEFAULT_GC_WATERMARK = 1 << 22
_TERMINAL_LEVEL = 1 << 60


class Root:
    """A node handle that survives garbage collection."""

    __slots__ = ("id",)

    def __init__(self, node: int):
        self.id = node


class DdStore:
    """One diagram store: fixed variable order, unique table, apply caches."""

    def __init__(self, modulus: int, order: Sequence[int],
                 gc_watermark: int = DEFAULT_GC_WATERMARK):
        if modulus < 1:
            raise ValueError("modulus must be positive")
        if len(set(order)) != len(order):
            raise ValueError("variable order repeats a variable")
        self.modulus = modulus
        self.order = tuple(order)
        self.level_of = {v: i for i, v in enumerate(self.order)}
        self.gc_watermark = max(gc_watermark, modulus + 16)
        # terminals occupy handles 0..r-1
        self._level = [_TERMINAL_LEVEL] * modulus
        self._lo = [-1] * modulus
        self._hi = [-1] * modulus
        self._unique: dict[tuple[int, int, int], int] = {}
        self._cache: dict[tuple, int] = {}
        self._roots: list[Root] = []
        self.peak_nodes = modulus

    # -- basic structure ----------------------------------------------------

    def __len__(self) -> int:
        return len(self._level)

    def is_terminal(self, node: int) -> bool:
        return node < self.modulus

    def terminal(self, value: int) -> int:
        if not 0 <= value < self.modulus:
            raise ValueError(f"terminal value {value} outside [0, {self.modulus})")
        return value

    def level(self, node: int) -> int:
        return self._level[node]

    def children(self, node: int) -> tuple[int, int]:
        return self._lo[node], self._hi[node]

    def _make(self, level: int, lo: int, hi: int) -> int:
        if lo == hi:
            return lo
        key = (level, lo, hi)
        node = self._unique.get(key)
        if node is None:
            node = len(self._level)
            self._level.append(level)
            self._lo.append(lo)
            self._hi.append(hi)
            self._unique[key] = node
            if node + 1 > self.peak_nodes:
                self.peak_nodes = node + 1
        return node

    def protect(self, node: int) -> Root:
        root = Root(node)
        self._roots.append(root)
        return root

    def release(self, root: Root) -> None:
        self._roots.remove(root)

    def clear_caches(self) -> None:
        self._cache.clear()

    # -- garbage collection ---------------------------------------------------

    def _reachable(self, roots: Iterable[int]) -> list[int]:
        seen: set[int] = set()
        stack = [n for n in roots]
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            if not self.is_terminal(n):
                stack.append(self._lo[n])
                stack.append(self._hi[n])
        return sorted(seen)

    def collect(self, pins: Sequence[int] = ()) -> list[int]:
        """Mark-and-sweep from registered roots; returns remapped pins."""
        keep = self._reachable([r.id for r in self._roots] + list(pins))
        remap: dict[int, int] = {}
        level, lo, hi = [], [], []
        for n in keep:
            if self.is_terminal(n):
                remap[n] = n
        for t in range(self.modulus):
            level.append(_TERMINAL_LEVEL)
            lo.append(-1)
            hi.append(-1)
        for n in keep:
            if self.is_terminal(n):
                continue
            new = len(level)
            level.append(self._level[n])
            lo.append(remap[self._lo[n]])
            hi.append(remap[self._hi[n]])
            remap[n] = new
        self._level, self._lo, self._hi = level, lo, hi
        self._unique = {(level[n], lo[n], hi[n]): n
                        for n in range(self.modulus, len(level))}
        self._cache.clear()
        for root in self._roots:
            root.id = remap[root.id]
        return [remap[p] for p in pins]

    def _maybe_gc(self, pins: Sequence[int]) -> list[int]:
        if len(self._level) >= self.gc_watermark:
            return self.collect(pins)
        return list(pins)

    # -- construction ---------------------------------------------------------

    def _term_chain(self, coefficient: int, variables: Sequence[int]) -> int:
        node = self.terminal(coefficient % self.modulus)
        zero = self.terminal(0)
        for var in sorted(variables, key=self.level_of.__getitem__, reverse=True):
            node = self._make(self.level_of[var], zero, node)
        return node

    def build(self, poly: SopPolynomial) -> int:
        """Binary synthesis: halve the term list, build halves, add them mod r.

        Terms are grouped by their variables' levels first, which keeps the
        intermediate diagrams local instead of repeatedly rebuilding one big
        accumulator.
        """
        if poly.modulus != self.modulus:
            raise ValueError("polynomial modulus does not match the store")
        missing = poly.variables() - set(self.order)
        if missing:
            raise ValueError(f"variables missing from the order: {sorted(missing)}")
        self._maybe_gc([])
        keyed = sorted(
            (tuple(sorted(self.level_of[v] for v in t.variables)), t) for t in poly.terms)
        layer = [self._term_chain(t.coefficient, t.variables) for _, t in keyed]
        if not layer:
            return self.terminal(0)
        while len(layer) > 1:
            nxt = []
            for i in range(0, len(layer) - 1, 2):
                nxt.append(self._apply_add(layer[i], layer[i + 1]))
            if len(layer) % 2:
                nxt.append(layer[-1])
            layer = nxt
        return layer[0]

    # -- operations -------------------------------------------------------------

    def add_mod(self, a: int, b: int) -> int:
        """Pointwise (a + b) mod r."""
        a, b = self._maybe_gc([a, b])
        return self._apply_add(a, b)

    def _apply_add(self, a: int, b: int) -> int:
        r = self.modulus
        cache = self._cache
        make = self._make
        levels, los, his = self._level, self._lo, self._hi
        stack = [(a, b)]
        while stack:
            x, y = stack[-1]
            if x > y:
                x, y = y, x
            key = (0, x, y)
            if key in cache:
                stack.pop()
                continue
            if y < r:  # both terminal
                cache[key] = (x + y) % r
                stack.pop()
                continue
            lx, ly = levels[x], levels[y]
            top = lx if lx < ly else ly
            x0, x1 = (los[x], his[x]) if lx == top else (x, x)
            y0, y1 = (los[y], his[y]) if ly == top else (y, y)
            k0 = (0, x0, y0) if x0 <= y0 else (0, y0, x0)
            k1 = (0, x1, y1) if x1 <= y1 else (0, y1, x1)
            pending = []
            if k0 not in cache:
                pending.append((x0, y0))
            if k1 not in cache:
                pending.append((x1, y1))
            if pending:
                stack.extend(pending)
            else:
                cache[key] = make(top, cache[k0], cache[k1])
                stack.pop()
        a, b = (a, b) if a <= b else (b, a)
        return cache[(0, a, b)]

    def negate_terminals(self, a: int) -> int:
        """Terminal j becomes (r - j) mod r; structure is preserved."""
        (a,) = self._maybe_gc([a])
        r = self.modulus
        out: dict[int, int] = {}
        for n in self._reachable([a]):
            if self.is_terminal(n):
                out[n] = (r - n) % r
            else:
                out[n] = self._make(self._level[n], out[self._lo[n]], out[self._hi[n]])
        return out[a]

    def restrict(self, a: int, var: int, value: int) -> int:
        """Cofactor at var=value; restricting an absent variable is a no-op."""
        if value not in (0, 1):
            raise ValueError("restriction value must be a bit")
        if var not in self.level_of:
            return a
        (a,) = self._maybe_gc([a])
        cut = self.level_of[var]
        out: dict[int, int] = {}
        for n in self._reachable([a]):
            lvl = self._level[n]
            if lvl > cut:  # terminals and nodes entirely below the variable
                out[n] = n
            elif lvl == cut:
                out[n] = self._lo[n] if value == 0 else self._hi[n]
            else:
                out[n] = self._make(lvl, out[self._lo[n]], out[self._hi[n]])
        return out[a]

    def count_terminals(self, a: int, over: Iterable[int]) -> tuple[int, ...]:
        """N_j = number of assignments of ``over`` reaching terminal j.

        Levels skipped along an edge contribute a factor 2 each; variables in
        ``over`` above the root likewise.  Exact big integers throughout.
        """
        over = set(over)
        unknown = over - set(self.level_of)
        if unknown:
            raise ValueError(f"count variables outside the order: {sorted(unknown)}")
        levels = sorted(self.level_of[v] for v in over)
        r = self.modulus
        vec: dict[int, list[int]] = {}
        for n in self._reachable([a]):
            if self.is_terminal(n):
                row = [0] * r
                row[n] = 1
                vec[n] = row
            else:
                lvl = self._level[n]
                pos = bisect_left(levels, lvl)
                if pos >= len(levels) or levels[pos] != lvl:
                    var = self.order[lvl]
                    raise ValueError(f"variable x{var} reachable but not counted over")
                below = pos + 1  # first counted level strictly below the branch
                total = [0] * r
                for child in (self._lo[n], self._hi[n]):
                    gap = bisect_left(levels, self._level[child]) - below
                    crow = vec[child]
                    for j in range(r):
                        if crow[j]:
                            total[j] += crow[j] << gap
                vec[n] = total
        row = vec[a]
        head = len(levels) if self.is_terminal(a) else bisect_left(levels, self._level[a])
        return tuple(c << head for c in row)

    def size(self, a: int) -> int:
        """Number of reachable nodes, terminals included."""
        return len(self._reachable([a]))

    def evaluate(self, a: int, assignment: dict[int, int]) -> int:
        node = a
        while not self.is_terminal(node):
            var = self.order[self._level[node]]
            node = self._hi[node] if assignment[var] else self._lo[node]
        return node

    def check_invariants(self, a: int) -> None:
        for n in self._reachable([a]):
            if self.is_terminal(n):
                continue
            lo, hi = self._lo[n], self._hi[n]
            assert lo != hi, "unreduced node"
            assert self._level[lo] > self._level[n], "child level not below parent"
            assert self._level[hi] > self._level[n], "child level not below parent"

    def to_dot(self, a: int, name: str = "dd") -> str:
        """Graphviz rendering; dashed edges take the 0 branch, solid the 1 branch."""
        lines = [f"digraph {name} {{"]
        for n in self._reachable([a]):
            if self.is_terminal(n):
                lines.append(f'  n{n} [shape=box, label="{n}"];')
            else:
                var = self.order[self._level[n]]
                lines.append(f'  n{n} [shape=circle, label="x{var}"];')
                lines.append(f"  n{n} -> n{self._lo[n]} [style=dashed];")
                lines.append(f"  n{n} -> n{self._hi[n]} [style=solid];")
        lines.append("}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# variable-order heuristics


def qubit_order(tensor: SopTensor) -> tuple[int, ...]:
    """Free variables grouped by originating qubit, then by mint time."""
    info = tensor.provenance
    return tuple(sorted(tensor.free_vars(), key=lambda v: (info[v].qubit, v)))


def gate_order(tensor: SopTensor) -> tuple[int, ...]:
    """Free variables ranked by the first gate that references them."""
    info = tensor.provenance

    def key(v: int):
        i = info[v]
        first = i.gate_index if i.gate_index >= 0 else 1 << 40
        moment = i.moment if i.moment >= 0 else 1 << 40
        return (first, moment, v)

    return tuple(sorted(tensor.free_vars(), key=key))


def explicit_order(tensor: SopTensor, variables: Sequence[int]) -> tuple[int, ...]:
    """A caller-supplied order; must be a permutation of the free variables."""
    if set(variables) != tensor.free_vars() or len(set(variables)) != len(variables):
        raise ValueError("explicit order is not a permutation of the free variables")
    return tuple(variables)


def sift(poly: SopPolynomial, order: Sequence[int],
         gc_watermark: int = DEFAULT_GC_WATERMARK) -> tuple[int, ...]:
    """Per-variable relocation search over adjacent positions.

    Each variable is tried at every position (equivalent to a sweep of
    adjacent-level swaps) and kept where the rebuilt diagram is smallest, so
    the result is never larger than the input order's diagram.  Optional
    feature: nothing in the pipeline depends on it.
    """
    def build_size(candidate: Sequence[int]) -> int:
        store = DdStore(poly.modulus, candidate, gc_watermark)
        return store.size(store.build(poly))

    best = list(order)
    best_size = build_size(best)
    # process the variables with the most nodes first, like classic sifting
    for var in list(best):
        base = [v for v in best if v != var]
        for pos in range(len(best)):
            candidate = base[:pos] + [var] + base[pos:]
            if candidate == best:
                continue
            size = build_size(candidate)
            if size < best_size:
                best, best_size = candidate, size
    return tuple(best)
