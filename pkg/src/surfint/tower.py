"""Iterated cyclic covers of the one-vertex complex on the genus-2 surface.

The base complex has one vertex, four edges (a, b, p, q) and one face
glued along the relator.  Level-i states are integer i-tuples locating a
fiber point; the cocycle installed at level i assigns integer weights to
lifted edges (generator, state prefix) and drives the next cover.

Conventions (pinned by the representative-independence invariant):

* a positive letter g read at state h crosses the edge (g, h) and adds
  the cocycle weights of that edge to every coordinate;
* a negative letter retraces the edge crossed at the post-step state,
  subtracting its weights, with the post-step prefix built low-to-high.

Membership in the subgroup filtration, the intersection pairings and the
digit coordinates are all read off traces from the zero state.
"""

import re
from math import gcd

from . import words
from .backend import trace_state
from .words import inv, to_string, from_string

N_GENS = 4


class DepthExceeded(ValueError):
    pass


class PairingDomainError(ValueError):
    """Pairing requested for a word outside the required subgroup."""


class Cocycle:
    """Finitely supported integer cochain on the level-i cover's edges.

    ``entries`` maps (generator index, state tuple of length ``level``)
    to a nonzero integer.
    """

    __slots__ = ("level", "entries")

    def __init__(self, level, entries):
        self.level = level
        clean = {}
        for (g, hs), v in entries.items():
            if v:
                hs = tuple(hs)
                if len(hs) != level:
                    raise ValueError("state length does not match level")
                clean[(g, hs)] = v
        self.entries = clean

    def __eq__(self, other):
        return (isinstance(other, Cocycle) and self.level == other.level
                and self.entries == other.entries)

    def __repr__(self):
        return f"Cocycle(level={self.level}, size={len(self.entries)})"

    def content(self):
        g = 0
        for v in self.entries.values():
            g = gcd(g, v)
        return g

    def divided(self, d):
        return Cocycle(self.level, {k: v // d for k, v in self.entries.items()})

    def support_by_gen(self):
        out = ({}, {}, {}, {})
        for (g, hs), v in self.entries.items():
            out[g][hs] = v
        return out

    def support_box(self):
        """Per-coordinate (lo, hi) ranges over the support states."""
        if not self.entries or self.level == 0:
            return []
        states = [hs for (_, hs) in self.entries]
        return [(min(s[j] for s in states), max(s[j] for s in states))
                for j in range(self.level)]

    def max_abs(self):
        return max((abs(v) for v in self.entries.values()), default=0)


class Tower:
    """The subgroup filtration as a stack of (cocycle, shift word) levels.

    Immutable in spirit: levels are appended only while a schedule is
    being built, after which every query method is pure and safe to call
    concurrently.
    """

    def __init__(self):
        self.cocycles = []
        self.shifts = []
        self._supports_cache = None

    @property
    def depth(self):
        return len(self.cocycles)

    def append_level(self, cocycle, shift=None):
        if cocycle.level != self.depth:
            raise ValueError(f"expected level {self.depth}, got {cocycle.level}")
        self.cocycles.append(cocycle)
        self.shifts.append(shift)
        self._supports_cache = None

    def set_shift(self, level, shift):
        self.shifts[level] = shift

    def supports(self, nlevels=None):
        if self._supports_cache is None:
            self._supports_cache = tuple(c.support_by_gen() for c in self.cocycles)
        cache = self._supports_cache
        if nlevels is None or nlevels == len(cache):
            return cache
        if nlevels > len(cache):
            raise DepthExceeded(f"depth {nlevels} exceeds tower depth {len(cache)}")
        return cache[:nlevels]

    # -- tracing ------------------------------------------------------------

    def trace(self, w, state=(), nlevels=None):
        """End state of the lifted path of ``w`` starting at ``state``.

        The start state is zero-padded to ``nlevels`` coordinates
        (default: full depth).
        """
        if nlevels is None:
            nlevels = self.depth
        sup = self.supports(nlevels)
        h = tuple(state) + (0,) * (nlevels - len(state))
        if len(h) != nlevels:
            raise DepthExceeded("start state longer than the requested depth")
        return trace_state(w, h, sup)

    def trace_product(self, factors, state, nlevels):
        """Trace a formal product of (word, exponent) factors, left to right."""
        h = tuple(state)
        for w, e in factors:
            h = self.trace_power(w, e, h, nlevels)
        return h

    def trace_power(self, w, k, state, nlevels):
        """Trace of w^k from ``state``; cost independent of |k|.

        Repetitions whose cocycle lookups provably repeat (static key
        prefixes) or provably miss every support window are skipped in
        closed form, so astronomically large exponents are exact and
        cheap.  Used with shift words, whose powers escape every finite
        window monotonically.
        """
        if k == 0 or not w:
            return tuple(state)
        if k < 0:
            w, k = inv(w), -k
        sup = self.supports(nlevels)
        h = tuple(state)
        if k <= 8:
            for _ in range(k):
                h = trace_state(w, h, sup)
            return h
        boxes = []
        for j in range(1, nlevels):
            c = self.cocycles[j]
            if c.entries:
                boxes.append((j, c.support_box()))
        drift = [len(w) * max(self.cocycles[j].max_abs(), 1)
                 for j in range(nlevels)]
        while k > 0:
            h2 = trace_state(w, h, sup)
            k -= 1
            delta = [h2[i] - h[i] for i in range(nlevels)]
            h = h2
            if k == 0:
                break
            skip = k
            for j, box in boxes:
                if all(delta[i] == 0 for i in range(j)):
                    continue  # key prefixes repeat exactly
                best = 0
                for i in range(j):
                    lo = box[i][0] - drift[i]
                    hi = box[i][1] + drift[i]
                    hv, dv = h[i], delta[i]
                    if dv == 0:
                        if hv < lo or hv > hi:
                            best = skip
                            break
                        continue
                    if lo <= hv <= hi:
                        continue
                    if dv > 0:
                        t = -((hv - lo) // dv) if hv < lo else skip
                    else:
                        t = -((hi - hv) // -dv) if hv > hi else skip
                    if t > best:
                        best = t
                if best == 0 or delta[j] != 0:
                    skip = 0
                    break
                skip = min(skip, best)
            if skip > 0:
                h = tuple(h[i] + skip * delta[i] for i in range(nlevels))
                k -= skip
        return tuple(h)

    # -- filtration queries --------------------------------------------------

    def membership(self, w, n):
        """Whether the element lies in the n-th filtration subgroup."""
        if n > self.depth:
            raise DepthExceeded(f"level {n} exceeds tower depth {self.depth}")
        return not any(self.trace(w, (), n))

    def pairing(self, w, i):
        """Intersection pairing of a level-i loop with the level-i cocycle."""
        if not self.membership(w, i):
            raise PairingDomainError(
                f"{to_string(w)} is not in subgroup {i}; pairing undefined")
        return self.trace(w, (), i + 1)[i]

    def digits_vector(self, factors, n, *, stop_at_nonzero=False):
        """Digits of a formal product through the first n levels.

        Digit j+1 is the level-(j+1) height after stripping the shift
        powers recorded by the shallower digits.  With
        ``stop_at_nonzero`` the remaining digits are not computed.
        """
        if n > self.depth:
            raise DepthExceeded(f"depth {n} exceeds tower depth {self.depth}")
        digs = []
        prefix = []
        state = (0,) * n
        for m in range(n):
            end = self.trace_product(factors, state, n)
            d = end[m]
            digs.append(d)
            if d:
                if stop_at_nonzero:
                    break
                if self.shifts[m] is None:
                    raise ValueError(f"level {m} has no shift word")
                prefix.insert(0, (self.shifts[m], -d))
                state = self.trace_product(prefix, (0,) * n, n)
        return digs

    def digits(self, w, n):
        """Digit vector and residual word: w = shifts^digits * residual."""
        digs = self.digits_vector([(w, 1)], n)
        residual = w
        for m, d in enumerate(digs):
            if d:
                residual = words.mul(_power_word(self.shifts[m], -d), residual)
        return tuple(digs), residual

    def first_nonzero_level(self, w, n=None):
        """First level (1-based) at which w has a nonzero digit, else None."""
        if n is None:
            n = self.depth
        digs = self.digits_vector([(w, 1)], n, stop_at_nonzero=True)
        for m, d in enumerate(digs):
            if d:
                return m + 1
        return None

    # -- cells and closedness -------------------------------------------------

    def step(self, letter, state, nlevels):
        return trace_state(bytes([letter]), state, self.supports(nlevels))

    def relator_row(self, h, nlevels):
        """Signed edge crossings of the lifted relator starting at ``h``."""
        return self.word_crossings(words.RELATOR, h, nlevels)

    def word_crossings(self, w, h, nlevels):
        """Signed count of lifted-edge crossings of the path of ``w``."""
        sup = self.supports(nlevels)
        row = {}
        state = tuple(h)
        for x in w:
            nxt = trace_state(bytes([x]), state, sup)
            if x & 1 == 0:
                key, sgn = (x >> 1, state), 1
            else:
                key, sgn = (x >> 1, nxt), -1
            v = row.get(key, 0) + sgn
            if v:
                row[key] = v
            else:
                row.pop(key, None)
            state = nxt
        return row

    def face_states_touching(self, edge_keys, nlevels):
        """Start states of lifted relator faces whose boundary uses an edge.

        For each edge and each relator position reading its generator,
        walk the relator prefix backwards to recover the face's start
        state.  Faces not produced here have boundary sums that vanish
        identically for cochains supported on ``edge_keys``.
        """
        rel = words.RELATOR
        out = set()
        for (g, s) in edge_keys:
            for t, x in enumerate(rel):
                if x >> 1 != g:
                    continue
                if x & 1 == 0:
                    h = self.trace(inv(rel[:t]), s, nlevels)
                else:
                    h = self.trace(inv(rel[:t + 1]), s, nlevels)
                out.add(h)
        return out

    def verify_cocycle(self, c):
        """Closedness: the lifted relator boundary sums to zero everywhere.

        Only faces whose boundary meets the support can have a nonzero
        sum, and those are enumerated exactly.
        """
        if c.level > self.depth:
            raise DepthExceeded("cocycle level deeper than tower")
        if c.level == 0:
            return True  # the relator has zero exponent sums
        for h in self.face_states_touching(c.entries.keys(), c.level):
            total = 0
            for key, sgn in self.relator_row(h, c.level).items():
                total += sgn * c.entries.get(key, 0)
            if total != 0:
                return False
        return True

    def core(self, level, radius):
        """Finite subcomplex of the level-``level`` cover.

        Vertices are the states reachable from zero by words of length at
        most ``radius``; edges need both endpoints inside; face rows are
        the boundary sums of every lifted relator touching a core edge,
        restricted to core edge columns (outside edges carry weight 0).
        """
        verts = [(0,) * level]
        seen = {verts[0]}
        frontier = list(verts)
        for _ in range(radius):
            nxt = []
            for s in frontier:
                for x in range(words.N_LETTERS):
                    t = self.step(x, s, level)
                    if t not in seen:
                        seen.add(t)
                        nxt.append(t)
            verts.extend(nxt)
            frontier = nxt
        edges = []
        for s in verts:
            for g in range(N_GENS):
                if self.step(2 * g, s, level) in seen:
                    edges.append((g, s))
        edge_index = {e: i for i, e in enumerate(edges)}
        rows = []
        for h in sorted(self.face_states_touching(edges, level)):
            row = {}
            for key, sgn in self.relator_row(h, level).items():
                col = edge_index.get(key)
                if col is not None:
                    row[col] = sgn
            if row:
                rows.append(row)
        return Core(level, radius, verts, edges, edge_index, rows)


class Core:
    """Finite chain-complex window used by the cocycle solver."""

    def __init__(self, level, radius, vertices, edges, edge_index, rows):
        self.level = level
        self.radius = radius
        self.vertices = vertices
        self.edges = edges
        self.edge_index = edge_index
        self.rows = rows

    def cocycle_from_vector(self, vec):
        entries = {self.edges[c]: v for c, v in vec.items() if v}
        return Cocycle(self.level, entries)

    def functional_of_word(self, tower, w):
        """The pairing functional of a loop, as a vector over core edges."""
        out = {}
        for key, sgn in tower.word_crossings(w, (0,) * self.level, self.level).items():
            col = self.edge_index.get(key)
            if col is not None:
                out[col] = sgn
        return out


def _power_word(w, k):
    if k < 0:
        w, k = inv(w), -k
    return w * k


# ---------------------------------------------------------------------------
# Text format: "level i" header, one "g h_1 ... h_i value" line per entry,
# then "shift <word>".  Round-trips bit-exactly.
# ---------------------------------------------------------------------------

_GEN_CHARS = "abpq"


def dump_tower(tower):
    lines = []
    for i, c in enumerate(tower.cocycles):
        lines.append(f"level {i}")
        for (g, hs), v in sorted(c.entries.items()):
            parts = [_GEN_CHARS[g], *map(str, hs), str(v)]
            lines.append(" ".join(parts))
        shift = tower.shifts[i]
        if shift is not None:
            lines.append(f"shift {to_string(shift)}")
    return "\n".join(lines) + "\n"


def parse_tower(text):
    tower = Tower()
    level = None
    entries = {}
    shift = None

    def flush():
        if level is not None:
            tower.append_level(Cocycle(level, entries), shift)

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("level "):
            flush()
            level = int(line.split()[1])
            entries, shift = {}, None
        elif line.startswith("shift "):
            shift = from_string(line.split()[1])
        else:
            if level is None:
                raise ValueError(f"line {lineno}: entry before any level header")
            parts = line.split()
            if not re.fullmatch("[abpq]", parts[0]) or len(parts) != level + 2:
                raise ValueError(f"line {lineno}: bad entry {raw!r}")
            g = _GEN_CHARS.index(parts[0])
            hs = tuple(int(t) for t in parts[1:-1])
            entries[(g, hs)] = int(parts[-1])
    flush()
    return tower


def save_tower(tower, path):
    with open(path, "w") as fh:
        fh.write(dump_tower(tower))


def load_tower(path):
    with open(path) as fh:
        return parse_tower(fh.read())
