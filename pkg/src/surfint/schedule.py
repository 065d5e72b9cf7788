"""Construction of the filtration: killing cocycles level by level.

Each round targets the shortlex-first ball element surviving in the
deepest subgroup.  A killing cocycle is a finitely supported closed
cochain on the current cover pairing nonzero with the target; it is
found by integer linear algebra on a finite core.  When no such cochain
exists at any budgeted radius (the target behaves like a separating
loop), a two-step fallback searches candidate cocycles for the current
level such that the target becomes killable one level up.
"""

from dataclasses import dataclass, field
from math import gcd

from . import intmat, words
from .tower import Cocycle, Tower


class BallExhausted(RuntimeError):
    """No suitable word was found below the configured ball radius."""


class UnscrewingStuck(RuntimeError):
    """The fallback search exhausted its budget without killing the target."""


class DepthCapExceeded(RuntimeError):
    pass


@dataclass
class ScheduleConfig:
    ball_radius: int = 6
    depth_cap: int = 16
    radius_cap: int = 4
    fallback_radius: int = 2
    fallback_inner_radius: int = 3
    fallback_budget: int = 2
    candidate_cap: int = 600
    score_sample: int = 2500
    greedy: bool = True


@dataclass
class ScheduleReport:
    ball_radius: int
    ball_size: int
    levels: list = field(default_factory=list)
    kill_level: dict = field(default_factory=dict)

    @property
    def depth(self):
        return len(self.levels)

    def as_dict(self):
        return {
            "ball_radius": self.ball_radius,
            "ball_size": self.ball_size,
            "depth": self.depth,
            "levels": self.levels,
            "kills_per_level": self.kills_per_level(),
        }

    def kills_per_level(self):
        counts = {}
        for lvl in self.kill_level.values():
            counts[lvl] = counts.get(lvl, 0) + 1
        return [counts.get(i + 1, 0) for i in range(self.depth)]


def pairing_dot(tower, w, cocycle):
    """Pairing of a level-i loop with a cochain, as a crossing sum."""
    row = tower.word_crossings(w, (0,) * cocycle.level, cocycle.level)
    return sum(sgn * cocycle.entries.get(key, 0) for key, sgn in row.items())


def shortest_nontrivial(tower, n, max_len):
    """Shortlex-first nontrivial ball element in subgroup n."""
    for w in words.iter_ball(max_len):
        if w and tower.membership(w, n):
            return w
    raise BallExhausted(f"no nontrivial element of subgroup {n} below length {max_len}")


def _solve(tower, eta, level, radius):
    """Kernel basis of the core coboundary plus pairing values against eta."""
    core = tower.core(level, radius)
    basis = intmat.kernel_basis(core.rows, len(core.edges))
    ell = core.functional_of_word(tower, eta)
    values = [intmat.dot(ell, vec) for vec in basis]
    return core, basis, values


def find_killing_cocycle(tower, eta, level, radius):
    """Closed finite cochain pairing nonzero with eta, or None at this radius.

    Combines kernel basis vectors to realise the gcd of the attainable
    pairing values, then divides by the content so the pairing of eta is
    as small as an integral cochain permits.
    """
    core, basis, values = _solve(tower, eta, level, radius)
    combo, g = intmat.gcd_combination(basis, values)
    if combo is None:
        return None
    c = intmat.content(combo)
    if c > 1:
        combo = intmat.divide(combo, c)
    return core.cocycle_from_vector(combo)


def choose_shift_word(tower, level, candidates):
    """Shortlex-first subgroup-``level`` word with pairing exactly 1.

    ``candidates`` must iterate ball elements of the subgroup in shortlex
    order.  If only multiples of d > 1 are attainable and the installed
    cocycle is divisible by d, the cocycle is renormalised first.

    Returns (shift_word, cocycle) where the cocycle is the (possibly
    divided) one; the caller is responsible for storing it.
    """
    psi = tower.cocycles[level]
    seen = 0
    for w in candidates:
        v = pairing_dot(tower, w, psi)
        if v == 1:
            return w, psi
        seen = gcd(seen, v)
    if seen > 1 and all(v % seen == 0 for v in psi.entries.values()):
        psi = psi.divided(seen)
        for w in candidates:
            if pairing_dot(tower, w, psi) == 1:
                return w, psi
    raise BallExhausted(f"no shift word with pairing 1 at level {level}")


def _shift_witness(tower, psi, survivors, limit=None):
    """First survivor with pairing +1 against psi, scanning at most limit."""
    for k, w in enumerate(survivors):
        if limit is not None and k >= limit:
            return None
        if pairing_dot(tower, w, psi) == 1:
            return w
    return None


def _candidate_cocycles(core, basis, values, survivors, tower, cfg):
    """Killing candidates ordered by how many sampled survivors they kill."""
    cands = []
    seen = set()
    for vec, val in zip(basis, values):
        if not val:
            continue
        c = intmat.content(vec)
        vec = intmat.divide(vec, c) if c > 1 else vec
        key = frozenset(vec.items())
        if key not in seen:
            seen.add(key)
            cands.append(core.cocycle_from_vector(vec))
    combo, g = intmat.gcd_combination(basis, values)
    if combo is not None:
        c = intmat.content(combo)
        if c > 1:
            combo = intmat.divide(combo, c)
        key = frozenset(combo.items())
        if key not in seen:
            cands.append(core.cocycle_from_vector(combo))
    if not cfg.greedy or len(cands) <= 1:
        return cands
    stride = max(1, len(survivors) // cfg.score_sample)
    sample = survivors[::stride]
    rows = [tower.word_crossings(w, (0,) * core.level, core.level) for w in sample]

    def score(c):
        kills = 0
        for row in rows:
            if any(sgn * c.entries.get(key, 0) for key, sgn in row.items()):
                kills += 1
        return kills

    scored = sorted(enumerate(cands), key=lambda t: (-score(t[1]), t[0]))
    return [c for _, c in scored]


def separating_fallback(tower, eta, level, survivors, cfg):
    """Two-step kill: pick a level cocycle making eta killable one level up.

    Candidates are small integer combinations (l1 budget) of the core
    kernel basis, tried sparsest first.  Returns (phi, psi) where phi is
    the level cocycle and psi kills eta on the extended cover.
    """
    core = tower.core(level, cfg.fallback_radius)
    basis = intmat.kernel_basis(core.rows, len(core.edges))
    singles = []
    for vec in basis:
        c = intmat.content(vec)
        singles.append(intmat.divide(vec, c) if c > 1 else vec)
    combos = list(singles)
    if cfg.fallback_budget >= 2:
        for i in range(len(singles)):
            for j in range(i + 1, len(singles)):
                for sgn in (1, -1):
                    merged = dict(singles[i])
                    for k, v in singles[j].items():
                        nv = merged.get(k, 0) + sgn * v
                        if nv:
                            merged[k] = nv
                        else:
                            merged.pop(k, None)
                    if merged:
                        combos.append(merged)

    def sort_key(vec):
        ents = sorted(vec.items())
        span = max(abs(h) for c, _ in ents for h in core.edges[c][1]) if level else 0
        return (len(ents), span, ents)

    uniq = []
    seen = set()
    for vec in sorted(combos, key=sort_key):
        c = intmat.content(vec)
        if c > 1:
            vec = intmat.divide(vec, c)
        key = frozenset(vec.items())
        if key not in seen:
            seen.add(key)
            uniq.append(vec)
    for vec in uniq[:cfg.candidate_cap]:
        phi = core.cocycle_from_vector(vec)
        if _shift_witness(tower, phi, survivors, limit=400) is None:
            continue
        trial = tower_copy(tower)
        trial.append_level(phi)
        for r in range(1, cfg.fallback_inner_radius + 1):
            psi = find_killing_cocycle(trial, eta, level + 1, r)
            if psi is not None:
                return phi, psi
    raise UnscrewingStuck(
        f"no two-step kill for {words.to_string(eta)} at level {level} "
        f"within budget {cfg.fallback_budget}")


def tower_copy(tower):
    out = Tower()
    out.cocycles = list(tower.cocycles)
    out.shifts = list(tower.shifts)
    return out


def extend_schedule(max_len, cfg=None, tower=None):
    """Extend the tower until no nontrivial ball element survives.

    Returns (tower, report).  Raises UnscrewingStuck or DepthCapExceeded
    with level context if the construction cannot finish.
    """
    cfg = cfg or ScheduleConfig(ball_radius=max_len)
    tower = tower if tower is not None else Tower()
    elems = words.ball(max_len)
    report = ScheduleReport(ball_radius=max_len, ball_size=len(elems) - 1)
    survivors = [w for w in elems if w]
    for lvl in range(tower.depth):
        survivors = _filter(tower, survivors, lvl + 1, report)
    while survivors:
        eta = survivors[0]
        level = tower.depth
        if level >= cfg.depth_cap:
            raise DepthCapExceeded(
                f"{len(survivors)} survivors left at depth cap {cfg.depth_cap}, "
                f"next target {words.to_string(eta)}")
        hit = None
        for radius in range(1, cfg.radius_cap + 1):
            core, basis, values = _solve(tower, eta, level, radius)
            if any(values):
                hit = (core, basis, values, radius)
                break
        if hit is not None:
            core, basis, values, radius = hit
            installed = None
            for psi in _candidate_cocycles(core, basis, values, survivors, tower, cfg):
                assert tower.verify_cocycle(psi)
                if _shift_witness(tower, psi, survivors) is not None:
                    installed = psi
                    break
            if installed is None:
                raise BallExhausted(f"no installable cocycle at level {level}")
            tower.append_level(installed)
            shift, final = choose_shift_word(tower, level, survivors)
            tower.cocycles[level] = final
            tower._supports_cache = None
            tower.set_shift(level, shift)
            survivors = _filter(tower, survivors, level + 1, report)
            report.levels.append(_level_entry(tower, level, eta, "direct", radius))
        else:
            phi, psi = separating_fallback(tower, eta, level, survivors, cfg)
            assert tower.verify_cocycle(phi)
            tower.append_level(phi)
            shift, final = choose_shift_word(tower, level, survivors)
            tower.cocycles[level] = final
            tower._supports_cache = None
            tower.set_shift(level, shift)
            pre = survivors
            survivors = _filter(tower, survivors, level + 1, report)
            report.levels.append(_level_entry(tower, level, eta, "fallback-first",
                                              cfg.fallback_radius))
            assert tower.verify_cocycle(psi)
            tower.append_level(psi)
            shift2, final2 = choose_shift_word(tower, level + 1, survivors)
            tower.cocycles[level + 1] = final2
            tower._supports_cache = None
            tower.set_shift(level + 1, shift2)
            survivors = _filter(tower, survivors, level + 2, report)
            report.levels.append(_level_entry(tower, level + 1, eta,
                                              "fallback-second",
                                              cfg.fallback_inner_radius))
            if eta in survivors:
                raise UnscrewingStuck(
                    f"{words.to_string(eta)} survived its own fallback")
    return tower, report


def _filter(tower, survivors, depth, report):
    kept = []
    for w in survivors:
        if tower.trace(w, (), depth)[depth - 1]:
            report.kill_level[words.to_string(w)] = depth
        else:
            kept.append(w)
    return kept


def _level_entry(tower, level, eta, mode, radius):
    c = tower.cocycles[level]
    return {
        "level": level,
        "eta": words.to_string(eta),
        "eta_length": len(eta),
        "mode": mode,
        "radius": radius,
        "cocycle_entries": len(c.entries),
        "cocycle_max": c.max_abs(),
        "shift": words.to_string(tower.shifts[level]),
    }
