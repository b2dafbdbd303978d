"""Finite T-LEK models and the model checker.

A model is a set of worlds (each carrying its valuation, a set of ground
atoms), an equivalence relation R stored as a partition, and a
neighbourhood function N mapping each world to a family of world-id sets.
Truth of B is membership of a formula's extension in N; K quantifies over
the R-class; every clause is gated by the world's derived interval.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Iterable

from .intervals import INF, Interval, TimeExpr, TimePoint
from .formulas import (
    Always,
    And,
    Atom,
    Belief,
    Bot,
    Dynamic,
    Formula,
    Iff,
    Implies,
    Knowledge,
    NonGround,
    Not,
    Or,
    Top,
    fits,
    is_ground,
    parse_atom,
    print_formula,
    time_of,
)


class ModelFormatError(ValueError):
    """Malformed model text; carries a line number where possible."""


@dataclass(frozen=True)
class World:
    """A world: opaque id plus its valuation (set of ground atoms)."""

    id: str
    atoms: frozenset[Atom]

    def __post_init__(self):
        if not self.id or any(ch.isspace() or ch in "{}:," for ch in self.id):
            raise ValueError(f"bad world id {self.id!r}")
        for a in self.atoms:
            if not a.is_ground():
                raise NonGround(f"world {self.id}: atom {a} is not ground")


def world_interval(w: World) -> Interval:
    """Derived interval: minimum start to supremum end of the valuation.

    An empty valuation gets the designated interval [0,inf), which makes
    the timing side conditions vacuously permissive there.
    """
    if not w.atoms:
        return Interval(0, INF)
    lo = min(int(a.start.offset) for a in w.atoms)
    hi = max(a.end.offset for a in w.atoms)
    return Interval(lo, hi)


class TLekModel:
    """Immutable snapshot of a model: worlds, R-partition, neighbourhoods."""

    def __init__(
        self,
        worlds: Iterable[World],
        classes: Iterable[frozenset[str]],
        nbhd: dict[str, Iterable[frozenset[str]]],
    ):
        self.worlds: dict[str, World] = {}
        for w in worlds:
            if w.id in self.worlds:
                raise ValueError(f"duplicate world id {w.id}")
            self.worlds[w.id] = w
        self.classes: tuple[frozenset[str], ...] = tuple(
            sorted((frozenset(c) for c in classes), key=lambda c: sorted(c))
        )
        seen: set[str] = set()
        for c in self.classes:
            for wid in c:
                if wid not in self.worlds:
                    raise ValueError(f"class member {wid} is not a world")
                if wid in seen:
                    raise ValueError(f"world {wid} appears in two classes")
                seen.add(wid)
        if seen != set(self.worlds):
            missing = sorted(set(self.worlds) - seen)
            raise ValueError(f"worlds not covered by any class: {missing}")
        self.class_of: dict[str, frozenset[str]] = {
            wid: c for c in self.classes for wid in c
        }
        self.nbhd: dict[str, frozenset[frozenset[str]]] = {
            wid: frozenset() for wid in self.worlds
        }
        for wid, family in nbhd.items():
            if wid not in self.worlds:
                raise ValueError(f"neighbourhood for unknown world {wid}")
            fam = frozenset(frozenset(x) for x in family)
            for x in fam:
                for member in x:
                    if member not in self.worlds:
                        raise ValueError(f"neighbourhood of {wid} mentions unknown world {member}")
            self.nbhd[wid] = fam

    def r_of(self, wid: str) -> frozenset[str]:
        return self.class_of[wid]

    def n_of(self, wid: str) -> frozenset[frozenset[str]]:
        return self.nbhd[wid]

    def with_nbhd(self, nbhd: dict[str, frozenset[frozenset[str]]]) -> "TLekModel":
        return TLekModel(self.worlds.values(), self.classes, nbhd)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TLekModel):
            return NotImplemented
        return (
            self.worlds == other.worlds
            and set(self.classes) == set(other.classes)
            and self.nbhd == other.nbhd
        )

    def __repr__(self) -> str:
        return f"<TLekModel {len(self.worlds)} worlds, {len(self.classes)} classes>"


def validate_model(m: TLekModel) -> list[str]:
    """Check the two neighbourhood conditions; empty list means valid.

    Condition 1: every element of N(w) is a set of worlds reachable from w.
    Condition 2: if w R v then N(w) is a subset of N(v).
    """
    violations = []
    for wid in sorted(m.worlds):
        reach = m.r_of(wid)
        for x in sorted(m.n_of(wid), key=lambda s: sorted(s)):
            if not x.issubset(reach):
                outside = sorted(x - reach)
                violations.append(
                    f"condition 1 at {wid}: element {{{' '.join(sorted(x))}}} "
                    f"leaves R({wid}) via {outside}"
                )
    for cls in m.classes:
        for wid in sorted(cls):
            for vid in sorted(cls):
                if wid != vid and not m.n_of(wid).issubset(m.n_of(vid)):
                    violations.append(f"condition 2 at ({wid},{vid}): N({wid}) is not a subset of N({vid})")
    return violations


def extension(m: TLekModel, wid: str, f: Formula) -> frozenset[str]:
    """Worlds in R(w) where f holds."""
    return frozenset(v for v in m.r_of(wid) if check(m, v, f))


def check(m: TLekModel, wid: str, f: Formula) -> bool:
    """Truth at a world; every clause carries its timing side condition."""
    if not is_ground(f):
        raise NonGround(f"check needs a ground formula: {print_formula(f)}")
    return _check(m, wid, f)


def _check(m: TLekModel, wid: str, f: Formula) -> bool:
    world = m.worlds[wid]
    iv = world_interval(world)
    if isinstance(f, Atom):
        return f in world.atoms and fits(time_of(f), iv)
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Not):
        return not _check(m, wid, f.body) and fits(time_of(f.body), iv)
    if isinstance(f, And):
        return (
            _check(m, wid, f.left)
            and _check(m, wid, f.right)
            and fits(time_of(f.left), iv)
            and fits(time_of(f.right), iv)
        )
    if isinstance(f, Or):
        return (
            (_check(m, wid, f.left) or _check(m, wid, f.right))
            and fits(time_of(f.left), iv)
            and fits(time_of(f.right), iv)
        )
    if isinstance(f, Implies):
        return (
            (not _check(m, wid, f.left) or _check(m, wid, f.right))
            and fits(time_of(f.left), iv)
            and fits(time_of(f.right), iv)
        )
    if isinstance(f, Iff):
        return (
            (_check(m, wid, f.left) == _check(m, wid, f.right))
            and fits(time_of(f.left), iv)
            and fits(time_of(f.right), iv)
        )
    if isinstance(f, Belief):
        return extension(m, wid, f.body) in m.n_of(wid) and fits(time_of(f.body), iv)
    if isinstance(f, Knowledge):
        return all(_check(m, v, f.body) for v in m.r_of(wid)) and fits(
            time_of(f.body), iv
        )
    if isinstance(f, Always):
        label = Interval(int(f.start.offset), f.end.offset)
        return (
            fits(time_of(f.body), label)
            and fits(label, iv)
            and all(_check(m, v, f.body) for v in m.r_of(wid))
        )
    if isinstance(f, Dynamic):
        from .dynamics import check_dynamic

        return check_dynamic(m, wid, f)
    raise TypeError(f"unknown formula node {f!r}")


def valid_in_model(m: TLekModel, f: Formula) -> bool:
    """True in every world of this model."""
    return all(check(m, wid, f) for wid in m.worlds)


# ---------------------------------------------------------------------------
# Random model generation
# ---------------------------------------------------------------------------

_PRED_POOL = ("p", "q", "r", "s", "u", "v")


def gen_random_model(
    seed: int = 0,
    max_worlds: int = 4,
    max_predicates: int = 3,
    horizon: int = 10,
    full_span: bool = False,
) -> TLekModel:
    """Deterministic random model satisfying both frame conditions.

    The partition is drawn first; every world in a class shares the same
    derived interval (a spanning atom pins it), which keeps neighbourhood
    condition 2 stable under the mental-operation updates.  Neighbourhood
    families mix random id subsets with extensions of vocabulary atoms and
    are shared across each class.  With full_span=True every class interval
    is [0,inf), so no timing side condition can fail within the horizon.
    """
    rng = random.Random(seed)
    n = rng.randint(1, max(1, max_worlds))
    ids = [f"w{i}" for i in range(n)]
    preds = list(_PRED_POOL[: max(1, max_predicates)])

    shuffled = ids[:]
    rng.shuffle(shuffled)
    classes: list[list[str]] = [[]]
    for wid in shuffled:
        if classes[-1] and rng.random() < 0.45:
            classes.append([])
        classes[-1].append(wid)

    worlds = []
    for cls in classes:
        if full_span:
            lo, hi = 0, INF
        else:
            lo = rng.randint(0, max(0, horizon // 2))
            hi = INF if rng.random() < 0.3 else rng.randint(lo, horizon)
        for wid in cls:
            atoms = {_atom(rng.choice(preds), lo, hi)}
            for _ in range(rng.randint(0, 2)):
                a = rng.randint(lo, horizon if hi == INF else int(hi))
                if hi == INF and rng.random() < 0.3:
                    b: TimePoint = INF
                else:
                    b = rng.randint(a, horizon if hi == INF else int(hi))
                atoms.add(_atom(rng.choice(preds), a, b))
            worlds.append(World(wid, frozenset(atoms)))

    base = TLekModel(worlds, [frozenset(c) for c in classes], {})
    nbhd: dict[str, frozenset[frozenset[str]]] = {}
    for cls in classes:
        members = sorted(cls)
        family: set[frozenset[str]] = set()
        for _ in range(rng.randint(0, 2)):
            family.add(frozenset(w for w in members if rng.random() < 0.6))
        vocab = sorted(
            {a for wid in members for a in base.worlds[wid].atoms},
            key=lambda a: (a.pred, a.start.offset, a.end.offset),
        )
        for _ in range(rng.randint(1, 3)):
            target = rng.choice(vocab)
            family.add(extension(base, members[0], target))
        for wid in members:
            nbhd[wid] = frozenset(family)
    return base.with_nbhd(nbhd)


def _atom(pred: str, lo: TimePoint, hi: TimePoint) -> Atom:
    return Atom(pred, TimeExpr.lit(int(lo)), TimeExpr.lit(hi))


# ---------------------------------------------------------------------------
# Text format: worlds / classes / nbhd sections, bit-exact round trip
# ---------------------------------------------------------------------------


def _atom_sort_key(a: Atom):
    return (a.pred, a.start.offset, a.end.offset, a.args)


def save_model(m: TLekModel) -> str:
    lines = ["worlds:"]
    for wid in sorted(m.worlds):
        atoms = " ".join(
            print_formula(a) for a in sorted(m.worlds[wid].atoms, key=_atom_sort_key)
        )
        lines.append(f"  {wid}:" + (f" {atoms}" if atoms else ""))
    lines.append("classes:")
    for cls in m.classes:
        lines.append("  " + " ".join(sorted(cls)))
    lines.append("nbhd:")
    for wid in sorted(m.worlds):
        family = sorted(m.n_of(wid), key=lambda s: (len(s), sorted(s)))
        rendered = " ".join("{" + " ".join(sorted(x)) + "}" for x in family)
        lines.append(f"  {wid}:" + (f" {rendered}" if rendered else ""))
    return "\n".join(lines) + "\n"


def load_model(text: str) -> TLekModel:
    worlds: list[World] = []
    classes: list[frozenset[str]] = []
    nbhd: dict[str, list[frozenset[str]]] = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped in ("worlds:", "classes:", "nbhd:"):
            section = stripped[:-1]
            continue
        if section == "worlds":
            if ":" not in stripped:
                raise ModelFormatError(f"line {lineno}: expected 'id: atoms'")
            wid, _, rest = stripped.partition(":")
            wid = wid.strip()
            atoms = []
            for chunk in rest.split():
                try:
                    atoms.append(parse_atom(chunk))
                except Exception as exc:
                    raise ModelFormatError(f"line {lineno}: bad atom {chunk!r}: {exc}") from exc
            try:
                worlds.append(World(wid, frozenset(atoms)))
            except ValueError as exc:
                raise ModelFormatError(f"line {lineno}: {exc}") from exc
        elif section == "classes":
            classes.append(frozenset(stripped.split()))
        elif section == "nbhd":
            if ":" not in stripped:
                raise ModelFormatError(f"line {lineno}: expected 'id: sets'")
            wid, _, rest = stripped.partition(":")
            family = []
            for part in re.findall(r"\{([^{}]*)\}", rest):
                family.append(frozenset(part.split()))
            rest_no_sets = re.sub(r"\{[^{}]*\}", "", rest).strip()
            if rest_no_sets:
                raise ModelFormatError(f"line {lineno}: stray text {rest_no_sets!r}")
            nbhd[wid.strip()] = family
        else:
            raise ModelFormatError(f"line {lineno}: content before any section header")
    try:
        return TLekModel(worlds, classes, nbhd)
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from exc


def load_model_file(path) -> TLekModel:
    with open(path, "r", encoding="utf-8") as fh:
        return load_model(fh.read())


def save_model_file(m: TLekModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(save_model(m))
