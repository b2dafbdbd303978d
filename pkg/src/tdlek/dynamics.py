"""Mental operations as model transformers, and prefix elimination.

apply() rebuilds the neighbourhood function world by world; every
extension is computed against the input model, so the update is
simultaneous across worlds.  check_dynamic() evaluates a prefixed formula
by updating first.  reduce_formula() rewrites dynamic prefixes away,
innermost first: prefixes distribute over the connectives and K, and a
prefix on B unfolds into either the belief of the pushed body or knowledge
of its equivalence with what the operation added.  Shapes with no sound
rewrite (a prefix on box, or a revision prefix on B) are reported, not
guessed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .intervals import TimeExpr, difference, intersect, subset
from .formulas import (
    Always,
    And,
    Atom,
    Belief,
    Bot,
    Conj,
    Dynamic,
    Formula,
    Iff,
    Implies,
    Infer,
    Knowledge,
    Learn,
    MentalOp,
    NonGround,
    Not,
    Or,
    Revise,
    Top,
    fits,
    is_ground,
    op_time,
    print_formula,
    print_mental_op,
    time_of,
)
from .models import TLekModel, check, extension, world_interval


class MalformedOp(ValueError):
    """A mental operation whose payload breaks its shape constraints."""


class UnreducibleShape(ValueError):
    """A dynamic prefix met a construct with no sound reduction rule."""


@dataclass(frozen=True)
class OpOutcome:
    """Result of applying a mental operation.

    applied is False when the otherwise branch fired at every world, in
    which case model is the input model itself.  delta records the actual
    neighbourhood changes per world, already in serializable form.
    """

    model: TLekModel
    applied: bool
    delta: dict = field(default_factory=dict)


def _is_literal(f: Formula) -> bool:
    return isinstance(f, Atom) or (isinstance(f, Not) and isinstance(f.body, Atom))


def _validate_op(op: MentalOp) -> None:
    if isinstance(op, Learn):
        if not _is_literal(op.literal):
            raise MalformedOp(f"+ needs an atom or negated atom, got {print_formula(op.literal)}")
    elif isinstance(op, Infer):
        if not isinstance(op.conclusion, Atom):
            raise MalformedOp("inf needs a ground atom conclusion")
    elif isinstance(op, Revise):
        if not (isinstance(op.trigger, Atom) and isinstance(op.target, Atom)):
            raise MalformedOp("rev needs two ground atoms")
    elif not isinstance(op, Conj):
        raise MalformedOp(f"unknown mental operation {op!r}")
    if not is_ground(op):
        raise NonGround(f"mental operation is not ground: {print_mental_op(op)}")


def wider_belief_exists(m: TLekModel, wid: str, op: Revise) -> bool:
    """True if some other target-predicate atom, believed at wid, covers a
    strictly larger interval than the trigger."""
    trigger_iv = op.trigger.interval()
    candidates = {
        a
        for v in m.r_of(wid)
        for a in m.worlds[v].atoms
        if a.pred == op.target.pred and a.args == op.target.args and a != op.target
    }
    for cand in sorted(candidates, key=lambda a: (a.start.offset, a.end.offset)):
        j = cand.interval()
        if subset(trigger_iv, j) and j != trigger_iv and check(m, wid, Belief(cand)):
            return True
    return False


def _residual_atoms(op: Revise) -> list[Atom]:
    parts = difference(op.target.interval(), op.trigger.interval())
    return [
        Atom(
            op.target.pred,
            TimeExpr.lit(p.lo),
            TimeExpr.lit(p.hi),
            op.target.args,
        )
        for p in parts
    ]


def apply(m: TLekModel, op: MentalOp) -> OpOutcome:
    """Update the neighbourhoods per the operation's case analysis.

    Learn adds the literal's extension where its time fits the world
    interval.  Conj and Infer add their conclusion's extension where the
    belief/knowledge guard holds.  Revise removes the extension of the
    target restricted to the trigger's span and adds extensions for the
    residual sub-interval beliefs.  Worlds where the guard fails keep
    their neighbourhood unchanged.
    """
    _validate_op(op)
    new_nbhd: dict[str, frozenset[frozenset[str]]] = {}
    delta: dict = {}
    applied = False
    for wid in sorted(m.worlds):
        iv = world_interval(m.worlds[wid])
        adds: list[frozenset[str]] = []
        removes: list[frozenset[str]] = []
        fired = False
        if isinstance(op, Learn):
            if fits(time_of(op.literal), iv):
                fired = True
                adds.append(extension(m, wid, op.literal))
        elif isinstance(op, Conj):
            if (
                check(m, wid, Belief(op.left))
                and check(m, wid, Belief(op.right))
                and fits(op_time(op), iv)
            ):
                fired = True
                adds.append(extension(m, wid, And(op.left, op.right)))
        elif isinstance(op, Infer):
            if (
                check(m, wid, Belief(op.premise))
                and check(m, wid, Knowledge(Implies(op.premise, op.conclusion)))
                and fits(op_time(op), iv)
            ):
                fired = True
                adds.append(extension(m, wid, op.conclusion))
        elif isinstance(op, Revise):
            overlap = intersect(op.trigger.interval(), op.target.interval())
            guard = (
                not overlap.is_empty()
                and check(m, wid, Belief(op.trigger))
                and check(m, wid, Belief(op.target))
                and check(m, wid, Knowledge(Implies(op.trigger, Not(op.target))))
                and fits(op_time(op), iv)
                and not wider_belief_exists(m, wid, op)
            )
            if guard:
                fired = True
                q_cut = Atom(
                    op.target.pred,
                    TimeExpr.lit(overlap.parts[0].lo),
                    TimeExpr.lit(overlap.parts[0].hi),
                    op.target.args,
                )
                removes.append(extension(m, wid, q_cut))
                for residual in _residual_atoms(op):
                    adds.append(extension(m, wid, residual))
        applied = applied or fired
        family = set(m.n_of(wid))
        before = frozenset(family)
        for x in removes:
            family.discard(x)
        for x in adds:
            family.add(x)
        after = frozenset(family)
        new_nbhd[wid] = after
        if before != after:
            delta[wid] = {
                "added": [sorted(x) for x in sorted(after - before, key=sorted)],
                "removed": [sorted(x) for x in sorted(before - after, key=sorted)],
            }
    if not delta:
        return OpOutcome(m, applied, {})
    return OpOutcome(m.with_nbhd(new_nbhd), applied, delta)


def check_dynamic(m: TLekModel, wid: str, f: Formula) -> bool:
    """Truth of a prefixed formula: update, then check the body, with the
    body's time required to fit the world interval."""
    if not isinstance(f, Dynamic):
        raise TypeError(f"check_dynamic needs a dynamic formula, got {print_formula(f)}")
    if not is_ground(f):
        raise NonGround(f"check_dynamic needs a ground formula: {print_formula(f)}")
    outcome = apply(m, f.op)
    iv = world_interval(m.worlds[wid])
    return check(outcome.model, wid, f.body) and fits(time_of(f.body), iv)


# ---------------------------------------------------------------------------
# Reduction to static formulas
# ---------------------------------------------------------------------------


def reduce_formula(f: Formula) -> Formula:
    """Rewrite a ground formula into one with no dynamic prefixes.

    Innermost prefixes go first, so a prefix is only ever pushed through a
    static body.  Each push strictly lowers the dynamic depth under B and
    K, hence termination.  Raises UnreducibleShape where no sound rewrite
    exists instead of guessing.
    """
    if not is_ground(f):
        raise NonGround(f"reduce needs a ground formula: {print_formula(f)}")
    return _reduce(f)


def _reduce(f: Formula) -> Formula:
    if isinstance(f, (Atom, Top, Bot)):
        return f
    if isinstance(f, Not):
        return Not(_reduce(f.body))
    if isinstance(f, And):
        return And(_reduce(f.left), _reduce(f.right))
    if isinstance(f, Or):
        return Or(_reduce(f.left), _reduce(f.right))
    if isinstance(f, Implies):
        return Implies(_reduce(f.left), _reduce(f.right))
    if isinstance(f, Iff):
        return Iff(_reduce(f.left), _reduce(f.right))
    if isinstance(f, Belief):
        return Belief(_reduce(f.body))
    if isinstance(f, Knowledge):
        return Knowledge(_reduce(f.body))
    if isinstance(f, Always):
        return Always(f.start, f.end, _reduce(f.body))
    if isinstance(f, Dynamic):
        op = _reduce_op(f.op)
        return _push(op, _reduce(f.body))
    raise TypeError(f"unknown formula node {f!r}")


def _reduce_op(op: MentalOp) -> MentalOp:
    if isinstance(op, Learn):
        return op
    if isinstance(op, Conj):
        return Conj(_reduce(op.left), _reduce(op.right))
    if isinstance(op, Infer):
        return Infer(_reduce(op.premise), op.conclusion)
    return op


def _push(op: MentalOp, body: Formula) -> Formula:
    """Push one prefix through a static body."""
    if isinstance(body, (Atom, Top, Bot)):
        return body
    if isinstance(body, Not):
        return Not(_push(op, body.body))
    if isinstance(body, And):
        return And(_push(op, body.left), _push(op, body.right))
    if isinstance(body, Or):
        return Or(_push(op, body.left), _push(op, body.right))
    if isinstance(body, Implies):
        return Implies(_push(op, body.left), _push(op, body.right))
    if isinstance(body, Iff):
        return Iff(_push(op, body.left), _push(op, body.right))
    if isinstance(body, Knowledge):
        return Knowledge(_push(op, body.body))
    if isinstance(body, Belief):
        pushed = _push(op, body.body)
        if isinstance(op, Learn):
            return Or(Belief(pushed), Knowledge(Iff(pushed, op.literal)))
        if isinstance(op, Infer):
            guard = And(
                Belief(op.premise),
                Knowledge(Implies(op.premise, op.conclusion)),
            )
            return Or(Belief(pushed), And(guard, Knowledge(Iff(pushed, op.conclusion))))
        if isinstance(op, Conj):
            guard = And(Belief(op.left), Belief(op.right))
            return Or(
                Belief(pushed),
                And(guard, Knowledge(Iff(pushed, And(op.left, op.right)))),
            )
        if isinstance(op, Revise):
            raise UnreducibleShape(
                f"[{print_mental_op(op)}] on a belief: revision both removes and adds "
                "neighbourhood elements, so no static equivalent exists"
            )
    if isinstance(body, Always):
        raise UnreducibleShape(
            f"[{print_mental_op(op)}] on box{'' if body.is_default_interval() else '[...]'}: "
            "no reduction rule covers a prefixed box"
        )
    if isinstance(body, Dynamic):
        raise AssertionError("inner prefixes are reduced before pushing")
    raise TypeError(f"unknown formula node {body!r}")
