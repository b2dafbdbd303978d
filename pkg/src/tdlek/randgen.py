"""Seeded random generators for formulas and mental operations.

Used by the rand-test suites and the round-trip tests.  Everything is
driven by an explicit random.Random so identical seeds give identical
streams.
"""

from __future__ import annotations

import random
from typing import Sequence

from .intervals import INF, TimeExpr
from .formulas import (
    Always,
    And,
    Atom,
    Belief,
    Conj,
    Dynamic,
    Formula,
    Iff,
    Implies,
    Infer,
    Knowledge,
    Learn,
    MentalOp,
    Not,
    Or,
    Revise,
)
from .models import TLekModel

Vocab = Sequence[Atom]


def model_vocab(m: TLekModel) -> list[Atom]:
    atoms = {a for w in m.worlds.values() for a in w.atoms}
    return sorted(atoms, key=lambda a: (a.pred, a.start.offset, a.end.offset, a.args))


def gen_vocab_atom(rng: random.Random, vocab: Vocab, horizon: int) -> Atom:
    """Mostly an existing atom, sometimes a fresh one over the same predicates."""
    if vocab and rng.random() < 0.75:
        return rng.choice(list(vocab))
    pred = rng.choice([a.pred for a in vocab] if vocab else ["p", "q"])
    lo = rng.randint(0, horizon)
    hi = INF if rng.random() < 0.15 else rng.randint(lo, horizon)
    return Atom(pred, TimeExpr.lit(lo), TimeExpr.lit(hi))


def gen_literal(rng: random.Random, vocab: Vocab, horizon: int) -> Formula:
    atom = gen_vocab_atom(rng, vocab, horizon)
    return Not(atom) if rng.random() < 0.3 else atom


def gen_static(rng: random.Random, vocab: Vocab, horizon: int, depth: int = 2) -> Formula:
    if depth <= 0:
        return gen_vocab_atom(rng, vocab, horizon)
    roll = rng.random()
    if roll < 0.40:
        return gen_vocab_atom(rng, vocab, horizon)
    if roll < 0.52:
        return Not(gen_static(rng, vocab, horizon, depth - 1))
    if roll < 0.66:
        return And(
            gen_static(rng, vocab, horizon, depth - 1),
            gen_static(rng, vocab, horizon, depth - 1),
        )
    if roll < 0.73:
        return Or(
            gen_static(rng, vocab, horizon, depth - 1),
            gen_static(rng, vocab, horizon, depth - 1),
        )
    if roll < 0.79:
        return Implies(
            gen_static(rng, vocab, horizon, depth - 1),
            gen_static(rng, vocab, horizon, depth - 1),
        )
    if roll < 0.83:
        return Iff(
            gen_static(rng, vocab, horizon, depth - 1),
            gen_static(rng, vocab, horizon, depth - 1),
        )
    if roll < 0.92:
        return Belief(gen_static(rng, vocab, horizon, depth - 1))
    if roll < 0.985:
        return Knowledge(gen_static(rng, vocab, horizon, depth - 1))
    lo = rng.randint(0, horizon)
    hi = INF if rng.random() < 0.5 else rng.randint(lo, horizon)
    return Always(TimeExpr.lit(lo), TimeExpr.lit(hi), gen_static(rng, vocab, horizon, depth - 1))


def gen_mental_op(rng: random.Random, vocab: Vocab, horizon: int, dyn_depth: int = 0) -> MentalOp:
    roll = rng.random()
    if roll < 0.40:
        return Learn(gen_literal(rng, vocab, horizon))
    if roll < 0.65:
        return Conj(
            gen_static(rng, vocab, horizon, 1),
            gen_static(rng, vocab, horizon, 1),
        )
    if roll < 0.92:
        return Infer(gen_static(rng, vocab, horizon, 1), gen_vocab_atom(rng, vocab, horizon))
    target = gen_vocab_atom(rng, vocab, horizon)
    t_iv = target.interval()
    lo = rng.randint(t_iv.lo, int(t_iv.hi) if t_iv.finite else horizon)
    if t_iv.finite:
        hi: object = rng.randint(lo, int(t_iv.hi))
    else:
        hi = INF if rng.random() < 0.5 else rng.randint(lo, horizon)
    trigger = Atom("x" + target.pred, TimeExpr.lit(lo), TimeExpr.lit(hi))
    return Revise(trigger, target)


def gen_dynamic_body(rng: random.Random, vocab: Vocab, horizon: int, dyn_depth: int) -> Formula:
    """Body under a prefix; may contain one more nested prefix."""
    if dyn_depth > 0 and rng.random() < 0.22:
        return Dynamic(
            gen_mental_op(rng, vocab, horizon),
            gen_dynamic_body(rng, vocab, horizon, dyn_depth - 1),
        )
    roll = rng.random()
    if roll < 0.40:
        return gen_vocab_atom(rng, vocab, horizon)
    if roll < 0.54:
        return Not(gen_dynamic_body(rng, vocab, horizon, 0))
    if roll < 0.72:
        return And(
            gen_dynamic_body(rng, vocab, horizon, 0),
            gen_dynamic_body(rng, vocab, horizon, 0),
        )
    if roll < 0.80:
        return Or(
            gen_dynamic_body(rng, vocab, horizon, 0),
            gen_dynamic_body(rng, vocab, horizon, 0),
        )
    if roll < 0.885:
        return Belief(gen_static(rng, vocab, horizon, 1))
    if roll < 0.997:
        return Knowledge(gen_static(rng, vocab, horizon, 1))
    lo = rng.randint(0, horizon)
    return Always(TimeExpr.lit(lo), TimeExpr.lit(INF), gen_vocab_atom(rng, vocab, horizon))


def gen_dynamic_formula(rng: random.Random, vocab: Vocab, horizon: int, dyn_depth: int = 2) -> Dynamic:
    """A prefixed formula with at most dyn_depth nested prefixes."""
    return Dynamic(
        gen_mental_op(rng, vocab, horizon),
        gen_dynamic_body(rng, vocab, horizon, dyn_depth - 1),
    )


# ---------------------------------------------------------------------------
# Free ASTs for round-trip testing (variables allowed, all node kinds)
# ---------------------------------------------------------------------------

_PREDS = ("p", "q", "rain", "take", "married", "go")
_CONSTS = ("a", "b", "umbrella", "shops")
_TIME_VARS = ("T", "T1", "T2")
_OBJ_VARS = ("X", "Y")


def _gen_time_expr(rng: random.Random, allow_vars: bool) -> TimeExpr:
    roll = rng.random()
    if allow_vars and roll < 0.3:
        var = rng.choice(_TIME_VARS)
        shift_roll = rng.random()
        if shift_roll < 0.4:
            return TimeExpr.at(var, rng.randint(1, 20))
        if shift_roll < 0.55:
            return TimeExpr.at(var, -rng.randint(1, 5))
        return TimeExpr.at(var)
    if roll < 0.45:
        return TimeExpr.lit(INF)
    return TimeExpr.lit(rng.randint(0, 30))


def gen_free_atom(rng: random.Random, allow_vars: bool = True) -> Atom:
    while True:
        start = _gen_time_expr(rng, allow_vars)
        if start.is_ground() and start.offset == INF:
            continue
        end = _gen_time_expr(rng, allow_vars)
        args = []
        for _ in range(rng.randint(0, 2)):
            if allow_vars and rng.random() < 0.3:
                args.append(rng.choice(_OBJ_VARS))
            else:
                args.append(rng.choice(_CONSTS))
        try:
            return Atom(rng.choice(_PREDS), start, end, tuple(args))
        except ValueError:
            continue


def gen_free_formula(rng: random.Random, depth: int = 4, allow_vars: bool = True) -> Formula:
    """Arbitrary AST over the whole grammar, for parse/print round trips."""
    if depth <= 0:
        return gen_free_atom(rng, allow_vars)
    roll = rng.random()
    sub = lambda: gen_free_formula(rng, depth - 1, allow_vars)  # noqa: E731
    if roll < 0.30:
        return gen_free_atom(rng, allow_vars)
    if roll < 0.40:
        return Not(sub())
    if roll < 0.50:
        return And(sub(), sub())
    if roll < 0.57:
        return Or(sub(), sub())
    if roll < 0.64:
        return Implies(sub(), sub())
    if roll < 0.70:
        return Iff(sub(), sub())
    if roll < 0.78:
        return Belief(sub())
    if roll < 0.86:
        return Knowledge(sub())
    if roll < 0.92:
        lo = _gen_time_expr(rng, allow_vars)
        while lo.is_ground() and lo.offset == INF:
            lo = _gen_time_expr(rng, allow_vars)
        hi = _gen_time_expr(rng, allow_vars)
        if lo.is_ground() and hi.is_ground() and lo.offset > hi.offset:
            lo, hi = TimeExpr.lit(0), TimeExpr.lit(INF)
        return Always(lo, hi, sub())
    op_roll = rng.random()
    if op_roll < 0.3:
        lit = gen_free_atom(rng, allow_vars)
        op: MentalOp = Learn(Not(lit) if rng.random() < 0.3 else lit)
    elif op_roll < 0.55:
        op = Conj(gen_free_formula(rng, 1, allow_vars), gen_free_formula(rng, 1, allow_vars))
    elif op_roll < 0.8:
        op = Infer(gen_free_formula(rng, 1, allow_vars), gen_free_atom(rng, allow_vars))
    else:
        op = Revise(gen_free_atom(rng, allow_vars), gen_free_atom(rng, allow_vars))
    return Dynamic(op, sub())
