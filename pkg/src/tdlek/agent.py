"""Working-memory agent: timed beliefs plus long-term knowledge rules.

The working memory holds ground literals with canonical intervals
(overlapping or adjacent same-polarity beliefs merge).  Long-term memory
holds rules fired by forward chaining: premises bind variables by matching
belief atoms syntactically, ground premises are satisfied by any covering
belief, and a negative conclusion restructures the contradicted belief
around the denied span instead of being stored.  Every operation returns a
new state; a trace of events makes runs replayable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence, Union

from .intervals import (
    INF,
    BadInterval,
    Interval,
    IntervalSet,
    TimeExpr,
    TimePoint,
    UnboundVariable,
    difference,
    fmt_time,
    intersect,
    is_time_point,
    subset,
)
from .formulas import (
    Always,
    And,
    Atom,
    Belief,
    Bot,
    Formula,
    FormulaSyntaxError,
    Implies,
    Knowledge,
    NonGround,
    Not,
    Or,
    Top,
    free_vars,
    is_var,
    parse,
    print_formula,
    substitute,
    match_atom,
)
from .models import TLekModel, World


class MalformedRule(ValueError):
    """A rule that cannot be fired safely (shape or unbound conclusion)."""


class NoSuchBelief(ValueError):
    """Revision was asked to restructure a belief that is not held."""


class BudgetExhausted(RuntimeError):
    """Forward chaining exceeded its step budget."""


class UnsupportedQuery(ValueError):
    """query() only handles B over ground atoms, K over rules, and booleans."""


class ScenarioError(ValueError):
    """Bad scenario script line."""

    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


# ---------------------------------------------------------------------------
# Beliefs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BeliefLit:
    """A ground literal held in working memory."""

    atom: Atom
    positive: bool = True

    def __post_init__(self):
        if not self.atom.is_ground():
            raise NonGround(f"belief literal {self.atom} is not ground")

    def interval(self) -> Interval:
        return self.atom.interval()

    def key(self):
        return (self.atom.pred, self.atom.args, not self.positive, self.atom.start.offset, self.atom.end.offset)

    def __str__(self) -> str:
        text = print_formula(self.atom)
        return text if self.positive else "~" + text


def _as_literal(lit: Union[Formula, BeliefLit]) -> BeliefLit:
    if isinstance(lit, BeliefLit):
        return lit
    if isinstance(lit, Atom):
        return BeliefLit(lit, True)
    if isinstance(lit, Not) and isinstance(lit.body, Atom):
        return BeliefLit(lit.body, False)
    raise ValueError(f"not a literal: {print_formula(lit)}")


def _group_key(b: BeliefLit):
    return (b.atom.pred, b.atom.args, b.positive)


def _make_lit(pred: str, args: tuple[str, ...], positive: bool, iv: Interval) -> BeliefLit:
    return BeliefLit(Atom(pred, TimeExpr.lit(iv.lo), TimeExpr.lit(iv.hi), args), positive)


def _insert(wm: frozenset[BeliefLit], lit: BeliefLit) -> frozenset[BeliefLit]:
    """Add a literal, merging with same-polarity beliefs it touches."""
    group = [b for b in wm if _group_key(b) == _group_key(lit)]
    merged = IntervalSet.of([b.interval() for b in group] + [lit.interval()])
    rebuilt = {
        _make_lit(lit.atom.pred, lit.atom.args, lit.positive, part) for part in merged
    }
    return (wm - frozenset(group)) | rebuilt


def _covered(wm: frozenset[BeliefLit], atom: Atom, positive: bool) -> bool:
    """Some held belief of the same polarity spans the whole atom."""
    for b in wm:
        if (
            b.positive == positive
            and b.atom.pred == atom.pred
            and b.atom.args == atom.args
            and subset(atom.interval(), b.interval())
        ):
            return True
    return False


# ---------------------------------------------------------------------------
# Rules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Premise:
    atom: Atom
    box: Optional[tuple[TimeExpr, TimeExpr]] = None  # containment constraint


@dataclass(frozen=True)
class Rule:
    premises: tuple[Premise, ...]
    conclusion: Atom
    positive: bool
    text: str

    def __str__(self) -> str:
        return self.text


def rule_from_formula(f: Formula) -> Rule:
    """Turn K(premises -> conclusion) into a fireable rule.

    Premises are atoms, optionally boxed, joined by &.  The conclusion is
    an atom or a negated atom.  Every conclusion or box-bound variable
    must occur in some premise atom, so grounding on demand terminates.
    """
    text = print_formula(f)
    body = f.body if isinstance(f, Knowledge) else f
    if not isinstance(body, Implies):
        raise MalformedRule(f"rule must be an implication: {text}")

    premises: list[Premise] = []

    def gather(g: Formula):
        if isinstance(g, And):
            gather(g.left)
            gather(g.right)
        elif isinstance(g, Atom):
            premises.append(Premise(g))
        elif isinstance(g, Always) and isinstance(g.body, Atom):
            premises.append(Premise(g.body, (g.start, g.end)))
        else:
            raise MalformedRule(
                f"premise must be an atom, boxed atom, or conjunction: {print_formula(g)}"
            )

    gather(body.left)

    concl = body.right
    if isinstance(concl, Atom):
        conclusion, positive = concl, True
    elif isinstance(concl, Not) and isinstance(concl.body, Atom):
        conclusion, positive = concl.body, False
    else:
        raise MalformedRule(f"conclusion must be a literal: {print_formula(concl)}")

    bound = frozenset().union(*(free_vars(p.atom) for p in premises)) if premises else frozenset()
    needed = free_vars(conclusion)
    for p in premises:
        if p.box:
            needed |= p.box[0].vars() | p.box[1].vars()
    loose = needed - bound
    if loose:
        raise MalformedRule(f"unbound conclusion variables {sorted(loose)} in: {text}")
    return Rule(tuple(premises), conclusion, positive, text)


def _canonical_rule_key(rule: Rule) -> str:
    """Rule text with variables renamed in first-occurrence order."""
    names: dict[str, str] = {}

    def rename_te(te: TimeExpr) -> TimeExpr:
        if te.var is None:
            return te
        fresh = names.setdefault(te.var, f"V{len(names) + 1}")
        return TimeExpr(fresh, te.offset)

    def rename_atom(a: Atom) -> Atom:
        return Atom(
            a.pred,
            rename_te(a.start),
            rename_te(a.end),
            tuple(names.setdefault(x, f"V{len(names) + 1}") if is_var(x) else x for x in a.args),
        )

    parts = []
    for p in rule.premises:
        head = rename_atom(p.atom)
        if p.box:
            lo, hi = rename_te(p.box[0]), rename_te(p.box[1])
            parts.append(f"box[{lo},{hi}]{print_formula(head)}")
        else:
            parts.append(print_formula(head))
    concl = print_formula(rename_atom(rule.conclusion))
    if not rule.positive:
        concl = "~" + concl
    return " & ".join(parts) + " -> " + concl


# ---------------------------------------------------------------------------
# Trace events
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Perceived:
    literal: BeliefLit
    at: TimePoint


@dataclass(frozen=True)
class Fired:
    rule_index: int
    rule: str
    binding: tuple[tuple[str, Union[TimePoint, str]], ...]
    conclusion: BeliefLit


@dataclass(frozen=True)
class Restructured:
    removed: BeliefLit
    parts: tuple[BeliefLit, ...]


@dataclass(frozen=True)
class Conjoined:
    left: str
    right: str


TraceEvent = Union[Perceived, Fired, Restructured, Conjoined]

TRACE_SCHEMA_VERSION = 1


def _json_time(t: TimePoint):
    return "inf" if t == INF else t


def trace_records(trace: Sequence[TraceEvent]) -> list[dict]:
    """Serializable record stream: a schema header then one record per event."""
    records: list[dict] = [{"schema_version": TRACE_SCHEMA_VERSION}]
    for ev in trace:
        if isinstance(ev, Perceived):
            records.append(
                {"event": "perceived", "literal": str(ev.literal), "at": _json_time(ev.at)}
            )
        elif isinstance(ev, Fired):
            records.append(
                {
                    "event": "fired",
                    "rule_index": ev.rule_index,
                    "rule": ev.rule,
                    "binding": {k: _json_time(v) if is_time_point(v) else v for k, v in ev.binding},
                    "conclusion": str(ev.conclusion),
                }
            )
        elif isinstance(ev, Restructured):
            records.append(
                {
                    "event": "restructured",
                    "removed": str(ev.removed),
                    "parts": [str(p) for p in ev.parts],
                }
            )
        elif isinstance(ev, Conjoined):
            records.append({"event": "conjoined", "left": ev.left, "right": ev.right})
        else:
            raise TypeError(f"unknown trace event {ev!r}")
    return records


# ---------------------------------------------------------------------------
# Agent state and operations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AgentState:
    rules: tuple[Rule, ...] = ()
    wm: frozenset[BeliefLit] = frozenset()
    clock: TimePoint = 0
    trace: tuple[TraceEvent, ...] = ()
    fired: frozenset = frozenset()

    def wm_sorted(self) -> list[BeliefLit]:
        return sorted(self.wm, key=BeliefLit.key)

    def render_wm(self) -> str:
        return ", ".join(str(b) for b in self.wm_sorted())


def init(rules: Iterable[Union[Rule, Formula, str]]) -> AgentState:
    """Fresh agent: given long-term rules, empty working memory, clock 0."""
    converted = []
    for r in rules:
        if isinstance(r, Rule):
            converted.append(r)
        elif isinstance(r, str):
            converted.append(rule_from_formula(parse(r)))
        else:
            converted.append(rule_from_formula(r))
    return AgentState(rules=tuple(converted))


def _restructure(
    wm: frozenset[BeliefLit],
    trace: tuple[TraceEvent, ...],
    target: BeliefLit,
    denied: Interval,
) -> tuple[frozenset[BeliefLit], tuple[TraceEvent, ...]]:
    parts = tuple(
        _make_lit(target.atom.pred, target.atom.args, target.positive, p)
        for p in difference(target.interval(), denied)
    )
    wm = (wm - {target}) | frozenset(parts)
    return wm, trace + (Restructured(target, parts),)


def perceive(st: AgentState, lit: Union[Formula, BeliefLit], at: TimePoint) -> AgentState:
    """Record a perception as a belief, restructuring any directly
    contradicted opposite-polarity belief first; the clock moves to at."""
    belief = _as_literal(lit)
    if not (is_time_point(at) and at != INF):
        raise ValueError(f"perception time must be a finite natural, got {at!r}")
    if at < st.clock:
        raise ValueError(f"perception at {fmt_time(at)} is before the clock {fmt_time(st.clock)}")
    wm, trace = st.wm, st.trace
    span = belief.interval()
    for other in sorted(wm, key=BeliefLit.key):
        if (
            other.positive != belief.positive
            and other.atom.pred == belief.atom.pred
            and other.atom.args == belief.atom.args
            and not intersect(other.interval(), span).is_empty()
        ):
            wm, trace = _restructure(wm, trace, other, span)
    wm = _insert(wm, belief)
    trace = trace + (Perceived(belief, at),)
    return replace(st, wm=wm, clock=at, trace=trace)


def _binding_key(binding: dict):
    times = tuple(
        (k, binding[k]) for k in sorted(binding) if is_time_point(binding[k])
    )
    objs = tuple((k, binding[k]) for k in sorted(binding) if not is_time_point(binding[k]))
    return (tuple(v for _, v in times), tuple(v for _, v in objs), times + objs)


def _candidate_bindings(st: AgentState, rule: Rule) -> list[dict]:
    """All complete premise bindings, deterministically ordered.

    Variables bind by syntactic match against belief atoms; a premise that
    is already ground only needs a covering belief.  Box constraints are
    checked once the binding is complete.
    """
    positive_beliefs = sorted((b for b in st.wm if b.positive), key=BeliefLit.key)

    results: list[dict] = []

    def walk(i: int, binding: dict):
        if i == len(rule.premises):
            for p in rule.premises:
                if p.box:
                    try:
                        lo = p.box[0].eval(binding)
                        hi = p.box[1].eval(binding)
                        ground_atom = substitute(p.atom, binding)
                        if not subset(ground_atom.interval(), Interval(int(lo), hi)):
                            return
                    except (BadInterval, UnboundVariable):
                        return
            results.append(dict(binding))
            return
        try:
            pat = substitute(rule.premises[i].atom, binding)
        except BadInterval:
            return
        if pat.is_ground():
            if _covered(st.wm, pat, True):
                walk(i + 1, binding)
            return
        for b in positive_beliefs:
            m = match_atom(pat, b.atom)
            if m is not None:
                walk(i + 1, {**binding, **m})

    walk(0, {})
    unique = {tuple(sorted(r.items(), key=lambda kv: kv[0])): r for r in results}
    return [unique[k] for k in sorted(unique, key=lambda k: _binding_key(dict(k)))]


def infer_fixpoint(st: AgentState, budget: int = 10_000) -> AgentState:
    """Fire rules to a fixpoint.

    Deterministic strategy: rules in list order, bindings smallest first
    by time then lexicographically; after each firing the scan restarts at
    the first rule.  Each (rule, binding) instance fires at most once.  A
    negative conclusion restructures the covering belief when the denied
    span lies inside it; otherwise the instance stays dormant.  Raises
    BudgetExhausted after the given number of firings.
    """
    state = st
    firings = 0
    while True:
        progressed = False
        for ridx, rule in enumerate(state.rules):
            for binding in _candidate_bindings(state, rule):
                key = (ridx, tuple(sorted(binding.items(), key=lambda kv: kv[0])))
                if key in state.fired:
                    continue
                try:
                    concl = substitute(rule.conclusion, binding)
                except BadInterval:
                    continue
                lit = BeliefLit(concl, rule.positive)
                if rule.positive:
                    if _covered(state.wm, concl, True):
                        state = replace(state, fired=state.fired | {key})
                        continue
                    firings += 1
                    if firings > budget:
                        raise BudgetExhausted(f"gave up after {budget} firings")
                    wm = _insert(state.wm, lit)
                    trace = state.trace + (
                        Fired(ridx, rule.text, tuple(sorted(binding.items())), lit),
                    )
                    state = replace(
                        state, wm=wm, trace=trace, fired=state.fired | {key}
                    )
                    progressed = True
                    break
                denied = concl.interval()
                target = next(
                    (
                        b
                        for b in state.wm_sorted()
                        if b.positive
                        and b.atom.pred == concl.pred
                        and b.atom.args == concl.args
                        and subset(denied, b.interval())
                    ),
                    None,
                )
                if target is None:
                    continue
                firings += 1
                if firings > budget:
                    raise BudgetExhausted(f"gave up after {budget} firings")
                trace = state.trace + (
                    Fired(ridx, rule.text, tuple(sorted(binding.items())), lit),
                )
                wm, trace = _restructure(state.wm, trace, target, denied)
                state = replace(state, wm=wm, trace=trace, fired=state.fired | {key})
                progressed = True
                break
            if progressed:
                break
        if not progressed:
            return state


def revise(st: AgentState, p: Atom, q: Atom) -> AgentState:
    """Restructure the held belief q around the contradicting span of p."""
    target = next((b for b in st.wm if b.positive and b.atom == q), None)
    if target is None:
        raise NoSuchBelief(f"no belief {print_formula(q)} in working memory")
    if intersect(p.interval(), q.interval()).is_empty():
        raise ValueError(
            f"{print_formula(p)} does not overlap {print_formula(q)}; nothing to restructure"
        )
    wm, trace = _restructure(st.wm, st.trace, target, p.interval())
    return replace(st, wm=wm, trace=trace)


def conjoin(st: AgentState, left: Union[Formula, BeliefLit], right: Union[Formula, BeliefLit]) -> AgentState:
    """Record an explicit conjunction of two held beliefs."""
    a, b = _as_literal(left), _as_literal(right)
    for lit in (a, b):
        if not _covered(st.wm, lit.atom, lit.positive):
            raise NoSuchBelief(f"cannot conjoin: {lit} is not believed")
    return replace(st, trace=st.trace + (Conjoined(str(a), str(b)),))


def query(st: AgentState, f: Formula) -> bool:
    """Belief-base entailment: B over ground atoms uses interval coverage,
    K over a rule checks long-term membership up to variable renaming,
    booleans combine as usual."""
    if isinstance(f, Belief):
        if not isinstance(f.body, Atom):
            raise UnsupportedQuery(f"B supports ground atoms only: {print_formula(f)}")
        if not f.body.is_ground():
            raise NonGround(f"query needs a ground atom: {print_formula(f)}")
        return _covered(st.wm, f.body, True)
    if isinstance(f, Knowledge):
        try:
            wanted = _canonical_rule_key(rule_from_formula(f))
        except MalformedRule as exc:
            raise UnsupportedQuery(f"K supports rules only: {print_formula(f)}") from exc
        return any(_canonical_rule_key(r) == wanted for r in st.rules)
    if isinstance(f, Not):
        return not query(st, f.body)
    if isinstance(f, And):
        return query(st, f.left) and query(st, f.right)
    if isinstance(f, Or):
        return query(st, f.left) or query(st, f.right)
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    raise UnsupportedQuery(
        f"query supports B-atoms, K-rules, ~, &, |: {print_formula(f)} (use the model layer)"
    )


def to_model(st: AgentState, horizon: int) -> TLekModel:
    """Bridge to the semantic layer: one world whose valuation closes the
    positive beliefs under sub-intervals, truncated at the horizon, with
    the single neighbourhood element making exactly those beliefs true."""
    if horizon == INF or not is_time_point(horizon):
        raise ValueError("horizon must be a finite natural")
    atoms: set[Atom] = set()
    for b in st.wm:
        if not b.positive:
            continue
        iv = b.interval()
        hi = int(min(iv.hi, horizon))
        for a in range(iv.lo, hi + 1):
            for z in range(a, hi + 1):
                atoms.add(
                    Atom(b.atom.pred, TimeExpr.lit(a), TimeExpr.lit(z), b.atom.args)
                )
    world = World("w0", frozenset(atoms))
    nbhd = {"w0": [frozenset({"w0"})]} if atoms else {"w0": []}
    return TLekModel([world], [frozenset({"w0"})], nbhd)


def replay(rules: Iterable[Union[Rule, Formula, str]], trace: Sequence[TraceEvent]) -> AgentState:
    """Rebuild the final state mechanically from a recorded trace."""
    state = init(rules)
    wm: frozenset[BeliefLit] = state.wm
    clock: TimePoint = state.clock
    for ev in trace:
        if isinstance(ev, Perceived):
            wm = _insert(wm, ev.literal)
            clock = ev.at
        elif isinstance(ev, Fired):
            if ev.conclusion.positive:
                wm = _insert(wm, ev.conclusion)
        elif isinstance(ev, Restructured):
            wm = (wm - {ev.removed}) | frozenset(ev.parts)
        elif isinstance(ev, Conjoined):
            pass
        else:
            raise TypeError(f"unknown trace event {ev!r}")
    return replace(state, wm=wm, clock=clock, trace=tuple(trace))


# ---------------------------------------------------------------------------
# Scenario scripts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckOutcome:
    line: int
    query_text: str
    expected: bool
    actual: bool

    @property
    def ok(self) -> bool:
        return self.expected == self.actual


@dataclass
class ScenarioResult:
    state: AgentState
    queries: list[tuple[int, str, bool]] = field(default_factory=list)
    checks: list[CheckOutcome] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def run_scenario(text: str, budget: int = 10_000) -> ScenarioResult:
    """Execute a line-oriented scenario script.

    Directives: rule F / perceive LIT @ T / infer / query F / expect BOOL.
    Blank lines and # comments are ignored.  expect applies to the latest
    query; mismatches are collected, not raised.
    """
    state = init([])
    result = ScenarioResult(state)
    last_query: Optional[tuple[int, str, bool]] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if word == "rule":
                rule = rule_from_formula(parse(rest))
                state = replace(state, rules=state.rules + (rule,))
            elif word == "perceive":
                lit_text, sep, at_text = rest.partition("@")
                if not sep:
                    raise ScenarioError("perceive needs 'literal @ time'", lineno)
                at_text = at_text.strip()
                if not at_text.isdigit():
                    raise ScenarioError(f"bad perception time {at_text!r}", lineno)
                state = perceive(state, parse(lit_text.strip()), int(at_text))
            elif word == "infer":
                if rest:
                    raise ScenarioError("infer takes no argument", lineno)
                state = infer_fixpoint(state, budget=budget)
            elif word == "query":
                value = query(state, parse(rest))
                last_query = (lineno, rest, value)
                result.queries.append(last_query)
            elif word == "expect":
                if rest not in ("true", "false"):
                    raise ScenarioError(f"expect needs true or false, got {rest!r}", lineno)
                if last_query is None:
                    raise ScenarioError("expect without a preceding query", lineno)
                result.checks.append(
                    CheckOutcome(lineno, last_query[1], rest == "true", last_query[2])
                )
            else:
                raise ScenarioError(f"unknown directive {word!r}", lineno)
        except ScenarioError:
            raise
        except (FormulaSyntaxError, MalformedRule, ValueError, RuntimeError) as exc:
            raise ScenarioError(str(exc), lineno) from exc
    result.state = state
    return result


def run_scenario_file(path, budget: int = 10_000) -> ScenarioResult:
    with open(path, "r", encoding="utf-8") as fh:
        return run_scenario(fh.read(), budget=budget)


def trace_json_lines(trace: Sequence[TraceEvent]) -> str:
    return "\n".join(json.dumps(rec, sort_keys=True) for rec in trace_records(trace)) + "\n"
