"""Core term language: nameless (de Bruijn) terms, shifting and substitution.

Binder names and source spans ride along on the nodes as hints; they are
excluded from equality, so ``==`` on terms is alpha-equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from typing import Callable, ClassVar, Iterator, Optional

MAX_LEVEL = 2


class InternalError(Exception):
    """A checker defect (scoping bug, ill-typed value reaching the evaluator)."""


@dataclass(frozen=True)
class SourceSpan:
    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __post_init__(self):
        if (self.start_line, self.start_col) > (self.end_line, self.end_col):
            raise ValueError("span start after span end")

    def __str__(self):
        return f"{self.file}:{self.start_line}:{self.start_col}"

    def to(self, other: "SourceSpan") -> "SourceSpan":
        return SourceSpan(self.file, self.start_line, self.start_col, other.end_line, other.end_col)


def _hint(default=None):
    return field(default=default, compare=False, repr=False)


@dataclass(frozen=True)
class Term:
    # subterm field name -> number of variables bound over it
    BINDS: ClassVar[dict] = {}

    def subterms(self) -> Iterator[tuple[str, "Term", int]]:
        for f in fields(self):
            if f.compare:
                v = getattr(self, f.name)
                if isinstance(v, Term):
                    yield f.name, v, self.BINDS.get(f.name, 0)

    def map(self, fn: Callable[["Term", int], "Term"]) -> "Term":
        """Rebuild the node with ``fn(subterm, binders_crossed)`` for each child."""
        changes = {name: fn(sub, k) for name, sub, k in self.subterms()}
        if not changes:
            return self
        return replace(self, **changes)


@dataclass(frozen=True)
class Var(Term):
    index: int
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class Universe(Term):
    level: int
    span: Optional[SourceSpan] = _hint()

    def __post_init__(self):
        if not 0 <= self.level <= MAX_LEVEL:
            raise ValueError(f"universe level {self.level} outside the tower")


@dataclass(frozen=True)
class Pi(Term):
    domain: Term
    codomain: Term
    name: Optional[str] = _hint()
    span: Optional[SourceSpan] = _hint()
    BINDS: ClassVar[dict] = {"codomain": 1}


@dataclass(frozen=True)
class Lambda(Term):
    body: Term
    name: Optional[str] = _hint()
    span: Optional[SourceSpan] = _hint()
    BINDS: ClassVar[dict] = {"body": 1}


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class Sigma(Term):
    first: Term
    second: Term
    name: Optional[str] = _hint()
    span: Optional[SourceSpan] = _hint()
    BINDS: ClassVar[dict] = {"second": 1}


@dataclass(frozen=True)
class Pair(Term):
    fst: Term
    snd: Term
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class Fst(Term):
    pair: Term
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class Snd(Term):
    pair: Term
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class Id(Term):
    type: Term
    lhs: Term
    rhs: Term
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class Refl(Term):
    type: Term
    point: Term
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class J(Term):
    type: Term
    base: Term
    motive: Term
    refl_case: Term
    endpoint: Term
    path: Term
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class Empty(Term):
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class ExFalso(Term):
    motive: Term
    scrutinee: Term
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class Unit(Term):
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class Star(Term):
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class Bool(Term):
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class TrueT(Term):
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class FalseT(Term):
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class BoolElim(Term):
    motive: Term
    true_case: Term
    false_case: Term
    scrutinee: Term
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class Sum(Term):
    left: Term
    right: Term
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class Inl(Term):
    value: Term
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class Inr(Term):
    value: Term
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class SumElim(Term):
    motive: Term
    left_case: Term
    right_case: Term
    scrutinee: Term
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class Nat(Term):
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class Zero(Term):
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class Suc(Term):
    pred: Term
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class NatElim(Term):
    motive: Term
    zero_case: Term
    suc_case: Term
    scrutinee: Term
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class Trunc(Term):
    type: Term
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class Squash(Term):
    value: Term
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class TruncElim(Term):
    source: Term
    target: Term
    target_is_prop: Term
    fn: Term
    scrutinee: Term
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class TruncProp(Term):
    """Any two elements of a truncation are equal (the truncation's path constructor)."""

    type: Term
    lhs: Term
    rhs: Term
    span: Optional[SourceSpan] = _hint()


@dataclass(frozen=True)
class Def(Term):
    name: str
    span: Optional[SourceSpan] = _hint()


def arrow(domain: Term, codomain: Term) -> Pi:
    """Non-dependent function type; ``codomain`` is given outside the binder."""
    return Pi(domain, shift(codomain, 0, 1))


def shift(term: Term, cutoff: int, amount: int) -> Term:
    if isinstance(term, Var):
        if term.index < cutoff:
            return term
        if term.index + amount < 0:
            raise InternalError(f"index underflow shifting Var {term.index} by {amount}")
        return Var(term.index + amount, span=term.span)
    return term.map(lambda sub, k: shift(sub, cutoff + k, amount))


def substitute(term: Term, index: int, replacement: Term) -> Term:
    """Replace free ``Var index`` by ``replacement``; free indices above it drop by one."""

    def go(t: Term, depth: int) -> Term:
        if isinstance(t, Var):
            if t.index == index + depth:
                return shift(replacement, 0, depth)
            if t.index > index + depth:
                return Var(t.index - 1, span=t.span)
            return t
        return t.map(lambda sub, k: go(sub, depth + k))

    return go(term, 0)


def alpha_equal(a: Term, b: Term) -> bool:
    return a == b


def free_indices(term: Term, depth: int = 0) -> set[int]:
    """Free de Bruijn indices of ``term``, relative to its outside."""
    if isinstance(term, Var):
        return {term.index - depth} if term.index >= depth else set()
    out: set[int] = set()
    for _, sub, k in term.subterms():
        out |= free_indices(sub, depth + k)
    return out


def is_closed(term: Term, context_length: int = 0) -> bool:
    return all(i < context_length for i in free_indices(term))


def global_refs(term: Term) -> Iterator[str]:
    if isinstance(term, Def):
        yield term.name
    for _, sub, _ in term.subterms():
        yield from global_refs(sub)
