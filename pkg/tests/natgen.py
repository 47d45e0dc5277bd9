"""Random closed well-typed terms and a naive substitution interpreter.

The interpreter shares nothing with the package's evaluator: it works on
syntax, substitutes closed values for variables, and reduces call-by-value.
"""

from __future__ import annotations

import random
from typing import Optional

from hct import syntax as S

# Simple types used by the generator.
NAT, BOOL = ("Nat",), ("Bool",)


def arrow_t(a, b):
    return ("->", a, b)


def prod_t(a, b):
    return ("*", a, b)


def sum_t(a, b):
    return ("+", a, b)


SMALL_TYPES = [NAT, BOOL, arrow_t(NAT, NAT), arrow_t(BOOL, NAT), prod_t(NAT, NAT), prod_t(NAT, BOOL),
               sum_t(NAT, BOOL), arrow_t(NAT, arrow_t(NAT, NAT))]


def type_term(t) -> S.Term:
    if t == NAT:
        return S.Nat()
    if t == BOOL:
        return S.Bool()
    a, b = type_term(t[1]), type_term(t[2])
    if t[0] == "->":
        return S.arrow(a, b)
    if t[0] == "*":
        return S.Sigma(a, S.shift(b, 0, 1))
    return S.Sum(a, b)


def nat_literal(n: int) -> S.Term:
    t: S.Term = S.Zero()
    for _ in range(n):
        t = S.Suc(t)
    return t


def annotate(t: S.Term, ty) -> S.Term:
    """Make an introduction form inferable: J at refl whose motive is ``ty``."""
    if not isinstance(t, (S.Lambda, S.Pair, S.Inl, S.Inr)):
        return t
    motive = S.Lambda(S.Lambda(S.shift(type_term(ty), 0, 2)))
    return S.J(S.Nat(), S.Zero(), motive, t, S.Zero(), S.Refl(S.Nat(), S.Zero()))


class Generator:
    """Typed generation: ``gen(ty, ctx, depth)`` returns a term of simple type
    ``ty`` whose free variables have the types listed in ``ctx`` (innermost
    last)."""

    def __init__(self, rng: random.Random):
        self.rng = rng

    def head(self, ty, ctx, depth) -> S.Term:
        """A term of type ``ty`` in elimination position (must be inferable)."""
        return annotate(self.gen(ty, ctx, depth), ty)

    def var(self, ty, ctx) -> Optional[S.Term]:
        hits = [i for i, t in enumerate(reversed(ctx)) if t == ty]
        return S.Var(self.rng.choice(hits)) if hits else None

    def gen(self, ty, ctx: tuple = (), depth: int = 10) -> S.Term:
        r = self.rng
        if depth <= 1 or r.random() < 0.15:
            v = self.var(ty, ctx)
            if v is not None and r.random() < 0.6:
                return v
            return self.leaf(ty, ctx)
        d = depth - 1
        if ty == NAT:
            k = r.randrange(9)
            if k == 0:
                return S.Suc(self.gen(NAT, ctx, d))
            if k == 1:
                # natrec with a small scrutinee keeps numbers small
                step = S.Lambda(S.Lambda(self.gen(NAT, ctx + (NAT, NAT), d)))
                return S.NatElim(S.Lambda(S.Nat()), self.gen(NAT, ctx, d), step, self.gen(NAT, ctx, min(d, 2)))
            if k == 2:
                return S.BoolElim(S.Lambda(S.Nat()), self.gen(NAT, ctx, d), self.gen(NAT, ctx, d), self.gen(BOOL, ctx, d))
            if k == 3:
                dom = r.choice([NAT, BOOL, prod_t(NAT, NAT)])
                return S.App(self.head(arrow_t(dom, NAT), ctx, d), self.gen(dom, ctx, d))
            if k == 4:
                other = r.choice([NAT, BOOL])
                p = self.head(prod_t(NAT, other), ctx, d)
                return S.Fst(p)
            if k == 5:
                return S.Snd(self.head(prod_t(NAT, NAT), ctx, d))
            if k == 6:
                s = self.head(sum_t(NAT, BOOL), ctx, d)
                left = S.Lambda(self.gen(NAT, ctx + (NAT,), d))
                right = S.Lambda(self.gen(NAT, ctx + (BOOL,), d))
                return S.SumElim(S.Lambda(S.Nat()), left, right, s)
            if k == 7:
                a = self.gen(NAT, ctx, min(d, 3))
                motive = S.Lambda(S.Lambda(S.Nat()))
                return S.J(S.Nat(), a, motive, self.gen(NAT, ctx, d), a, S.Refl(S.Nat(), a))
            return S.App(S.App(self.head(arrow_t(NAT, arrow_t(NAT, NAT)), ctx, d), self.gen(NAT, ctx, d)),
                         self.gen(NAT, ctx, d))
        if ty == BOOL:
            k = r.randrange(3)
            if k == 0:
                return S.BoolElim(S.Lambda(S.Bool()), self.gen(BOOL, ctx, d), self.gen(BOOL, ctx, d),
                                  self.gen(BOOL, ctx, d))
            if k == 1:
                return S.Snd(self.head(prod_t(NAT, BOOL), ctx, d))
            return self.leaf(BOOL, ctx)
        if ty[0] == "->":
            return S.Lambda(self.gen(ty[2], ctx + (ty[1],), d))
        if ty[0] == "*":
            return S.Pair(self.gen(ty[1], ctx, d), self.gen(ty[2], ctx, d))
        if r.random() < 0.5:
            return S.Inl(self.gen(ty[1], ctx, d))
        return S.Inr(self.gen(ty[2], ctx, d))

    def leaf(self, ty, ctx) -> S.Term:
        r = self.rng
        if ty == NAT:
            return nat_literal(r.randrange(4))
        if ty == BOOL:
            return r.choice([S.TrueT(), S.FalseT()])
        return self.gen(ty, ctx, 2)


def random_nat_term(rng: random.Random, depth: int = 10) -> S.Term:
    return Generator(rng).gen(NAT, (), depth)


def term_depth(t: S.Term) -> int:
    kids = [getattr(t, f) for f in _CHILDREN.get(type(t), ())]
    return 1 + max((term_depth(k) for k in kids), default=0)


# --- the naive interpreter -------------------------------------------------------

_CHILDREN = {
    S.Lambda: ("body",), S.App: ("fn", "arg"), S.Pi: ("domain", "codomain"), S.Sigma: ("first", "second"),
    S.Pair: ("fst", "snd"), S.Fst: ("pair",), S.Snd: ("pair",), S.Suc: ("pred",),
    S.NatElim: ("motive", "zero_case", "suc_case", "scrutinee"),
    S.BoolElim: ("motive", "true_case", "false_case", "scrutinee"),
    S.SumElim: ("motive", "left_case", "right_case", "scrutinee"),
    S.Sum: ("left", "right"), S.Inl: ("value",), S.Inr: ("value",),
    S.Refl: ("type", "point"), S.J: ("type", "base", "motive", "refl_case", "endpoint", "path"),
}
_BINDERS = {(S.Lambda, "body"): 1, (S.Pi, "codomain"): 1, (S.Sigma, "second"): 1}


def subst_closed(t: S.Term, k: int, v: S.Term) -> S.Term:
    """Replace Var k (under the binders crossed so far) by the closed term v."""
    if isinstance(t, S.Var):
        return v if t.index == k else t
    names = _CHILDREN.get(type(t))
    if not names:
        return t
    args = {n: subst_closed(getattr(t, n), k + _BINDERS.get((type(t), n), 0), v) for n in names}
    return type(t)(**args)


def run(t: S.Term) -> S.Term:
    """Evaluate a closed term to a canonical value, call-by-value."""
    if isinstance(t, (S.Zero, S.TrueT, S.FalseT, S.Lambda, S.Refl)):
        return t
    if isinstance(t, S.Suc):
        return S.Suc(run(t.pred))
    if isinstance(t, S.Pair):
        return S.Pair(run(t.fst), run(t.snd))
    if isinstance(t, S.Inl):
        return S.Inl(run(t.value))
    if isinstance(t, S.Inr):
        return S.Inr(run(t.value))
    if isinstance(t, S.App):
        f, a = run(t.fn), run(t.arg)
        assert isinstance(f, S.Lambda)
        return run(subst_closed(f.body, 0, a))
    if isinstance(t, S.Fst):
        return run(t.pair).fst
    if isinstance(t, S.Snd):
        return run(t.pair).snd
    if isinstance(t, S.BoolElim):
        b = run(t.scrutinee)
        return run(t.true_case if isinstance(b, S.TrueT) else t.false_case)
    if isinstance(t, S.SumElim):
        s = run(t.scrutinee)
        case = t.left_case if isinstance(s, S.Inl) else t.right_case
        return run(S.App(case, s.value))
    if isinstance(t, S.NatElim):
        n = to_int(run(t.scrutinee))
        acc = run(t.zero_case)
        for i in range(n):
            acc = run(S.App(S.App(t.suc_case, nat_literal(i)), acc))
        return acc
    if isinstance(t, S.J):
        assert isinstance(run(t.path), S.Refl)
        return run(t.refl_case)
    raise AssertionError(f"naive interpreter: unexpected {type(t).__name__}")


def to_int(v: S.Term) -> int:
    n = 0
    while isinstance(v, S.Suc):
        n, v = n + 1, v.pred
    assert isinstance(v, S.Zero)
    return n


def interpret_nat(t: S.Term) -> int:
    return to_int(run(t))
