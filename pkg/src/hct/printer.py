"""Pretty-printer producing ``.hct`` surface syntax that reparses to the same term."""

from __future__ import annotations

from typing import Iterable, Optional

from . import syntax as S
from .parser import RESERVED

TERM, SIGMA, APP, ATOM = 0, 1, 2, 3

_ATOMS = {
    S.Nat: "Nat", S.Zero: "zero", S.Bool: "Bool", S.TrueT: "true", S.FalseT: "false",
    S.Empty: "Empty", S.Unit: "Unit", S.Star: "star",
}

# primitive head and the attributes printed as its arguments
_PRIMS = [
    (S.Suc, "suc", ("pred",)),
    (S.NatElim, "natrec", ("motive", "zero_case", "suc_case", "scrutinee")),
    (S.BoolElim, "boolrec", ("motive", "true_case", "false_case", "scrutinee")),
    (S.SumElim, "sumrec", ("motive", "left_case", "right_case", "scrutinee")),
    (S.ExFalso, "exfalso", ("motive", "scrutinee")),
    (S.Fst, "fst", ("pair",)),
    (S.Snd, "snd", ("pair",)),
    (S.Id, "Id", ("type", "lhs", "rhs")),
    (S.Refl, "refl", ("type", "point")),
    (S.J, "J", ("type", "base", "motive", "refl_case", "endpoint", "path")),
    (S.Sum, "Sum", ("left", "right")),
    (S.Inl, "inl", ("value",)),
    (S.Inr, "inr", ("value",)),
    (S.Trunc, "Trunc", ("type",)),
    (S.Squash, "squash", ("value",)),
    (S.TruncElim, "truncrec", ("source", "target", "target_is_prop", "fn", "scrutinee")),
    (S.TruncProp, "truncprop", ("type", "lhs", "rhs")),
]
_PRIM_TABLE = {cls: (head, attrs) for cls, head, attrs in _PRIMS}


class Printer:
    def __init__(self, globals_: Iterable[str] = ()):
        self.globals = set(globals_)

    def fresh(self, hint: Optional[str], scope: list) -> str:
        base = hint if hint and hint != "_" else "x"
        base = base.rstrip("0123456789") or "x"
        taken = set(scope) | self.globals | RESERVED
        name = hint if hint and hint not in taken and hint != "_" else None
        if name is not None:
            return name
        i = 0
        while True:
            cand = base if i == 0 else f"{base}{i}"
            if cand not in taken:
                return cand
            i += 1

    def show(self, t: S.Term, scope: list, prec: int = TERM) -> str:
        s, p = self.render(t, scope)
        return f"({s})" if p < prec else s

    def render(self, t: S.Term, scope: list) -> tuple[str, int]:
        if isinstance(t, S.Var):
            if t.index >= len(scope):
                return f"#{t.index}", ATOM
            return scope[-1 - t.index], ATOM
        if isinstance(t, S.Def):
            return t.name, ATOM
        if isinstance(t, S.Universe):
            return f"U{t.level}", ATOM
        if type(t) in _ATOMS:
            return _ATOMS[type(t)], ATOM
        if isinstance(t, S.Lambda):
            x = self.fresh(t.name, scope)
            return f"fun {x} => {self.show(t.body, scope + [x])}", TERM
        if isinstance(t, S.Pi):
            if 0 in S.free_indices(t.codomain):
                x = self.fresh(t.name, scope)
                return f"({x} : {self.show(t.domain, scope)}) -> {self.show(t.codomain, scope + [x])}", TERM
            cod = self.show(S.shift(t.codomain, 0, -1), scope)
            return f"{self.show(t.domain, scope, SIGMA)} -> {cod}", TERM
        if isinstance(t, S.Sigma):
            if 0 in S.free_indices(t.second):
                x = self.fresh(t.name, scope)
                return f"({x} : {self.show(t.first, scope)}) * {self.show(t.second, scope + [x], SIGMA)}", SIGMA
            snd = self.show(S.shift(t.second, 0, -1), scope, SIGMA)
            return f"{self.show(t.first, scope, APP)} * {snd}", SIGMA
        if isinstance(t, S.Pair):
            return f"({self.show(t.fst, scope)}, {self.show(t.snd, scope)})", ATOM
        if isinstance(t, S.App):
            spine = []
            while isinstance(t, S.App):
                spine.append(t.arg)
                t = t.fn
            head = self.show(t, scope, ATOM)
            args = " ".join(self.show(a, scope, ATOM) for a in reversed(spine))
            return f"{head} {args}", APP
        if type(t) in _PRIM_TABLE:
            head, attrs = _PRIM_TABLE[type(t)]
            args = " ".join(self.show(getattr(t, a), scope, ATOM) for a in attrs)
            return f"{head} {args}", APP
        raise S.InternalError(f"cannot print {type(t).__name__}")


def pretty_print(term: S.Term, names: Optional[list] = None, globals_: Iterable[str] = ()) -> str:
    """Render ``term``; ``names`` are the binder names of the enclosing scope,
    outermost first."""
    p = Printer(globals_)
    scope: list = []
    for n in names or []:
        scope.append(p.fresh(n, scope))
    return p.show(term, scope)


def print_module(decls, globals_: Iterable[str] = ()) -> str:
    """Render resolved declarations (objects with name/type/body) as a file."""
    names = set(globals_) | {d.name for d in decls}
    p = Printer(names)
    chunks = []
    for d in decls:
        ty = p.show(d.type, [])
        if d.body is None:
            chunks.append(f"postulate {d.name} : {ty};\n")
        else:
            chunks.append(f"def {d.name} : {ty} :=\n  {p.show(d.body, [])};\n")
    return "\n".join(chunks)
