"""Bidirectional type checker over the nbe semantic domain."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from . import nbe as N
from . import syntax as S
from .nbe import VPi, VSigma, VU, Value
from .syntax import SourceSpan


class KernelError(Exception):
    category = "KernelError"

    def __init__(self, message: str, span: Optional[SourceSpan] = None,
                 expected: Optional[str] = None, actual: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.span = span
        self.expected = expected
        self.actual = actual


class TypeMismatch(KernelError):
    category = "TypeMismatch"


class UniverseViolation(KernelError):
    category = "UniverseViolation"


class NotInferable(KernelError):
    category = "NotInferable"


class UnboundGlobal(KernelError):
    category = "UnboundGlobal"


class ArityError(KernelError):
    category = "ArityError"


class DuplicateName(KernelError):
    category = "DuplicateName"


# --- global scope -------------------------------------------------------------


@dataclass(frozen=True)
class GlobalEntry:
    name: str
    type_term: S.Term
    type_value: Value
    body_term: Optional[S.Term]
    value: Optional[Value]
    origin: Optional[SourceSpan] = None

    @property
    def is_postulate(self) -> bool:
        return self.body_term is None


@dataclass(frozen=True)
class CheckedModule:
    """Insertion-ordered map of checked globals; extension returns a new module."""

    entries: dict = field(default_factory=dict)

    def __contains__(self, name):
        return name in self.entries

    def __getitem__(self, name) -> GlobalEntry:
        return self.entries[name]

    def __iter__(self):
        return iter(self.entries.values())

    def __len__(self):
        return len(self.entries)

    def names(self):
        return list(self.entries)

    @property
    def postulate_count(self) -> int:
        return sum(1 for e in self.entries.values() if e.is_postulate)

    def extend(self, entry: GlobalEntry) -> "CheckedModule":
        entries = dict(self.entries)
        entries[entry.name] = entry
        return CheckedModule(entries)

    def merge(self, other: "CheckedModule") -> "CheckedModule":
        entries = dict(self.entries)
        for e in other:
            entries.setdefault(e.name, e)
        return CheckedModule(entries)


# --- local context --------------------------------------------------------------


@dataclass(frozen=True)
class Context:
    names: tuple = ()
    types: tuple = ()
    env: tuple = ()

    def __len__(self):
        return len(self.env)

    def bind(self, name: Optional[str], type: Value) -> "Context":
        var = N.fresh(len(self.env), type)
        return Context(self.names + (name,), self.types + (type,), self.env + (var,))

    @property
    def last(self) -> Value:
        return self.env[-1]


class Checker:
    def __init__(self, module: CheckedModule):
        self.module = module
        self.globals = module.entries

    # helpers

    def eval(self, ctx: Context, t: S.Term) -> Value:
        return N.evaluate(ctx.env, t, self.globals)

    def quote_type(self, ctx: Context, T: Value) -> S.Term:
        return N.readback_type(len(ctx), T)

    def show(self, ctx: Context, T: Value) -> str:
        from .printer import pretty_print

        return pretty_print(self.quote_type(ctx, T), list(ctx.names), set(self.globals))

    def conv_types(self, ctx: Context, A: Value, B: Value) -> bool:
        return N.conv_type(len(ctx), A, B)

    def convert(self, ctx: Context, a: Value, b: Value, at: Value) -> bool:
        return N.conv(len(ctx), a, b, at)

    def mismatch(self, ctx, term, expected: Value, actual: Value, what=""):
        cls = UniverseViolation if isinstance(expected, VU) and isinstance(actual, VU) else TypeMismatch
        exp, act = self.show(ctx, expected), self.show(ctx, actual)
        msg = f"{cls.category}{': ' + what if what else ''}: expected {exp}, got {act}"
        return cls(msg, getattr(term, "span", None), exp, act)

    # judgments

    def check_type(self, ctx: Context, t: S.Term) -> int:
        """Check that ``t`` is a type; returns its level (3 for types too large
        to inhabit any universe, such as ``U2`` itself)."""
        if isinstance(t, S.Universe):
            return t.level + 1
        if isinstance(t, S.Pi):
            i = self.check_type(ctx, t.domain)
            j = self.check_type(ctx.bind(t.name, self.eval(ctx, t.domain)), t.codomain)
            return max(i, j)
        if isinstance(t, S.Sigma):
            i = self.check_type(ctx, t.first)
            j = self.check_type(ctx.bind(t.name, self.eval(ctx, t.first)), t.second)
            return max(i, j)
        return self.infer_universe(ctx, t)

    def infer_universe(self, ctx: Context, t: S.Term) -> int:
        T = self.infer(ctx, t)
        if not isinstance(T, VU):
            raise TypeMismatch(f"TypeMismatch: expected a type, got an element of {self.show(ctx, T)}",
                               t.span, "a universe", self.show(ctx, T))
        return T.level

    def check_family(self, ctx: Context, t: S.Term, domains) -> int:
        """Check a type family over ``domains`` (see ``nbe.readback_family``);
        returns the level of its values."""
        xs = []
        for dom in domains:
            A = dom(xs)
            if isinstance(t, S.Lambda):
                ctx = ctx.bind(t.name, A)
                t = t.body
            else:
                ctx = ctx.bind(None, A)
                t = S.App(S.shift(t, 0, 1), S.Var(0), span=t.span)
            xs.append(ctx.last)
        level = self.check_type(ctx, t)
        if level > S.MAX_LEVEL:
            raise UniverseViolation("UniverseViolation: motive lands outside the universe tower", t.span)
        return level

    def check(self, ctx: Context, t: S.Term, expected: Value) -> None:
        if isinstance(t, S.Lambda):
            if not isinstance(expected, VPi):
                raise TypeMismatch(f"TypeMismatch: function where {self.show(ctx, expected)} was expected",
                                   t.span, self.show(ctx, expected), "a function")
            inner = ctx.bind(t.name, expected.domain)
            self.check(inner, t.body, expected.codomain(inner.last))
            return
        if isinstance(t, S.Pair):
            if not isinstance(expected, VSigma):
                raise TypeMismatch(f"TypeMismatch: pair where {self.show(ctx, expected)} was expected",
                                   t.span, self.show(ctx, expected), "a pair")
            self.check(ctx, t.fst, expected.first)
            self.check(ctx, t.snd, expected.second(self.eval(ctx, t.fst)))
            return
        if isinstance(t, (S.Inl, S.Inr)):
            if not isinstance(expected, N.VSum):
                raise TypeMismatch(f"TypeMismatch: injection where {self.show(ctx, expected)} was expected",
                                   t.span, self.show(ctx, expected), "an injection")
            side = expected.left if isinstance(t, S.Inl) else expected.right
            self.check(ctx, t.value, side)
            return
        if isinstance(t, S.Squash):
            if not isinstance(expected, N.VTrunc):
                raise TypeMismatch(f"TypeMismatch: squash where {self.show(ctx, expected)} was expected",
                                   t.span, self.show(ctx, expected), "a truncation")
            self.check(ctx, t.value, expected.type)
            return
        actual = self.infer(ctx, t)
        if not self.conv_types(ctx, actual, expected):
            raise self.mismatch(ctx, t, expected, actual)

    def infer(self, ctx: Context, t: S.Term) -> Value:
        ev = lambda u: self.eval(ctx, u)  # noqa: E731
        if isinstance(t, S.Var):
            return ctx.types[-1 - t.index]
        if isinstance(t, S.Universe):
            if t.level >= S.MAX_LEVEL:
                raise UniverseViolation(f"UniverseViolation: U{t.level} has no type in the tower", t.span)
            return VU(t.level + 1)
        if isinstance(t, (S.Pi, S.Sigma)):
            dom = t.domain if isinstance(t, S.Pi) else t.first
            cod = t.codomain if isinstance(t, S.Pi) else t.second
            i = self.infer_universe(ctx, dom)
            j = self.infer_universe(ctx.bind(t.name, ev(dom)), cod)
            return VU(max(i, j))
        if isinstance(t, S.Sum):
            return VU(max(self.infer_universe(ctx, t.left), self.infer_universe(ctx, t.right)))
        if isinstance(t, S.Trunc):
            return VU(self.infer_universe(ctx, t.type))
        if isinstance(t, S.Id):
            i = self.infer_universe(ctx, t.type)
            A = ev(t.type)
            self.check(ctx, t.lhs, A)
            self.check(ctx, t.rhs, A)
            return VU(i)
        if isinstance(t, (S.Nat, S.Bool, S.Unit, S.Empty)):
            return VU(0)
        if isinstance(t, S.Zero):
            return N.VNAT
        if isinstance(t, (S.TrueT, S.FalseT)):
            return N.VBOOL
        if isinstance(t, S.Star):
            return N.VUNIT
        if isinstance(t, S.Suc):
            self.check(ctx, t.pred, N.VNAT)
            return N.VNAT
        if isinstance(t, S.Def):
            entry = self.globals.get(t.name)
            if entry is None:
                raise UnboundGlobal(f"UnboundGlobal: {t.name}", t.span)
            return entry.type_value
        if isinstance(t, S.App):
            F = self.infer(ctx, t.fn)
            if not isinstance(F, VPi):
                raise TypeMismatch(f"TypeMismatch: applying a non-function of type {self.show(ctx, F)}",
                                   t.fn.span or t.span, "a function type", self.show(ctx, F))
            self.check(ctx, t.arg, F.domain)
            return F.codomain(ev(t.arg))
        if isinstance(t, (S.Fst, S.Snd)):
            P = self.infer(ctx, t.pair)
            if not isinstance(P, VSigma):
                raise TypeMismatch(f"TypeMismatch: projecting from a non-pair of type {self.show(ctx, P)}",
                                   t.pair.span or t.span, "a sigma type", self.show(ctx, P))
            if isinstance(t, S.Fst):
                return P.first
            return P.second(N.vfst(ev(t.pair)))
        if isinstance(t, S.Refl):
            self.infer_universe(ctx, t.type)
            A = ev(t.type)
            self.check(ctx, t.point, A)
            a = ev(t.point)
            return N.VId(A, a, a)
        if isinstance(t, S.J):
            self.infer_universe(ctx, t.type)
            A = ev(t.type)
            self.check(ctx, t.base, A)
            a = ev(t.base)
            self.check_family(ctx, t.motive, N.j_motive_domains(A, a))
            C = ev(t.motive)
            self.check(ctx, t.refl_case, N.apply_all(C, a, N.VRefl(A, a)))
            self.check(ctx, t.endpoint, A)
            b = ev(t.endpoint)
            self.check(ctx, t.path, N.VId(A, a, b))
            return N.apply_all(C, b, ev(t.path))
        if isinstance(t, S.ExFalso):
            self.check_type(ctx, t.motive)
            self.check(ctx, t.scrutinee, N.VEMPTY)
            return ev(t.motive)
        if isinstance(t, S.BoolElim):
            self.check_family(ctx, t.motive, [lambda vs: N.VBOOL])
            P = ev(t.motive)
            self.check(ctx, t.true_case, N.apply(P, N.VTRUE))
            self.check(ctx, t.false_case, N.apply(P, N.VFALSE))
            self.check(ctx, t.scrutinee, N.VBOOL)
            return N.apply(P, ev(t.scrutinee))
        if isinstance(t, S.NatElim):
            self.check_family(ctx, t.motive, [lambda vs: N.VNAT])
            P = ev(t.motive)
            self.check(ctx, t.zero_case, N.apply(P, N.VZERO))
            self.check(ctx, t.suc_case, N.natrec_step_type(P))
            self.check(ctx, t.scrutinee, N.VNAT)
            return N.apply(P, ev(t.scrutinee))
        if isinstance(t, S.SumElim):
            T = self.infer(ctx, t.scrutinee)
            if not isinstance(T, N.VSum):
                raise TypeMismatch(f"TypeMismatch: sumrec on a non-sum of type {self.show(ctx, T)}",
                                   t.scrutinee.span or t.span, "a sum type", self.show(ctx, T))
            self.check_family(ctx, t.motive, [lambda vs: T])
            P = ev(t.motive)
            self.check(ctx, t.left_case, N.sum_case_type(T.left, P, N.VInl))
            self.check(ctx, t.right_case, N.sum_case_type(T.right, P, N.VInr))
            return N.apply(P, ev(t.scrutinee))
        if isinstance(t, S.TruncElim):
            self.infer_universe(ctx, t.source)
            self.infer_universe(ctx, t.target)
            A, B = ev(t.source), ev(t.target)
            try:
                self.check(ctx, t.target_is_prop, N.is_prop_type(B))
            except TypeMismatch as err:
                detail = err.message.removeprefix("TypeMismatch: ")
                raise TypeMismatch(f"TypeMismatch: truncrec is-prop argument: {detail}",
                                   err.span or t.target_is_prop.span, err.expected, err.actual) from None
            self.check(ctx, t.fn, N.arrow_v(A, B))
            self.check(ctx, t.scrutinee, N.VTrunc(A))
            return B
        if isinstance(t, S.TruncProp):
            self.infer_universe(ctx, t.type)
            TA = N.VTrunc(ev(t.type))
            self.check(ctx, t.lhs, TA)
            self.check(ctx, t.rhs, TA)
            return N.VId(TA, ev(t.lhs), ev(t.rhs))
        if isinstance(t, (S.Lambda, S.Pair, S.Inl, S.Inr, S.Squash)):
            kind = type(t).__name__.lower()
            raise NotInferable(f"NotInferable: cannot infer the type of a bare {kind}; "
                               "use it where its type is known", t.span)
        raise S.InternalError(f"infer: unexpected {type(t).__name__}")


# --- module-level API -------------------------------------------------------------


def infer(ctx: Context, module: CheckedModule, term: S.Term) -> Value:
    return Checker(module).infer(ctx, term)


def check(ctx: Context, module: CheckedModule, term: S.Term, expected: Value) -> None:
    Checker(module).check(ctx, term, expected)


def convert(ctx: Context, a: Value, b: Value, at: Value) -> bool:
    return Checker(CheckedModule()).convert(ctx, a, b, at)


def check_declaration(module: CheckedModule, name: str, type_term: S.Term,
                      body_term: Optional[S.Term], span: Optional[SourceSpan] = None) -> CheckedModule:
    """Check one declaration (a postulate when ``body_term`` is None) and
    return the extended module. Errors without a span get ``span``."""
    try:
        if name in module:
            raise DuplicateName(f"DuplicateName: {name} is already defined", span)
        ck = Checker(module)
        ctx = Context()
        ck.check_type(ctx, type_term)
        T = ck.eval(ctx, type_term)
        value = None
        if body_term is not None:
            ck.check(ctx, body_term, T)
            value = ck.eval(ctx, body_term)
    except KernelError as err:
        if err.span is None:
            err.span = span
        raise
    return module.extend(GlobalEntry(name, type_term, T, body_term, value, span))


def normalize(module: CheckedModule, term: S.Term, type: S.Term) -> S.Term:
    return N.normalize(module, term, type)


def normalize_entry(module: CheckedModule, name: str) -> S.Term:
    e = module[name]
    if e.is_postulate:
        return S.Def(name)
    return N.readback(0, e.value, e.type_value)


def check_closed(module: CheckedModule, term: S.Term, type_term: S.Term) -> None:
    ck = Checker(module)
    ck.check_type(Context(), type_term)
    ck.check(Context(), term, ck.eval(Context(), type_term))
