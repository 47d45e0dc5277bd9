"""Normalization by evaluation.

Terms evaluate into a semantic domain of closures and neutrals; ``readback``
is type-directed and produces beta-normal, eta-long terms (eta for Pi, Sigma
and Unit). Neutral heads record their own types so that readback of a stuck
spine can recover the types of its arguments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence, Union

from . import syntax as S
from .syntax import InternalError


# --- values -----------------------------------------------------------------


class Value:
    __slots__ = ()


class Closure:
    """An open term paired with the environment it was evaluated in."""

    __slots__ = ("globals", "env", "body")

    def __init__(self, globals, env: tuple, body: S.Term):
        self.globals = globals
        self.env = env
        self.body = body

    def __call__(self, arg: Value) -> Value:
        return _ev(self.env + (arg,), self.body, self.globals)


class HostClosure:
    """A binder body given directly as a Python function on values."""

    __slots__ = ("fn",)

    def __init__(self, fn: Callable[[Value], Value]):
        self.fn = fn

    def __call__(self, arg: Value) -> Value:
        return self.fn(arg)


AnyClosure = Union[Closure, HostClosure]


def const(v: Value) -> HostClosure:
    return HostClosure(lambda _: v)


@dataclass(frozen=True, eq=False)
class VU(Value):
    level: int


@dataclass(frozen=True, eq=False)
class VPi(Value):
    domain: Value
    codomain: AnyClosure
    name: Optional[str] = None


@dataclass(frozen=True, eq=False)
class VLam(Value):
    body: AnyClosure
    name: Optional[str] = None


@dataclass(frozen=True, eq=False)
class VSigma(Value):
    first: Value
    second: AnyClosure
    name: Optional[str] = None


@dataclass(frozen=True, eq=False)
class VPair(Value):
    fst: Value
    snd: Value


@dataclass(frozen=True, eq=False)
class VId(Value):
    type: Value
    lhs: Value
    rhs: Value


@dataclass(frozen=True, eq=False)
class VRefl(Value):
    type: Value
    point: Value


@dataclass(frozen=True, eq=False)
class VSum(Value):
    left: Value
    right: Value


@dataclass(frozen=True, eq=False)
class VInl(Value):
    value: Value


@dataclass(frozen=True, eq=False)
class VInr(Value):
    value: Value


@dataclass(frozen=True, eq=False)
class VSuc(Value):
    pred: Value


@dataclass(frozen=True, eq=False)
class VTrunc(Value):
    type: Value


@dataclass(frozen=True, eq=False)
class VSquash(Value):
    value: Value


@dataclass(frozen=True, eq=False)
class VAtom(Value):
    """Nullary canonical forms: Nat, zero, Bool, true, false, Unit, star, Empty."""

    kind: str


VNAT, VZERO = VAtom("Nat"), VAtom("zero")
VBOOL, VTRUE, VFALSE = VAtom("Bool"), VAtom("true"), VAtom("false")
VUNIT, VSTAR, VEMPTY = VAtom("Unit"), VAtom("star"), VAtom("Empty")


# --- neutrals -----------------------------------------------------------------


class Neutral:
    __slots__ = ()


@dataclass(frozen=True, eq=False)
class NVar(Neutral):
    level: int
    type: Value


@dataclass(frozen=True, eq=False)
class NGlobal(Neutral):
    """A postulate: a global constant without a body."""

    name: str
    type: Value


@dataclass(frozen=True, eq=False)
class NTruncProp(Neutral):
    type: Value
    lhs: Value
    rhs: Value


@dataclass(frozen=True, eq=False)
class NApp(Neutral):
    fn: Neutral
    arg: Value


@dataclass(frozen=True, eq=False)
class NFst(Neutral):
    pair: Neutral


@dataclass(frozen=True, eq=False)
class NSnd(Neutral):
    pair: Neutral


@dataclass(frozen=True, eq=False)
class NJ(Neutral):
    type: Value
    base: Value
    motive: Value
    refl_case: Value
    endpoint: Value
    path: Neutral


@dataclass(frozen=True, eq=False)
class NExFalso(Neutral):
    motive: Value
    scrutinee: Neutral


@dataclass(frozen=True, eq=False)
class NBoolElim(Neutral):
    motive: Value
    true_case: Value
    false_case: Value
    scrutinee: Neutral


@dataclass(frozen=True, eq=False)
class NSumElim(Neutral):
    motive: Value
    left_case: Value
    right_case: Value
    scrutinee: Neutral


@dataclass(frozen=True, eq=False)
class NNatElim(Neutral):
    motive: Value
    zero_case: Value
    suc_case: Value
    scrutinee: Neutral


@dataclass(frozen=True, eq=False)
class NTruncElim(Neutral):
    source: Value
    target: Value
    target_is_prop: Value
    fn: Value
    scrutinee: Neutral


@dataclass(frozen=True, eq=False)
class VNeu(Value):
    neutral: Neutral


def fresh(level: int, type: Value) -> Value:
    return VNeu(NVar(level, type))


# --- eliminators on values ------------------------------------------------------


def apply(fn: Value, arg: Value) -> Value:
    if isinstance(fn, VLam):
        return fn.body(arg)
    if isinstance(fn, VNeu):
        return VNeu(NApp(fn.neutral, arg))
    raise InternalError(f"applying a non-function value {type(fn).__name__}")


def apply_all(fn: Value, *args: Value) -> Value:
    for a in args:
        fn = apply(fn, a)
    return fn


def vfst(v: Value) -> Value:
    if isinstance(v, VPair):
        return v.fst
    if isinstance(v, VNeu):
        return VNeu(NFst(v.neutral))
    raise InternalError("first projection of a non-pair")


def vsnd(v: Value) -> Value:
    if isinstance(v, VPair):
        return v.snd
    if isinstance(v, VNeu):
        return VNeu(NSnd(v.neutral))
    raise InternalError("second projection of a non-pair")


def vj(A, a, C, c, b, p) -> Value:
    if isinstance(p, VRefl):
        return c
    if isinstance(p, VNeu):
        return VNeu(NJ(A, a, C, c, b, p.neutral))
    raise InternalError("J on a non-path value")


def vexfalso(C, e) -> Value:
    if isinstance(e, VNeu):
        return VNeu(NExFalso(C, e.neutral))
    raise InternalError("exfalso on a canonical value")


def vboolrec(P, t, f, b) -> Value:
    if b is VTRUE:
        return t
    if b is VFALSE:
        return f
    if isinstance(b, VNeu):
        return VNeu(NBoolElim(P, t, f, b.neutral))
    raise InternalError("boolrec on a non-boolean")


def vsumrec(P, l, r, s) -> Value:
    if isinstance(s, VInl):
        return apply(l, s.value)
    if isinstance(s, VInr):
        return apply(r, s.value)
    if isinstance(s, VNeu):
        return VNeu(NSumElim(P, l, r, s.neutral))
    raise InternalError("sumrec on a non-sum")


def vnatrec(P, z, s, n) -> Value:
    # iterate to keep deep numerals off the Python stack
    preds = []
    while isinstance(n, VSuc):
        preds.append(n.pred)
        n = n.pred
    if n is VZERO:
        acc = z
    elif isinstance(n, VNeu):
        acc = VNeu(NNatElim(P, z, s, n.neutral))
    else:
        raise InternalError("natrec on a non-numeral")
    for m in reversed(preds):
        acc = apply(apply(s, m), acc)
    return acc


def vtruncrec(A, B, prf, f, t) -> Value:
    if isinstance(t, VSquash):
        return apply(f, t.value)
    if isinstance(t, VNeu):
        return VNeu(NTruncElim(A, B, prf, f, t.neutral))
    raise InternalError("truncrec on a non-truncation")


# --- evaluation ----------------------------------------------------------------

_ATOMS = {
    S.Nat: VNAT, S.Zero: VZERO, S.Bool: VBOOL, S.TrueT: VTRUE,
    S.FalseT: VFALSE, S.Unit: VUNIT, S.Star: VSTAR, S.Empty: VEMPTY,
}


def evaluate(env: Sequence[Value], term: S.Term, globals: Optional[Mapping] = None) -> Value:
    """Evaluate ``term`` under ``env`` (innermost binding last).

    ``globals`` maps global names to objects with ``value`` (None for a
    postulate) and ``type_value`` attributes.
    """
    if not isinstance(env, tuple):
        env = tuple(env)
    return _ev(env, term, globals)


def _ev(env: tuple, t: S.Term, g) -> Value:
    rule = _RULES.get(t.__class__)
    if rule is None:
        raise InternalError(f"cannot evaluate {type(t).__name__}")
    return rule(env, t, g)


def _ev_var(env, t, g):
    try:
        return env[-1 - t.index]
    except IndexError:
        raise InternalError(f"unbound index {t.index} at depth {len(env)}") from None


def _ev_def(env, t, g):
    entry = g.get(t.name) if g is not None else None
    if entry is None:
        raise InternalError(f"unknown global {t.name}")
    if entry.value is None:
        return VNeu(NGlobal(t.name, entry.type_value))
    return entry.value


_RULES: dict = {
    S.Var: _ev_var,
    S.Def: _ev_def,
    S.Universe: lambda env, t, g: VU(t.level),
    S.Pi: lambda env, t, g: VPi(_ev(env, t.domain, g), Closure(g, env, t.codomain), t.name),
    S.Lambda: lambda env, t, g: VLam(Closure(g, env, t.body), t.name),
    S.App: lambda env, t, g: apply(_ev(env, t.fn, g), _ev(env, t.arg, g)),
    S.Sigma: lambda env, t, g: VSigma(_ev(env, t.first, g), Closure(g, env, t.second), t.name),
    S.Pair: lambda env, t, g: VPair(_ev(env, t.fst, g), _ev(env, t.snd, g)),
    S.Fst: lambda env, t, g: vfst(_ev(env, t.pair, g)),
    S.Snd: lambda env, t, g: vsnd(_ev(env, t.pair, g)),
    S.Id: lambda env, t, g: VId(_ev(env, t.type, g), _ev(env, t.lhs, g), _ev(env, t.rhs, g)),
    S.Refl: lambda env, t, g: VRefl(_ev(env, t.type, g), _ev(env, t.point, g)),
    S.J: lambda env, t, g: vj(_ev(env, t.type, g), _ev(env, t.base, g), _ev(env, t.motive, g),
                              _ev(env, t.refl_case, g), _ev(env, t.endpoint, g), _ev(env, t.path, g)),
    S.ExFalso: lambda env, t, g: vexfalso(_ev(env, t.motive, g), _ev(env, t.scrutinee, g)),
    S.BoolElim: lambda env, t, g: vboolrec(_ev(env, t.motive, g), _ev(env, t.true_case, g),
                                           _ev(env, t.false_case, g), _ev(env, t.scrutinee, g)),
    S.Sum: lambda env, t, g: VSum(_ev(env, t.left, g), _ev(env, t.right, g)),
    S.Inl: lambda env, t, g: VInl(_ev(env, t.value, g)),
    S.Inr: lambda env, t, g: VInr(_ev(env, t.value, g)),
    S.SumElim: lambda env, t, g: vsumrec(_ev(env, t.motive, g), _ev(env, t.left_case, g),
                                         _ev(env, t.right_case, g), _ev(env, t.scrutinee, g)),
    S.Suc: lambda env, t, g: VSuc(_ev(env, t.pred, g)),
    S.NatElim: lambda env, t, g: vnatrec(_ev(env, t.motive, g), _ev(env, t.zero_case, g),
                                         _ev(env, t.suc_case, g), _ev(env, t.scrutinee, g)),
    S.Trunc: lambda env, t, g: VTrunc(_ev(env, t.type, g)),
    S.Squash: lambda env, t, g: VSquash(_ev(env, t.value, g)),
    S.TruncElim: lambda env, t, g: vtruncrec(_ev(env, t.source, g), _ev(env, t.target, g),
                                             _ev(env, t.target_is_prop, g), _ev(env, t.fn, g),
                                             _ev(env, t.scrutinee, g)),
    S.TruncProp: lambda env, t, g: VNeu(NTruncProp(_ev(env, t.type, g), _ev(env, t.lhs, g), _ev(env, t.rhs, g))),
}
for _cls, _atom in _ATOMS.items():
    _RULES[_cls] = lambda env, t, g, _atom=_atom: _atom


# --- types of eliminator pieces, as values -------------------------------------


def arrow_v(a: Value, b: Value) -> VPi:
    return VPi(a, const(b))


def is_prop_type(B: Value) -> VPi:
    """(x : B) -> (y : B) -> Id B x y"""
    return VPi(B, HostClosure(lambda x: VPi(B, HostClosure(lambda y: VId(B, x, y)))))


def natrec_step_type(P: Value) -> VPi:
    """(k : Nat) -> P k -> P (suc k)"""
    return VPi(VNAT, HostClosure(lambda k: arrow_v(apply(P, k), apply(P, VSuc(k)))))


def sum_case_type(dom: Value, P: Value, inj) -> VPi:
    return VPi(dom, HostClosure(lambda a: apply(P, inj(a))))


def j_motive_domains(A: Value, a: Value):
    return [lambda vs: A, lambda vs: VId(A, a, vs[0])]


# --- readback ------------------------------------------------------------------


def readback(depth: int, value: Value, type: Value) -> S.Term:
    """Read ``value`` at ``type`` back to a beta-normal eta-long term."""
    if isinstance(type, VPi):
        x = fresh(depth, type.domain)
        body = readback(depth + 1, apply(value, x), type.codomain(x))
        return S.Lambda(body, name=_name_of(value, type))
    if isinstance(type, VSigma):
        a = vfst(value)
        return S.Pair(readback(depth, a, type.first), readback(depth, vsnd(value), type.second(a)))
    if type is VUNIT:
        return S.Star()
    if isinstance(type, VU):
        return readback_type(depth, value)
    if isinstance(value, VNeu):
        return readback_neutral(depth, value.neutral)[0]
    if isinstance(value, VAtom):
        return _atom_term(value)
    if isinstance(value, VSuc):
        n, v = 1, value.pred
        while isinstance(v, VSuc):
            n, v = n + 1, v.pred
        t = readback(depth, v, VNAT)
        for _ in range(n):
            t = S.Suc(t)
        return t
    if isinstance(type, VId) and isinstance(value, VRefl):
        return S.Refl(readback_type(depth, type.type), readback(depth, value.point, type.type))
    if isinstance(type, VSum):
        if isinstance(value, VInl):
            return S.Inl(readback(depth, value.value, type.left))
        if isinstance(value, VInr):
            return S.Inr(readback(depth, value.value, type.right))
    if isinstance(type, VTrunc) and isinstance(value, VSquash):
        return S.Squash(readback(depth, value.value, type.type))
    raise InternalError(f"cannot read back {type_name(value)} at {type_name(type)}")


def type_name(v) -> str:
    return v.kind if isinstance(v, VAtom) else type(v).__name__


def _name_of(value, type) -> Optional[str]:
    if isinstance(value, VLam) and value.name:
        return value.name
    return type.name


def _atom_term(v: VAtom) -> S.Term:
    return {
        "Nat": S.Nat, "zero": S.Zero, "Bool": S.Bool, "true": S.TrueT, "false": S.FalseT,
        "Unit": S.Unit, "star": S.Star, "Empty": S.Empty,
    }[v.kind]()


def readback_type(depth: int, T: Value) -> S.Term:
    if isinstance(T, VU):
        return S.Universe(T.level)
    if isinstance(T, VPi):
        x = fresh(depth, T.domain)
        return S.Pi(readback_type(depth, T.domain), readback_type(depth + 1, T.codomain(x)), name=T.name)
    if isinstance(T, VSigma):
        x = fresh(depth, T.first)
        return S.Sigma(readback_type(depth, T.first), readback_type(depth + 1, T.second(x)), name=T.name)
    if isinstance(T, VId):
        return S.Id(readback_type(depth, T.type), readback(depth, T.lhs, T.type), readback(depth, T.rhs, T.type))
    if isinstance(T, VSum):
        return S.Sum(readback_type(depth, T.left), readback_type(depth, T.right))
    if isinstance(T, VTrunc):
        return S.Trunc(readback_type(depth, T.type))
    if isinstance(T, VAtom) and T.kind in ("Nat", "Bool", "Unit", "Empty"):
        return _atom_term(T)
    if isinstance(T, VNeu):
        return readback_neutral(depth, T.neutral)[0]
    raise InternalError(f"cannot read back {type_name(T)} as a type")


def readback_family(depth: int, fam: Value, domains) -> S.Term:
    """Read back a type family, one lambda per domain; ``domains[i]`` maps the
    variables bound so far to the i-th domain type."""
    xs = []
    for dom in domains:
        xs.append(fresh(depth + len(xs), dom(xs)))
    body = readback_type(depth + len(xs), apply_all(fam, *xs))
    for _ in xs:
        body = S.Lambda(body)
    return body


def readback_neutral(depth: int, ne: Neutral) -> tuple[S.Term, Value]:
    """Read back a neutral, returning the term together with its type."""
    if isinstance(ne, NVar):
        return S.Var(depth - ne.level - 1), ne.type
    if isinstance(ne, NGlobal):
        return S.Def(ne.name), ne.type
    if isinstance(ne, NTruncProp):
        tt = VTrunc(ne.type)
        return (
            S.TruncProp(readback_type(depth, ne.type), readback(depth, ne.lhs, tt), readback(depth, ne.rhs, tt)),
            VId(tt, ne.lhs, ne.rhs),
        )
    if isinstance(ne, NApp):
        f, T = readback_neutral(depth, ne.fn)
        if not isinstance(T, VPi):
            raise InternalError("neutral application at a non-function type")
        return S.App(f, readback(depth, ne.arg, T.domain)), T.codomain(ne.arg)
    if isinstance(ne, NFst):
        p, T = readback_neutral(depth, ne.pair)
        if not isinstance(T, VSigma):
            raise InternalError("projection at a non-sigma type")
        return S.Fst(p), T.first
    if isinstance(ne, NSnd):
        p, T = readback_neutral(depth, ne.pair)
        if not isinstance(T, VSigma):
            raise InternalError("projection at a non-sigma type")
        return S.Snd(p), T.second(VNeu(NFst(ne.pair)))
    if isinstance(ne, NJ):
        p, _ = readback_neutral(depth, ne.path)
        A, a, C, b = ne.type, ne.base, ne.motive, ne.endpoint
        term = S.J(
            readback_type(depth, A),
            readback(depth, a, A),
            readback_family(depth, C, j_motive_domains(A, a)),
            readback(depth, ne.refl_case, apply_all(C, a, VRefl(A, a))),
            readback(depth, b, A),
            p,
        )
        return term, apply_all(C, b, VNeu(ne.path))
    if isinstance(ne, NExFalso):
        e, _ = readback_neutral(depth, ne.scrutinee)
        return S.ExFalso(readback_type(depth, ne.motive), e), ne.motive
    if isinstance(ne, NBoolElim):
        s, _ = readback_neutral(depth, ne.scrutinee)
        P = ne.motive
        term = S.BoolElim(
            readback_family(depth, P, [lambda vs: VBOOL]),
            readback(depth, ne.true_case, apply(P, VTRUE)),
            readback(depth, ne.false_case, apply(P, VFALSE)),
            s,
        )
        return term, apply(P, VNeu(ne.scrutinee))
    if isinstance(ne, NSumElim):
        s, T = readback_neutral(depth, ne.scrutinee)
        if not isinstance(T, VSum):
            raise InternalError("sumrec scrutinee at a non-sum type")
        P = ne.motive
        term = S.SumElim(
            readback_family(depth, P, [lambda vs: T]),
            readback(depth, ne.left_case, sum_case_type(T.left, P, VInl)),
            readback(depth, ne.right_case, sum_case_type(T.right, P, VInr)),
            s,
        )
        return term, apply(P, VNeu(ne.scrutinee))
    if isinstance(ne, NNatElim):
        s, _ = readback_neutral(depth, ne.scrutinee)
        P = ne.motive
        term = S.NatElim(
            readback_family(depth, P, [lambda vs: VNAT]),
            readback(depth, ne.zero_case, apply(P, VZERO)),
            readback(depth, ne.suc_case, natrec_step_type(P)),
            s,
        )
        return term, apply(P, VNeu(ne.scrutinee))
    if isinstance(ne, NTruncElim):
        t, _ = readback_neutral(depth, ne.scrutinee)
        A, B = ne.source, ne.target
        term = S.TruncElim(
            readback_type(depth, A),
            readback_type(depth, B),
            readback(depth, ne.target_is_prop, is_prop_type(B)),
            readback(depth, ne.fn, arrow_v(A, B)),
            t,
        )
        return term, B
    raise InternalError(f"unknown neutral {type(ne).__name__}")


def normalize(module, term: S.Term, type: S.Term) -> S.Term:
    """Normal form of a closed ``term`` of closed ``type`` in ``module``'s scope."""
    g = module.entries if hasattr(module, "entries") else module
    return readback(0, evaluate((), term, g), evaluate((), type, g))


# --- conversion ------------------------------------------------------------------
#
# Agrees with comparing readbacks, but works on values so that shared
# structure (identical objects, closures over the same body and environment)
# is recognised without being unfolded.


def _same_closure(f: AnyClosure, g: AnyClosure) -> bool:
    if f is g:
        return True
    if isinstance(f, Closure) and isinstance(g, Closure) and f.body is g.body and len(f.env) == len(g.env):
        return all(x is y for x, y in zip(f.env, g.env))
    return False


def conv(depth: int, a: Value, b: Value, type: Value) -> bool:
    """Definitional equality of ``a`` and ``b`` at ``type``."""
    if a is b:
        return True
    if isinstance(type, VPi):
        if isinstance(a, VLam) and isinstance(b, VLam) and _same_closure(a.body, b.body):
            return True
        x = fresh(depth, type.domain)
        return conv(depth + 1, apply(a, x), apply(b, x), type.codomain(x))
    if isinstance(type, VSigma):
        a1 = vfst(a)
        return conv(depth, a1, vfst(b), type.first) and conv(depth, vsnd(a), vsnd(b), type.second(a1))
    if type is VUNIT:
        return True
    if isinstance(type, VU):
        return conv_type(depth, a, b)
    if isinstance(a, VNeu) or isinstance(b, VNeu):
        if isinstance(a, VNeu) and isinstance(b, VNeu):
            return conv_neutral(depth, a.neutral, b.neutral) is not None
        return False
    if isinstance(a, VAtom) or isinstance(b, VAtom):
        return isinstance(a, VAtom) and isinstance(b, VAtom) and a.kind == b.kind
    if isinstance(a, VSuc) and isinstance(b, VSuc):
        while isinstance(a, VSuc) and isinstance(b, VSuc):
            a, b = a.pred, b.pred
        return conv(depth, a, b, VNAT)
    if isinstance(type, VId) and isinstance(a, VRefl) and isinstance(b, VRefl):
        return conv(depth, a.point, b.point, type.type)
    if isinstance(type, VSum):
        if isinstance(a, VInl) and isinstance(b, VInl):
            return conv(depth, a.value, b.value, type.left)
        if isinstance(a, VInr) and isinstance(b, VInr):
            return conv(depth, a.value, b.value, type.right)
        return False
    if isinstance(type, VTrunc) and isinstance(a, VSquash) and isinstance(b, VSquash):
        return conv(depth, a.value, b.value, type.type)
    if type_name(a) != type_name(b):
        return False
    raise InternalError(f"cannot compare {type_name(a)} at {type_name(type)}")


def conv_type(depth: int, A: Value, B: Value) -> bool:
    if A is B:
        return True
    if isinstance(A, VU) and isinstance(B, VU):
        return A.level == B.level
    if isinstance(A, VPi) and isinstance(B, VPi) or isinstance(A, VSigma) and isinstance(B, VSigma):
        pi = isinstance(A, VPi)
        dA, dB = (A.domain, B.domain) if pi else (A.first, B.first)
        cA, cB = (A.codomain, B.codomain) if pi else (A.second, B.second)
        if not conv_type(depth, dA, dB):
            return False
        if _same_closure(cA, cB):
            return True
        x = fresh(depth, dA)
        return conv_type(depth + 1, cA(x), cB(x))
    if isinstance(A, VId) and isinstance(B, VId):
        return (conv_type(depth, A.type, B.type) and conv(depth, A.lhs, B.lhs, A.type)
                and conv(depth, A.rhs, B.rhs, A.type))
    if isinstance(A, VSum) and isinstance(B, VSum):
        return conv_type(depth, A.left, B.left) and conv_type(depth, A.right, B.right)
    if isinstance(A, VTrunc) and isinstance(B, VTrunc):
        return conv_type(depth, A.type, B.type)
    if isinstance(A, VAtom) and isinstance(B, VAtom):
        return A.kind == B.kind
    if isinstance(A, VNeu) and isinstance(B, VNeu):
        return conv_neutral(depth, A.neutral, B.neutral) is not None
    return False


def _conv_family(depth: int, P: Value, Q: Value, domains) -> bool:
    if P is Q:
        return True
    xs = []
    for dom in domains:
        xs.append(fresh(depth + len(xs), dom(xs)))
    return conv_type(depth + len(xs), apply_all(P, *xs), apply_all(Q, *xs))


def conv_neutral(depth: int, n: Neutral, m: Neutral) -> Optional[Value]:
    """Compare two neutrals; returns the type of ``n`` if they are equal."""
    if type(n) is not type(m):
        return None
    if isinstance(n, NVar):
        return n.type if n.level == m.level else None
    if isinstance(n, NGlobal):
        return n.type if n.name == m.name else None
    if isinstance(n, NApp):
        T = conv_neutral(depth, n.fn, m.fn)
        if T is None:
            return None
        if not isinstance(T, VPi):
            raise InternalError("neutral application at a non-function type")
        return T.codomain(n.arg) if conv(depth, n.arg, m.arg, T.domain) else None
    if isinstance(n, (NFst, NSnd)):
        T = conv_neutral(depth, n.pair, m.pair)
        if T is None:
            return None
        if not isinstance(T, VSigma):
            raise InternalError("projection at a non-sigma type")
        return T.first if isinstance(n, NFst) else T.second(VNeu(NFst(n.pair)))
    if isinstance(n, NTruncProp):
        tt = VTrunc(n.type)
        ok = conv_type(depth, n.type, m.type) and conv(depth, n.lhs, m.lhs, tt) and conv(depth, n.rhs, m.rhs, tt)
        return VId(tt, n.lhs, n.rhs) if ok else None
    if isinstance(n, NJ):
        A, a, C = n.type, n.base, n.motive
        ok = (conv_neutral(depth, n.path, m.path) is not None
              and conv_type(depth, A, m.type) and conv(depth, a, m.base, A)
              and _conv_family(depth, C, m.motive, j_motive_domains(A, a))
              and conv(depth, n.refl_case, m.refl_case, apply_all(C, a, VRefl(A, a)))
              and conv(depth, n.endpoint, m.endpoint, A))
        return apply_all(C, n.endpoint, VNeu(n.path)) if ok else None
    if isinstance(n, NExFalso):
        ok = conv_neutral(depth, n.scrutinee, m.scrutinee) is not None and conv_type(depth, n.motive, m.motive)
        return n.motive if ok else None
    if isinstance(n, NBoolElim):
        P = n.motive
        ok = (conv_neutral(depth, n.scrutinee, m.scrutinee) is not None
              and _conv_family(depth, P, m.motive, [lambda vs: VBOOL])
              and conv(depth, n.true_case, m.true_case, apply(P, VTRUE))
              and conv(depth, n.false_case, m.false_case, apply(P, VFALSE)))
        return apply(P, VNeu(n.scrutinee)) if ok else None
    if isinstance(n, NSumElim):
        T = conv_neutral(depth, n.scrutinee, m.scrutinee)
        if T is None:
            return None
        if not isinstance(T, VSum):
            raise InternalError("sumrec scrutinee at a non-sum type")
        P = n.motive
        ok = (_conv_family(depth, P, m.motive, [lambda vs: T])
              and conv(depth, n.left_case, m.left_case, sum_case_type(T.left, P, VInl))
              and conv(depth, n.right_case, m.right_case, sum_case_type(T.right, P, VInr)))
        return apply(P, VNeu(n.scrutinee)) if ok else None
    if isinstance(n, NNatElim):
        P = n.motive
        ok = (conv_neutral(depth, n.scrutinee, m.scrutinee) is not None
              and _conv_family(depth, P, m.motive, [lambda vs: VNAT])
              and conv(depth, n.zero_case, m.zero_case, apply(P, VZERO))
              and conv(depth, n.suc_case, m.suc_case, natrec_step_type(P)))
        return apply(P, VNeu(n.scrutinee)) if ok else None
    if isinstance(n, NTruncElim):
        A, B = n.source, n.target
        ok = (conv_neutral(depth, n.scrutinee, m.scrutinee) is not None
              and conv_type(depth, A, m.source) and conv_type(depth, B, m.target)
              and conv(depth, n.target_is_prop, m.target_is_prop, is_prop_type(B))
              and conv(depth, n.fn, m.fn, arrow_v(A, B)))
        return B if ok else None
    raise InternalError(f"unknown neutral {type(n).__name__}")
