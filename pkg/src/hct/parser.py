"""Lexer, parser and scope resolver for ``.hct`` source files.

Grammar::

    module  := { decl } ;
    decl    := "def" IDENT ":" term ":=" term ";" | "postulate" IDENT ":" term ";" ;
    term    := binder | arrow ;
    binder  := "fun" IDENT "=>" term ;
    arrow   := sigma [ "->" term ] | "(" IDENT ":" term ")" "->" term ;
    sigma   := app [ "*" sigma ] | "(" IDENT ":" term ")" "*" sigma ;
    app     := atom { atom } ;
    atom    := IDENT | "U0" | "U1" | "U2" | "Nat" | "zero" | "Bool" | "true" | "false"
             | "Empty" | "Unit" | "star" | "(" term ")" | "(" term "," term ")" ;

Primitive heads (``J``, ``sumrec``, ...) lex as identifiers and are resolved
to core forms when fully applied.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from . import syntax as S
from .syntax import SourceSpan

KEYWORDS = {"def", "postulate", "fun"}
ATOM_KEYWORDS = {"U0", "U1", "U2", "Nat", "zero", "Bool", "true", "false", "Empty", "Unit", "star"}

PRIMITIVES = {
    "suc": 1, "natrec": 4, "boolrec": 4, "sumrec": 4, "exfalso": 2,
    "fst": 1, "snd": 1, "pair": 2, "Id": 3, "refl": 2, "J": 6,
    "Sum": 2, "inl": 1, "inr": 1, "Trunc": 1, "squash": 1, "truncrec": 5,
    "truncprop": 3,
}

RESERVED = KEYWORDS | ATOM_KEYWORDS | set(PRIMITIVES)


@dataclass
class Diagnostic:
    phase: str  # lex | parse | scope | type
    message: str
    span: SourceSpan
    expected: Optional[str] = None
    actual: Optional[str] = None
    severity: str = "error"
    category: Optional[str] = None

    def format(self) -> str:
        s = self.span
        return f"{s.file}:{s.start_line}:{s.start_col}: {self.severity}: {self.message}"


class HctError(Exception):
    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.format())
        self.diagnostic = diagnostic


# --- lexing ---------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "sym", "eof"
    text: str
    span: SourceSpan


_TOKEN_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*|:=|=>|->|[():;*,]")


def tokenize(text: str, path: str = "<input>") -> list[Token]:
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)

    def span(l0, c0, l1, c1):
        return SourceSpan(path, l0, c0, l1, c1)

    def advance(k):
        nonlocal i, line, col
        for ch in text[i:i + k]:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        i += k

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        if text.startswith("--", i):
            j = text.find("\n", i)
            advance((n if j < 0 else j) - i)
            continue
        if text.startswith("{-", i):
            l0, c0 = line, col
            depth = 0
            while True:
                if i >= n:
                    raise HctError(Diagnostic("lex", "unterminated block comment", span(l0, c0, l0, c0 + 1)))
                if text.startswith("{-", i):
                    depth += 1
                    advance(2)
                elif text.startswith("-}", i):
                    depth -= 1
                    advance(2)
                    if depth == 0:
                        break
                else:
                    advance(1)
            continue
        m = _TOKEN_RE.match(text, i)
        if not m:
            raise HctError(Diagnostic("lex", f"illegal character {ch!r}", span(line, col, line, col)))
        l0, c0 = line, col
        word = m.group(0)
        advance(len(word))
        kind = "ident" if (word[0].isalpha() or word[0] == "_") else "sym"
        tokens.append(Token(kind, word, span(l0, c0, line, max(col - 1, c0))))
    tokens.append(Token("eof", "", span(line, col, line, col)))
    return tokens


# --- surface syntax -----------------------------------------------------------------


@dataclass(frozen=True)
class SName:
    name: str
    span: SourceSpan


@dataclass(frozen=True)
class SApp:
    head: "SExpr"
    args: tuple
    span: SourceSpan


@dataclass(frozen=True)
class SLam:
    name: str
    body: "SExpr"
    span: SourceSpan


@dataclass(frozen=True)
class SPi:
    name: Optional[str]
    domain: "SExpr"
    codomain: "SExpr"
    span: SourceSpan


@dataclass(frozen=True)
class SSigma:
    name: Optional[str]
    first: "SExpr"
    second: "SExpr"
    span: SourceSpan


@dataclass(frozen=True)
class SPair:
    fst: "SExpr"
    snd: "SExpr"
    span: SourceSpan


SExpr = Union[SName, SApp, SLam, SPi, SSigma, SPair]


@dataclass(frozen=True)
class SurfaceDecl:
    kind: str  # "definition" | "postulate"
    name: str
    type: SExpr
    body: Optional[SExpr]
    span: SourceSpan


# --- parsing -------------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0
        self.furthest = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind != "eof"

    def next(self) -> Token:
        t = self.tok
        self.pos += 1
        self.furthest = max(self.furthest, self.pos)
        return t

    def fail(self, what: str):
        t = self.toks[min(max(self.pos, self.furthest), len(self.toks) - 1)]
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise HctError(Diagnostic("parse", f"expected {what}, found {found}", t.span))

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(repr(text))
        return self.next()

    def ident(self) -> Token:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS or t.text in ATOM_KEYWORDS:
            self.fail("an identifier")
        return self.next()

    def module(self) -> list[SurfaceDecl]:
        decls = []
        while self.tok.kind != "eof":
            decls.append(self.decl())
        return decls

    def decl(self) -> SurfaceDecl:
        start = self.tok
        if self.at("def"):
            self.next()
            name = self.ident()
            self.expect(":")
            ty = self.term()
            self.expect(":=")
            body = self.term()
            end = self.expect(";")
            return SurfaceDecl("definition", name.text, ty, body, start.span.to(end.span))
        if self.at("postulate"):
            self.next()
            name = self.ident()
            self.expect(":")
            ty = self.term()
            end = self.expect(";")
            return SurfaceDecl("postulate", name.text, ty, None, start.span.to(end.span))
        self.fail("'def' or 'postulate'")

    def telescope_ahead(self) -> bool:
        return self.at("(") and self.peek(1).kind == "ident" and self.peek(2).text == ":" \
            and self.peek(1).text not in KEYWORDS | ATOM_KEYWORDS

    def binder_group(self):
        start = self.expect("(")
        name = self.ident().text
        self.expect(":")
        dom = self.term()
        self.expect(")")
        return start, name, dom

    def term(self) -> SExpr:
        if self.at("fun"):
            start = self.next()
            name = self.ident().text
            self.expect("=>")
            body = self.term()
            return SLam(name, body, start.span.to(body.span))
        return self.arrow()

    def arrow(self) -> SExpr:
        if self.telescope_ahead():
            start, name, dom = self.binder_group()
            if self.at("->"):
                self.next()
                cod = self.term()
                return SPi(name, dom, cod, start.span.to(cod.span))
            if self.at("*"):
                self.next()
                snd = self.sigma()
                lhs = SSigma(name, dom, snd, start.span.to(snd.span))
            else:
                self.fail("'->' or '*' after a binder")
        else:
            lhs = self.sigma()
        if self.at("->"):
            self.next()
            cod = self.term()
            return SPi(None, lhs, cod, lhs.span.to(cod.span))
        return lhs

    def sigma(self) -> SExpr:
        if self.telescope_ahead():
            start, name, dom = self.binder_group()
            self.expect("*")
            snd = self.sigma()
            return SSigma(name, dom, snd, start.span.to(snd.span))
        lhs = self.app()
        if self.at("*"):
            self.next()
            snd = self.sigma()
            return SSigma(None, lhs, snd, lhs.span.to(snd.span))
        return lhs

    def starts_atom(self) -> bool:
        t = self.tok
        if t.kind == "ident":
            return t.text not in KEYWORDS
        return t.text == "("

    def app(self) -> SExpr:
        if not self.starts_atom():
            self.fail("a term")
        head = self.atom()
        args = []
        while self.starts_atom():
            args.append(self.atom())
        if not args:
            return head
        return SApp(head, tuple(args), head.span.to(args[-1].span))

    def atom(self) -> SExpr:
        t = self.tok
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.next()
            return SName(t.text, t.span)
        if self.at("("):
            start = self.next()
            inner = self.term()
            if self.at(","):
                self.next()
                snd = self.term()
                end = self.expect(")")
                return SPair(inner, snd, start.span.to(end.span))
            self.expect(")")
            return inner
        self.fail("a term")


def _decode(source: Union[str, bytes], path: str) -> str:
    if isinstance(source, bytes):
        try:
            return source.decode("utf-8")
        except UnicodeDecodeError as exc:
            line = source[: exc.start].count(b"\n") + 1
            raise HctError(Diagnostic("lex", "invalid UTF-8", SourceSpan(path, line, 1, line, 1))) from None
    return source


def parse_module(source: Union[str, bytes], path: str = "<input>") -> list[SurfaceDecl]:
    """Parse a whole file. Raises HctError (lex, parse or duplicate-name scope
    diagnostic) on the first error."""
    p = _Parser(tokenize(_decode(source, path), path))
    decls = p.module()
    seen = {}
    for d in decls:
        if d.name in seen:
            raise HctError(Diagnostic("scope", f"duplicate name {d.name}", d.span))
        seen[d.name] = d
    return decls


def parse_term(source: str, path: str = "<input>") -> SExpr:
    p = _Parser(tokenize(source, path))
    t = p.term()
    if p.tok.kind != "eof":
        p.fail("end of input")
    return t


# --- resolution -----------------------------------------------------------------------


@dataclass
class ResolvedDecl:
    name: str
    type: S.Term
    body: Optional[S.Term]
    span: SourceSpan

    @property
    def is_postulate(self) -> bool:
        return self.body is None


_ATOM_TERMS = {
    "Nat": S.Nat, "zero": S.Zero, "Bool": S.Bool, "true": S.TrueT, "false": S.FalseT,
    "Empty": S.Empty, "Unit": S.Unit, "star": S.Star,
}

_PRIM_BUILD = {
    "suc": S.Suc, "natrec": S.NatElim, "boolrec": S.BoolElim, "sumrec": S.SumElim,
    "exfalso": S.ExFalso, "fst": S.Fst, "snd": S.Snd, "pair": S.Pair, "Id": S.Id,
    "refl": S.Refl, "J": S.J, "Sum": S.Sum, "inl": S.Inl, "inr": S.Inr,
    "Trunc": S.Trunc, "squash": S.Squash, "truncrec": S.TruncElim, "truncprop": S.TruncProp,
}


class Resolver:
    def __init__(self, globals_: set, later: set = frozenset()):
        self.globals = set(globals_)
        self.later = later

    def error(self, msg, span, category=None):
        return HctError(Diagnostic("scope", msg, span, category=category))

    def resolve(self, e: SExpr, scope: tuple = ()) -> S.Term:
        if isinstance(e, SName):
            return self.name(e, scope)
        if isinstance(e, SLam):
            return S.Lambda(self.resolve(e.body, scope + (e.name,)), name=e.name, span=e.span)
        if isinstance(e, SPi):
            dom = self.resolve(e.domain, scope)
            cod = self.resolve(e.codomain, scope + (e.name,))
            return S.Pi(dom, cod, name=e.name, span=e.span)
        if isinstance(e, SSigma):
            fst = self.resolve(e.first, scope)
            snd = self.resolve(e.second, scope + (e.name,))
            return S.Sigma(fst, snd, name=e.name, span=e.span)
        if isinstance(e, SPair):
            return S.Pair(self.resolve(e.fst, scope), self.resolve(e.snd, scope), span=e.span)
        if isinstance(e, SApp):
            return self.app(e, scope)
        raise S.InternalError(f"unknown surface node {e!r}")

    def local(self, name, scope) -> Optional[int]:
        for i, n in enumerate(reversed(scope)):
            if n == name:
                return i
        return None

    def name(self, e: SName, scope) -> S.Term:
        idx = self.local(e.name, scope)
        if idx is not None:
            return S.Var(idx, span=e.span)
        if e.name in ("U0", "U1", "U2"):
            return S.Universe(int(e.name[1]), span=e.span)
        if e.name in _ATOM_TERMS:
            return _ATOM_TERMS[e.name](span=e.span)
        if e.name in PRIMITIVES:
            raise self.error(f"ArityError: primitive {e.name} expects {PRIMITIVES[e.name]} "
                             f"argument(s), got 0", e.span, "ArityError")
        if e.name in self.globals:
            return S.Def(e.name, span=e.span)
        if e.name in self.later:
            raise self.error(f"forward reference to {e.name}", e.span)
        raise self.error(f"unbound identifier {e.name}", e.span)

    def app(self, e: SApp, scope) -> S.Term:
        head = e.head
        args = list(e.args)
        if isinstance(head, SName) and head.name in PRIMITIVES and self.local(head.name, scope) is None:
            k = PRIMITIVES[head.name]
            if len(args) < k:
                raise self.error(f"ArityError: primitive {head.name} expects {k} argument(s), "
                                 f"got {len(args)}", e.span, "ArityError")
            used, args = args[:k], args[k:]
            span = head.span.to(used[-1].span)
            fn = _PRIM_BUILD[head.name](*(self.resolve(a, scope) for a in used), span=span)
        else:
            fn = self.resolve(head, scope)
        for a in args:
            fn = S.App(fn, self.resolve(a, scope), span=fn.span.to(a.span) if fn.span else None)
        return fn


def resolve(decls: list[SurfaceDecl], ambient=()) -> list[ResolvedDecl]:
    """Resolve identifiers to de Bruijn indices or global references.

    ``ambient`` is anything iterable over known global names (e.g. a
    CheckedModule's ``names()``)."""
    known = set(ambient.names() if hasattr(ambient, "names") else ambient)
    later = {d.name for d in decls}
    out = []
    for d in decls:
        later.discard(d.name)
        r = Resolver(known, later)
        ty = r.resolve(d.type)
        body = r.resolve(d.body) if d.body is not None else None
        out.append(ResolvedDecl(d.name, ty, body, d.span))
        known.add(d.name)
    return out


def resolve_term(e: SExpr, ambient=()) -> S.Term:
    known = set(ambient.names() if hasattr(ambient, "names") else ambient)
    return Resolver(known).resolve(e)
