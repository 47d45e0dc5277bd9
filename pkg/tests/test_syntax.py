from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hct import syntax as S


def terms(max_index: int = 4):
    """Open terms over a small grammar, with binders."""
    leaves = st.one_of(
        st.integers(min_value=0, max_value=max_index).map(S.Var),
        st.sampled_from([S.Nat(), S.Zero(), S.Bool(), S.TrueT(), S.Star(), S.Universe(0)]),
        st.sampled_from(["f", "g"]).map(S.Def),
    )

    def extend(children):
        names = st.sampled_from([None, "x", "y"])
        return st.one_of(
            st.builds(S.Lambda, children, name=names),
            st.builds(S.App, children, children),
            st.builds(S.Pi, children, children, name=names),
            st.builds(S.Sigma, children, children, name=names),
            st.builds(S.Pair, children, children),
            st.builds(S.Suc, children),
            st.builds(S.Id, children, children, children),
        )

    return st.recursive(leaves, extend, max_leaves=12)


def test_alpha_equality_ignores_binder_names_and_spans():
    span = S.SourceSpan("f.hct", 1, 1, 1, 5)
    a = S.Lambda(S.Var(0, span=span), name="x")
    b = S.Lambda(S.Var(0), name="y")
    assert a == b and S.alpha_equal(a, b)
    assert S.Lambda(S.Var(0)) != S.Lambda(S.Var(1))


def test_arrow_shifts_codomain():
    t = S.arrow(S.Var(0), S.Var(0))
    assert t == S.Pi(S.Var(0), S.Var(1))


def test_substitute_under_binder():
    # (fun y => x y)[x := z] where x = Var 0 and the replacement is Var 3
    body = S.Lambda(S.App(S.Var(1), S.Var(0)))
    assert S.substitute(body, 0, S.Var(3)) == S.Lambda(S.App(S.Var(4), S.Var(0)))


def test_substitute_lowers_higher_indices():
    assert S.substitute(S.Var(2), 0, S.Zero()) == S.Var(1)
    assert S.substitute(S.Var(0), 0, S.Zero()) == S.Zero()


def test_free_indices_and_closedness():
    t = S.Lambda(S.App(S.Var(0), S.Var(2)))
    assert S.free_indices(t) == {1}
    assert not S.is_closed(t) and S.is_closed(t, 2)


def test_universe_level_bounds():
    import pytest

    with pytest.raises(ValueError):
        S.Universe(S.MAX_LEVEL + 1)


def test_global_refs_lists_definitions():
    t = S.App(S.Def("f"), S.Lambda(S.Def("g")))
    assert sorted(S.global_refs(t)) == ["f", "g"]


@settings(max_examples=300)
@given(terms(), st.integers(min_value=0, max_value=3))
def test_shift_round_trip(t, k):
    assert S.shift(S.shift(t, 0, k), 0, -k) == t


@settings(max_examples=300)
@given(terms(), st.integers(min_value=0, max_value=3), st.integers(min_value=0, max_value=3))
def test_shift_composes(t, a, b):
    assert S.shift(S.shift(t, 0, a), 0, b) == S.shift(t, 0, a + b)


@settings(max_examples=300)
@given(terms(), terms())
def test_substituting_into_a_shifted_term_is_identity(t, u):
    # Var 0 does not occur in shift(t, 0, 1), so substituting for it only lowers indices back
    assert S.substitute(S.shift(t, 0, 1), 0, u) == t


@settings(max_examples=300)
@given(terms())
def test_free_indices_shift_with_the_term(t):
    assert S.free_indices(S.shift(t, 0, 2)) == {i + 2 for i in S.free_indices(t)}


@settings(max_examples=200)
@given(terms(), terms())
def test_substituting_a_closed_term_removes_the_variable(t, u):
    assume(S.is_closed(u))
    out = S.substitute(t, 0, u)
    # the remaining free indices of t are each lowered by one
    assert S.free_indices(out) == {i - 1 for i in S.free_indices(t) if i > 0}
