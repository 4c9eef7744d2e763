import string

from hypothesis import given, settings
from hypothesis import strategies as st
import pytest

from cnp import ParseFailure, SourceProgram, parse, render, validate
from cnp.dsl import load
from cnp.network import (
    Arrow,
    CallKind,
    ControlNetwork,
    Literal,
    Name,
    Neg,
    Node,
    NodeKind,
    OptionMutation,
    PrimitiveCall,
    RangeValue,
    Subnet,
)

MINIMAL = "SUBNET Main() INIT s0 NODE fin FINISH ARROW s0 -> fin : ;"


def test_minimal_program():
    net = parse(MINIMAL)
    (sub,) = net.subnets
    assert len(sub.nodes) == 2 and len(sub.arrows) == 1
    assert sub.arrows[0].chain == ()
    assert sub.node("fin").kind is NodeKind.FINISH


def test_chain_order():
    net = parse("SUBNET Main() INIT a NODE b FINISH ARROW a -> b : move(X), costIs(7) ;")
    chain = net.subnets[0].arrows[0].chain
    assert [c.name for c in chain] == ["move", "costIs"]
    assert chain[0].args == (Name("X"),) and chain[1].args == (Literal(7),)


def test_unbalanced_parenthesis_position():
    text = "SUBNET Main()\n  INIT a\n  NODE b FINISH\n  ARROW a -> b : move(X ;\n"
    with pytest.raises(ParseFailure) as info:
        parse(SourceProgram(text, "bad.cn"))
    err = info.value.errors[0]
    assert (err.line, err.column) == (4, 25)
    assert str(err).startswith("bad.cn:4:25:")


def test_semantic_error_is_located():
    text = "SUBNET Main()\n  INIT a\n  NODE b FINISH\n  ARROW a -> b : call Ghost() ;\n"
    with pytest.raises(ParseFailure) as info:
        parse(text)
    err = info.value.errors[0]
    assert err.line == 4 and "Ghost" in err.message


@pytest.mark.parametrize("text", [
    "", "SUBNET", "SUBNET Main( INIT a", "SUBNET Main() NODE a", "SUBNET Main() INIT a INIT b",
    'SUBNET Main() INIT a ARROW a -> a : p("unterminated ;', "SUBNET Main() INIT a NODE b CONTROL {order=}",
    "SUBNET Main() INIT a NODE b FINISH ARROW a -> b [eval=] : ;", "@@@", "SUBNET Main() INIT a ARROW a - b : ;",
])
def test_errors_have_positions_inside_source(text):
    with pytest.raises(ParseFailure) as info:
        parse(text)
    lines = text.splitlines() or [""]
    for err in info.value.errors:
        assert 1 <= err.line <= max(1, len(lines))
        assert 1 <= err.column <= len(lines[err.line - 1]) + 1


def test_comments_strings_and_main_header():
    text = '''
    # leading comment
    MAIN Second
    SUBNET First()
      INIT a
      NODE b FINISH
      ARROW a -> b : ;
    SUBNET Second() VARS Msg
      INIT a   # trailing comment
      NODE b FINISH
      ARROW a -> b : bind("Msg", "say \\"hi\\"\\n"), write(-3) ;
    '''
    net = parse(text)
    assert net.main == "Second"
    chain = net.subnet("Second").arrows[0].chain
    assert chain[0].args[1] == Literal('say "hi"\n')
    assert chain[1].args == (Literal(-3),)
    assert parse(render(net)) == net
    assert render(net).text.startswith("MAIN Second")


def test_round_trip_control_node_and_recursion():
    text = '''
    SUBNET Main()
      INIT a CONTROL {order=best, range=[0, Limit], width=2, backtracking=false, max_depth=none}
      NODE b FINISH
      ARROW a -> b [eval=h(a)] : call Count(3) ;
    SUBNET Count(N)
      INIT s
      NODE t FINISH
      ARROW s -> t : eq(N, 0) ;
      ARROW s -> t : gt(N, 0), call Count(-(N)) ;
    '''
    net = parse(text)
    again = parse(render(net))
    assert again == net
    muts = net.subnets[0].node("a").mutations
    assert [m.option for m in muts] == ["order", "range", "width", "backtracking", "max_depth"]
    assert muts[1].value == RangeValue(Literal(0), Name("Limit"))
    assert "call Count(" in render(net).text


def test_load_bundled_program(tmp_path):
    path = tmp_path / "p.cn"
    path.write_text(MINIMAL, encoding="utf-8")
    assert load(path) == parse(MINIMAL)


# -- properties ---------------------------------------------------------------

IDENT = st.text(string.ascii_letters, min_size=1, max_size=4).map(lambda s: "v" + s)
EXPR = st.recursive(
    st.one_of(st.integers(-50, 50).map(Literal), st.text(string.printable, max_size=5).map(Literal),
              IDENT.map(Name)),
    lambda inner: inner.map(Neg),
    max_leaves=3,
)


@st.composite
def networks(draw):
    n_sub = draw(st.integers(1, 3))
    names = [f"S{i}" for i in range(n_sub)]
    params = {name: tuple(f"P{j}" for j in range(draw(st.integers(0, 2)))) for name in names}
    subnets = []
    for name in names:
        n_nodes = draw(st.integers(1, 4))
        ids = [f"n{j}" for j in range(n_nodes)]
        finishes = set(draw(st.lists(st.sampled_from(ids), max_size=2)))
        nodes = []
        for nid in ids:
            if nid in finishes:
                nodes.append(Node(nid, NodeKind.FINISH))
            elif draw(st.booleans()):
                muts = draw(st.lists(st.sampled_from([
                    OptionMutation("order", Name("random")), OptionMutation("width", Literal(3)),
                    OptionMutation("width", None), OptionMutation("range", RangeValue(Literal(-1), Name("H"))),
                    OptionMutation("backtracking", Name("true")), OptionMutation("max_depth", Name("D")),
                ]), max_size=3))
                nodes.append(Node(nid, NodeKind.CONTROL, tuple(muts)))
            else:
                nodes.append(Node(nid))
        sources = [n for n in ids if n not in finishes]
        arrows = []
        for _ in range(draw(st.integers(0, 4)) if sources else 0):
            chain = []
            for _ in range(draw(st.integers(0, 3))):
                if draw(st.booleans()):
                    callee = draw(st.sampled_from(names))
                    args = tuple(draw(EXPR) for _ in params[callee])
                    chain.append(PrimitiveCall(callee, args, CallKind.SUBNET))
                else:
                    chain.append(PrimitiveCall(draw(IDENT), tuple(draw(st.lists(EXPR, max_size=2)))))
            ev = PrimitiveCall(draw(IDENT), tuple(draw(st.lists(EXPR, max_size=1)))) if draw(st.booleans()) else None
            arrows.append(Arrow(draw(st.sampled_from(sources)), draw(st.sampled_from(ids)), tuple(chain), ev))
        locals_ = tuple(f"L{j}" for j in range(draw(st.integers(0, 2))))
        subnets.append(Subnet(name, params[name], locals_, tuple(nodes), ids[0], tuple(arrows)))
    main = draw(st.sampled_from(names))
    return ControlNetwork(tuple(subnets), main)


@settings(max_examples=300, deadline=None)
@given(networks())
def test_round_trip_property(net):
    assert validate(net) == []
    assert parse(render(net)) == net


@settings(max_examples=400, deadline=None)
@given(st.text(alphabet=string.printable + "→é", max_size=120))
def test_parser_is_total(text):
    try:
        net = parse(text)
    except ParseFailure as exc:
        assert exc.errors
    else:
        assert validate(net) == []


@settings(max_examples=300, deadline=None)
@given(networks(), st.data())
def test_parser_total_on_mutated_programs(net, data):
    text = render(net).text
    cut = data.draw(st.integers(0, len(text)))
    junk = data.draw(st.sampled_from(["", "(", ")", ";", "->", "{", "[", "\"", "#", "ARROW", "-"]))
    try:
        parse(text[:cut] + junk + text[cut:])
    except ParseFailure as exc:
        assert all(e.line >= 1 and e.column >= 1 for e in exc.errors)


def test_deep_nesting_does_not_crash():
    text = "SUBNET Main() INIT a NODE b FINISH ARROW a -> b : p(" + "(" * 5000 + "1" + ")" * 5000 + ") ;"
    try:
        parse(text)
    except ParseFailure as exc:
        assert exc.errors
