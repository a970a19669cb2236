import pytest
from hypothesis import given, strategies as st

from fmca.fm import (MANDATORY, OPTIONAL, OR_MEMBER, XOR_MEMBER, And, FeatureModelError, Implies, Not, Or, Var,
                     evaluate, feature_list, format_expr, format_feature_model, parse_expr,
                     parse_feature_model)

AIRCRAFT_ORDER = ["Aircraft", "Wing", "Engine", "Materials", "High", "Shoulder", "Low", "Piston", "Jet",
                  "Metal", "Wood", "Plastic", "Cloth", "Rust"]


def test_aircraft_feature_list(aircraft):
    assert [name for _, name in feature_list(aircraft)] == AIRCRAFT_ORDER
    assert aircraft.features[aircraft.index("Wing")].kind == MANDATORY
    assert aircraft.features[aircraft.index("Engine")].kind == OPTIONAL
    assert aircraft.features[aircraft.index("Metal")].kind == OR_MEMBER
    assert aircraft.features[aircraft.index("Jet")].kind == XOR_MEMBER
    assert aircraft.features[aircraft.index("Rust")].parent == aircraft.index("Metal")
    assert len(aircraft.ctcs) == 1


def test_valid_products_aircraft(aircraft):
    ix = aircraft.index
    base = {ix("Aircraft"), ix("Wing"), ix("High"), ix("Materials"), ix("Wood")}
    assert aircraft.is_valid_product(base)
    assert not aircraft.is_valid_product(base - {ix("Wing")})
    assert not aircraft.is_valid_product(base | {ix("Low")})  # xor
    assert not aircraft.is_valid_product(base | {ix("Metal")})  # Metal needs Rust
    assert aircraft.is_valid_product(base | {ix("Metal"), ix("Rust")})
    low = base - {ix("High")} | {ix("Low"), ix("Metal"), ix("Rust")}
    assert not aircraft.is_valid_product(low)  # constraint
    assert not aircraft.is_valid_product(base | {ix("Piston")})  # child without parent


@pytest.mark.parametrize("text, fragment", [
    ("A\nB", "multiple roots"),
    ("A\n  B\n  B", "duplicate feature name"),
    ("A: xor\n  B", "at least 2 members"),
    ("A\n  B: mandatory optional", "more than one relation"),
    ("A\n  B: sometimes", "unknown kind"),
    ("A\n   B", "multiple of 2"),
    ("A\n    B", "unexpected indentation"),
    ("A\n  xor", "reserved word"),
    ("A\nconstraint: A => Z", "unknown feature"),
    ("A\nconstraint: A =>", "expected"),
    ("A: mandatory", "root cannot"),
    ("A: or\n  B: mandatory\n  C", "cannot be mandatory"),
    ("", "no features"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(FeatureModelError) as err:
        parse_feature_model(text)
    assert fragment in str(err.value)


def test_error_carries_position():
    with pytest.raises(FeatureModelError) as err:
        parse_feature_model("A\n  B\n  B")
    assert err.value.line == 3 and err.value.column == 3


def test_expression_precedence():
    names = ["a", "b", "c"]
    e = parse_expr("a | b & !c => a", names)
    assert e == Implies(Or(Var(0), And(Var(1), Not(Var(2)))), Var(0))
    assert parse_expr("a => b => c", names) == Implies(Var(0), Implies(Var(1), Var(2)))
    assert evaluate(e, {1}) is False
    assert format_expr(parse_expr("(a | b) & c", names), names) == "(a | b) & c"


def test_fixtures_round_trip(models):
    for fm in models.values():
        assert parse_feature_model(format_feature_model(fm)) == fm


names_st = st.lists(st.from_regex(r"[A-Z][a-z]{1,5}", fullmatch=True), min_size=1, max_size=9, unique=True)


@st.composite
def feature_models(draw):
    names = draw(names_st)
    specs = {names[0]: {"group": None, "kids": []}}
    for name in names[1:]:
        parent = draw(st.sampled_from(list(specs)))
        specs[parent]["kids"].append(name)
        specs[name] = {"group": None, "kids": []}
    for name, spec in specs.items():
        if len(spec["kids"]) >= 2 and draw(st.booleans()):
            spec["group"] = draw(st.sampled_from(["or", "xor"]))

    def emit(name, depth, in_group):
        tokens = []
        if depth and not in_group:
            rel = draw(st.sampled_from([None, "mandatory", "optional"]))
            if rel:
                tokens.append(rel)
        if specs[name]["group"]:
            tokens.append(specs[name]["group"])
        out = ["  " * depth + name + (": " + " ".join(tokens) if tokens else "")]
        for kid in specs[name]["kids"]:
            out += emit(kid, depth + 1, specs[name]["group"] is not None)
        return out

    lines = emit(names[0], 0, False)
    if len(names) >= 2 and draw(st.booleans()):
        a, b = draw(st.permutations(names))[:2]
        op = draw(st.sampled_from(["=>", "&", "|"]))
        lines.append(f"constraint: {a} {op} !{b}")
    return "\n".join(lines) + "\n"


@given(feature_models())
def test_round_trip_property(text):
    fm = parse_feature_model(text)
    again = parse_feature_model(format_feature_model(fm))
    assert again == fm
    assert format_feature_model(again) == format_feature_model(fm)
    # level order: parents always precede children
    assert all(f.parent is None or f.parent < f.index for f in fm.features)
