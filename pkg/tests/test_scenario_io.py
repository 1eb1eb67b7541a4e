import dataclasses
import json
import random

import pytest
from hypothesis import given, strategies as st

from freightquota.grouping import group_suppliers
from freightquota.market import MarketScenario, SupplierSpec, TieRule
from freightquota.regulator import social_utility, solve_summ
from freightquota.scenario_io import (
    ScenarioParseError,
    format_scenario,
    grouping_table,
    load_scenario,
    parse_scenario,
    parse_vector,
    render_report,
)

from oracles import CANADIAN, canadian

HEADER = "id,production,market_price,transport_cost,inventory_cost,social_weight,mre\n"


def test_bundled_data_matches_reference_parameters():
    sc = load_scenario("canadian.csv")
    assert [(s.id, s.production, s.market_price, s.transport_cost, s.inventory_cost) for s in sc.suppliers] == CANADIAN
    assert all(s.social_weight == 0.1 and s.mre is None for s in sc.suppliers)
    assert sc.capacity == 650_000_000
    assert sc == canadian()


def test_bundled_scenario_two():
    sc = load_scenario("canadian_scenario2.csv")
    assert sc == canadian(beta_oat=1.0)


def test_empty_market():
    sc = parse_scenario("# capacity=0\n")
    assert sc.suppliers == () and sc.capacity == 0
    sc = parse_scenario("# capacity=0\n" + HEADER)
    assert sc.suppliers == ()


def test_header_options_and_aliases():
    sc = parse_scenario("# capacity=10\n# cap=0.2\n# tie_rule=seed:7\n# grid=9\n# tolerance=1e-6\n"
                        "id,D,S,c,g,beta,MRE\na,1,2,3,4,5,6\nb,1,2,3,4,5,\n")
    assert sc.quota_cap_fraction == 0.2
    assert sc.tie_rule == TieRule(7)
    assert sc.grid_resolution == 9
    assert sc.price_tolerance == 1e-6
    assert sc.suppliers[0] == SupplierSpec("a", 1, 2, 3, 4, 5, 6)
    assert sc.suppliers[1].mre is None


@pytest.mark.parametrize("text, code, line, column", [
    ("# capacity=10\n" + HEADER + "a,-1,1,1,1,0,\n", "E_NEGATIVE", 3, 2),
    ("# capacity=10\n" + HEADER + "a,1,1,1,1,0,\na,2,1,1,1,0,\n", "E_DUPLICATE_ID", 4, 1),
    ("# capacity=10\nid,production,market_price,transport_cost,social_weight\n", "E_MISSING_COLUMN", 2, 6),
    ("# capacity=10\n" + HEADER + "a,1,x,1,1,0,\n", "E_NOT_NUMERIC", 3, 3),
    ("id,production\n", "E_HEADER", 1, 1),
    ("# capacity=10\n# colour=red\n", "E_HEADER", 2, 1),
    ("# capacity=10\n" + HEADER + "a,1,1\n", "E_MISSING_COLUMN", 3, 4),
    ("# capacity=10\n# cap=2\n", "E_INVALID", 2, 1),
])
def test_parse_errors_carry_code_and_position(text, code, line, column):
    with pytest.raises(ScenarioParseError) as err:
        parse_scenario(text)
    assert (err.value.code, err.value.line, err.value.column) == (code, line, column)


def test_negative_production_message():
    with pytest.raises(ScenarioParseError, match="negative production"):
        parse_scenario("# capacity=10\n" + HEADER + "a,-1,1,1,1,0,\n")


def test_error_codes_are_distinct():
    samples = {
        "E_DUPLICATE_ID": "a,1,1,1,1,0,\na,1,1,1,1,0,\n",
        "E_NEGATIVE": "a,1,-1,1,1,0,\n",
        "E_NOT_NUMERIC": "a,1,1,1,one,0,\n",
    }
    codes = set()
    for rows in samples.values():
        with pytest.raises(ScenarioParseError) as err:
            parse_scenario("# capacity=10\n" + HEADER + rows)
        codes.add(err.value.code)
    assert codes == set(samples)


names = st.text(st.sampled_from("abcdefghijklmnopqrstuvwxyz"), min_size=1, max_size=6)
amounts = st.floats(min_value=0, max_value=1e12, allow_nan=False)


@given(
    st.lists(st.tuples(names, amounts, amounts, amounts, amounts, amounts, st.none() | amounts),
             max_size=5, unique_by=lambda r: r[0]),
    amounts, st.none() | st.floats(0, 1), st.none() | st.integers(0, 99),
)
def test_round_trip(rows, capacity, cap, seed):
    sc = MarketScenario(tuple(SupplierSpec(*r) for r in rows), capacity, cap, tie_rule=TieRule(seed))
    text = format_scenario(sc)
    assert parse_scenario(text) == sc
    assert format_scenario(parse_scenario(text)) == text


def test_vectors():
    sc = canadian()
    assert parse_vector("id,quota\nOat,5\n# note\nCorn,1.5\n", sc, "quota") == (0, 1.5, 0, 5)
    with pytest.raises(ScenarioParseError) as err:
        parse_vector("Rye,1\n", sc, "quota")
    assert err.value.code == "E_INVALID"
    with pytest.raises(ScenarioParseError) as err:
        parse_vector("Oat,1\nOat,2\n", sc, "quota")
    assert err.value.code == "E_DUPLICATE_ID"
    with pytest.raises(ScenarioParseError) as err:
        parse_vector("Oat,-1\n", sc, "price")
    assert err.value.code == "E_NEGATIVE"


def table_rows(text):
    return [line.split("  ") for line in text.splitlines()[2:] if line.strip()]


def cells(text):
    return [[c.strip() for c in row if c.strip()] for row in table_rows(text)]


def test_unregulated_table():
    sc = canadian()
    assert cells(grouping_table(sc, group_suppliers(sc))) == [
        ["Crude Oil", "14.7930", "G1", "128,185,505"],
        ["Corn", "0.0342", "G1", "440,916,666"],
        ["Barley", "0.0029", "G2", "80,897,829"],
        ["Oat", "-0.0007", "G3", "0"],
    ]


def test_empty_table_has_header_only():
    sc = parse_scenario("# capacity=0\n")
    lines = grouping_table(sc, group_suppliers(sc)).splitlines()
    assert len(lines) == 2 and lines[0].startswith("Product")


def test_capped_quota_table():
    sc = canadian(beta_oat=1.0, cap=0.2)
    report = solve_summ(sc)
    text = render_report(sc, report, baseline=group_suppliers(sc))
    rows = cells(text.split("\n\n")[0])
    assert [r[:3] for r in rows] == [["Crude Oil", "G1", "G1"], ["Corn", "G1", "G1"],
                                     ["Barley", "G2", "G2"], ["Oat", "G3", "G3"]]
    amounts = [int(r[-1].replace(",", "")) for r in rows]
    assert amounts[:2] == [128_185_505, 440_916_666]
    assert abs(amounts[2] - 25_782_263) <= 1
    assert abs(amounts[3] - 55_115_565) <= 1
    assert "social utility: 1,918,677,074.72" in text


def test_machine_output_is_byte_stable_and_complete():
    sc = canadian(beta_oat=1.0)
    first = render_report(sc, solve_summ(sc), "machine")
    again = render_report(dataclasses.replace(sc), solve_summ(sc), "machine")
    assert first == again
    doc = json.loads(first)
    assert doc["quotas"]["Oat"] == 275_577_827
    assert [s["quantity"] for s in doc["suppliers"]] == [128_185_505, 246_236_668, 0, 275_577_827]
    assert doc["groups"] == {"G1": ["Crude Oil"], "G2": ["Corn"], "G3": ["Barley", "Oat"]}
    assert set(doc["breakdown"]) == {"G1", "G2", "G3"}
    assert doc["pi_s"] == social_utility(sc, [0, 0, 0, 275_577_827]).pi_s


def test_load_from_path(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text(format_scenario(canadian()), encoding="utf-8")
    assert load_scenario(p) == canadian()
    with pytest.raises(OSError):
        load_scenario(tmp_path / "missing.csv")
