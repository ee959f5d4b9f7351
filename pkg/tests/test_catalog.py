import pytest

from pcontact.catalog import (CATALOG, SOLVABLE_IDS, InadmissibleParametersError, UnknownEntryError,
                              catalog_form, catalog_get, catalog_list, ex53_from_base)
from pcontact.contact import contact_exists, is_p_contact
from pcontact.invariant import InvariantForm, d, delop, validate
from pcontact.notation import parse_form


def F(t, n=3):
    return parse_form(t, n)


def test_list_contains_reference_fixtures():
    ids = set(catalog_list())
    for eid in ("torus", "iwasawa", "nakamura", "sl2c", "h15", "ex5", "uga07_a", "uga07_b",
                "ex52", "ex53", *SOLVABLE_IDS):
        assert eid in ids


@pytest.mark.parametrize("eid", list(CATALOG))
def test_every_grid_point_validates(eid):
    e = CATALOG[eid]
    grid = e.grid()
    assert grid
    for pt in grid:
        r = validate(e.builder(pt))
        assert r.jacobi_ok and r.integrable, (eid, pt, r.diagnostics)


def test_iwasawa_table():
    L = catalog_get("iwasawa")
    assert L.n == 3
    assert delop(L, F("phi3")) == F("-phi1^phi2")
    assert not delop(L, F("phi1")) and not delop(L, F("phi2"))


def test_uga07_b_example4_type():
    L = catalog_get("uga07_b", {"eps": 1, "rho": 1, "A": 1, "B": 0, "C": 0, "D": 1})
    assert validate(L).nilpotent
    assert contact_exists(L, 1).exists


def test_ex52_table():
    L = catalog_get("ex52", {"eps": 1})
    assert L.n == 7
    assert d(L, F("phi6", 7)) == F("phi2^phi5", 7)
    assert d(L, F("phi7", 7)) == F("phi2^phi6", 7)


def test_g8_JA_minus_i_is_nakamura_structure():
    # same equations as the Nakamura entry after φ₁ = 2i ω₃, φ₂ = ω₂, φ₃ = ω₁
    from pcontact.invariant import delbar
    L = catalog_get("g8_JA", {"A": "-i"})
    a1, a2, a3 = F("2*i*phi3"), F("phi2"), F("phi1")
    assert not delop(L, a1)
    assert delop(L, a2) == a1.wedge(a2)
    assert delop(L, a3) == -a1.wedge(a3)
    assert not any(delbar(L, a) for a in (a1, a2, a3))
    assert validate(L).complex_parallelisable


def test_ex53_abelian():
    L = catalog_get("ex53", {"l": 1, "base": "abelian", "sigma": 0})
    assert L.n == 7
    assert delop(L, F("phi7", 7)) == F("phi5^phi6", 7)
    g = catalog_form("ex53", "gamma", {"l": 1, "base": "abelian", "sigma": 0})
    assert is_p_contact(L, g).holds


def test_ex53_pluggable_base():
    base = catalog_get("torus", {"n": 4})
    omega = F("phi1^phi2 + phi3^phi4", 4)
    L, g = ex53_from_base(base, omega, InvariantForm.zero(4))
    assert validate(L).valid and is_p_contact(L, g).holds


def test_unknown_entry():
    with pytest.raises(UnknownEntryError):
        catalog_get("nope")


@pytest.mark.parametrize("eid,params,needle", [
    ("uga07_a", {"E": 2}, "|E|^2 = 1"),
    ("uga07_b", {"eps": 2}, "eps in {0,1}"),
    ("g8_JA", {"A": 1}, "Im A != 0"),
    ("g3", {"x": 0}, "x > 0"),
    ("uga07_a", {"b": 0}, "b != 0"),
])
def test_inadmissible_parameters_named(eid, params, needle):
    with pytest.raises(InadmissibleParametersError, match=needle.replace("|", r"\|").replace("^", r"\^")):
        catalog_get(eid, params)


def test_unknown_parameter():
    with pytest.raises(InadmissibleParametersError):
        catalog_get("iwasawa", {"q": 1})


@pytest.mark.parametrize("eid", ["iwasawa", "nakamura", "sl2c"])
def test_complex_parallelisable(eid):
    assert validate(catalog_get(eid)).complex_parallelisable


def test_contact_forms_are_contact():
    for eid, e in CATALOG.items():
        if e.contact_form:
            for pt in e.grid():
                L = e.builder(pt)
                assert is_p_contact(L, catalog_form(eid, e.contact_form, pt)).holds, (eid, pt)
