import random

import pytest

from pcontact.catalog import CATALOG, catalog_form, catalog_get
from pcontact.contact import (ContactPreconditionError, ContactStructure, classify_vform,
                              contact_exists, foliation_check, is_p_contact, is_p_no_contact, kernels,
                              obs_incompat_identity)
from pcontact.invariant import (InvariantVectorForm, WrongBidegreeError, bracket_inv, contract, delop)
from pcontact.notation import format_vform, parse_form, parse_vform
from pcontact.polyforms import random_invariant_form, random_invariant_vform
from pcontact.scalars import gq


def F(text, n=3):
    return parse_form(text, n)


@pytest.mark.parametrize("eid,form,coef", [
    ("iwasawa", "phi3", -1),
    ("nakamura", "phi2+phi3", 2),
    ("nakamura", "phi2-phi3", -2),
    ("sl2c", "phi1", 1),
    ("h15", "phi3", 1),
    ("ex5", "phi2-phi3", -2),
])
def test_contact_coefficients(eid, form, coef):
    r = is_p_contact(catalog_get(eid), F(form))
    assert r.holds and r.top_coefficient == gq(coef)


@pytest.mark.parametrize("eps", [0, 1])
def test_ex52_is_3_contact(eps):
    L = catalog_get("ex52", {"eps": eps})
    r = is_p_contact(L, catalog_form("ex52", "gamma", {"eps": eps}))
    assert r.holds and r.top_coefficient == 2


def test_torus_fails_condition_b():
    r = is_p_contact(catalog_get("torus"), F("phi1+phi2"))
    assert not r.holds and r.top_coefficient == 0 and r.failed_condition.startswith("(b)")


def test_non_closed_fails_condition_a():
    r = is_p_contact(catalog_get("h15"), F("phi2"))
    assert not r.holds and r.failed_condition.startswith("(a)")


def test_wrong_bidegree():
    with pytest.raises(WrongBidegreeError):
        is_p_contact(catalog_get("iwasawa"), F("phi1b"))


def test_no_contact_nakamura():
    L = catalog_get("nakamura")
    r = is_p_no_contact(L, F("phi2"))
    assert r.holds and r.zeta == F("-phi1")
    r = is_p_no_contact(L, F("phi1"))
    assert r.holds and not r.zeta


def test_no_contact_fails_on_iwasawa():
    assert not is_p_no_contact(catalog_get("iwasawa"), F("phi3")).holds


def test_exists_uga07_a_point():
    r = contact_exists(catalog_get("uga07_a", {"A": 0, "E": 1, "b": 1}), 1)
    assert not r.exists
    assert all(all(not x for x in row) for row in r.polarization)


def test_exists_uga07_b_points():
    r = contact_exists(catalog_get("uga07_b", {"eps": 0, "rho": 1}), 1)
    assert r.exists and r.witness == F("phi3")
    r = contact_exists(catalog_get("uga07_b", {"eps": 1, "rho": 1, "A": 1, "D": 1}), 1)
    assert r.exists
    r = contact_exists(catalog_get("uga07_b", {"eps": 0, "rho": 1, "A": 1, "B": 1}), 1)
    assert not r.exists


def test_exists_requires_odd_dimension():
    with pytest.raises(WrongBidegreeError):
        contact_exists(catalog_get("iwasawa"), 2)


def test_exists_witness_is_contact_everywhere():
    for eid in ("uga07_b", "g8_JA", "g8_Jprime", "nakamura", "iwasawa", "torus"):
        for pt in CATALOG[eid].grid():
            L = CATALOG[eid].builder(pt)
            if L.n != 3:
                continue
            r = contact_exists(L, 1)
            if r.exists:
                assert is_p_contact(L, r.witness).holds
            else:
                # independent recheck of the certificate: Q vanishes on the closed forms
                for v in r.closed_basis:
                    assert not v.wedge(delop(L, v)).top_coefficient()


@pytest.mark.parametrize("eps,G", [(0, ["ξ₃"]), (1, [])])
def test_ex52_kernels(eps, G):
    L = catalog_get("ex52", {"eps": eps})
    res = kernels(L, catalog_form("ex52", "gamma", {"eps": eps}))
    assert [format_vform(v) for v in res.F.elements] == ["ξ₁", "ξ₂"]
    assert [format_vform(v) for v in res.G.elements] == G


def test_ex52_contraction_table():
    # the seven displayed contractions, with eps as a symbol evaluated at 0 and 1
    rows = {
        1: ("phi2^phi4^phi5 + phi2^phi5^phi6 + phi2^phi6^phi7", ""),
        2: ("-phi1^phi4^phi5 - phi1^phi5^phi6 - phi1^phi6^phi7", "phi3^phi5^phi7"),
        3: ("0", "-phi2^phi5^phi7"),
        4: ("phi1^phi2^phi5", ""),
        5: ("-phi1^phi2^phi4 + phi1^phi2^phi6", "phi2^phi3^phi7"),
        6: ("-phi1^phi2^phi5 + phi1^phi2^phi7", ""),
        7: ("-phi1^phi2^phi6", "-phi2^phi3^phi5"),
    }
    for eps in (0, 1):
        L = catalog_get("ex52", {"eps": eps})
        dg = delop(L, catalog_form("ex52", "gamma", {"eps": eps}))
        for k, (base, eps_part) in rows.items():
            expected = F(base, 7) + (F(eps_part, 7) * eps if eps_part else F("0", 7))
            assert contract(k, dg) == expected, (eps, k)


def test_ex53_kernels():
    L = catalog_get("ex53", {"l": 1, "base": "abelian", "sigma": 0})
    g = catalog_form("ex53", "gamma", {"l": 1, "base": "abelian", "sigma": 0})
    res = kernels(L, g)
    assert [format_vform(v) for v in res.F.elements] == ["ξ₅", "ξ₆"]
    assert [format_vform(v) for v in res.G.elements] == ["ξ₇"]
    L = catalog_get("ex53", {"l": 1, "base": "nilpotent", "sigma": 0})
    g = catalog_form("ex53", "gamma", {"l": 1, "base": "nilpotent", "sigma": 0})
    assert kernels(L, g).G.dim == 0


def test_f_and_g_meet_trivially_for_contact():
    for eid in ("iwasawa", "nakamura", "sl2c", "h15", "ex5", "g8_Jprime", "ex52"):
        e = CATALOG[eid]
        pt = e.defaults()
        L = e.builder(pt)
        g = catalog_form(eid, e.contact_form, pt)
        k = kernels(L, g)
        from pcontact.spaces import intersect
        assert intersect(k.F.vectors, k.G.vectors, L.n) == []


def test_foliation_examples():
    assert foliation_check(catalog_get("nakamura"), F("phi2")).closed_under_bracket
    r = foliation_check(catalog_get("iwasawa"), F("phi3"))
    assert not r.closed_under_bracket
    assert foliation_check(catalog_get("torus"), F("phi1")).closed_under_bracket


def test_classify_examples():
    L = catalog_get("iwasawa")
    c = classify_vform(L, F("phi3"), parse_vform("phi1b*xi1", 3))
    assert c.constantly_horizontal and c.formulations_agree
    c = classify_vform(L, F("phi3"), parse_vform("phi1b*xi3", 3))
    assert c.constantly_vertical and c.formulations_agree
    c = classify_vform(L, F("phi3"), InvariantVectorForm.zero(3))
    assert c.horizontal and c.vertical and c.constantly_horizontal and c.constantly_vertical


@pytest.mark.parametrize("seed", range(20))
def test_classify_formulations_agree_random(seed):
    rng = random.Random(seed)
    eid = ["iwasawa", "h15", "nakamura", "ex5"][seed % 4]
    L = catalog_get(eid)
    g = catalog_form(eid, CATALOG[eid].contact_form)
    th = random_invariant_vform(rng, 3, rng.randint(0, 2))
    assert classify_vform(L, g, th).formulations_agree


def test_horizontal_vertical_bracket_corollary():
    # constantly horizontal / vertical instances on the Iwasawa fixture
    L = catalog_get("iwasawa")
    g = F("phi3")
    hor = [parse_vform(t, 3) for t in ("phi1b*xi1", "phi2b*xi2", "phi1b*xi2", "phi2b*xi1")]
    ver = [parse_vform(t, 3) for t in ("phi1b*xi3", "phi2b*xi3", "phi3b*xi3")]
    for h in hor:
        assert classify_vform(L, g, h).constantly_horizontal
    for v in ver:
        c = classify_vform(L, g, v)
        assert c.vertical
        for h in hor:
            br = bracket_inv(L, h, v)
            if c.constantly_vertical:
                assert not br
            assert not contract(br, delop(L, g))


def test_incompatibility_on_contact_entries():
    for eid, e in CATALOG.items():
        if not e.contact_form:
            continue
        for pt in e.grid():
            L = e.builder(pt)
            g = catalog_form(eid, e.contact_form, pt)
            if not is_p_contact(L, g).holds:
                continue
            r = obs_incompat_identity(L, g)
            assert not r.residual and r.dV_nonzero, (eid, pt)


def test_incompatibility_closed_form():
    r = obs_incompat_identity(catalog_get("iwasawa"), F("phi1"))
    assert not r.residual and not r.dV_nonzero


@pytest.mark.parametrize("seed", range(10))
def test_contact_excludes_no_contact(seed):
    rng = random.Random(seed)
    for eid in ("iwasawa", "nakamura", "sl2c", "h15"):
        L = catalog_get(eid)
        g = random_invariant_form(rng, 3, 1, 0)
        if is_p_contact(L, g).holds:
            assert not is_p_no_contact(L, g).holds


def test_contact_structure_precondition():
    with pytest.raises(ContactPreconditionError):
        ContactStructure(catalog_get("torus"), F("phi1"))
    cs = ContactStructure(catalog_get("iwasawa"), F("phi3"))
    assert cs.p == 1 and cs.u_gamma == F("-phi1^phi2^phi3")
