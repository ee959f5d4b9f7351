import random

import pytest

from pcontact.catalog import catalog_get
from pcontact.invariant import InvariantForm, delop
from pcontact.notation import parse_form, parse_vform
from pcontact.polyforms import (Poly, PolyForm, PolyVectorForm, UnsupportedModelError, bridge_check,
                                identity_suite, p_bracket, p_calculus, p_contract, p_d, p_del,
                                p_delbar, p_lie, p_lie10, random_polyform, random_polyvform,
                                realize_bridge, RandomSpec)


def pf(poly, *gens):
    return PolyForm.from_poly(poly, tuple(gens))


def test_del_of_z_dzbar():
    n = 1
    u = pf(Poly.z(n, 1), 1)           # z dz̄
    assert p_del(u) == PolyForm.dz(n, 1).wedge(PolyForm.dzbar(n, 1))


def test_delbar_of_zbar_dz():
    n = 1
    u = pf(Poly.zbar(n, 1), 0)        # z̄ dz
    assert p_delbar(u) == -(PolyForm.dz(n, 1).wedge(PolyForm.dzbar(n, 1)))


def test_vector_contraction_convention():
    n = 2
    theta = PolyVectorForm(n, {0: pf(Poly.zbar(n, 1), 3)})    # z̄₁ dz̄₂ ⊗ ∂/∂z₁
    u = PolyForm.dz(n, 1).wedge(PolyForm.dz(n, 2))
    assert p_contract(theta, u) == pf(Poly.zbar(n, 1), 3).wedge(PolyForm.dz(n, 2))


def test_lie_flat_example_both_modes():
    n = 1
    theta = PolyVectorForm(n, {0: pf(Poly.z(n, 1), 1)})      # z dz̄ ⊗ ∂/∂z
    u = PolyForm.dz(n, 1)
    expected = PolyForm.dz(n, 1).wedge(PolyForm.dzbar(n, 1))
    assert p_lie(theta, u, "definition") == expected
    assert p_lie(theta, u, "formula") == expected


def test_lie10_coordinate_field_is_partial_derivative():
    n = 2
    rng = random.Random(5)
    u = random_polyform(rng, n, 1, 1, 2, RandomSpec())
    for k in (1, 2):
        field = PolyVectorForm.coordinate(n, k)
        from pcontact.polyforms import p_partial
        assert p_lie10(field, u) == p_partial(u, k)


def test_lie_zero_theta():
    u = PolyForm.dz(2, 1)
    assert not p_lie(PolyVectorForm(2, {}), u)


def test_bracket_flat_example():
    n = 2
    phi = PolyVectorForm(n, {0: pf(Poly.z(n, 2), 2)})        # z₂ dz̄₁ ⊗ ∂/∂z₁
    psi = PolyVectorForm(n, {1: pf(Poly.const(n, 1), 3)})    # dz̄₂ ⊗ ∂/∂z₂
    expected = PolyVectorForm(n, {0: -(PolyForm.dzbar(n, 1).wedge(PolyForm.dzbar(n, 2)))})
    assert p_bracket(phi, psi) == expected


def test_bracket_constant_coefficients_vanishes():
    n = 2
    phi = PolyVectorForm(n, {0: PolyForm.dzbar(n, 1)})
    psi = PolyVectorForm(n, {1: PolyForm.dzbar(n, 2)})
    assert not p_bracket(phi, psi)


@pytest.mark.parametrize("seed", range(8))
def test_bracket_anticommutation_random(seed):
    rng = random.Random(seed)
    n = 2
    p, q = rng.randint(0, 1), rng.randint(0, 2)
    a = random_polyvform(rng, n, p, 2, RandomSpec())
    b = random_polyvform(rng, n, q, 2, RandomSpec())
    s = -1 if (p * q) % 2 else 1
    assert not (p_bracket(a, b) + p_bracket(b, a) * s)


def test_p_calculus_dispatch():
    u = PolyForm.dz(2, 1)
    assert p_calculus("d", u) == p_d(u)
    with pytest.raises(ValueError):
        p_calculus("nope", u)


def test_suite_trivial_run():
    rep = identity_suite(1, 1)
    assert rep.passed and rep.failures == 0


def test_suite_small_seeded_run_passes():
    rep = identity_suite(7, 12)
    assert rep.passed, rep.first_counterexample
    assert rep.checks_run > 0
    assert all(f == 0 for _p, f in rep.per_identity.values())


def test_suite_is_deterministic():
    a, b = identity_suite(3, 4), identity_suite(3, 4)
    assert a.per_identity == b.per_identity and a.checks_run == b.checks_run


def test_suite_detects_mutation():
    rep = identity_suite(42, 10, mutate=True)
    assert not rep.passed
    assert rep.first_counterexample is not None


def test_bridge_iwasawa_del_phi3():
    B = realize_bridge("iwasawa")
    phi3 = B.embed(parse_form("phi3", 3))
    assert p_del(phi3) == B.embed(parse_form("-phi1^phi2", 3))


def test_bridge_h15_d_phi2():
    B = realize_bridge("h15")
    assert p_d(B.embed(parse_form("phi2", 3))) == B.embed(parse_form("phi1^phi1b", 3))


def test_bridge_bracket_example():
    from pcontact.invariant import bracket_inv
    B = realize_bridge("iwasawa")
    a, b = parse_vform("phi1b*xi1", 3), parse_vform("phi2b*xi2", 3)
    assert B.embed_vform(bracket_inv(B.L, a, b)) == p_bracket(B.embed_vform(a), B.embed_vform(b))


def test_bridge_unsupported():
    with pytest.raises(UnsupportedModelError):
        realize_bridge("nakamura")


@pytest.mark.parametrize("model", ["iwasawa", "h15"])
def test_bridge_check_full(model):
    rep = bridge_check(model, seed=3, random_inputs=20)
    assert rep.passed, rep.failures[:5]


def test_bridge_coframe_matches_structure_equations():
    for model in ("iwasawa", "h15"):
        B = realize_bridge(model)
        L = catalog_get(model)
        for k in range(1, 4):
            phi = InvariantForm.phi(3, k)
            assert p_del(B.embed(phi)) == B.embed(delop(L, phi))
