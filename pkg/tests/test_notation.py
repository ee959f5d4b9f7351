import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pcontact.invariant import InvariantForm
from pcontact.notation import FormSyntaxError, format_form, format_vform, parse_form, parse_vform
from pcontact.polyforms import random_invariant_form, random_invariant_vform


def test_simple_terms():
    u = parse_form("2*phi1^phi2b", 3)
    assert u.coefficient((1,), (2,)) == 2


def test_reordering_sign():
    assert parse_form("phi2^phi1", 3) == parse_form("-phi1^phi2", 3)
    assert parse_form("phi1b^phi1", 3) == parse_form("-phi1^phi1b", 3)


def test_repeated_factor_is_zero():
    assert not parse_form("phi1^phi1", 3)


def test_complex_coefficient():
    u = parse_form("(1/2+i)*phi3", 3)
    assert str(u.coefficient((3,))) == "1/2+i"


def test_zero_literal():
    assert parse_form("0", 3) == InvariantForm.zero(3)


@pytest.mark.parametrize("bad", ["phi4", "phi1^^phi2", "psi1", "2**phi1", "phi1 +"])
def test_malformed(bad):
    with pytest.raises(FormSyntaxError):
        parse_form(bad, 3)


def test_pretty_print():
    assert format_form(parse_form("phi2^phi1 + 2*phi1b", 3)) == "-φ₁∧φ₂ + 2 φ̄₁"
    assert format_vform(parse_vform("phi1b*xi1 + 2*phi2b*xi3", 3)) == "φ̄₁⊗ξ₁ + 2 φ̄₂⊗ξ₃"


def test_unicode_input_accepted():
    assert parse_form("φ₁∧φ̄₂", 3) == parse_form("phi1^phi2b", 3)


@given(st.integers(0, 10_000))
def test_form_round_trip(seed):
    rng = random.Random(seed)
    u = random_invariant_form(rng, 3, rng.randint(0, 3), rng.randint(0, 3))
    assert parse_form(format_form(u), 3) == u


@given(st.integers(0, 10_000))
def test_vform_round_trip(seed):
    rng = random.Random(seed)
    th = random_invariant_vform(rng, 3, rng.randint(0, 2))
    assert parse_vform(format_vform(th), 3) == th
