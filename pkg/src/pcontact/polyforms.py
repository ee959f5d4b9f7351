"""Flat-model calculus on C^n with polynomial coefficients in z and zbar.

Forms are stored flat: ``terms`` maps (monomial, exponent vector) to a
coefficient, where the exponent vector lists the powers of z_1..z_n and then
zbar_1..zbar_n.  Monomials use the same generator encoding and signs as the
invariant engine, with dz_k and dzbar_k in place of phi_k and phibar_k.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional

from .exterior import basis_monomials, bidegree, conj_mono, contract_mono, wedge_mono
from .invariant import (InvariantForm, InvariantVectorForm, LieCS, _add_into, apply_differential,
                        bracket_inv, contract, delbar_vform, lie10_derivative, lie_derivative)
from .scalars import ONE, ZERO, GaussianRational, gq


class UnsupportedModelError(ValueError):
    pass


@lru_cache(maxsize=None)
def _add_exps(e1: tuple, e2: tuple) -> tuple:
    return tuple(a + b for a, b in zip(e1, e2))


class Poly:
    """Polynomial in z_1..z_n, zbar_1..zbar_n with Gaussian-rational coefficients."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Optional[dict] = None):
        self.n = n
        self.terms = {tuple(e): gq(c) for e, c in (terms or {}).items() if c}

    @classmethod
    def const(cls, n: int, c) -> "Poly":
        return cls(n, {(0,) * (2 * n): c})

    @classmethod
    def z(cls, n: int, k: int) -> "Poly":
        e = [0] * (2 * n)
        e[k - 1] = 1
        return cls(n, {tuple(e): 1})

    @classmethod
    def zbar(cls, n: int, k: int) -> "Poly":
        e = [0] * (2 * n)
        e[n + k - 1] = 1
        return cls(n, {tuple(e): 1})

    def __add__(self, other):
        acc = dict(self.terms)
        for e, c in other.terms.items():
            _add_into(acc, e, c)
        return Poly(self.n, acc)

    def __neg__(self):
        return Poly(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Poly):
            acc: dict = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    _add_into(acc, _add_exps(e1, e2), c1 * c2)
            return Poly(self.n, acc)
        c = gq(other)
        return Poly(self.n, {e: v * c for e, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, Poly) and self.n == other.n and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"Poly({self.terms})"


_PACK_BITS = 16


def _pack(e: tuple) -> int:
    v = 0
    for x in reversed(e):
        v = (v << _PACK_BITS) | x
    return v


def _unpack(v: int, length: int) -> tuple:
    mask = (1 << _PACK_BITS) - 1
    out = []
    for _ in range(length):
        out.append(v & mask)
        v >>= _PACK_BITS
    return tuple(out)


def _group_terms(terms: dict) -> dict:
    """{mono: [(packed exps, a, b, d)]} from flat (mono, exps) -> scalar terms."""
    groups: dict = {}
    for (m, e), c in terms.items():
        groups.setdefault(m, []).append((_pack(e), c.a, c.b, c.d))
    return groups


def _wedge_terms_fast(t1: dict, t2: dict, nvars: int) -> dict:
    g1 = _group_terms(t1)
    g2 = _group_terms(t2)
    acc: dict = {}
    for m1, l1 in g1.items():
        for m2, l2 in g2.items():
            r = wedge_mono(m1, m2)
            if r is None:
                continue
            s, m = r
            bucket = acc.setdefault(m, {})
            get = bucket.get
            for p1, a1, b1, d1 in l1:
                if s < 0:
                    a1, b1 = -a1, -b1
                for p2, a2, b2, d2 in l2:
                    a = a1 * a2 - b1 * b2
                    b = a1 * b2 + b1 * a2
                    d = d1 * d2
                    key = p1 + p2
                    prev = get(key)
                    if prev is None:
                        bucket[key] = (a, b, d)
                    elif prev[2] == d:
                        bucket[key] = (prev[0] + a, prev[1] + b, d)
                    else:
                        pd = prev[2]
                        bucket[key] = (prev[0] * d + a * pd, prev[1] * d + b * pd, pd * d)
    out: dict = {}
    for m, bucket in acc.items():
        for key, (a, b, d) in bucket.items():
            if a or b:
                out[(m, _unpack(key, nvars))] = GaussianRational._raw(a, b, d)
    return out


class PolyForm:
    """Form on C^n with polynomial coefficients (flat term storage)."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Optional[dict] = None):
        self.n = n
        self.terms = {k: c for k, c in (terms or {}).items() if c}

    @classmethod
    def zero(cls, n):
        return cls(n, {})

    @classmethod
    def from_poly(cls, poly: Poly, mono: tuple = ()) -> "PolyForm":
        return cls(poly.n, {(tuple(mono), e): c for e, c in poly.terms.items()})

    @classmethod
    def dz(cls, n: int, k: int) -> "PolyForm":
        return cls(n, {((k - 1,), (0,) * (2 * n)): ONE})

    @classmethod
    def dzbar(cls, n: int, k: int) -> "PolyForm":
        return cls(n, {((n + k - 1,), (0,) * (2 * n)): ONE})

    def coefficient(self, mono: tuple) -> Poly:
        return Poly(self.n, {e: c for (m, e), c in self.terms.items() if m == mono})

    def bidegrees(self) -> set:
        return {bidegree(m, self.n) for (m, _e) in self.terms}

    def degree(self) -> Optional[int]:
        degs = {len(m) for (m, _e) in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError("form is not homogeneous")
        return next(iter(degs))

    def _check(self, other):
        if not isinstance(other, PolyForm):
            raise TypeError("expected PolyForm")
        if other.n != self.n:
            raise ValueError("dimension mismatch")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        acc = dict(self.terms)
        for k, c in other.terms.items():
            _add_into(acc, k, c)
        return PolyForm(self.n, acc)

    __radd__ = __add__

    def __neg__(self):
        return PolyForm(self.n, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        """Multiply by a scalar or by a Poly function."""
        if isinstance(other, Poly):
            acc: dict = {}
            for (m, e1), c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    _add_into(acc, (m, _add_exps(e1, e2)), c1 * c2)
            return PolyForm(self.n, acc)
        c = gq(other)
        if not c:
            return PolyForm(self.n, {})
        return PolyForm(self.n, {k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def wedge(self, other: "PolyForm") -> "PolyForm":
        self._check(other)
        return PolyForm(self.n, _wedge_terms_fast(self.terms, other.terms, 2 * self.n))

    __xor__ = wedge

    def conj(self) -> "PolyForm":
        n = self.n
        acc = {}
        for (m, e), c in self.terms.items():
            s, mm = conj_mono(m, n)
            ee = e[n:] + e[:n]
            cc = c.conjugate()
            acc[(mm, ee)] = cc if s > 0 else -cc
        return PolyForm(n, acc)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        return isinstance(other, PolyForm) and self.n == other.n and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"PolyForm(n={self.n}, {len(self.terms)} terms)"


class PolyVectorForm:
    """sum_k components[k] (x) d/dz_{k+1}, components of type (0,q)."""

    __slots__ = ("n", "components")

    def __init__(self, n: int, components: Optional[dict] = None):
        self.n = n
        comps = {}
        for k, f in (components or {}).items():
            if f:
                if any(b[0] != 0 for b in f.bidegrees()):
                    raise ValueError("vector form components must be of type (0,q)")
                comps[k] = f
        self.components = dict(sorted(comps.items()))

    @classmethod
    def coordinate(cls, n: int, k: int) -> "PolyVectorForm":
        """The constant field d/dz_k (1-based)."""
        return cls(n, {k - 1: PolyForm.from_poly(Poly.const(n, 1))})

    @property
    def q(self) -> Optional[int]:
        for f in self.components.values():
            return f.degree()
        return None

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        comps = dict(self.components)
        for k, f in other.components.items():
            comps[k] = comps[k] + f if k in comps else f
        return PolyVectorForm(self.n, comps)

    __radd__ = __add__

    def __neg__(self):
        return PolyVectorForm(self.n, {k: -f for k, f in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        return PolyVectorForm(self.n, {k: f * c for k, f in self.components.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.components
        return (isinstance(other, PolyVectorForm) and self.n == other.n
                and self.components == other.components)

    def __bool__(self):
        return bool(self.components)

    def __repr__(self):
        return f"PolyVectorForm(n={self.n}, q={self.q})"


# ---------------------------------------------------------------------------
# flat-model operators
# ---------------------------------------------------------------------------

def _coordinate_d(u: PolyForm, barred: bool) -> PolyForm:
    n = u.n
    off = n if barred else 0
    acc: dict = {}
    for (m, e), c in u.terms.items():
        for l in range(n):
            k = e[off + l]
            if not k:
                continue
            r = wedge_mono((off + l,), m)
            if r is None:
                continue
            s, mm = r
            ee = list(e)
            ee[off + l] -= 1
            v = c * k
            _add_into(acc, (mm, tuple(ee)), v if s > 0 else -v)
    return PolyForm(n, acc)


def p_del(u: PolyForm) -> PolyForm:
    return _coordinate_d(u, False)


def p_delbar(u: PolyForm) -> PolyForm:
    return _coordinate_d(u, True)


def p_d(u: PolyForm) -> PolyForm:
    return p_del(u) + p_delbar(u)


def p_partial(u: PolyForm, k: int, barred: bool = False) -> PolyForm:
    """Coefficient-wise derivative d/dz_k (or d/dzbar_k), 1-based k."""
    n = u.n
    idx = (n if barred else 0) + k - 1
    acc: dict = {}
    for (m, e), c in u.terms.items():
        p = e[idx]
        if p:
            ee = list(e)
            ee[idx] -= 1
            _add_into(acc, (m, tuple(ee)), c * p)
    return PolyForm(n, acc)


def _contract_gen(g: int, u: PolyForm) -> PolyForm:
    acc: dict = {}
    for (m, e), c in u.terms.items():
        r = contract_mono(g, m)
        if r is None:
            continue
        s, mm = r
        _add_into(acc, (mm, e), c if s > 0 else -c)
    return PolyForm(u.n, acc)


def p_contract(theta, u: PolyForm) -> PolyForm:
    """θ⌟u = sum_k θ^k ^ (d/dz_k ⌟ u); an int means the coordinate field d/dz_k."""
    if isinstance(theta, int):
        return _contract_gen(theta - 1, u)
    out = PolyForm.zero(u.n)
    for k, f in theta.components.items():
        cu = _contract_gen(k, u)
        if cu:
            out = out + f.wedge(cu)
    return out


def p_wedge(u: PolyForm, v: PolyForm) -> PolyForm:
    return u.wedge(v)


def p_calculus(op: str, *args):
    """Dispatch for the elementary operators: del, delbar, d, wedge, contract."""
    table = {"del": p_del, "∂": p_del, "delbar": p_delbar, "∂̄": p_delbar, "d": p_d,
             "wedge": p_wedge, "contract": p_contract}
    if op not in table:
        raise ValueError(f"unknown operator {op!r}")
    return table[op](*args)


def p_del_vform(theta: PolyVectorForm) -> dict:
    """∂θ as {k: (1,q)-form}; not a (0,q)-valued form, so returned raw."""
    return {k: p_del(f) for k, f in theta.components.items()}


def p_delbar_vform(theta: PolyVectorForm) -> PolyVectorForm:
    return PolyVectorForm(theta.n, {k: p_delbar(f) for k, f in theta.components.items()})


def _apply_field(theta_comps: dict, u: PolyForm) -> PolyForm:
    """θ(u) = sum_k θ^k ^ (du/dz_k)."""
    out = PolyForm.zero(u.n)
    for k, f in theta_comps.items():
        du = p_partial(u, k + 1)
        if du:
            out = out + f.wedge(du)
    return out


def _contract_raw(comps: dict, u: PolyForm) -> PolyForm:
    out = PolyForm.zero(u.n)
    for k, f in comps.items():
        cu = _contract_gen(k, u)
        if cu:
            out = out + f.wedge(cu)
    return out


def p_lie(theta: PolyVectorForm, u: PolyForm, mode: str = "definition",
          _mutation: bool = False) -> PolyForm:
    """Lie derivative along a vector-valued (0,s)-form.

    definition: ∂(θ⌟u) - (-1)^{s+1} θ⌟∂u (any s)
    formula:    (∂θ)⌟u - θ(u)            (s = 1)
    ``_mutation`` flips the sign of the second term; used only to check that
    the identity suite detects a wrong sign.
    """
    s = theta.q
    if s is None:
        return PolyForm.zero(u.n)
    if mode == "definition":
        first = p_del(p_contract(theta, u))
        second = p_contract(theta, p_del(u))
        minus = (s % 2 == 1) != _mutation
        return first - second if minus else first + second
    if mode == "formula":
        if s != 1:
            raise ValueError("formula mode requires a (0,1)-valued θ")
        return _contract_raw(p_del_vform(theta), u) - _apply_field(theta.components, u)
    raise ValueError(f"unknown mode {mode!r}")


def p_lie10(xi: PolyVectorForm, u: PolyForm, mode: str = "definition") -> PolyForm:
    """(1,0) Lie derivative: ∂(ξ⌟u) + ξ⌟∂u, or (∂ξ)⌟u + ξ(u) in formula mode."""
    if xi.q not in (None, 0):
        raise ValueError("expected a (1,0) vector field")
    if mode == "definition":
        return p_del(p_contract(xi, u)) + p_contract(xi, p_del(u))
    if mode == "formula":
        return _contract_raw(p_del_vform(xi), u) + _apply_field(xi.components, u)
    raise ValueError(f"unknown mode {mode!r}")


def p_bracket(phi: PolyVectorForm, psi: PolyVectorForm) -> PolyVectorForm:
    """Coordinate bracket

    [φ,ψ] = sum_λ (sum_μ φ^μ ∧ ∂ψ^λ/∂z_μ - (-1)^{pq} ψ^μ ∧ ∂φ^λ/∂z_μ) ∂/∂z_λ.
    """
    n = phi.n
    p, q = phi.q, psi.q
    if p is None or q is None:
        return PolyVectorForm(n, {})
    sign = -1 if (p * q) % 2 else 1
    comps: Dict[int, PolyForm] = {}
    for lam in range(n):
        acc = PolyForm.zero(n)
        if lam in psi.components:
            acc = acc + _apply_field(phi.components, psi.components[lam])
        if lam in phi.components:
            t = _apply_field(psi.components, phi.components[lam])
            acc = acc - t if sign > 0 else acc + t
        if acc:
            comps[lam] = acc
    return PolyVectorForm(n, comps)


# ---------------------------------------------------------------------------
# random data
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _exponent_vectors(nvars: int, deg_max: int) -> tuple:
    out = []

    def rec(prefix, remaining, left):
        if left == 0:
            out.append(tuple(prefix))
            return
        for a in range(remaining + 1):
            rec(prefix + [a], remaining - a, left - 1)

    rec([], deg_max, nvars)
    return tuple(sorted(out, key=lambda e: (sum(e), e)))


def random_scalar(rng: random.Random) -> GaussianRational:
    return GaussianRational(rng.randint(-2, 2), rng.randint(-2, 2))


@dataclass
class RandomSpec:
    """Shape of random draws: how many monomials per coefficient and per form."""
    coeff_terms: int = 2
    form_terms: int = 2
    holomorphic: bool = False
    antiholomorphic: bool = False
    dense_coefficients: bool = True


def random_poly(rng: random.Random, n: int, deg_max: int, spec: RandomSpec) -> Poly:
    exps = _exponent_vectors(2 * n, deg_max)
    if spec.holomorphic:
        exps = tuple(e for e in exps if not any(e[n:]))
    if spec.antiholomorphic:
        exps = tuple(e for e in exps if not any(e[:n]))
    if spec.dense_coefficients:
        return Poly(n, {e: random_scalar(rng) for e in exps})
    terms = {}
    for _ in range(rng.randint(1, spec.coeff_terms)):
        e = exps[rng.randrange(len(exps))]
        terms[e] = terms.get(e, ZERO) + random_scalar(rng)
    return Poly(n, terms)


def random_polyform(rng, n, p, q, deg_max, spec: RandomSpec) -> PolyForm:
    basis = basis_monomials(n, p, q)
    out = PolyForm.zero(n)
    if not basis:
        return out
    for _ in range(rng.randint(1, spec.form_terms)):
        m = basis[rng.randrange(len(basis))]
        out = out + PolyForm.from_poly(random_poly(rng, n, deg_max, spec), m)
    return out


def random_polyvform(rng, n, q, deg_max, spec: RandomSpec) -> PolyVectorForm:
    comps = {}
    for _ in range(rng.randint(1, spec.form_terms)):
        k = rng.randrange(n)
        f = random_polyform(rng, n, 0, q, deg_max, spec)
        comps[k] = comps[k] + f if k in comps else f
    return PolyVectorForm(n, comps)


def random_bidegree(rng, n, max_total=None):
    while True:
        p, q = rng.randint(0, n), rng.randint(0, n)
        if max_total is None or p + q <= max_total:
            return p, q


# ---------------------------------------------------------------------------
# identity suite
# ---------------------------------------------------------------------------

@dataclass
class SuiteReport:
    seed: int
    trials: int
    checks_run: int
    failures: int
    per_identity: Dict[str, List[int]]          # name -> [passed, failed]
    first_counterexample: Optional[dict] = None

    @property
    def passed(self) -> bool:
        return self.failures == 0


def _top_form(n: int, f: Poly) -> PolyForm:
    return PolyForm.from_poly(f, tuple(range(n)))


def cy_inverse_flat(gamma: PolyForm, q: int) -> PolyVectorForm:
    """Inverse of θ ↦ θ⌟(dz_1∧…∧dz_n) on (n-1,q)-forms."""
    n = gamma.n
    comps: Dict[int, PolyForm] = {}
    for (m, e), c in gamma.terms.items():
        unb = [g for g in m if g < n]
        bar = tuple(g for g in m if g >= n)
        if len(unb) != n - 1 or len(bar) != q:
            raise ValueError("expected an (n-1,q)-form")
        k = next(g for g in range(n) if g not in unb)
        sign = -1 if (k + q * (n - 1)) % 2 else 1
        f = PolyForm(n, {(bar, e): c if sign > 0 else -c})
        comps[k] = comps[k] + f if k in comps else f
    return PolyVectorForm(n, comps)


def _trial_checks(rng: random.Random, n: int, deg_max: int, mutate: bool) -> List[tuple]:
    """Draw one instance and return [(name, residual, data)]."""
    spec = RandomSpec()
    holo = RandomSpec(holomorphic=True)

    def lie(t, u):
        return p_lie(t, u, "definition", _mutation=mutate)

    def rform(p=None, q=None, max_total=None):
        if p is None:
            p, q = random_bidegree(rng, n, max_total)
        return random_polyform(rng, n, p, q, deg_max, spec)

    def rv(q):
        return random_polyvform(rng, n, q, deg_max, spec)

    out = []
    deg_choices = [d for d in (0, 1, 2) if d <= n]
    # bracket lemma
    p, q, r = (rng.choice(deg_choices) for _ in range(3))
    a, b, c = rv(p), rv(q), rv(r)
    sgn = lambda k: -1 if k % 2 else 1
    out.append(("bracket_anticommutation",
                p_bracket(a, b) + p_bracket(b, a) * sgn(p * q), (a, b)))
    out.append(("bracket_delbar_leibniz",
                p_delbar_vform(p_bracket(a, b)) - p_bracket(p_delbar_vform(a), b)
                - p_bracket(a, p_delbar_vform(b)) * sgn(p), (a, b)))
    jac = (p_bracket(p_bracket(a, b), c) * sgn(p * r) + p_bracket(p_bracket(b, c), a) * sgn(q * p)
           + p_bracket(p_bracket(c, a), b) * sgn(r * q))
    out.append(("bracket_jacobi", jac, (a, b, c)))

    # Lie derivative identities for (0,1)-valued θ, ψ
    th, ps = rv(1), rv(1)
    u = rform(max_total=2 * n - 1)
    v = rform(max_total=n)
    dbth = p_delbar_vform(th)
    out.append(("lie_delbar_commutator",
                lie(th, p_delbar(u)) + p_delbar(lie(th, u))
                + p_contract(dbth, p_del(u)) + p_del(p_contract(dbth, u)), (th, u)))
    out.append(("lie_del_anticommute", lie(th, p_del(u)) + p_del(lie(th, u)), (th, u)))
    du = u.degree() or 0
    out.append(("lie_leibniz",
                lie(th, u.wedge(v)) - lie(th, u).wedge(v) - u.wedge(lie(th, v)) * sgn(du),
                (th, u, v)))
    br = p_bracket(th, ps)
    out.append(("contraction_lie_commutator",
                p_contract(th, lie(ps, u)) - lie(ps, p_contract(th, u)) - p_contract(br, u),
                (th, ps, u)))
    out.append(("lie_contraction_commutator",
                -(lie(th, p_contract(ps, u)) - p_contract(ps, lie(th, u))) - p_contract(br, u),
                (th, ps, u)))
    out.append(("lie_bracket",
                lie(th, lie(ps, u)) + lie(ps, lie(th, u)) - p_lie(br, u, "definition", _mutation=mutate),
                (th, ps, u)))
    out.append(("delbar_contraction_leibniz",
                p_delbar(p_contract(th, u)) - p_contract(dbth, u) - p_contract(th, p_delbar(u)),
                (th, u)))

    # Cartan formula for forms
    om = rform()
    t0, t1 = rv(1), rv(1)
    cart = (p_contract(t1, p_contract(t0, p_del(om)))
            - (-lie(t0, p_contract(t1, om)) - lie(t1, p_contract(t0, om))
               - p_contract(p_bracket(t0, t1), om) + p_del(p_contract(t1, p_contract(t0, om)))))
    out.append(("cartan_formula", cart, (t0, t1, om)))

    # local formulas
    out.append(("lie_formula_vs_definition",
                p_lie(th, u, "formula") - lie(th, u), (th, u)))
    xi = rv(0)
    out.append(("lie10_formula_vs_definition",
                p_lie10(xi, u, "formula") - p_lie10(xi, u, "definition"), (xi, u)))
    k = rng.randint(1, n)
    out.append(("lie10_coordinate_field",
                p_lie10(PolyVectorForm.coordinate(n, k), u) - p_partial(u, k), (k, u)))

    # generalized Tian-Todorov
    al = rform()
    gtt = (p_contract(p_bracket(t0, t1), al)
           - (-p_del(p_contract(t0, p_contract(t1, al))) + p_contract(t0, lie(t1, al))
              + p_contract(t1, lie(t0, al)) + p_contract(t0, p_contract(t1, p_del(al)))))
    out.append(("generalized_tian_todorov", gtt, (t0, t1, al)))
    top = _top_form(n, random_poly(rng, n, deg_max, spec))
    gtt1 = (p_contract(p_bracket(t0, t1), top)
            - (-p_del(p_contract(t0, p_contract(t1, top))) + p_contract(t0, p_del(p_contract(t1, top)))
               + p_contract(t1, p_del(p_contract(t0, top)))))
    out.append(("generalized_tian_todorov_top_form", gtt1, (t0, t1, top)))

    # conditional Tian-Todorov on ∂-closed contractions into dz_1∧…∧dz_n
    vol = _top_form(n, Poly.const(n, 1))
    if n >= 2:
        g1 = p_del(rform(n - 2, 1))
        g2 = p_del(rform(n - 2, 1))
    else:
        anti = RandomSpec(antiholomorphic=True)
        g1 = PolyForm.from_poly(random_poly(rng, n, deg_max, anti), (n,))
        g2 = PolyForm.from_poly(random_poly(rng, n, deg_max, anti), (n,))
    c1, c2 = cy_inverse_flat(g1, 1), cy_inverse_flat(g2, 1)
    out.append(("tian_todorov_conditional",
                p_contract(p_bracket(c1, c2), vol) + p_del(p_contract(c1, p_contract(c2, vol))),
                (c1, c2)))

    # cohomological well-definedness of L_θ on ∂̄-classes
    hol = random_polyvform(rng, n, 1, deg_max, holo)
    eta = rv(0)
    th_closed = hol + p_delbar_vform(eta)
    pu, qu = random_bidegree(rng, n, max_total=2 * n - 1)
    u_closed = random_polyform(rng, n, pu, qu, deg_max, holo)
    if qu >= 1:
        u_closed = u_closed + p_delbar(rform(pu, qu - 1))
    w = rform(pu, max(qu - 1, 0)) if qu >= 1 else PolyForm.zero(n)
    xi2 = rv(0)
    dxi = p_delbar_vform(xi2)
    moved = u_closed + p_delbar(w)
    lhs = lie(th_closed + dxi, moved)
    rhs = lie(th_closed, u_closed) - p_delbar(lie(th_closed, w) + p_lie10(xi2, moved))
    out.append(("cohomological_well_definedness", lhs - rhs, (th_closed, xi2, u_closed, w)))
    return out


def identity_suite(seed: int, trials: int, n_max: int = 3, deg_max: int = 2,
                   mutate: bool = False) -> SuiteReport:
    """Run the randomized identity checks; failures are reported, not raised.

    Trial t uses its own generator seeded with "seed:t", so results do not
    depend on how trials are scheduled.  ``mutate=True`` flips one sign in the
    Lie derivative to demonstrate that the suite catches it.
    """
    per: Dict[str, List[int]] = {}
    failures = 0
    runs = 0
    first = None
    for t in range(trials):
        rng = random.Random(f"{seed}:{t}")
        n = rng.randint(1, n_max)
        for name, residual, data in _trial_checks(rng, n, deg_max, mutate):
            runs += 1
            slot = per.setdefault(name, [0, 0])
            if residual:
                slot[1] += 1
                failures += 1
                if first is None:
                    first = {"trial": t, "n": n, "identity": name,
                             "residual_terms": len(_terms_of(residual))}
            else:
                slot[0] += 1
    return SuiteReport(seed, trials, runs, failures, per, first)


def _terms_of(x):
    if isinstance(x, PolyVectorForm):
        return [t for f in x.components.values() for t in f.terms]
    return list(x.terms)


# ---------------------------------------------------------------------------
# coordinate bridge
# ---------------------------------------------------------------------------

class BridgeModel:
    """Polynomial coordinate model of an invariant structure on C^n."""

    def __init__(self, ident: str, L: LieCS, coframe: List[PolyForm], frame: List[PolyVectorForm]):
        self.id = ident
        self.L = L
        self.n = L.n
        self.coframe = coframe                      # phi_1..phi_n as PolyForms
        gens = list(coframe) + [f.conj() for f in coframe]
        self._gens = gens
        self.frame = frame                          # xi_1..xi_n as (1,0) fields
        self._mono_cache: dict = {}

    def embed_mono(self, m: tuple) -> PolyForm:
        hit = self._mono_cache.get(m)
        if hit is None:
            hit = PolyForm.from_poly(Poly.const(self.n, 1))
            for g in m:
                hit = hit.wedge(self._gens[g])
            self._mono_cache[m] = hit
        return hit

    def embed(self, u: InvariantForm) -> PolyForm:
        out = PolyForm.zero(self.n)
        for m, c in u.terms.items():
            out = out + self.embed_mono(m) * c
        return out

    def embed_vform(self, theta: InvariantVectorForm) -> PolyVectorForm:
        out = PolyVectorForm(self.n, {})
        for k, f in theta.components.items():
            ef = self.embed(f)
            fr = self.frame[k]
            comps = {}
            for lam, coeff in fr.components.items():
                comps[lam] = coeff.wedge(ef)
            out = out + PolyVectorForm(self.n, comps)
        return out


def realize_bridge(ident: str) -> BridgeModel:
    """Coordinate models for 'iwasawa' and 'h15'."""
    from .catalog import catalog_get
    n = 3
    one = Poly.const(n, 1)
    z1, zb1 = Poly.z(n, 1), Poly.zbar(n, 1)
    dz = [PolyForm.dz(n, k) for k in (1, 2, 3)]

    def field(coeffs):
        return PolyVectorForm(n, {k: PolyForm.from_poly(c) for k, c in enumerate(coeffs) if c})

    zero = Poly(n, {})
    if ident == "iwasawa":
        coframe = [dz[0], dz[1], dz[2] - dz[1] * z1]
        frame = [field([one, zero, zero]), field([zero, one, z1]), field([zero, zero, one])]
    elif ident == "h15":
        coframe = [dz[0], dz[1] - dz[0] * zb1, dz[2] + dz[1] * z1]
        frame = [field([one, zb1, -(z1 * zb1)]), field([zero, one, -z1]), field([zero, zero, one])]
    else:
        raise UnsupportedModelError(f"no coordinate model for {ident!r}")
    return BridgeModel(ident, catalog_get(ident, {}), coframe, frame)


def random_invariant_form(rng: random.Random, n: int, p: int, q: int, terms: int = 3) -> InvariantForm:
    basis = basis_monomials(n, p, q)
    acc = {}
    for _ in range(rng.randint(1, terms)):
        m = basis[rng.randrange(len(basis))]
        acc[m] = acc.get(m, ZERO) + random_scalar(rng)
    return InvariantForm(n, acc)


def random_invariant_vform(rng: random.Random, n: int, q: int, terms: int = 3) -> InvariantVectorForm:
    comps = {}
    for _ in range(rng.randint(1, terms)):
        k = rng.randrange(n)
        f = random_invariant_form(rng, n, 0, q, 2)
        comps[k] = comps[k] + f if k in comps else f
    return InvariantVectorForm(n, comps)


@dataclass
class BridgeReport:
    model: str
    checks_run: int
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def bridge_check(ident: str, seed: int = 0, random_inputs: int = 50) -> BridgeReport:
    """Verify embed∘f = f_poly∘embed over basis inputs and random invariant inputs."""
    B = realize_bridge(ident)
    L, n = B.L, B.n
    rep = BridgeReport(ident, 0)

    def check(name, lhs, rhs):
        rep.checks_run += 1
        if lhs != rhs:
            rep.failures.append(name)

    def forms_checks(u, v, tag):
        E = B.embed
        for op, pop in (("d", p_d), ("del", p_del), ("delbar", p_delbar)):
            check(f"{op}:{tag}", E(apply_differential(L, op, u)), pop(E(u)))
        check(f"wedge:{tag}", E(u.wedge(v)), E(u).wedge(E(v)))
        check(f"conj:{tag}", E(u.conj()), E(u).conj())

    def vform_checks(th, ps, u, tag):
        E, EV = B.embed, B.embed_vform
        check(f"contract:{tag}", E(contract(th, u)), p_contract(EV(th), E(u)))
        check(f"lie:{tag}", E(lie_derivative(L, th, u)), p_lie(EV(th), E(u)))
        if th.q == 1:
            check(f"lie_formula:{tag}", E(lie_derivative(L, th, u)), p_lie(EV(th), E(u), "formula"))
        check(f"bracket:{tag}", EV(bracket_inv(L, th, ps)), p_bracket(EV(th), EV(ps)))
        check(f"delbar_vform:{tag}", EV(delbar_vform(L, th)), p_delbar_vform(EV(th)))

    # basis inputs
    gens = [InvariantForm.monomial(n, (g,)) for g in range(2 * n)]
    for a in gens:
        for b in gens:
            forms_checks(a, b, f"basis {a}|{b}")
    frame = [InvariantVectorForm.xi(n, k) for k in range(1, n + 1)]
    basis_vf = [InvariantVectorForm.simple(n, InvariantForm.phibar(n, j), k)
                for j in range(1, n + 1) for k in range(1, n + 1)]
    for x in frame:
        for u in gens:
            check(f"lie10:basis {x}|{u}", B.embed(lie10_derivative(L, x, u)),
                  p_lie10(B.embed_vform(x), B.embed(u)))
            check(f"contract:basis {x}|{u}", B.embed(contract(x, u)),
                  p_contract(B.embed_vform(x), B.embed(u)))
        check(f"delbar_vector:{x}", B.embed_vform(delbar_vform(L, x)),
              p_delbar_vform(B.embed_vform(x)))
        for y in frame:
            check(f"bracket:basis {x}|{y}", B.embed_vform(bracket_inv(L, x, y)),
                  p_bracket(B.embed_vform(x), B.embed_vform(y)))
    for th in basis_vf:
        for ps in basis_vf:
            check(f"bracket:basis {th}|{ps}", B.embed_vform(bracket_inv(L, th, ps)),
                  p_bracket(B.embed_vform(th), B.embed_vform(ps)))
        for u in gens:
            vform_checks(th, th, u, f"basis {th}|{u}")

    # random inputs
    rng = random.Random(f"bridge:{ident}:{seed}")
    for t in range(random_inputs):
        p, q = random_bidegree(rng, n)
        u = random_invariant_form(rng, n, p, q)
        p2, q2 = random_bidegree(rng, n)
        v = random_invariant_form(rng, n, p2, q2)
        forms_checks(u, v, f"random {t}")
        s1, s2 = rng.randint(0, 2), rng.randint(0, 2)
        th = random_invariant_vform(rng, n, s1)
        ps = random_invariant_vform(rng, n, s2)
        vform_checks(th, ps, u, f"random {t}")
        x = random_invariant_vform(rng, n, 0)
        check(f"lie10:random {t}", B.embed(lie10_derivative(L, x, u)),
              p_lie10(B.embed_vform(x), B.embed(u)))
    return rep
