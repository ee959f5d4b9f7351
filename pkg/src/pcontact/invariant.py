"""Left-invariant forms on a Lie algebra with complex structure.

A :class:`LieCS` stores only the differentials d(phi_k) of a (1,0)-coframe;
d of a conjugate generator is the conjugate of the table entry, and d is
extended to all forms as an antiderivation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .exterior import (bidegree, conj_mono, contract_mono, join_mono,
                       split_mono, wedge_mono)
from .scalars import ONE, ZERO, GaussianRational, gq, row_space_basis


class InvalidStructureError(ValueError):
    """The structure equations fail validation."""


class DimensionMismatchError(ValueError):
    pass


class WrongBidegreeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# term-dictionary kernels (shared by forms and vector forms)
# ---------------------------------------------------------------------------

def _add_into(acc: dict, key, c):
    v = acc.get(key)
    if v is None:
        acc[key] = c
    else:
        v = v + c
        if v:
            acc[key] = v
        else:
            del acc[key]


def _wedge_terms(t1: dict, t2: dict) -> dict:
    out: dict = {}
    for m1, c1 in t1.items():
        for m2, c2 in t2.items():
            r = wedge_mono(m1, m2)
            if r is None:
                continue
            s, m = r
            c = c1 * c2
            _add_into(out, m, c if s > 0 else -c)
    return out


def _contract_terms(g: int, t: dict) -> dict:
    out: dict = {}
    for m, c in t.items():
        r = contract_mono(g, m)
        if r is None:
            continue
        s, mm = r
        _add_into(out, mm, c if s > 0 else -c)
    return out


class InvariantForm:
    """Sparse element of the invariant exterior algebra.

    ``terms`` maps canonical monomials (see :mod:`pcontact.exterior`) to
    nonzero coefficients.
    """

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Optional[dict] = None):
        self.n = n
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    # constructors -----------------------------------------------------------
    @classmethod
    def zero(cls, n: int) -> "InvariantForm":
        return cls(n, {})

    @classmethod
    def scalar(cls, n: int, c) -> "InvariantForm":
        return cls(n, {(): gq(c)})

    @classmethod
    def phi(cls, n: int, k: int, c=1) -> "InvariantForm":
        """c * phi_k (1-based)."""
        return cls(n, {(k - 1,): gq(c)})

    @classmethod
    def phibar(cls, n: int, k: int, c=1) -> "InvariantForm":
        return cls(n, {(n + k - 1,): gq(c)})

    @classmethod
    def from_indices(cls, n: int, items: Dict[tuple, object]) -> "InvariantForm":
        """Build from {(I, J): coefficient} with 1-based index tuples in any order."""
        acc: dict = {}
        for (I, J), c in items.items():
            s, m = join_mono(I, J, n)
            if m is None:
                continue
            c = gq(c)
            _add_into(acc, m, c if s > 0 else -c)
        return cls(n, acc)

    @classmethod
    def monomial(cls, n: int, mono: tuple, c=1) -> "InvariantForm":
        return cls(n, {tuple(mono): gq(c)})

    # queries ----------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def bidegrees(self) -> set:
        return {bidegree(m, self.n) for m in self.terms}

    def bidegree(self) -> Optional[tuple]:
        """The common bidegree, or None for zero; raises for mixed forms."""
        b = self.bidegrees()
        if not b:
            return None
        if len(b) > 1:
            raise WrongBidegreeError(f"form is not of pure bidegree: {sorted(b)}")
        return next(iter(b))

    def degree(self) -> Optional[int]:
        degs = {len(m) for m in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise WrongBidegreeError("form is not homogeneous")
        return next(iter(degs))

    def coefficient(self, I: Sequence[int], J: Sequence[int] = ()) -> GaussianRational:
        s, m = join_mono(tuple(I), tuple(J), self.n)
        if m is None:
            return ZERO
        c = self.terms.get(m, ZERO)
        return c if s > 0 else -c

    def indexed_terms(self) -> List[Tuple[tuple, tuple, GaussianRational]]:
        """Terms as (I, J, coefficient) with 1-based indices, canonical order."""
        return [split_mono(m, self.n) + (c,) for m, c in sorted(self.terms.items())]

    def top_coefficient(self) -> GaussianRational:
        """Coefficient on phi_1 ^ ... ^ phi_n."""
        return self.terms.get(tuple(range(self.n)), ZERO)

    # arithmetic -------------------------------------------------------------
    def _check(self, other: "InvariantForm"):
        if not isinstance(other, InvariantForm):
            raise TypeError("expected an InvariantForm")
        if other.n != self.n:
            raise DimensionMismatchError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        acc = dict(self.terms)
        for m, c in other.terms.items():
            _add_into(acc, m, c)
        return InvariantForm(self.n, acc)

    __radd__ = __add__

    def __neg__(self):
        return InvariantForm(self.n, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        if isinstance(c, InvariantForm):
            return NotImplemented
        c = gq(c)
        if not c:
            return InvariantForm(self.n, {})
        return InvariantForm(self.n, {m: v * c for m, v in self.terms.items()})

    __rmul__ = __mul__

    def wedge(self, other: "InvariantForm") -> "InvariantForm":
        self._check(other)
        return InvariantForm(self.n, _wedge_terms(self.terms, other.terms))

    __xor__ = wedge

    def conj(self) -> "InvariantForm":
        out: dict = {}
        for m, c in self.terms.items():
            s, mm = conj_mono(m, self.n)
            cc = c.conjugate()
            out[mm] = cc if s > 0 else -cc
        return InvariantForm(self.n, out)

    def part(self, p: int, q: int) -> "InvariantForm":
        return InvariantForm(self.n, {m: c for m, c in self.terms.items()
                                      if bidegree(m, self.n) == (p, q)})

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, InvariantForm):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __str__(self):
        from .notation import format_form
        return format_form(self)

    def __repr__(self):
        return f"InvariantForm(n={self.n}, {self})"


def wedge(u: InvariantForm, v: InvariantForm) -> InvariantForm:
    return u.wedge(v)


def conj(u: InvariantForm) -> InvariantForm:
    return u.conj()


class InvariantVectorForm:
    """Element of Lambda^{0,q} (x) g^{1,0}: components[k] multiplies xi_{k+1}."""

    __slots__ = ("n", "components")

    def __init__(self, n: int, components: Optional[dict] = None):
        self.n = n
        comps = {}
        q = None
        for k, f in (components or {}).items():
            if not isinstance(f, InvariantForm):
                f = InvariantForm.scalar(n, f)
            if f.n != n:
                raise DimensionMismatchError("component dimension mismatch")
            if f.is_zero():
                continue
            b = f.bidegree()
            if b[0] != 0:
                raise WrongBidegreeError("vector form components must be of type (0,q)")
            if q is None:
                q = b[1]
            elif q != b[1]:
                raise WrongBidegreeError("vector form components must share q")
            if not 0 <= k < n:
                raise ValueError("vector index out of range")
            comps[k] = f
        self.components = dict(sorted(comps.items()))

    @classmethod
    def zero(cls, n: int) -> "InvariantVectorForm":
        return cls(n, {})

    @classmethod
    def xi(cls, n: int, k: int, c=1) -> "InvariantVectorForm":
        """The constant (1,0)-vector c * xi_k (1-based)."""
        return cls(n, {k - 1: InvariantForm.scalar(n, c)})

    @classmethod
    def simple(cls, n: int, form: InvariantForm, k: int) -> "InvariantVectorForm":
        """form (x) xi_k (1-based)."""
        return cls(n, {k - 1: form})

    @property
    def q(self) -> Optional[int]:
        for f in self.components.values():
            return f.bidegree()[1]
        return None

    def is_zero(self) -> bool:
        return not self.components

    def __bool__(self):
        return bool(self.components)

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        if not isinstance(other, InvariantVectorForm):
            return NotImplemented
        if other.n != self.n:
            raise DimensionMismatchError("dimension mismatch")
        comps = dict(self.components)
        for k, f in other.components.items():
            comps[k] = comps[k] + f if k in comps else f
        return InvariantVectorForm(self.n, comps)

    __radd__ = __add__

    def __neg__(self):
        return InvariantVectorForm(self.n, {k: -f for k, f in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        c = gq(c)
        return InvariantVectorForm(self.n, {k: f * c for k, f in self.components.items()})

    __rmul__ = __mul__

    def wedge_left(self, form: InvariantForm) -> "InvariantVectorForm":
        """form ^ self, acting on the form part."""
        return InvariantVectorForm(self.n, {k: form.wedge(f) for k, f in self.components.items()})

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.components
        if not isinstance(other, InvariantVectorForm):
            return NotImplemented
        return self.n == other.n and self.components == other.components

    def __hash__(self):
        return hash((self.n, tuple(self.components.items())))

    def __str__(self):
        from .notation import format_vform
        return format_vform(self)

    def __repr__(self):
        return f"InvariantVectorForm(n={self.n}, {self})"


# ---------------------------------------------------------------------------
# structure equations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ValidationReport:
    jacobi_ok: bool
    integrable: bool
    nilpotent: bool
    solvable: bool
    complex_parallelisable: bool
    lower_central_series_dims: tuple
    derived_series_dims: tuple
    diagnostics: tuple = ()

    @property
    def valid(self) -> bool:
        return self.jacobi_ok and self.integrable


class LieCS:
    """Lie algebra with complex structure given by d of a (1,0)-coframe.

    ``diff[k]`` is the 2-form d(phi_{k+1}).  Instances are treated as
    immutable; derived data is cached on first use.
    """

    def __init__(self, n: int, diff: Sequence[InvariantForm], names: Optional[Sequence[str]] = None,
                 name: str = "unnamed"):
        if len(diff) != n:
            raise ValueError(f"expected {n} differentials, got {len(diff)}")
        for k, f in enumerate(diff):
            if f.n != n:
                raise DimensionMismatchError(f"d(phi{k+1}) has ambient dimension {f.n}")
            if f.terms and f.degree() != 2:
                raise ValueError(f"d(phi{k+1}) must be a 2-form")
        self.n = n
        self.diff = tuple(diff)
        self.names = tuple(names) if names else tuple(f"phi{k}" for k in range(1, n + 1))
        self.name = name
        self._dcache: dict = {}

    @classmethod
    def from_table(cls, n: int, table: Dict[int, Iterable], name: str = "unnamed",
                   names=None) -> "LieCS":
        """table: {k: [(coeff, (I, J)), ...]} with 1-based k and index tuples."""
        diff = []
        for k in range(1, n + 1):
            f = InvariantForm.zero(n)
            for coeff, (I, J) in table.get(k, []):
                f = f + InvariantForm.from_indices(n, {(tuple(I), tuple(J)): coeff})
            diff.append(f)
        return cls(n, diff, names=names, name=name)

    def __eq__(self, other):
        return (isinstance(other, LieCS) and self.n == other.n and self.diff == other.diff
                and self.names == other.names and self.name == other.name)

    def __hash__(self):
        return hash((self.n, self.diff, self.names, self.name))

    def __repr__(self):
        return f"LieCS({self.name!r}, n={self.n})"

    # generator differentials -----------------------------------------------
    @cached_property
    def dgen(self) -> tuple:
        """Term dicts of d applied to each of the 2n generators."""
        out = [dict(f.terms) for f in self.diff]
        out += [dict(f.conj().terms) for f in self.diff]
        return tuple(out)

    def d_mono(self, m: tuple) -> tuple:
        """(full d, del part, delbar part) of a single monomial, as term dicts."""
        hit = self._dcache.get(m)
        if hit is not None:
            return hit
        n = self.n
        full: dict = {}
        for j, g in enumerate(m):
            dg = self.dgen[g]
            if not dg:
                continue
            before, after = m[:j], m[j + 1:]
            sign = -1 if j & 1 else 1
            for mm, c in dg.items():
                r = wedge_mono(before, mm)
                if r is None:
                    continue
                s1, m1 = r
                r = wedge_mono(m1, after)
                if r is None:
                    continue
                s2, m2 = r
                s = sign * s1 * s2
                _add_into(full, m2, c if s > 0 else -c)
        p, q = bidegree(m, n)
        dl = {k: v for k, v in full.items() if bidegree(k, n) == (p + 1, q)}
        db = {k: v for k, v in full.items() if bidegree(k, n) == (p, q + 1)}
        res = (full, dl, db)
        self._dcache[m] = res
        return res

    # complexified Lie algebra -------------------------------------------------
    @cached_property
    def structure_constants(self) -> dict:
        """{(a, b): {c: value}} with [e_a, e_b] = sum_c value e_c, a < b, over all 2n generators.

        Uses dalpha(X, Y) = -alpha([X, Y]).
        """
        out: dict = {}
        for c, dg in enumerate(self.dgen):
            for m, v in dg.items():
                a, b = m
                out.setdefault((a, b), {})
                _add_into(out[(a, b)], c, -v)
        return {k: v for k, v in out.items() if v}

    def bracket_generators(self, a: int, b: int) -> dict:
        if a == b:
            return {}
        if a < b:
            return self.structure_constants.get((a, b), {})
        return {c: -v for c, v in self.structure_constants.get((b, a), {}).items()}

    def bracket_vectors(self, x: Sequence, y: Sequence) -> list:
        """Bracket of two vectors in the complexified algebra (length-2n coefficient lists)."""
        out = [ZERO] * (2 * self.n)
        for a, xa in enumerate(x):
            if not xa:
                continue
            for b, yb in enumerate(y):
                if not yb:
                    continue
                for c, v in self.bracket_generators(a, b).items():
                    out[c] = out[c] + xa * yb * v
        return out

    def bracket10(self, a: int, b: int) -> dict:
        """[xi_a, xi_b] in g^{1,0} (0-based), as {k: coefficient}."""
        return {c: v for c, v in self.bracket_generators(a, b).items() if c < self.n}

    @cached_property
    def validation(self) -> ValidationReport:
        return _validate(self)

    def require_valid(self):
        rep = self.validation
        if not rep.valid:
            raise InvalidStructureError("; ".join(rep.diagnostics) or "invalid structure")


def _series_dims(L: LieCS, lower: bool) -> tuple:
    dim = 2 * L.n
    current = [tuple(ONE if i == j else ZERO for i in range(dim)) for j in range(dim)]
    full = list(current)
    dims = [len(current)]
    for _ in range(dim + 1):
        left = full if lower else current
        vecs = [tuple(L.bracket_vectors(x, y)) for x in left for y in current]
        nxt = row_space_basis(vecs, dim)
        if len(nxt) == len(current):
            break
        current = nxt
        dims.append(len(current))
        if not current:
            break
    return tuple(dims)


def _validate(L: LieCS) -> ValidationReport:
    from .notation import format_form
    n = L.n
    diags = []
    jac = True
    for k in range(n):
        dd = InvariantForm(n, {})
        for m, c in L.diff[k].terms.items():
            dd = dd + InvariantForm(n, L.d_mono(m)[0]) * c
        if dd:
            jac = False
            diags.append(f"jacobi: d(d(phi{k+1})) = {format_form(dd)} != 0")
    integ = True
    cpar = True
    for k in range(n):
        for m, c in sorted(L.diff[k].terms.items()):
            p, q = bidegree(m, n)
            if q == 2:
                integ = False
                diags.append(f"integrability: d(phi{k+1}) has (0,2) term "
                             f"{format_form(InvariantForm(n, {m: c}))}")
            if q > 0:
                cpar = False
    lcs = _series_dims(L, lower=True) if jac else ()
    der = _series_dims(L, lower=False) if jac else ()
    nil = bool(lcs) and lcs[-1] == 0
    sol = bool(der) and der[-1] == 0
    return ValidationReport(jac, integ, nil, sol, cpar, lcs, der, tuple(diags))


def validate(L: LieCS) -> ValidationReport:
    return L.validation


# ---------------------------------------------------------------------------
# differentials, contraction, Lie derivatives
# ---------------------------------------------------------------------------

_OPS = {"d": 0, "del": 1, "∂": 1, "delbar": 2, "∂̄": 2}


def apply_differential(L: LieCS, op: str, u: InvariantForm) -> InvariantForm:
    """Apply d, del (∂) or delbar (∂̄) to u."""
    if u.n != L.n:
        raise DimensionMismatchError("form and structure have different dimensions")
    idx = _OPS[op]
    out: dict = {}
    for m, c in u.terms.items():
        for mm, v in L.d_mono(m)[idx].items():
            _add_into(out, mm, v * c)
    return InvariantForm(L.n, out)


def d(L, u):
    return apply_differential(L, "d", u)


def delop(L, u):
    return apply_differential(L, "del", u)


def delbar(L, u):
    return apply_differential(L, "delbar", u)


def contract_basis(k: int, u: InvariantForm) -> InvariantForm:
    """xi_k ⌟ u for the basis vector xi_k (1-based)."""
    return InvariantForm(u.n, _contract_terms(k - 1, u.terms))


def contract(x, u: InvariantForm) -> InvariantForm:
    """θ⌟u = sum_k component_k ^ (xi_k ⌟ u); an int argument means a basis vector."""
    if isinstance(x, int):
        return contract_basis(x, u)
    if x.n != u.n:
        raise DimensionMismatchError("dimension mismatch in contraction")
    out: dict = {}
    for k, f in x.components.items():
        cu = _contract_terms(k, u.terms)
        if not cu:
            continue
        for m, c in _wedge_terms(f.terms, cu).items():
            _add_into(out, m, c)
    return InvariantForm(u.n, out)


def lie_derivative(L: LieCS, theta: InvariantVectorForm, u: InvariantForm) -> InvariantForm:
    """L_θ u = ∂(θ⌟u) - (-1)^{s+1} θ⌟∂u for θ of type (0,s)."""
    s = theta.q
    if s is None:
        return InvariantForm.zero(L.n)
    first = delop(L, contract(theta, u))
    second = contract(theta, delop(L, u))
    return first - second if s % 2 == 1 else first + second


def lie10_derivative(L: LieCS, xi: InvariantVectorForm, u: InvariantForm) -> InvariantForm:
    """(1,0) Lie derivative ∂(ξ⌟u) + ξ⌟∂u for a constant (1,0)-vector ξ."""
    if xi.q not in (None, 0):
        raise WrongBidegreeError("expected a (1,0)-vector")
    return delop(L, contract(xi, u)) + contract(xi, delop(L, u))


def delbar_vector(L: LieCS, k: int) -> InvariantVectorForm:
    """∂̄ xi_k (1-based): sum_j (xi_k ⌟ ∂̄ phi_j) (x) xi_j.

    Equivalent to (∂̄X)(Ybar) = pr^{1,0}[Ybar, X]; this form makes the
    contraction Leibniz rule hold on generators.
    """
    n = L.n
    comps = {}
    for j in range(n):
        dbar_phi = InvariantForm(n, L.d_mono((j,))[2])
        c = contract_basis(k, dbar_phi)
        if c:
            comps[j] = c
    return InvariantVectorForm(n, comps)


def delbar_vform(L: LieCS, theta: InvariantVectorForm) -> InvariantVectorForm:
    """∂̄(ᾱ⊗X) = ∂̄ᾱ⊗X + (-1)^q ᾱ∧∂̄X."""
    q = theta.q
    if q is None:
        return InvariantVectorForm.zero(L.n)
    result = InvariantVectorForm.zero(L.n)
    sign = -1 if q % 2 else 1
    for k, f in theta.components.items():
        db = delbar(L, f)
        if db:
            result = result + InvariantVectorForm(L.n, {k: db})
        dx = delbar_vector(L, k + 1)
        if dx:
            result = result + dx.wedge_left(f) * sign
    return result


def bracket_inv(L: LieCS, phi: InvariantVectorForm, psi: InvariantVectorForm) -> InvariantVectorForm:
    """Bracket of vector-valued (0,p) and (0,q) forms via the invariant formula

    [ᾱ⊗X, β̄⊗Y] = ᾱ∧β̄⊗[X,Y] + ᾱ∧(X⌟∂β̄)⊗Y - (-1)^{pq} β̄∧(Y⌟∂ᾱ)⊗X.
    """
    n = L.n
    p, q = phi.q, psi.q
    if p is None or q is None:
        return InvariantVectorForm.zero(n)
    sign = -1 if (p * q) % 2 else 1
    acc: Dict[int, InvariantForm] = {}

    def add(k, f):
        if f:
            acc[k] = acc[k] + f if k in acc else f

    for a, alpha in phi.components.items():
        dalpha = delop(L, alpha)
        for b, beta in psi.components.items():
            ab = alpha.wedge(beta)
            if ab:
                for c, v in L.bracket10(a, b).items():
                    add(c, ab * v)
            add(b, alpha.wedge(contract_basis(a + 1, delop(L, beta))))
            t = beta.wedge(contract_basis(b + 1, dalpha))
            add(a, -t if sign > 0 else t)
    return InvariantVectorForm(n, acc)
