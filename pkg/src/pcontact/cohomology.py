"""Cohomology of the invariant complex.

Everything here is computed on left-invariant forms, so every report is an
invariant-level statement.  Whether it agrees with the cohomology of the
compact quotient depends on the fixture and is not decided here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .contact import SCOPE, ContactPreconditionError, is_p_contact
from .exterior import bidegree, degree_monomials
from .invariant import InvariantForm, InvariantVectorForm, LieCS, delbar, delbar_vform, delop, contract
from .notation import format_form, format_vform
from .scalars import (ONE, ZERO, Matrix, complement_basis, kernel_of_columns, matrix_inverse, rank_of,
                      row_space_basis)
from .spaces import (FormSpace, InvariantViolation, SubspaceBasis, VectorFormSpace, columns_of,
                     image_vectors, in_span, kernel_vectors, make_subspace)


@dataclass
class CohomologyReport:
    """Dimensions and representatives.

    ``dims`` is keyed by (p, q) for Dolbeault, by q for tangent-valued
    Dolbeault and by k for de Rham.
    """

    kind: str
    n: int
    dims: Dict
    representatives: Dict = field(default_factory=dict)
    scope: str = SCOPE

    @property
    def betti(self) -> Optional[tuple]:
        if self.kind != "derham":
            return None
        return tuple(self.dims[k] for k in range(2 * self.n + 1))

    @property
    def euler(self) -> Optional[int]:
        b = self.betti
        return None if b is None else sum((-1) ** k * x for k, x in enumerate(b))

    def dim(self, *key) -> int:
        return self.dims[key[0] if len(key) == 1 else tuple(key)]

    def to_json(self) -> dict:
        def fmt(x):
            return format_form(x) if isinstance(x, InvariantForm) else format_vform(x)

        if self.kind == "scalar":
            dims = {f"h[{p}][{q}]": d for (p, q), d in sorted(self.dims.items())}
            reps = {f"h[{p}][{q}]": [fmt(r) for r in rs]
                    for (p, q), rs in sorted(self.representatives.items())}
        elif self.kind == "tangent":
            dims = {f"h[0][{q}]": d for q, d in sorted(self.dims.items())}
            reps = {f"h[0][{q}]": [fmt(r) for r in rs] for q, rs in sorted(self.representatives.items())}
        else:
            dims = {f"b[{k}]": d for k, d in sorted(self.dims.items())}
            reps = {f"b[{k}]": [fmt(r) for r in rs] for k, rs in sorted(self.representatives.items())}
        out = {"kind": self.kind, "scope": self.scope, "dims": dims, "representatives": reps}
        if self.kind == "derham":
            out["euler"] = self.euler
        return out


def _quotient(kernel: list, image: list, space) -> list:
    dim = space.dim
    reps = complement_basis(image, kernel, dim)
    return [space.element(v) for v in reps]


def _dolbeault_scalar(L: LieCS) -> CohomologyReport:
    n = L.n
    op = lambda u: delbar(L, u)
    dims, reps = {}, {}
    for p in range(n + 1):
        for q in range(n + 1):
            src = FormSpace(n, p, q)
            ker = kernel_vectors(op, src, FormSpace(n, p, q + 1)) if q < n else \
                [src.vec(e) for e in src.units()]
            img = image_vectors(op, FormSpace(n, p, q - 1), src) if q > 0 else []
            dims[(p, q)] = len(ker) - len(img)
            reps[(p, q)] = _quotient(ker, img, src)
    return CohomologyReport("scalar", n, dims, reps)


def _dolbeault_tangent(L: LieCS) -> CohomologyReport:
    n = L.n
    op = lambda t: delbar_vform(L, t)
    dims, reps = {}, {}
    for q in range(n + 1):
        src = VectorFormSpace(n, q)
        ker = kernel_vectors(op, src, VectorFormSpace(n, q + 1)) if q < n else \
            [src.vec(e) for e in src.units()]
        img = image_vectors(op, VectorFormSpace(n, q - 1), src) if q > 0 else []
        dims[q] = len(ker) - len(img)
        reps[q] = _quotient(ker, img, src)
    return CohomologyReport("tangent", n, dims, reps)


def dolbeault(L: LieCS, values: str = "scalar") -> CohomologyReport:
    """∂̄-cohomology with scalar values or with values in g^{1,0}."""
    L.require_valid()
    if values == "scalar":
        return _dolbeault_scalar(L)
    if values == "tangent":
        return _dolbeault_tangent(L)
    raise ValueError(f"values must be 'scalar' or 'tangent', not {values!r}")


class _DegreeSpace:
    """All invariant k-forms, monomial basis."""

    def __init__(self, n: int, k: int):
        self.n, self.k = n, k
        self.basis = degree_monomials(n, k) if 0 <= k <= 2 * n else ()
        self.index = {m: i for i, m in enumerate(self.basis)}

    @property
    def dim(self):
        return len(self.basis)

    def vec(self, u: InvariantForm) -> tuple:
        v = [ZERO] * self.dim
        for m, c in u.terms.items():
            v[self.index[m]] = c
        return tuple(v)

    def element(self, v) -> InvariantForm:
        return InvariantForm(self.n, {m: c for m, c in zip(self.basis, v) if c})

    def units(self):
        return [InvariantForm(self.n, {m: ONE}) for m in self.basis]

    def label(self):
        return f"Λ^{self.k}"


def derham(L: LieCS) -> CohomologyReport:
    L.require_valid()
    n = L.n
    op = lambda u: delop(L, u) + delbar(L, u)
    dims, reps = {}, {}
    for k in range(2 * n + 1):
        src = _DegreeSpace(n, k)
        ker = kernel_vectors(op, src, _DegreeSpace(n, k + 1)) if k < 2 * n else \
            [src.vec(e) for e in src.units()]
        img = image_vectors(op, _DegreeSpace(n, k - 1), src) if k > 0 else []
        dims[k] = len(ker) - len(img)
        reps[k] = _quotient(ker, img, src)
    return CohomologyReport("derham", n, dims, reps)


# ---------------------------------------------------------------------------
# Z2 / C2 and the Frölicher spectral sequence
# ---------------------------------------------------------------------------

@dataclass
class Z2C2:
    p: int
    q: int
    Z2: SubspaceBasis
    C2: SubspaceBasis

    @property
    def e2_dim(self) -> int:
        return self.Z2.dim - self.C2.dim

    def to_json(self) -> dict:
        return {"p": self.p, "q": self.q, "Z2": self.Z2.to_json(), "C2": self.C2.to_json(),
                "E2_dim": self.e2_dim}


def _z2_vectors(L: LieCS, p: int, q: int) -> list:
    """u in Λ^{p,q} with ∂̄u = 0 and ∂u = ∂̄w for some w in Λ^{p+1,q-1}."""
    n = L.n
    src = FormSpace(n, p, q)
    if src.dim == 0:
        return []
    wsp = FormSpace(n, p + 1, q - 1) if q >= 1 else None
    e1 = FormSpace(n, p, q + 1)
    e2 = FormSpace(n, p + 1, q)
    rows = e1.dim + e2.dim
    cols = []
    for u in src.units():
        cols.append(list(e1.vec(delbar(L, u))) + list(e2.vec(delop(L, u))))
    if wsp is not None:
        for w in wsp.units():
            cols.append([ZERO] * e1.dim + [-x for x in e2.vec(delbar(L, w))])
    if rows == 0:
        ker = [tuple(ONE if i == j else ZERO for i in range(len(cols))) for j in range(len(cols))]
    else:
        ker = kernel_of_columns(cols, rows)
    return row_space_basis([k[:src.dim] for k in ker], src.dim)


def _c2_vectors(L: LieCS, p: int, q: int) -> list:
    """∂(ker ∂̄ ∩ Λ^{p-1,q}) + ∂̄Λ^{p,q-1}."""
    n = L.n
    tgt = FormSpace(n, p, q)
    vecs = []
    if p >= 1:
        sp = FormSpace(n, p - 1, q)
        closed = kernel_vectors(lambda u: delbar(L, u), sp, FormSpace(n, p - 1, q + 1))
        vecs += [tgt.vec(delop(L, sp.element(v))) for v in closed]
    if q >= 1:
        vecs += columns_of(lambda u: delbar(L, u), FormSpace(n, p, q - 1), tgt)
    return row_space_basis(vecs, tgt.dim) if vecs else []


def z2_c2(L: LieCS, p: int, q: int) -> Z2C2:
    L.require_valid()
    space = FormSpace(L.n, p, q)
    return Z2C2(p, q, make_subspace(space, _z2_vectors(L, p, q)),
                make_subspace(space, _c2_vectors(L, p, q)))


@dataclass
class SpectralPage:
    r: int
    dims: Dict[Tuple[int, int], int]
    stabilization_page: int

    def total(self, k: int) -> int:
        return sum(d for (p, q), d in self.dims.items() if p + q == k)

    def to_json(self) -> dict:
        return {"r": self.r, "dims": {f"E{self.r}[{p}][{q}]": d for (p, q), d in sorted(self.dims.items())}}


class _Filtration:
    """Frölicher filtration F^p = forms with at least p unbarred factors."""

    def __init__(self, L: LieCS):
        self.L = L
        self.n = L.n
        self._z: dict = {}
        self._spaces: dict = {}

    def _d(self, u):
        return delop(self.L, u) + delbar(self.L, u)

    def space(self, k: int) -> _DegreeSpace:
        if k not in self._spaces:
            self._spaces[k] = _DegreeSpace(self.n, k)
        return self._spaces[k]

    def level(self, m: tuple) -> int:
        return bidegree(m, self.n)[0]

    def Z(self, r: int, p: int, k: int) -> list:
        """Z_r^p in degree k: x in F^p with dx in F^{p+r}, RREF basis in Λ^k."""
        key = (r, p, k)
        if key in self._z:
            return self._z[key]
        A = self.space(k)
        p_eff = max(p, 0)
        src_idx = [i for i, m in enumerate(A.basis) if self.level(m) >= p_eff]
        if not src_idx:
            self._z[key] = []
            return []
        B = self.space(k + 1)
        low = [j for j, m in enumerate(B.basis) if self.level(m) < p + r]
        if not low:
            ker = [tuple(ONE if a == b else ZERO for a in range(len(src_idx))) for b in range(len(src_idx))]
        else:
            cols = []
            for i in src_idx:
                dv = B.vec(self._d(InvariantForm(self.n, {A.basis[i]: ONE})))
                cols.append([dv[j] for j in low])
            ker = kernel_of_columns(cols, len(low))
        out = []
        for kv in ker:
            v = [ZERO] * A.dim
            for c, i in zip(kv, src_idx):
                v[i] = c
            out.append(v)
        res = row_space_basis(out, A.dim) if out else []
        self._z[key] = res
        return res

    def E_dim(self, r: int, p: int, k: int) -> int:
        A = self.space(k)
        Zr = self.Z(r, p, k)
        if not Zr:
            return 0
        sub = list(self.Z(r - 1, p + 1, k))
        if k >= 1:
            src = self.space(k - 1)
            for v in self.Z(r - 1, p - r + 1, k - 1):
                sub.append(A.vec(self._d(src.element(v))))
        return len(Zr) - (rank_of(sub, A.dim) if sub else 0)


def frolicher(L: LieCS, r_max: Optional[int] = None) -> List[SpectralPage]:
    """Pages E_1..E_{r*} by the sub-quotient recursion.

    dim E_r^{p,q} = dim Z_r^p - dim(Z_{r-1}^{p+1} + d Z_{r-1}^{p-r+1}) in
    total degree p+q.  The filtration has length n+1, so E_{n+1} = E_∞;
    r* is the first page whose dimensions agree with the last computed one.
    """
    L.require_valid()
    n = L.n
    if r_max is None:
        r_max = 2 * n
    r_max = max(r_max, 1)
    filt = _Filtration(L)
    pages = []
    for r in range(1, max(r_max, n + 1) + 1):
        dims = {(p, q): filt.E_dim(r, p, p + q) for p in range(n + 1) for q in range(n + 1)}
        pages.append(dims)
    final = pages[-1]
    r_star = next(r for r, dims in enumerate(pages, start=1) if dims == final)
    r_star_out = min(r_star, r_max)
    # cross-check page 2 against Z2/C2
    if len(pages) >= 2:
        for (p, q), dim in pages[1].items():
            if dim != len(_z2_vectors(L, p, q)) - len(_c2_vectors(L, p, q)):
                raise InvariantViolation(f"E2[{p}][{q}] recursion disagrees with Z2/C2")
    return [SpectralPage(r, pages[r - 1], r_star) for r in range(1, r_star_out + 1)]


# ---------------------------------------------------------------------------
# page-1 ∂∂̄ criterion
# ---------------------------------------------------------------------------

@dataclass
class Page1Result:
    holds: Dict[Tuple[int, int], bool]
    e2_degenerates: bool
    failure: Optional[Tuple[int, int]] = None
    certificate: Optional[InvariantForm] = None
    scope: str = SCOPE
    note: str = "checks ∂(Z2) = Im ∂∂̄ and E2-degeneration; de Rham purity is not checked"

    @property
    def all_hold(self) -> bool:
        return all(self.holds.values())

    def to_json(self) -> dict:
        return {"all_hold": self.all_hold, "e2_degenerates": self.e2_degenerates,
                "holds": {f"[{p}][{q}]": v for (p, q), v in sorted(self.holds.items())},
                "failure": None if self.failure is None else list(self.failure),
                "certificate": None if self.certificate is None else format_form(self.certificate),
                "scope": self.scope, "note": self.note}


def del_z2_vs_ddbar(L: LieCS, p: int, q: int):
    """Return (∂Z2 basis, Im ∂∂̄ basis, target space Λ^{p+1,q})."""
    n = L.n
    tgt = FormSpace(n, p + 1, q)
    src = FormSpace(n, p, q)
    dz = [tgt.vec(delop(L, src.element(v))) for v in _z2_vectors(L, p, q)]
    dz = row_space_basis(dz, tgt.dim) if dz else []
    if q >= 1:
        ddb = image_vectors(lambda u: delop(L, delbar(L, u)), FormSpace(n, p, q - 1), tgt)
    else:
        ddb = []
    return dz, ddb, tgt


def page1_check_at(L: LieCS, p: int, q: int) -> Tuple[bool, Optional[InvariantForm]]:
    dz, ddb, tgt = del_z2_vs_ddbar(L, p, q)
    for v in dz:
        if not in_span(ddb, v, tgt.dim):
            return False, tgt.element(v)
    return True, None


def page1_check(L: LieCS) -> Page1Result:
    L.require_valid()
    n = L.n
    holds = {}
    failure, cert = None, None
    for p in range(n + 1):
        for q in range(n + 1):
            ok, c = page1_check_at(L, p, q)
            holds[(p, q)] = ok
            if not ok and failure is None:
                failure, cert = (p, q), c
    pages = frolicher(L)
    return Page1Result(holds, pages[-1].stabilization_page <= 2, failure, cert)


# ---------------------------------------------------------------------------
# Calabi-Yau isomorphism
# ---------------------------------------------------------------------------

class CYIso:
    """θ ↦ θ⌟u_Γ from Λ^{0,q}⊗g^{1,0} to Λ^{n-1,q}, with its exact inverse."""

    def __init__(self, L: LieCS, gamma: InvariantForm, q: int):
        chk = is_p_contact(L, gamma)
        if not chk.holds:
            raise ContactPreconditionError(
                f"Calabi-Yau map needs a p-contact form; condition {chk.failed_condition} fails")
        self.L, self.gamma, self.q = L, gamma, q
        self.u = gamma.wedge(delop(L, gamma))
        self.src = VectorFormSpace(L.n, q)
        self.tgt = FormSpace(L.n, L.n - 1, q)
        cols = columns_of(lambda t: contract(t, self.u), self.src, self.tgt)
        self.matrix = Matrix.from_columns(cols, self.tgt.dim)
        try:
            self.inverse_matrix = matrix_inverse(self.matrix)
        except ZeroDivisionError:
            raise ContactPreconditionError("Calabi-Yau map is singular") from None

    def __call__(self, theta: InvariantVectorForm) -> InvariantForm:
        return contract(theta, self.u)

    def inverse(self, form: InvariantForm) -> InvariantVectorForm:
        return self.src.element(self.inverse_matrix.apply(list(self.tgt.vec(form))))

    def to_json(self) -> dict:
        return {"q": self.q, "shape": [self.matrix.rows, self.matrix.cols], "invertible": True}


def cy_iso(L: LieCS, gamma: InvariantForm, q: int) -> CYIso:
    L.require_valid()
    return CYIso(L, gamma, q)
