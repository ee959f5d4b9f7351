"""Holomorphic p-contact and p-no-contact structures on the invariant complex.

Invariant top-degree forms vanish nowhere as soon as their single
coefficient is nonzero, since the coframe trivialises the bundle.  This is
what turns "Γ∧∂Γ ≠ 0 at every point" into one scalar test.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional

from .invariant import (InvariantForm, InvariantVectorForm, LieCS, WrongBidegreeError, contract,
                        delbar, delop, lie_derivative)
from .notation import format_form
from .scalars import ONE, ZERO, GaussianRational, kernel_of_columns, row_space_basis
from .spaces import FormSpace, FrameSpace, SubspaceBasis, kernel_vectors, make_subspace, preimage

SCOPE = "invariant-level"


class ContactPreconditionError(ValueError):
    """A (p,0)-form expected to be p-contact is not."""


def _odd_dimension(L: LieCS) -> int:
    if L.n % 2 == 0:
        raise WrongBidegreeError(f"p-contact structures need odd dimension, got n = {L.n}")
    return (L.n - 1) // 2


def _require_p0(L: LieCS, gamma: InvariantForm, p: Optional[int] = None) -> int:
    if gamma.n != L.n:
        raise WrongBidegreeError("form dimension differs from the structure dimension")
    b = gamma.bidegree()
    if b is None:
        if p is None:
            raise WrongBidegreeError("the zero form has no bidegree")
        return p
    if b[1] != 0 or (p is not None and b[0] != p):
        want = f"({p},0)" if p is not None else "(p,0)"
        raise WrongBidegreeError(f"expected a form of bidegree {want}, got {b}")
    return b[0]


def top_coefficient(L: LieCS, gamma: InvariantForm) -> GaussianRational:
    """Coefficient of Γ∧∂Γ on φ₁∧…∧φ_n."""
    return gamma.wedge(delop(L, gamma)).top_coefficient()


@dataclass
class ContactCheck:
    holds: bool
    top_coefficient: GaussianRational
    failed_condition: Optional[str] = None

    def to_json(self) -> dict:
        return {"holds": self.holds, "top_coefficient": str(self.top_coefficient),
                "failed_condition": self.failed_condition}


def is_p_contact(L: LieCS, gamma: InvariantForm) -> ContactCheck:
    L.require_valid()
    p = _odd_dimension(L)
    _require_p0(L, gamma, p)
    coef = top_coefficient(L, gamma)
    if delbar(L, gamma):
        return ContactCheck(False, coef, "(a) ∂̄Γ = 0")
    if not coef:
        return ContactCheck(False, coef, "(b) Γ∧∂Γ ≠ 0")
    return ContactCheck(True, coef)


@dataclass
class NoContactCheck:
    holds: bool
    zeta: Optional[InvariantForm] = None
    failed_condition: Optional[str] = None

    def to_json(self) -> dict:
        return {"holds": self.holds,
                "zeta": None if self.zeta is None else format_form(self.zeta),
                "failed_condition": self.failed_condition}


def is_p_no_contact(L: LieCS, gamma: InvariantForm) -> NoContactCheck:
    """Decide whether ∂Γ = Γ∧ζ for an invariant (1,0)-form ζ."""
    L.require_valid()
    p = _require_p0(L, gamma)
    if delbar(L, gamma):
        return NoContactCheck(False, None, "(a) ∂̄Γ = 0")
    src = FormSpace(L.n, 1, 0)
    tgt = FormSpace(L.n, p + 1, 0)
    zeta = preimage(lambda z: gamma.wedge(z), src, tgt, delop(L, gamma))
    if zeta is None:
        return NoContactCheck(False, None, "∂Γ = Γ∧ζ has no solution")
    return NoContactCheck(True, zeta)


@dataclass
class ExistenceResult:
    exists: bool
    p: int
    closed_basis: List[InvariantForm]
    witness: Optional[InvariantForm] = None
    polarization: Optional[list] = None
    scope: str = SCOPE

    def to_json(self) -> dict:
        return {"exists": self.exists, "p": self.p, "scope": self.scope,
                "closed_basis": [format_form(v) for v in self.closed_basis],
                "witness": None if self.witness is None else format_form(self.witness),
                "polarization": None if self.polarization is None else
                [[str(x) for x in row] for row in self.polarization]}


def contact_exists(L: LieCS, p: int) -> ExistenceResult:
    """Search the ∂̄-closed invariant (p,0)-forms for one with Γ∧∂Γ ≠ 0.

    Q(Γ) = coefficient of Γ∧∂Γ is quadratic on V = ker ∂̄ ∩ Λ^{p,0}.  Over a
    field of characteristic zero it vanishes on V iff its polarization does.
    """
    L.require_valid()
    if L.n != 2 * p + 1:
        raise WrongBidegreeError(f"n = {L.n} is not 2p+1 for p = {p}")
    space = FormSpace(L.n, p, 0)
    tgt = FormSpace(L.n, p, 1)
    V = [space.element(v) for v in kernel_vectors(lambda u: delbar(L, u), space, tgt)]
    dV = [delop(L, v) for v in V]
    Q = [v.wedge(dv).top_coefficient() for v, dv in zip(V, dV)]
    for v, qv in zip(V, Q):
        if qv:
            return ExistenceResult(True, p, V, v)
    B = [[(V[i].wedge(dV[j]) + V[j].wedge(dV[i])).top_coefficient() for j in range(len(V))]
         for i in range(len(V))]
    for i in range(len(V)):
        for j in range(i + 1, len(V)):
            if B[i][j]:
                # Q(v_i + v_j) = Q(v_i) + Q(v_j) + B(v_i, v_j) = B(v_i, v_j)
                return ExistenceResult(True, p, V, V[i] + V[j])
    return ExistenceResult(False, p, V, None, B)


@dataclass
class KernelResult:
    F: SubspaceBasis
    G: SubspaceBasis

    def to_json(self) -> dict:
        return {"F": self.F.to_json(), "G": self.G.to_json()}


def _frame_kernel(L: LieCS, form: InvariantForm) -> SubspaceBasis:
    src = FrameSpace(L.n)
    cols = []
    images = [contract(k + 1, form) for k in range(L.n)]
    monos = sorted({m for im in images for m in im.terms})
    index = {m: i for i, m in enumerate(monos)}
    for im in images:
        col = [ZERO] * len(monos)
        for m, c in im.terms.items():
            col[index[m]] = c
        cols.append(col)
    if monos:
        ker = row_space_basis(kernel_of_columns(cols, len(monos)), L.n)
    else:
        ker = [tuple(ONE if i == j else ZERO for i in range(L.n)) for j in range(L.n)]
    return make_subspace(src, ker)


def kernels(L: LieCS, gamma: InvariantForm) -> KernelResult:
    """F = {ξ : ξ⌟Γ = 0} and G = {ξ : ξ⌟∂Γ = 0} among invariant (1,0)-vectors."""
    L.require_valid()
    return KernelResult(_frame_kernel(L, gamma), _frame_kernel(L, delop(L, gamma)))


@dataclass
class FoliationResult:
    closed_under_bracket: bool
    violating_pair: Optional[tuple] = None
    bracket: Optional[InvariantVectorForm] = None

    def to_json(self) -> dict:
        from .notation import format_vform
        out = {"closed_under_bracket": self.closed_under_bracket}
        if self.violating_pair is not None:
            a, b = self.violating_pair
            out["violating_pair"] = [format_vform(a), format_vform(b)]
            out["bracket"] = format_vform(self.bracket)
        return out


def _bracket_frame(L: LieCS, v: InvariantVectorForm, w: InvariantVectorForm) -> InvariantVectorForm:
    acc: dict = {}
    for a, fa in v.components.items():
        ca = fa.terms.get((), ZERO)
        for b, fb in w.components.items():
            cb = fb.terms.get((), ZERO)
            for k, c in L.bracket10(a, b).items():
                acc[k] = acc.get(k, ZERO) + ca * cb * c
    return FrameSpace(L.n).element([acc.get(k, ZERO) for k in range(L.n)])


def foliation_check(L: LieCS, gamma: InvariantForm) -> FoliationResult:
    """Test [F, F] ⊂ F on basis pairs of F = ker(ξ ↦ ξ⌟Γ)."""
    F = kernels(L, gamma).F.elements
    for i in range(len(F)):
        for j in range(i + 1, len(F)):
            br = _bracket_frame(L, F[i], F[j])
            if contract(br, gamma):
                return FoliationResult(False, (F[i], F[j]), br)
    return FoliationResult(True)


@dataclass
class VFormClassification:
    horizontal: bool
    vertical: bool
    constantly_horizontal: bool
    constantly_vertical: bool
    formulations_agree: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def classify_vform(L: LieCS, gamma: InvariantForm, theta: InvariantVectorForm) -> VFormClassification:
    """Horizontal/vertical flags; the constant variants are computed both via
    ∂(θ⌟·) and via L_θ, and the two answers are compared."""
    L.require_valid()
    dgamma = delop(L, gamma)
    tg = contract(theta, gamma)
    tdg = contract(theta, dgamma)
    horizontal = not tg
    vertical = not tdg
    ch = horizontal and not delop(L, tdg)
    cv = vertical and not delop(L, tg)
    ch_lie = horizontal and not lie_derivative(L, theta, dgamma)
    cv_lie = vertical and not lie_derivative(L, theta, gamma)
    return VFormClassification(horizontal, vertical, ch, cv, ch == ch_lie and cv == cv_lie)


@dataclass
class IncompatibilityResult:
    residual: InvariantForm
    dV_nonzero: bool
    dV_coefficient: GaussianRational

    def to_json(self) -> dict:
        return {"residual": format_form(self.residual), "dV_nonzero": self.dV_nonzero,
                "dV_coefficient": str(self.dV_coefficient)}


def _ipow(k: int) -> GaussianRational:
    return [ONE, GaussianRational(0, 1), -ONE, GaussianRational(0, -1)][k % 4]


def obs_incompat_identity(L: LieCS, gamma: InvariantForm) -> IncompatibilityResult:
    """Residual of i^{(p+1)²}∂Γ∧∂̄Γ̄ = ∂∂̄(−i^{(p+1)²}Γ∧Γ̄) and the volume test.

    The identity with this sign is an identity for odd p; for even p the
    residual is 2 i^{(p+1)²} ∂Γ∧∂̄Γ̄.
    """
    L.require_valid()
    p = _require_p0(L, gamma)
    n = L.n
    c = _ipow((p + 1) ** 2)
    gbar = gamma.conj()
    lhs = delop(L, gamma).wedge(delbar(L, gbar)) * c
    rhs = delop(L, delbar(L, gamma.wedge(gbar) * (-c)))
    u = gamma.wedge(delop(L, gamma))
    dV = u.wedge(u.conj()) * _ipow(n * n)
    coef = dV.terms.get(tuple(range(2 * n)), ZERO)
    return IncompatibilityResult(lhs - rhs, bool(coef), coef)


class ContactStructure:
    """A validated p-contact form with the derived forms ∂Γ and u_Γ = Γ∧∂Γ."""

    def __init__(self, L: LieCS, gamma: InvariantForm):
        chk = is_p_contact(L, gamma)
        if not chk.holds:
            raise ContactPreconditionError(f"Γ = {format_form(gamma)} is not p-contact: "
                                           f"condition {chk.failed_condition} fails")
        self.L = L
        self.gamma = gamma
        self.p = (L.n - 1) // 2

    @property
    def n(self) -> int:
        return self.L.n

    @cached_property
    def dgamma(self) -> InvariantForm:
        return delop(self.L, self.gamma)

    @cached_property
    def u_gamma(self) -> InvariantForm:
        return self.gamma.wedge(self.dgamma)
