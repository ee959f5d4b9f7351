"""p-contact deformations and the order-two construction.

The order-two pipeline takes a class θ₁ and produces ψ₁ (a representative
whose contraction into u_Γ is ∂-closed) and ψ₂ with ∂̄ψ₂ = ½[ψ₁,ψ₁].  Every
intermediate quantity is kept, and each stage is re-verified by an exact
residual.  Underdetermined solves use the RREF particular solution; the
residuals, not the particular values, certify the result.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .cohomology import CYIso, page1_check_at
from .contact import SCOPE, ContactStructure
from .invariant import (InvariantForm, InvariantVectorForm, LieCS, WrongBidegreeError, bracket_inv,
                        contract, delbar, delbar_vform, delop)
from .notation import format_form, format_mono, format_vform
from .scalars import ONE, ZERO, GaussianRational, complement_basis, kernel_of_columns, row_space_basis
from .spaces import (FormSpace, VectorFormSpace, cokernel_functional, columns_of, image_vectors,
                     preimage)

HALF = GaussianRational(1, 0) / 2


def _fmt(x) -> str:
    if x is None:
        return None
    if isinstance(x, InvariantVectorForm):
        return format_vform(x)
    return format_form(x)


def _is_zero(x) -> bool:
    return x is None or not x


@dataclass
class Obstruction:
    """An unsolvable linear step, with a functional certifying it."""

    step: str
    rhs: object
    functional: Dict[str, str] = field(default_factory=dict)
    note: str = "canonical representative failed"

    def to_json(self) -> dict:
        return {"step": self.step, "rhs": _fmt(self.rhs), "cokernel_functional": self.functional,
                "note": self.note}


def _solve(op, src, tgt, rhs, step: str):
    """Return (solution, None) or (None, Obstruction)."""
    sol = preimage(op, src, tgt, rhs)
    if sol is not None:
        return sol, None
    b = tgt.vec(rhs)
    lam = cokernel_functional(columns_of(op, src, tgt), b, tgt.dim) if tgt.dim else None
    functional = {}
    if lam is not None:
        for (key, c) in zip(tgt.basis, lam):
            if c:
                label = format_mono(key, tgt.n) if isinstance(key, tuple) and \
                    all(isinstance(g, int) for g in key) else \
                    (format_mono(key[0], tgt.n) + "⊗ξ" + str(key[1] + 1))
                functional[label] = str(c)
    return None, Obstruction(step, rhs, functional)


# ---------------------------------------------------------------------------
# the deformation space
# ---------------------------------------------------------------------------

@dataclass
class DeformationClass:
    theta: InvariantVectorForm
    delbar_closed: bool
    class_of_contraction_vanishes: bool
    contraction_potential: Optional[InvariantForm]
    z2_membership: bool
    z2_potential: Optional[InvariantForm]

    @property
    def member(self) -> bool:
        return self.delbar_closed and self.class_of_contraction_vanishes and self.z2_membership

    def to_json(self) -> dict:
        return {"theta": _fmt(self.theta), "delbar_closed": self.delbar_closed,
                "class_of_contraction_vanishes": self.class_of_contraction_vanishes,
                "contraction_potential": _fmt(self.contraction_potential),
                "z2_membership": self.z2_membership, "z2_potential": _fmt(self.z2_potential)}


def classify_deformation(L: LieCS, gamma: InvariantForm, theta: InvariantVectorForm) -> DeformationClass:
    """Evaluate the three defining conditions on one representative θ of type (0,1)."""
    cs = ContactStructure(L, gamma)
    n, p = L.n, cs.p
    if theta.q not in (None, 1):
        raise WrongBidegreeError("deformation classes are vector-valued (0,1)-forms")
    closed = not delbar_vform(L, theta)
    alpha = preimage(lambda a: delbar(L, a), FormSpace(n, p - 1, 0), FormSpace(n, p - 1, 1),
                     contract(theta, gamma))
    tdg = contract(theta, cs.dgamma)
    w = None
    z2 = not delbar(L, tdg)
    if z2:
        w = preimage(lambda x: delbar(L, x), FormSpace(n, p + 1, 0), FormSpace(n, p + 1, 1),
                     delop(L, tdg))
        z2 = w is not None
    return DeformationClass(theta, closed, alpha is not None, alpha, z2, w)


@dataclass
class DeformationSpace:
    classes: List[DeformationClass]
    tangent_h01_representatives: List[InvariantVectorForm]
    scope: str = SCOPE

    @property
    def dim(self) -> int:
        return len(self.classes)

    def to_json(self) -> dict:
        return {"dim": self.dim, "scope": self.scope,
                "basis": [c.to_json() for c in self.classes],
                "tangent_h01_representatives": [_fmt(t) for t in self.tangent_h01_representatives]}


def tangent_h01_representatives(L: LieCS) -> List[InvariantVectorForm]:
    n = L.n
    V0, V1, V2 = VectorFormSpace(n, 0), VectorFormSpace(n, 1), VectorFormSpace(n, 2)
    op = lambda t: delbar_vform(L, t)
    cols = columns_of(op, V1, V2)
    ker = row_space_basis(kernel_of_columns(cols, V2.dim), V1.dim) if V2.dim else \
        [V1.vec(e) for e in V1.units()]
    img = image_vectors(op, V0, V1)
    return [V1.element(v) for v in complement_basis(img, ker, V1.dim)]


def deformation_space(L: LieCS, gamma: InvariantForm) -> DeformationSpace:
    """Classes in H^{0,1}(T) with [θ⌟Γ] = 0 and θ⌟∂Γ ∈ Z₂^{p,1}.

    One joint linear system in (c, a, w):
    Σ c_i h_i⌟Γ = ∂̄a and Σ c_i ∂(h_i⌟∂Γ) = ∂̄w, projected onto c.
    """
    cs = ContactStructure(L, gamma)
    n, p = L.n, cs.p
    reps = tangent_h01_representatives(L)
    A0, A1 = FormSpace(n, p - 1, 0), FormSpace(n, p - 1, 1)
    W0, W1 = FormSpace(n, p + 1, 0), FormSpace(n, p + 1, 1)
    rows = A1.dim + W1.dim
    cols = []
    for h in reps:
        cols.append(list(A1.vec(contract(h, gamma))) +
                    list(W1.vec(delop(L, contract(h, cs.dgamma)))))
    for a in A0.units():
        cols.append([-x for x in A1.vec(delbar(L, a))] + [ZERO] * W1.dim)
    for w in W0.units():
        cols.append([ZERO] * A1.dim + [-x for x in W1.vec(delbar(L, w))])
    k = len(reps)
    if not reps:
        coeffs = []
    elif rows == 0:
        coeffs = [tuple(ONE if i == j else ZERO for i in range(k)) for j in range(k)]
    else:
        ker = kernel_of_columns(cols, rows)
        coeffs = row_space_basis([v[:k] for v in ker], k) if ker else []
    classes = []
    for c in coeffs:
        theta = InvariantVectorForm.zero(n)
        for ci, h in zip(c, reps):
            if ci:
                theta = theta + h * ci
        classes.append(classify_deformation(L, gamma, theta))
    return DeformationSpace(classes, reps)


@dataclass
class ImageEntry:
    theta: InvariantVectorForm
    eta: InvariantForm
    exact_part_potential: Optional[InvariantForm]
    lemma_residual: Optional[InvariantForm]

    def to_json(self) -> dict:
        return {"theta": _fmt(self.theta), "eta": _fmt(self.eta),
                "exact_part_potential": _fmt(self.exact_part_potential),
                "lemma_residual": _fmt(self.lemma_residual)}


@dataclass
class ImageSpace:
    entries: List[ImageEntry]
    class_basis: List[InvariantForm]

    @property
    def dim(self) -> int:
        return len(self.class_basis)

    def to_json(self) -> dict:
        return {"dim": self.dim, "class_basis": [_fmt(f) for f in self.class_basis],
                "entries": [e.to_json() for e in self.entries]}


def image_space(L: LieCS, gamma: InvariantForm, classes) -> ImageSpace:
    """Images θ ↦ Γ∧(θ⌟∂Γ) in H^{2p,1}, checking [θ⌟u_Γ] = [Γ∧(θ⌟∂Γ)].

    θ⌟u_Γ = (θ⌟Γ)∧∂Γ + Γ∧(θ⌟∂Γ), and (θ⌟Γ)∧∂Γ = ∂̄(α∧∂Γ) when θ⌟Γ = ∂̄α.
    """
    cs = ContactStructure(L, gamma)
    n, p = L.n, cs.p
    entries = []
    tgt = FormSpace(n, 2 * p, 1)
    etas = []
    for c in classes:
        theta = c.theta if isinstance(c, DeformationClass) else c
        eta = gamma.wedge(contract(theta, cs.dgamma))
        alpha = preimage(lambda a: delbar(L, a), FormSpace(n, p - 1, 0), FormSpace(n, p - 1, 1),
                         contract(theta, gamma))
        pot, res = None, None
        if alpha is not None:
            pot = alpha.wedge(cs.dgamma)
            res = contract(theta, cs.u_gamma) - eta - delbar(L, pot)
        entries.append(ImageEntry(theta, eta, pot, res))
        etas.append(tgt.vec(eta))
    img = image_vectors(lambda x: delbar(L, x), FormSpace(n, 2 * p, 0), tgt)
    basis = [tgt.element(v) for v in complement_basis(img, etas, tgt.dim)]
    return ImageSpace(entries, basis)


# ---------------------------------------------------------------------------
# order two
# ---------------------------------------------------------------------------

@dataclass
class DeformationCertificate:
    theta1: InvariantVectorForm
    eta1: Optional[InvariantForm] = None
    zeta1: Optional[InvariantForm] = None
    psi1: Optional[InvariantVectorForm] = None
    bracket: Optional[InvariantVectorForm] = None
    alpha: Optional[InvariantForm] = None
    beta: Optional[InvariantForm] = None
    delta: Optional[InvariantForm] = None
    Phi2: Optional[InvariantForm] = None
    psi2: Optional[InvariantVectorForm] = None
    residuals: Dict[str, object] = field(default_factory=dict)
    preconditions: Dict[str, bool] = field(default_factory=dict)
    obstruction: Optional[Obstruction] = None
    scope: str = SCOPE

    @property
    def success(self) -> bool:
        return self.obstruction is None and all(_is_zero(v) for v in self.residuals.values())

    def to_json(self) -> dict:
        return {
            "success": self.success,
            "scope": self.scope,
            "preconditions": dict(self.preconditions),
            "theta1": _fmt(self.theta1), "eta1": _fmt(self.eta1), "zeta1": _fmt(self.zeta1),
            "psi1": _fmt(self.psi1), "bracket_psi1_psi1": _fmt(self.bracket),
            "alpha": _fmt(self.alpha), "beta": _fmt(self.beta), "delta": _fmt(self.delta),
            "Phi2": _fmt(self.Phi2), "psi2": _fmt(self.psi2),
            "residuals": {k: _fmt(v) if v is not None else "0" for k, v in self.residuals.items()},
            "obstruction": None if self.obstruction is None else self.obstruction.to_json(),
        }


def order2(L: LieCS, gamma: InvariantForm, theta1) -> DeformationCertificate:
    """Run the two-step construction on a deformation class θ₁."""
    cs = ContactStructure(L, gamma)
    n, p = L.n, cs.p
    theta1 = theta1.theta if isinstance(theta1, DeformationClass) else theta1
    if theta1.q not in (None, 1):
        raise WrongBidegreeError("θ₁ must be a vector-valued (0,1)-form")
    G, dG, u = gamma, cs.dgamma, cs.u_gamma
    cert = DeformationCertificate(theta1)
    R = cert.residuals
    cert.preconditions = {
        f"page1 at ({2 * p},1)": page1_check_at(L, 2 * p, 1)[0],
        f"page1 at ({n - 2},2)": page1_check_at(L, n - 2, 2)[0],
    }
    dbar = lambda x: delbar(L, x)
    dl = lambda x: delop(L, x)

    cls = classify_deformation(L, gamma, theta1)
    if not cls.member:
        failed = [name for name, ok in (("∂̄θ₁ = 0", cls.delbar_closed),
                                        ("[θ₁⌟Γ] = 0", cls.class_of_contraction_vanishes),
                                        ("θ₁⌟∂Γ ∈ Z₂", cls.z2_membership)) if not ok]
        cert.obstruction = Obstruction("Input: θ₁ is not a p-contact deformation class ("
                                       + ", ".join(failed) + ")", theta1)
        return cert

    # Step 1
    eta1 = G.wedge(contract(theta1, dG))
    cert.eta1 = eta1
    if p % 2 == 1:
        R["Step 1: ∂Γ∧(θ₁⌟∂Γ)"] = dG.wedge(contract(theta1, dG))
    R["Step 1: ∂̄η₁"] = dbar(eta1)
    x, ob = _solve(dbar, FormSpace(n, 2 * p + 1, 0), FormSpace(n, 2 * p + 1, 1), dl(eta1),
                   "Step 1: ∂η₁ ∈ Im ∂̄ unsolvable")
    if ob:
        cert.obstruction = ob
        return cert
    zeta1, ob = _solve(lambda z: dl(dbar(z)), FormSpace(n, 2 * p, 0), FormSpace(n, 2 * p + 1, 1),
                       dl(eta1), "Step 1: ∂η₁ = ∂∂̄ζ₁ unsolvable")
    if ob:
        cert.obstruction = ob
        return cert
    cert.zeta1 = zeta1
    T1 = CYIso(L, gamma, 1)
    psi1 = T1.inverse(eta1 - dbar(zeta1))
    cert.psi1 = psi1
    R["Step 1: ∂̄ψ₁"] = delbar_vform(L, psi1)
    pu = contract(psi1, u)
    R["Step 1: ∂(ψ₁⌟u_Γ)"] = dl(pu)
    R["Step 1: ∂̄(ψ₁⌟u_Γ)"] = dbar(pu)
    diff = psi1 - theta1
    xi = preimage(lambda t: delbar_vform(L, t), VectorFormSpace(n, 0), VectorFormSpace(n, 1), diff)
    R["Step 1: [ψ₁] - [θ₁]"] = None if xi is not None else diff

    # Step 2
    B = bracket_inv(L, psi1, psi1)
    cert.bracket = B
    R["Step 2: ½[ψ₁,ψ₁]⌟u_Γ + ½∂(ψ₁⌟(ψ₁⌟u_Γ))"] = contract(B, u) * HALF + dl(contract(psi1, pu)) * HALF
    alpha = preimage(dbar, FormSpace(n, p - 1, 0), FormSpace(n, p - 1, 1), contract(psi1, G))
    cert.alpha = alpha
    if alpha is not None:
        R["Step 2: first claim"] = (contract(B, G) + contract(psi1, contract(psi1, dG))
                                    - dbar(dl(contract(psi1, alpha)) - contract(psi1, dl(alpha)) * 2))
    R["Step 2: second claim"] = (contract(B, dG) - contract(psi1, dl(contract(psi1, dG))) * 2
                                 + dl(contract(psi1, contract(psi1, dG))))
    beta, ob = _solve(dbar, FormSpace(n, p - 1, 1), FormSpace(n, p - 1, 2), contract(B, G),
                      "Step 2: [ψ₁,ψ₁]⌟Γ = ∂̄β unsolvable")
    if ob:
        cert.obstruction = ob
        return cert
    cert.beta = beta
    delta, ob = _solve(dbar, FormSpace(n, p + 1, 0), FormSpace(n, p + 1, 1),
                       dl(contract(psi1, dG)), "Step 2: ∂(ψ₁⌟∂Γ) = ∂̄δ unsolvable")
    if ob:
        cert.obstruction = ob
        return cert
    cert.delta = delta
    if alpha is not None:
        pot = beta.wedge(dG) + G.wedge(contract(psi1, delta) * 2 - dl(beta)
                                       - dl(contract(psi1, dl(alpha))) * 2)
        R["Step 2: [ψ₁,ψ₁]⌟u_Γ ∈ Im ∂̄"] = contract(B, u) - dbar(pot)
    Phi2, ob = _solve(lambda f: dbar(dl(f)), FormSpace(n, n - 2, 1), FormSpace(n, n - 1, 2),
                      contract(B, u) * HALF, "Step 2: ∂̄∂Φ₂ = ½[ψ₁,ψ₁]⌟u_Γ unsolvable")
    if ob:
        cert.obstruction = ob
        return cert
    cert.Phi2 = Phi2
    psi2 = T1.inverse(dl(Phi2))
    cert.psi2 = psi2
    R["Step 2: ∂̄ψ₂ - ½[ψ₁,ψ₁]"] = delbar_vform(L, psi2) - B * HALF
    R["Step 2: ψ₂⌟u_Γ - ∂Φ₂"] = contract(psi2, u) - dl(Phi2)
    R["Step 2: ∂(ψ₂⌟u_Γ)"] = dl(contract(psi2, u))
    return cert


@dataclass
class TTResult:
    residual: InvariantForm
    classical_applies: bool
    classical_residual: Optional[InvariantForm]
    lhs: InvariantForm

    @property
    def ok(self) -> bool:
        return not self.residual and not self.classical_residual

    def to_json(self) -> dict:
        return {"residual": _fmt(self.residual), "classical_applies": self.classical_applies,
                "classical_residual": _fmt(self.classical_residual), "lhs": _fmt(self.lhs)}


def tt_verify(L: LieCS, u: InvariantForm, theta1: InvariantVectorForm,
              theta2: InvariantVectorForm) -> TTResult:
    """Residual of [θ₁,θ₂]⌟u = -∂(θ₁⌟(θ₂⌟u)) + θ₁⌟∂(θ₂⌟u) + θ₂⌟∂(θ₁⌟u)
    for (0,1)-valued θ's and an (n,0)-form u; the classical form is checked
    when both contractions are ∂-closed."""
    for th in (theta1, theta2):
        if th.q not in (None, 1):
            raise WrongBidegreeError("tt_verify expects vector-valued (0,1)-forms")
    if u and u.bidegree() != (L.n, 0):
        raise WrongBidegreeError("tt_verify expects an (n,0)-form")
    dl = lambda x: delop(L, x)
    t2u, t1u = contract(theta2, u), contract(theta1, u)
    lhs = contract(bracket_inv(L, theta1, theta2), u)
    rhs = -dl(contract(theta1, t2u)) + contract(theta1, dl(t2u)) + contract(theta2, dl(t1u))
    classical = not dl(t1u) and not dl(t2u)
    cres = lhs + dl(contract(theta1, t2u)) if classical else None
    return TTResult(lhs - rhs, classical, cres, lhs)


@dataclass
class CohIntResult:
    solvable: bool
    beta: Optional[InvariantForm]
    obstruction: Optional[Obstruction] = None

    def to_json(self) -> dict:
        return {"solvable": self.solvable, "beta": _fmt(self.beta),
                "obstruction": None if self.obstruction is None else self.obstruction.to_json()}


def coh_int_check(L: LieCS, gamma: InvariantForm, psi1: InvariantVectorForm) -> CohIntResult:
    """Solve [ψ₁,ψ₁]⌟Γ = ∂̄β; an unsolvable system is reported, not raised."""
    L.require_valid()
    b = gamma.bidegree()
    if b is None or b[1] != 0:
        raise WrongBidegreeError("Γ must be a nonzero (p,0)-form")
    p, n = b[0], L.n
    rhs = contract(bracket_inv(L, psi1, psi1), gamma)
    beta, ob = _solve(lambda x: delbar(L, x), FormSpace(n, p - 1, 1), FormSpace(n, p - 1, 2), rhs,
                      "Step 2: [ψ₁,ψ₁]⌟Γ = ∂̄β unsolvable")
    return CohIntResult(beta is not None, beta, ob)


@dataclass
class HigherOrderResult:
    psis: List[InvariantVectorForm]
    reached_order: int
    obstruction: Optional[Obstruction] = None
    note: str = "best effort beyond order two; nothing is claimed past ν = 2"

    def to_json(self) -> dict:
        return {"reached_order": self.reached_order, "psis": [_fmt(x) for x in self.psis],
                "obstruction": None if self.obstruction is None else self.obstruction.to_json(),
                "note": self.note}


def higher_orders(L: LieCS, gamma: InvariantForm, psis: List[InvariantVectorForm],
                  max_order: int) -> HigherOrderResult:
    """Extend ψ₁, ψ₂, … by solving ∂̄ψ_ν = ½ Σ_{μ=1}^{ν-1} [ψ_μ, ψ_{ν-μ}].

    A solution with ∂-exact contraction into u_Γ is tried first, then any
    ∂̄-preimage; the first unsolvable order stops the iteration.
    """
    cs = ContactStructure(L, gamma)
    n = L.n
    out = list(psis)
    T1 = CYIso(L, gamma, 1)
    V1, V2 = VectorFormSpace(n, 1), VectorFormSpace(n, 2)
    for nu in range(len(out) + 1, max_order + 1):
        rhs = InvariantVectorForm.zero(n)
        for mu in range(1, nu):
            rhs = rhs + bracket_inv(L, out[mu - 1], out[nu - mu - 1])
        rhs = rhs * HALF
        Phi = preimage(lambda f: delbar(L, delop(L, f)), FormSpace(n, n - 2, 1),
                       FormSpace(n, n - 1, 2), contract(rhs, cs.u_gamma))
        if Phi is not None:
            out.append(T1.inverse(delop(L, Phi)))
            continue
        psi, ob = _solve(lambda t: delbar_vform(L, t), V1, V2, rhs,
                         f"Order {nu}: ∂̄ψ_{nu} = ½Σ[ψ_μ,ψ_{nu}-μ] unsolvable")
        if ob:
            return HigherOrderResult(out, nu - 1, ob)
        out.append(psi)
    return HigherOrderResult(out, max_order)
