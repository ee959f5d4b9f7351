"""Built-in structure equations with parameter schemas.

Notation inside the table builders: ``t(c, "12")`` is c*phi1^phi2,
``t(c, "1", "3")`` is c*phi1^phibar3, ``t(c, "", "12")`` is c*phibar1^phibar2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .invariant import InvariantForm, LieCS
from .notation import parse_form
from .scalars import I, GaussianRational, gq


class UnknownEntryError(KeyError):
    pass


class InadmissibleParametersError(ValueError):
    pass


def t(c, unbarred: str, barred: str = ""):
    return (gq(c), (tuple(int(ch) for ch in unbarred), tuple(int(ch) for ch in barred)))


@dataclass(frozen=True)
class Param:
    name: str
    default: object
    kind: str = "scalar"            # scalar | int | choice
    choices: tuple = ()
    grid: tuple = ()                # admissible test points


@dataclass
class CatalogEntry:
    id: str
    description: str
    params: Tuple[Param, ...]
    constraints: List[Tuple[str, Callable[[dict], bool]]]
    builder: Callable[[dict], LieCS]
    forms: Dict[str, Callable[[dict], str]] = field(default_factory=dict)
    contact_form: Optional[str] = None      # key into forms of a known p-contact form
    displayed_points: Tuple[dict, ...] = ()

    def defaults(self) -> dict:
        return {p.name: p.default for p in self.params}

    def grid(self) -> List[dict]:
        """Cartesian product of the documented admissible test values."""
        points = [{}]
        for p in self.params:
            vals = p.grid or (p.default,)
            points = [dict(pt, **{p.name: v}) for pt in points for v in vals]
        return [pt for pt in points if self.admissible(pt)[0]]

    def admissible(self, values: dict) -> Tuple[bool, Optional[str]]:
        for desc, pred in self.constraints:
            if not pred(values):
                return False, desc
        return True, None


def _coerce_params(entry: CatalogEntry, params: Optional[dict]) -> dict:
    params = dict(params or {})
    unknown = set(params) - {p.name for p in entry.params}
    if unknown:
        raise InadmissibleParametersError(f"unknown parameter(s) for {entry.id}: {sorted(unknown)}")
    out = {}
    for p in entry.params:
        v = params.get(p.name, p.default)
        if p.kind == "scalar":
            v = gq(v)
        elif p.kind == "int":
            try:
                v = int(v)
            except (TypeError, ValueError):
                raise InadmissibleParametersError(f"{p.name} must be an integer") from None
        elif p.kind == "choice":
            if v not in p.choices:
                raise InadmissibleParametersError(f"{p.name} must be one of {list(p.choices)}")
        out[p.name] = v
    return out


def _is_real(z: GaussianRational) -> bool:
    return z.im == 0


def _in01(z) -> bool:
    return z == 0 or z == 1


def _unit(z: GaussianRational) -> bool:
    return z.norm2() == 1


def _label(entry_id: str, values: dict, params: Sequence[Param]) -> str:
    if not params:
        return entry_id
    inner = ",".join(f"{p.name}={values[p.name]}" for p in params)
    return f"{entry_id}({inner})"


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def _torus(v):
    return {}


def _iwasawa(v):
    return {3: [t(-1, "12")]}


def _nakamura(v):
    return {2: [t(1, "12")], 3: [t(-1, "13")]}


def _sl2c(v):
    return {1: [t(1, "23")], 2: [t(-1, "13")], 3: [t(1, "12")]}


def _h15(v):
    return {2: [t(1, "1", "1")], 3: [t(1, "12")]}


def _ex5(v):
    return {2: [t(1, "12"), t(1, "1", "1")], 3: [t(-1, "13"), t(1, "1", "1")]}


def _uga07_a(v):
    A, E, b = v["A"], v["E"], v["b"]
    return {2: [t(E, "13"), t(1, "1", "3")],
            3: [t(A, "1", "1"), t(I * b, "1", "2"), t(-I * b * E.conjugate(), "2", "1")]}


def _uga07_b(v):
    eps, rho = v["eps"], v["rho"]
    A, B, C, D = v["A"], v["B"], v["C"], v["D"]
    return {2: [t(eps, "1", "1")],
            3: [t(rho, "12"), t((1 - eps) * A, "1", "1"), t(B, "1", "2"), t(C, "2", "1"),
                t((1 - eps) * D, "2", "2")]}


def _g12(v):
    A = v["A"]
    return {1: [t(A, "13"), t(A, "1", "3")], 2: [t(-A, "23"), t(-A, "2", "3")]}


def _g3(v):
    x = v["x"]
    half = gq(Fraction(1, 2))
    return {2: [t(-half, "13"), t(-(half + x * I), "1", "3"), t(x * I, "3", "1")],
            3: [t(half, "12"), t(half - I / (4 * x), "1", "2"), t(I / (4 * x), "2", "1")]}


def _g4567(v):
    A = v["A"]
    g11, g12, g22 = v["G11"], v["G12"], v["G22"]
    return {1: [t(A, "13"), t(A, "1", "3")], 2: [t(-A, "23"), t(-A, "2", "3")],
            3: [t(g11, "1", "1"), t(g12, "1", "2"), t(g12.conjugate(), "2", "1"), t(g22, "2", "2")]}


def _g8_J(v):
    return {1: [t(2 * I, "13"), t(1, "3", "3")], 2: [t(-2 * I, "23")]}


def _g8_Jprime(v):
    return {1: [t(2 * I, "13"), t(1, "3", "3")], 2: [t(-2 * I, "23"), t(1, "3", "3")]}


def _g8_JA(v):
    A = v["A"]
    return {1: [t(-(A - I), "13"), t(-(A + I), "1", "3")],
            2: [t(A - I, "23"), t(A + I, "2", "3")]}


def _g9(v):
    h = gq(Fraction(1, 2))
    return {1: [t(-1, "3", "3")],
            2: [t(I * h, "12"), t(h, "1", "3"), t(-I * h, "2", "1")],
            3: [t(-I * h, "13"), t(I * h, "3", "1")]}


def _g10(v):
    return {1: [t(1, "13"), t(-1, "1", "3"), t(1, "3", "2")],
            2: [t(-1, "23"), t(1, "2", "3")]}


def _ex52(v):
    eps = v["eps"]
    return {3: [t(1, "12")], 4: [t(1, "13")], 5: [t(1, "23")], 6: [t(eps, "25")],
            7: [t(1, "26")]}


def _table_to_lie(n, table, name):
    return LieCS.from_table(n, table, name=name)


def _ex53_lie(v) -> LieCS:
    l, base, sigma = v["l"], v["base"], v["sigma"]
    n = 4 * l + 3
    diff = [InvariantForm.zero(n) for _ in range(n)]
    if base == "nilpotent":
        diff[4 * l - 1] = InvariantForm.from_indices(n, {((1, 2), ()): 1})
    sig = InvariantForm.from_indices(n, {((1, 2), ()): sigma})
    diff[4 * l + 2] = InvariantForm.from_indices(n, {((4 * l + 1, 4 * l + 2), ()): 1}) + sig
    return LieCS(n, diff, name="ex53")


def ex53_gamma(l: int) -> InvariantForm:
    """Ω ∧ φ_{4l+3} with Ω = φ_1∧…∧φ_{2l} + φ_{2l+1}∧…∧φ_{4l}."""
    n = 4 * l + 3
    omega = (InvariantForm.from_indices(n, {(tuple(range(1, 2 * l + 1)), ()): 1})
             + InvariantForm.from_indices(n, {(tuple(range(2 * l + 1, 4 * l + 1)), ()): 1}))
    return omega.wedge(InvariantForm.phi(n, 4 * l + 3))


def ex53_from_base(base: LieCS, omega: InvariantForm, sigma: InvariantForm) -> Tuple[LieCS, InvariantForm]:
    """Extend a 4l-dimensional base by three (1,0)-forms as in the product-type construction.

    New forms φ_{m+1}, φ_{m+2} are closed and ∂φ_{m+3} = φ_{m+1}∧φ_{m+2} + σ,
    where m = base.n and σ is a d-closed invariant form on the base.
    Returns the structure and Γ = Ω ∧ φ_{m+3}.
    """
    from .invariant import d
    m = base.n
    if m % 4:
        raise ValueError("base dimension must be a multiple of 4")
    if d(base, sigma):
        raise ValueError("sigma must be d-closed on the base")
    n = m + 3

    def lift(f: InvariantForm) -> InvariantForm:
        out = {}
        for mono, c in f.terms.items():
            out[tuple(g if g < m else g - m + n for g in mono)] = c
        return InvariantForm(n, out)

    diff = [lift(f) for f in base.diff] + [InvariantForm.zero(n), InvariantForm.zero(n)]
    diff.append(InvariantForm.from_indices(n, {((m + 1, m + 2), ()): 1}) + lift(sigma))
    L = LieCS(n, diff, name=f"{base.name}+ex53")
    return L, lift(omega).wedge(InvariantForm.phi(n, n))


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

_S = lambda txt: gq(txt)
_UNIT_POINTS = (_S("1"), _S("i"), _S("3/5+4/5*i"))
_UPPER_UNIT_POINTS = (_S("1"), _S("i"), _S("3/5+4/5*i"), _S("-3/5+4/5*i"))



def _entries() -> Dict[str, CatalogEntry]:
    E: Dict[str, CatalogEntry] = {}

    def add(entry_id, description, n, table_fn, params=(), constraints=(), forms=None,
            contact_form=None, displayed=()):
        def build(v, _n=n, _fn=table_fn, _id=entry_id, _params=params):
            nn = _n(v) if callable(_n) else _n
            return LieCS.from_table(nn, _fn(v), name=_label(_id, v, _params))
        E[entry_id] = CatalogEntry(entry_id, description, tuple(params), list(constraints), build,
                                   forms or {}, contact_form, tuple(displayed))

    add("torus", "abelian complex torus of dimension n", lambda v: v["n"], _torus,
        params=(Param("n", 3, "int", grid=(1, 2, 3)),),
        constraints=[("n >= 1", lambda v: v["n"] >= 1)])
    add("iwasawa", "Iwasawa manifold (nilpotent, complex parallelisable)", 3, _iwasawa,
        forms={"gamma": lambda v: "phi3"}, contact_form="gamma")
    add("nakamura", "Nakamura manifold (solvable, complex parallelisable)", 3, _nakamura,
        forms={"gamma1": lambda v: "phi2+phi3", "gamma2": lambda v: "phi2-phi3",
               "no_contact": lambda v: "phi2"}, contact_form="gamma1")
    add("sl2c", "quotient of SL(2,C) (simple, complex parallelisable)", 3, _sl2c,
        forms={"gamma": lambda v: "phi1"}, contact_form="gamma")
    add("h15", "nilmanifold with dphi2 = phi1^phi1b, dphi3 = phi1^phi2", 3, _h15,
        forms={"gamma": lambda v: "phi3"}, contact_form="gamma")
    add("ex5", "solvmanifold with mixed terms in dphi2 and dphi3", 3, _ex5,
        forms={"gamma": lambda v: "phi2-phi3"}, contact_form="gamma")
    add("uga07_a", "nilpotent family (a): |E| = 1, b real nonzero", 3, _uga07_a,
        params=(Param("A", 0, grid=(_S("0"), _S("1"), _S("i"))),
                Param("E", 1, grid=_UNIT_POINTS),
                Param("b", 1, grid=(_S("1"), _S("-1"), _S("2")))),
        constraints=[("|E|^2 = 1", lambda v: _unit(v["E"])),
                     ("b real", lambda v: _is_real(v["b"])),
                     ("b != 0", lambda v: bool(v["b"]))])
    add("uga07_b", "nilpotent family (b): eps, rho in {0,1}", 3, _uga07_b,
        params=(Param("eps", 0, grid=(_S("0"), _S("1"))), Param("rho", 1, grid=(_S("0"), _S("1"))),
                Param("A", 0, grid=(_S("0"), _S("1"))), Param("B", 0, grid=(_S("0"), _S("1"))),
                Param("C", 0, grid=(_S("0"), _S("1"))), Param("D", 0, grid=(_S("0"), _S("1")))),
        constraints=[("eps in {0,1}", lambda v: _in01(v["eps"])),
                     ("rho in {0,1}", lambda v: _in01(v["rho"]))])
    add("g12", "solvable g1/g2 family: A = cos t + i sin t, t in [0, pi)", 3, _g12,
        params=(Param("A", 1, grid=_UPPER_UNIT_POINTS),),
        constraints=[("|A|^2 = 1", lambda v: _unit(v["A"])),
                     ("Im A > 0 or A = 1", lambda v: v["A"].im > 0 or v["A"] == 1)],
        displayed=({"A": _S("1")}, {"A": _S("i")}, {"A": _S("3/5+4/5*i")}))
    add("g3", "solvable g3 family with real parameter x > 0", 3, _g3,
        params=(Param("x", 1, grid=(_S("1"), _S("1/2"), _S("2"))),),
        constraints=[("x real", lambda v: _is_real(v["x"])), ("x > 0", lambda v: v["x"].re > 0)],
        displayed=({"x": _S("1")}, {"x": _S("1/2")}, {"x": _S("2")}))
    add("g4567", "solvable g4..g7 families: |A| = 1, G11 and G22 real", 3, _g4567,
        params=(Param("A", _S("i"), grid=(_S("1"), _S("i"), _S("-1"), _S("-i"))),
                Param("G11", 1, grid=(_S("0"), _S("1"), _S("-1"))),
                Param("G12", 0, grid=(_S("0"), _S("1"), _S("i"))),
                Param("G22", 0, grid=(_S("0"), _S("1"), _S("-1")))),
        constraints=[("|A|^2 = 1", lambda v: _unit(v["A"])),
                     ("G11 real", lambda v: _is_real(v["G11"])),
                     ("G22 real", lambda v: _is_real(v["G22"])),
                     ("(G11, G12, G22) != 0", lambda v: bool(v["G11"] or v["G12"] or v["G22"])),
                     ("Re(A) G11 = 0 (Jacobi)", lambda v: v["A"].re * v["G11"].re == 0),
                     ("Re(A) G22 = 0 (Jacobi)", lambda v: v["A"].re * v["G22"].re == 0),
                     ("Im(A) G12 = 0 (Jacobi)", lambda v: not (v["A"].im and v["G12"]))],
        displayed=({"A": _S("i"), "G11": _S("1"), "G12": _S("0"), "G22": _S("0")},
                   {"A": _S("i"), "G11": _S("1"), "G12": _S("0"), "G22": _S("1")},
                   {"A": _S("i"), "G11": _S("1"), "G12": _S("0"), "G22": _S("-1")},
                   {"A": _S("1"), "G11": _S("0"), "G12": _S("1"), "G22": _S("0")}))
    add("g8_J", "solvable g8 with complex structure J", 3, _g8_J)
    add("g8_Jprime", "solvable g8 with complex structure J'", 3, _g8_Jprime,
        forms={"gamma": lambda v: "phi1-phi2"}, contact_form="gamma")
    add("g8_JA", "solvable g8 with complex structures J_A, Im A != 0", 3, _g8_JA,
        params=(Param("A", _S("-i"), grid=(_S("-i"), _S("i"), _S("2*i"), _S("1+i"), _S("1-2*i"))),),
        constraints=[("Im A != 0", lambda v: v["A"].im != 0)],
        displayed=({"A": _S("-i")}, {"A": _S("i")}, {"A": _S("2*i")}, {"A": _S("1+i")}))
    add("g9", "solvable g9", 3, _g9)
    add("g10", "solvable g10", 3, _g10)
    add("ex52", "7-dimensional nilpotent family with eps in {0,1}", 7, _ex52,
        params=(Param("eps", 0, grid=(_S("0"), _S("1"))),),
        constraints=[("eps in {0,1}", lambda v: _in01(v["eps"]))],
        forms={"gamma": lambda v: "phi3^phi4^phi5 + phi3^phi5^phi6 + phi3^phi6^phi7"},
        contact_form="gamma")

    def ex53_build(v):
        L = _ex53_lie(v)
        L.name = _label("ex53", v, E["ex53"].params)
        return L

    E["ex53"] = CatalogEntry(
        "ex53", "product-type construction over a 4l-dimensional base (abelian or nilpotent)",
        (Param("l", 1, "int", grid=(1, 2)),
         Param("base", "abelian", "choice", choices=("abelian", "nilpotent"),
               grid=("abelian", "nilpotent")),
         Param("sigma", 0, grid=(_S("0"), _S("1")))),
        [("l >= 1", lambda v: v["l"] >= 1)],
        ex53_build,
        {"gamma": lambda v: _form_text(ex53_gamma(v["l"]))},
        "gamma")
    return E


def _form_text(f: InvariantForm) -> str:
    parts = []
    for I_, J_, c in f.indexed_terms():
        facs = [f"phi{i}" for i in I_] + [f"phi{j}b" for j in J_]
        parts.append(f"({c})*" + "^".join(facs))
    return " + ".join(parts) if parts else "0"


CATALOG: Dict[str, CatalogEntry] = _entries()

# families of the solvable (non-nilpotent) classification list
SOLVABLE_IDS = ("g12", "g3", "g4567", "g8_J", "g8_Jprime", "g8_JA", "g9", "g10")


def catalog_list() -> List[str]:
    return list(CATALOG)


def get_entry(entry_id: str) -> CatalogEntry:
    try:
        return CATALOG[entry_id]
    except KeyError:
        raise UnknownEntryError(f"unknown catalog entry {entry_id!r}") from None


def resolve_params(entry_id: str, params: Optional[dict] = None) -> dict:
    entry = get_entry(entry_id)
    values = _coerce_params(entry, params)
    ok, violated = entry.admissible(values)
    if not ok:
        raise InadmissibleParametersError(f"{entry_id}: constraint violated: {violated}")
    return values


def catalog_get(entry_id: str, params: Optional[dict] = None) -> LieCS:
    """Return the structure equations of a catalog entry for the given parameters."""
    entry = get_entry(entry_id)
    values = resolve_params(entry_id, params)
    return entry.builder(values)


def catalog_form(entry_id: str, form_name: str, params: Optional[dict] = None) -> InvariantForm:
    entry = get_entry(entry_id)
    values = resolve_params(entry_id, params)
    L = entry.builder(values)
    return parse_form(entry.forms[form_name](values), L.n)
