"""Command-line front end and the structure-file format.

Structure files are JSON::

    {"name": "iwasawa", "n": 3, "basis": ["phi1", "phi2", "phi3"],
     "d": {"1": [], "2": [],
           "3": [{"coeff": {"re": "-1", "im": "0"}, "factors": ["1", "2"]}]}}

A factor "j" is φ_j and "jb" is φ̄_j.  Wherever a structure file is
expected, ``@id`` names a catalog entry instead (parameters via --param).

Exit codes: 0 when the computation ran (negative answers included), 1 for
bad input or an invalid structure, 2 when an internal consistency check
fails.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import List, Optional

from . import __version__
from .catalog import (CATALOG, InadmissibleParametersError, UnknownEntryError, catalog_get,
                      catalog_list, get_entry)
from .contact import SCOPE, ContactPreconditionError
from .invariant import (DimensionMismatchError, InvalidStructureError, InvariantForm, LieCS,
                        WrongBidegreeError)
from .notation import FormSyntaxError, parse_form, parse_vform
from .scalars import GaussianRational, MalformedScalarError, gq
from .spaces import InvariantViolation


class StructureFileError(ValueError):
    """Malformed structure file; the message names the offending entry."""


class InputError(ValueError):
    pass


# ---------------------------------------------------------------------------
# structure files
# ---------------------------------------------------------------------------

def _factor_label(g: int, n: int) -> str:
    return str(g + 1) if g < n else f"{g - n + 1}b"


def structure_to_doc(L: LieCS) -> dict:
    d = {}
    for k in range(L.n):
        terms = []
        for m, c in sorted(L.diff[k].terms.items()):
            terms.append({"coeff": {"re": str(c.re), "im": str(c.im)},
                          "factors": [_factor_label(g, L.n) for g in m]})
        d[str(k + 1)] = terms
    return {"name": L.name, "n": L.n, "basis": list(L.names), "d": d}


def emit_structure(L: LieCS) -> str:
    return json.dumps(structure_to_doc(L), ensure_ascii=False, indent=2) + "\n"


_FACTOR = re.compile(r"^([1-9]\d*)(b?)$")


def _parse_rational(txt, where: str) -> Fraction:
    if isinstance(txt, int) and not isinstance(txt, bool):
        return Fraction(txt)
    if not isinstance(txt, str) or not re.fullmatch(r"[+-]?\d+(/\d+)?", txt.strip()):
        raise StructureFileError(f"{where}: malformed rational {txt!r}")
    num, _, den = txt.strip().partition("/")
    if den and int(den) == 0:
        raise StructureFileError(f"{where}: zero denominator in {txt!r}")
    return Fraction(int(num), int(den) if den else 1)


def parse_structure(text: str, validate: bool = True) -> LieCS:
    """Parse a structure file; with ``validate`` the table must pass validation."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructureFileError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise StructureFileError("top level must be an object")
    for key in ("n", "d"):
        if key not in doc:
            raise StructureFileError(f"missing key {key!r}")
    n = doc["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise StructureFileError(f"n must be a positive integer, got {n!r}")
    name = doc.get("name", "unnamed")
    if not isinstance(name, str):
        raise StructureFileError("name must be a string")
    basis = doc.get("basis")
    if basis is not None and (not isinstance(basis, list) or len(basis) != n
                              or not all(isinstance(b, str) for b in basis)):
        raise StructureFileError(f"basis must list {n} labels")
    d = doc["d"]
    if not isinstance(d, dict):
        raise StructureFileError("d must be an object keyed by generator index")
    diff = [InvariantForm.zero(n) for _ in range(n)]
    for key, terms in d.items():
        if not (isinstance(key, str) and key.isdigit() and 1 <= int(key) <= n):
            raise StructureFileError(f"d: generator index {key!r} out of range 1..{n}")
        if not isinstance(terms, list):
            raise StructureFileError(f"d[{key}]: expected a list of terms")
        k = int(key) - 1
        for t, term in enumerate(terms):
            where = f"d[{key}][{t}]"
            if not isinstance(term, dict) or "coeff" not in term or "factors" not in term:
                raise StructureFileError(f"{where}: a term needs 'coeff' and 'factors'")
            coeff = term["coeff"]
            if isinstance(coeff, str):
                try:
                    c = gq(coeff)
                except MalformedScalarError:
                    raise StructureFileError(f"{where}: malformed scalar {coeff!r}") from None
            elif isinstance(coeff, dict):
                c = GaussianRational(_parse_rational(coeff.get("re", "0"), where),
                                     _parse_rational(coeff.get("im", "0"), where))
            else:
                raise StructureFileError(f"{where}: coeff must be an object with re/im")
            facs = term["factors"]
            if not isinstance(facs, list) or len(facs) != 2:
                raise StructureFileError(f"{where}: exactly two factors expected")
            gens = []
            for f in facs:
                m = _FACTOR.match(str(f))
                if not m or int(m.group(1)) > n:
                    raise StructureFileError(f"{where}: bad factor {f!r}")
                gens.append(int(m.group(1)) - 1 + (n if m.group(2) else 0))
            if gens[0] == gens[1]:
                raise StructureFileError(f"{where}: repeated factor {facs[0]!r}")
            sign = 1 if gens[0] < gens[1] else -1
            diff[k] = diff[k] + InvariantForm(n, {tuple(sorted(gens)): c if sign > 0 else -c})
    L = LieCS(n, diff, names=basis, name=name)
    if validate:
        L.require_valid()
    return L


def load_structure(source: str, params: Optional[dict] = None) -> LieCS:
    if source.startswith("@"):
        return catalog_get(source[1:], params)
    try:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {source}: {exc.strerror}") from None
    return parse_structure(text)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def make_report(command: str, inputs: dict, results, residuals=None, certificates=None) -> dict:
    return {"tool_version": __version__, "scope": SCOPE, "command": command, "inputs": inputs,
            "results": results, "residuals": residuals or {}, "certificates": certificates or {}}


def _render_text(obj, indent: int = 0) -> List[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar_text(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}-")
                lines.extend(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar_text(v)}")
    else:
        lines.append(pad + _scalar_text(obj))
    return lines


def _scalar_text(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (dict, list)):
        return "{}" if isinstance(v, dict) else "[]"
    return str(v)


def format_report(report: dict, output: str) -> str:
    if output == "text":
        return "\n".join(_render_text(report)) + "\n"
    return json.dumps(report, ensure_ascii=False, indent=2) + "\n"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _parse_params(items: Optional[List[str]]) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise InputError(f"--param expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _inputs(args, L: LieCS, **extra) -> dict:
    d = {"structure": args.structure, "name": L.name, "n": L.n}
    if getattr(args, "param", None):
        d["params"] = dict(sorted(_parse_params(args.param).items()))
    d.update(extra)
    return d


def cmd_check(args, L: LieCS):
    rep = L.validation
    res = {"valid": rep.valid, "jacobi_ok": rep.jacobi_ok, "integrable": rep.integrable,
           "nilpotent": rep.nilpotent, "solvable": rep.solvable,
           "complex_parallelisable": rep.complex_parallelisable,
           "lower_central_series_dims": list(rep.lower_central_series_dims),
           "derived_series_dims": list(rep.derived_series_dims),
           "diagnostics": list(rep.diagnostics)}
    return make_report("check", _inputs(args, L), res)


def cmd_contact(args, L: LieCS):
    from .contact import contact_exists, is_p_contact, is_p_no_contact, top_coefficient
    if args.exists:
        if args.p is None:
            raise InputError("--exists needs -p P")
        r = contact_exists(L, args.p)
        if r.exists:
            cert = {"witness": r.to_json()["witness"],
                    "top_coefficient": str(top_coefficient(L, r.witness))}
        else:
            cert = {"polarization": r.to_json()["polarization"]}
        return make_report("contact --exists", _inputs(args, L, p=args.p), r.to_json(),
                           certificates=cert)
    if args.no_contact is not None:
        g = parse_form(args.no_contact, L.n)
        r = is_p_no_contact(L, g)
        return make_report("contact --no-contact", _inputs(args, L, gamma=args.no_contact), r.to_json())
    if args.form is not None:
        g = parse_form(args.form, L.n)
        r = is_p_contact(L, g)
        return make_report("contact --form", _inputs(args, L, gamma=args.form), r.to_json())
    raise InputError("contact needs one of --form, --exists, --no-contact")


def cmd_sheaves(args, L: LieCS):
    from .contact import foliation_check, kernels
    g = parse_form(args.gamma, L.n)
    k = kernels(L, g)
    fol = foliation_check(L, g)
    return make_report("sheaves", _inputs(args, L, gamma=args.gamma),
                       {"kernels": k.to_json(), "foliation": fol.to_json()})


def cmd_cohomology(args, L: LieCS):
    from . import cohomology as co
    if args.dolbeault:
        values = "tangent" if args.tangent else "scalar"
        rep = co.dolbeault(L, values)
        return make_report("cohomology --dolbeault", _inputs(args, L, values=values), rep.to_json())
    if args.derham:
        rep = co.derham(L)
        return make_report("cohomology --derham", _inputs(args, L), rep.to_json())
    if args.frolicher is not None:
        pages = co.frolicher(L, args.frolicher)
        res = {"stabilization_page": pages[-1].stabilization_page,
               "pages": [pg.to_json() for pg in pages],
               "totals": {f"E{pg.r}": [pg.total(k) for k in range(2 * L.n + 1)] for pg in pages}}
        return make_report("cohomology --frolicher", _inputs(args, L, r_max=args.frolicher), res)
    if args.z2 is not None:
        p, q = args.z2
        rep = co.z2_c2(L, p, q)
        return make_report("cohomology --z2", _inputs(args, L, p=p, q=q), rep.to_json())
    if args.page1:
        rep = co.page1_check(L)
        cert = {}
        if rep.certificate is not None:
            cert = {"failure_bidegree": list(rep.failure), "form": rep.to_json()["certificate"]}
        return make_report("cohomology --page1", _inputs(args, L), rep.to_json(), certificates=cert)
    raise InputError("cohomology needs one of --dolbeault, --derham, --frolicher, --z2, --page1")


def _read_theta(path: str, n: int):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read().strip()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    if text.startswith("{"):
        try:
            text = json.loads(text)["theta"]
        except (json.JSONDecodeError, KeyError, TypeError):
            raise InputError(f"{path}: expected a JSON object with key 'theta'") from None
    return parse_vform(text, n)


def cmd_deform(args, L: LieCS):
    from . import deformations as de
    g = parse_form(args.gamma, L.n)
    if args.space:
        sp = de.deformation_space(L, g)
        img = de.image_space(L, g, sp.classes)
        res = sp.to_json()
        res["image"] = img.to_json()
        bad = [e for e in img.entries if e.lemma_residual]
        if bad:
            raise InvariantViolation("image lemma residual is nonzero")
        return make_report("deform --space", _inputs(args, L, gamma=args.gamma), res,
                           residuals={f"image lemma [{i}]": "0" for i in range(len(img.entries))})
    if args.order2:
        if args.theta:
            theta = _read_theta(args.theta, L.n)
            label = {"theta_file": args.theta}
        elif args.cls is not None:
            sp = de.deformation_space(L, g)
            if not 0 <= args.cls < sp.dim:
                raise InputError(f"--class {args.cls} out of range: the space has dimension {sp.dim}")
            theta = sp.classes[args.cls].theta
            label = {"class": args.cls}
        else:
            raise InputError("--order2 needs --class K or --theta FILE")
        cert = de.order2(L, g, theta)
        cj = cert.to_json()
        residuals = cj.pop("residuals")
        if cert.obstruction is None and not cert.success:
            raise InvariantViolation("order-two certificate has a nonzero residual: "
                                     + ", ".join(k for k, v in residuals.items() if v != "0"))
        res = {"success": cert.success, "obstruction": cj.pop("obstruction"),
               "preconditions": cj.pop("preconditions")}
        cj.pop("success")
        cj.pop("scope")
        if args.higher:
            hi = de.higher_orders(L, g, [cert.psi1, cert.psi2], args.higher) \
                if cert.success else None
            res["higher_orders"] = None if hi is None else hi.to_json()
        return make_report("deform --order2", _inputs(args, L, gamma=args.gamma, **label), res,
                           residuals=residuals, certificates=cj)
    if args.coh_int:
        theta = _read_theta(args.coh_int, L.n)
        r = de.coh_int_check(L, g, theta)
        return make_report("deform --coh-int", _inputs(args, L, gamma=args.gamma, theta_file=args.coh_int),
                           r.to_json())
    raise InputError("deform needs --space, --order2 or --coh-int")


def cmd_verify(args):
    from .polyforms import bridge_check, identity_suite
    if args.suite != "lie-calculus":
        raise InputError(f"unknown suite {args.suite!r}")
    rep = identity_suite(args.seed, args.trials)
    res = {"suite": args.suite, "seed": rep.seed, "trials": rep.trials, "checks_run": rep.checks_run,
           "failures": rep.failures, "passed": rep.passed,
           "per_identity": {k: {"passed": v[0], "failed": v[1]} for k, v in sorted(rep.per_identity.items())},
           "first_counterexample": rep.first_counterexample}
    ok = rep.passed
    if args.bridge:
        res["bridge"] = {}
        for model in ("iwasawa", "h15"):
            b = bridge_check(model, seed=args.seed)
            res["bridge"][model] = {"checks_run": b.checks_run, "failures": b.failures,
                                    "passed": b.passed}
            ok = ok and b.passed
    report = make_report("verify", {"suite": args.suite, "seed": args.seed, "trials": args.trials,
                                    "bridge": bool(args.bridge)}, res)
    return report, (0 if ok else 2)


def _sweep_point(entry_id: str, point: dict) -> dict:
    from .contact import contact_exists
    L = get_entry(entry_id).builder(point)
    rep = L.validation
    out = {"params": {k: str(v) for k, v in point.items()}, "valid": rep.valid}
    if rep.valid and L.n % 2 == 1:
        r = contact_exists(L, (L.n - 1) // 2)
        out["contact_exists"] = r.exists
        out["witness"] = r.to_json()["witness"]
    return out


def cmd_catalog(args):
    if args.list:
        res = []
        for eid in catalog_list():
            e = CATALOG[eid]
            res.append({"id": eid, "description": e.description,
                        "params": [p.name for p in e.params],
                        "forms": sorted(e.forms)})
        return make_report("catalog --list", {}, res), None
    params = _parse_params(args.param)
    if args.emit:
        L = catalog_get(args.emit, params)
        return None, emit_structure(L)
    if args.sweep:
        entry = get_entry(args.sweep)
        points = entry.grid()
        key = lambda pt: tuple(str(pt[p.name]) for p in entry.params)
        points.sort(key=key)
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(_sweep_point, [args.sweep] * len(points), points))
        else:
            results = [_sweep_point(args.sweep, pt) for pt in points]
        return make_report("catalog --sweep", {"id": args.sweep, "points": len(points)}, results), None
    raise InputError("catalog needs --list, --emit ID or --sweep ID")


# ---------------------------------------------------------------------------
# argument parsing and dispatch
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pcontact",
                                 description="Holomorphic p-contact structures on invariant complexes.")
    ap.add_argument("--output", choices=("json", "text"), default="json")
    ap.add_argument("--version", action="version", version=f"pcontact {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def with_structure(p):
        p.add_argument("structure", help="structure file, or @id for a catalog entry")
        p.add_argument("--param", action="append", metavar="K=V", help="catalog parameter")
        p.add_argument("--output", choices=("json", "text"), default=argparse.SUPPRESS)
        return p

    with_structure(sub.add_parser("check", help="validate structure equations"))

    p = with_structure(sub.add_parser("contact", help="contact / no-contact decisions"))
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--form", metavar="F")
    g.add_argument("--exists", action="store_true")
    g.add_argument("--no-contact", dest="no_contact", metavar="F")
    p.add_argument("-p", type=int, dest="p")

    p = with_structure(sub.add_parser("sheaves", help="kernels F and G, foliation test"))
    p.add_argument("--gamma", required=True, metavar="F")

    p = with_structure(sub.add_parser("cohomology", help="Dolbeault, de Rham, Frölicher, Z2/C2"))
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--dolbeault", action="store_true")
    g.add_argument("--derham", action="store_true")
    g.add_argument("--frolicher", type=int, metavar="R")
    g.add_argument("--z2", type=int, nargs=2, metavar=("P", "Q"))
    g.add_argument("--page1", action="store_true")
    p.add_argument("--tangent", action="store_true", help="with --dolbeault: values in g^{1,0}")

    p = with_structure(sub.add_parser("deform", help="deformation space and order-two pipeline"))
    p.add_argument("--gamma", required=True, metavar="F")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--space", action="store_true")
    g.add_argument("--order2", action="store_true")
    g.add_argument("--coh-int", dest="coh_int", metavar="FILE")
    p.add_argument("--class", dest="cls", type=int, metavar="K")
    p.add_argument("--theta", metavar="FILE")
    p.add_argument("--higher", type=int, metavar="NU", help="continue best-effort up to order NU")

    p = sub.add_parser("verify", help="randomized identity suite and coordinate bridge")
    p.add_argument("--suite", default="lie-calculus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--bridge", action="store_true")
    p.add_argument("--output", choices=("json", "text"), default=argparse.SUPPRESS)

    p = sub.add_parser("catalog", help="built-in structure equations")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--list", action="store_true")
    g.add_argument("--emit", metavar="ID")
    g.add_argument("--sweep", metavar="ID")
    p.add_argument("--param", action="append", metavar="K=V")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output", choices=("json", "text"), default=argparse.SUPPRESS)
    return ap


_INPUT_ERRORS = (StructureFileError, InputError, FormSyntaxError, MalformedScalarError,
                 UnknownEntryError, InadmissibleParametersError, InvalidStructureError,
                 WrongBidegreeError, DimensionMismatchError, ContactPreconditionError)


def _error_report(command: str, exc: Exception, kind: str) -> dict:
    msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
    return make_report(command, {}, {"error": {"kind": kind, "type": type(exc).__name__,
                                               "message": msg}})


def run(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    output = args.output
    command = args.command
    try:
        code = 0
        raw = None
        if command == "verify":
            report, code = cmd_verify(args)
        elif command == "catalog":
            report, raw = cmd_catalog(args)
        else:
            L = load_structure(args.structure, _parse_params(args.param))
            L.require_valid()
            handler = {"check": cmd_check, "contact": cmd_contact, "sheaves": cmd_sheaves,
                       "cohomology": cmd_cohomology, "deform": cmd_deform}[command]
            report = handler(args, L)
    except _INPUT_ERRORS as exc:
        out.write(format_report(_error_report(command, exc, "input"), output))
        return 1
    except InvariantViolation as exc:
        out.write(format_report(_error_report(command, exc, "internal"), output))
        return 2
    if raw is not None:
        out.write(raw)
    else:
        out.write(format_report(report, output))
    return code


def main(argv: Optional[List[str]] = None) -> int:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
