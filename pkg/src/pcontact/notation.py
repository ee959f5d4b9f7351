"""Text rendering and parsing of invariant forms.

Output uses coframe notation such as ``2 φ₁∧φ̄₂ - φ₃``.  Input accepts both
that notation and the ASCII grammar ``c*phi1^phi2b + ...``; vector forms
append a frame vector, ``phi1b*xi2`` or ``φ̄₁⊗ξ₂``.
"""

from __future__ import annotations

import re

from .scalars import ONE, GaussianRational, MalformedScalarError, format_scalar, parse_scalar

_SUB = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")
_UNSUB = str.maketrans("₀₁₂₃₄₅₆₇₈₉", "0123456789")
_BAR = "̄"


class FormSyntaxError(ValueError):
    """Unparsable form text; the message names the offending term."""


def _gen_label(g: int, n: int) -> str:
    if g < n:
        return "φ" + str(g + 1).translate(_SUB)
    return "φ" + _BAR + str(g - n + 1).translate(_SUB)


def format_mono(m: tuple, n: int) -> str:
    return "∧".join(_gen_label(g, n) for g in m)


def _coef_prefix(c: GaussianRational, has_factors: bool):
    """Return (negative, text) for a coefficient in a sum."""
    if c.im == 0:
        neg = c.re < 0
        mag = -c if neg else c
        txt = format_scalar(mag)
        if has_factors and mag == ONE:
            txt = ""
        return neg, txt
    if c.re == 0:
        neg = c.im < 0
        mag = -c if neg else c
        txt = "i" if mag.im == 1 else format_scalar(mag)
        return neg, txt
    return False, "(" + format_scalar(c) + ")"


def _format_terms(items) -> str:
    """items: iterable of (coefficient, body text)."""
    parts = []
    for c, body in items:
        neg, ctxt = _coef_prefix(c, bool(body))
        term = (ctxt + " " + body).strip() if ctxt and body else (ctxt or body)
        if not parts:
            parts.append(("-" if neg else "") + term)
        else:
            parts.append((" - " if neg else " + ") + term)
    return "".join(parts) if parts else "0"


def format_form(u) -> str:
    return _format_terms((c, format_mono(m, u.n)) for m, c in sorted(u.terms.items()))


def format_vform(theta) -> str:
    items = []
    for k, f in theta.components.items():
        xi = "ξ" + str(k + 1).translate(_SUB)
        for m, c in sorted(f.terms.items()):
            body = format_mono(m, theta.n)
            items.append((c, (body + "⊗" + xi) if body else xi))
    return _format_terms(items)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _normalize(text: str) -> str:
    s = text.translate(_UNSUB)
    s = s.replace("−", "-").replace("∧", "^").replace("⊗", "*")
    s = re.sub(r"φ" + _BAR + r"(\d+)", r"phi\1b", s)
    s = re.sub(r"φ(\d+)", r"phi\1", s)
    s = re.sub(r"ξ(\d+)", r"xi\1", s)
    return s


def _split_terms(s: str) -> list:
    """Split at top-level + and - (outside parentheses); keeps signs."""
    terms = []
    depth = 0
    cur = ""
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0:
            prev = cur.rstrip()
            # a sign directly after '*' or '/' or at the start belongs to the term
            if prev and prev[-1] not in "*/^":
                terms.append(cur)
                cur = ""
        cur += ch
    terms.append(cur)
    return [t.strip() for t in terms if t.strip()]


_FACTOR_RE = re.compile(r"^phi(\d+)(b?)$")
_XI_RE = re.compile(r"^xi(\d+)$")


def _parse_term(term: str, n: int):
    """Return (coefficient, [generator indices in written order], xi index or None)."""
    # a coefficient may be separated from the first factor by '*' or by blanks
    t = re.sub(r"(?<=[0-9i)])\s+(?=phi\d|xi\d)", "*", term.strip())
    t = t.replace(" ", "")
    sign = ONE
    while t and t[0] in "+-":
        if t[0] == "-":
            sign = -sign
        t = t[1:]
    if not t:
        raise FormSyntaxError(f"empty term in {term!r}")
    # coefficient: everything before the first factor token
    m = re.search(r"(phi\d|xi\d)", t)
    if m:
        coef_txt, rest = t[:m.start()], t[m.start():]
    else:
        coef_txt, rest = t, ""
    if rest and coef_txt:
        if not coef_txt.endswith("*"):
            raise FormSyntaxError(f"missing '*' after the coefficient in term {term!r}")
        coef_txt = coef_txt[:-1]
    if coef_txt.startswith("(") and coef_txt.endswith(")"):
        coef_txt = coef_txt[1:-1]
    try:
        coef = parse_scalar(coef_txt) if coef_txt else ONE
    except MalformedScalarError as exc:
        raise FormSyntaxError(f"bad coefficient in term {term!r}: {exc}") from None
    xi = None
    gens = []
    if rest:
        # optional trailing "*xiK"
        pieces = rest.split("*")
        if len(pieces) > 2:
            raise FormSyntaxError(f"malformed term {term!r}")
        if len(pieces) == 2 or _XI_RE.match(pieces[-1]):
            xm = _XI_RE.match(pieces[-1])
            if not xm:
                raise FormSyntaxError(f"malformed frame vector in term {term!r}")
            xi = int(xm.group(1))
            if not 1 <= xi <= n:
                raise FormSyntaxError(f"frame index out of range in term {term!r}")
            rest = pieces[0] if len(pieces) == 2 else ""
        for fac in (rest.split("^") if rest else []):
            fm = _FACTOR_RE.match(fac)
            if not fm:
                raise FormSyntaxError(f"unknown factor {fac!r} in term {term!r}")
            k = int(fm.group(1))
            if not 1 <= k <= n:
                raise FormSyntaxError(f"index {k} out of range in term {term!r}")
            gens.append(k - 1 + (n if fm.group(2) else 0))
    return sign * coef, gens, xi


def _sorted_with_sign(gens: list):
    if len(set(gens)) != len(gens):
        return 0, None
    sign = 1
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            if gens[i] > gens[j]:
                sign = -sign
    return sign, tuple(sorted(gens))


def parse_form(text: str, n: int):
    """Parse a scalar-valued form such as ``"phi1^phi2 - 2*phi3b"``."""
    from .invariant import InvariantForm
    s = _normalize(text)
    if s.strip() == "0":
        return InvariantForm.zero(n)
    acc = {}
    for term in _split_terms(s):
        c, gens, xi = _parse_term(term, n)
        if xi is not None:
            raise FormSyntaxError(f"unexpected frame vector in term {term!r}")
        sign, m = _sorted_with_sign(gens)
        if m is None:
            continue
        acc[m] = acc.get(m, 0) + (c if sign > 0 else -c)
    return InvariantForm(n, acc)


def parse_vform(text: str, n: int):
    """Parse a vector-valued form such as ``"phi1b*xi1 + phi2b*xi2"``."""
    from .invariant import InvariantForm, InvariantVectorForm
    s = _normalize(text)
    if s.strip() == "0":
        return InvariantVectorForm.zero(n)
    comps = {}
    for term in _split_terms(s):
        c, gens, xi = _parse_term(term, n)
        if xi is None:
            raise FormSyntaxError(f"term {term!r} lacks a frame vector xiK")
        sign, m = _sorted_with_sign(gens)
        if m is None:
            continue
        f = InvariantForm(n, {m: c if sign > 0 else -c})
        comps[xi - 1] = comps[xi - 1] + f if xi - 1 in comps else f
    return InvariantVectorForm(n, comps)
