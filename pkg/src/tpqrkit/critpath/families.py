"""Built-in polynomial families, transcribed exactly (0.25 -> 1/4 etc.)."""
from __future__ import annotations

import sympy
from sympy import I, Rational

from .poly import SYMS, MultiPoly, PolyError

x, y, z, t = SYMS
_q = Rational(1, 4)
_h = Rational(1, 2)


def _tilde_m():
    return -2 * ((x + _q) ** 2 - 2 - _h * (y + _q)) * ((y + _q) ** 2 - 2 - _h * (x + _q))


def _check_m():
    return _tilde_m() - 2 * x * y


def _hz():
    # 8i * integral of z(z+1)
    return 8 * I * (z ** 3 / 3 + z ** 2 / 2)


def q3(var=z):
    return 9 * var ** 2 + 4 * I * var ** 2 + Rational(8, 3) * I * var ** 3


def q3_tilde(var=z):
    return 4 * I * var ** 2 + Rational(8, 3) * I * var ** 3


def _M(tv=t):
    return _check_m() + 2 * (3 * z + tv * x * y) ** 2 + 2 * _hz()


def _L(tv=t):
    g = _M(1)
    d = g - x ** 3 - y ** 3 - 12 * x * y * z - 2 * _hz()
    return g - tv * d


def _parse(expr, name: str):
    if isinstance(expr, str):
        try:
            expr = sympy.sympify(expr, locals={"x": x, "y": y, "z": z, "t": t, "I": I})
        except (sympy.SympifyError, SyntaxError) as e:
            raise PolyError(f"cannot parse {name}: {e}") from None
    return sympy.nsimplify(expr, rational=True)


def _germ(p: int, q: int, r: int, a, lam=None, form: str = "trinomial"):
    if min(p, q, r) < 2:
        raise PolyError("p, q, r must be at least 2")
    a = sympy.nsimplify(a, rational=True)
    s = Rational(1, p) + Rational(1, q) + Rational(1, r)
    if form == "trinomial":
        key = tuple(sorted((p, q, r), reverse=True))
        if key == (3, 3, 3):
            bad = sympy.expand(a ** 3 + 27) == 0
            cond = "a^3 + 27 != 0"
        elif key == (4, 4, 2):
            bad = sympy.expand(a ** 2 - 9) == 0
            cond = "a^2 - 9 != 0"
        elif key == (6, 3, 2):
            bad = sympy.expand(a ** 6 - 432) == 0
            cond = "a^6 - 432 != 0"
        elif s < 1:
            bad = a == 0
            cond = "a != 0"
        else:
            raise PolyError(f"T_{p},{q},{r} is not parabolic or hyperbolic")
        if bad:
            raise PolyError(f"parameter constraint violated: {cond}")
        return x ** p + y ** q + z ** r + a * x * y * z
    if form == "quartic":
        if sorted((p, q, r)) != [2, 4, 4]:
            raise PolyError("quartic form is only for T_4,4,2")
        if sympy.expand(a ** 2 - 4) == 0:
            raise PolyError("parameter constraint violated: a^2 != 4")
        return x ** 4 + y ** 4 + z ** 2 + a * x ** 2 * y ** 2
    if form == "split":
        if r != 2 or s >= 1:
            raise PolyError("split form is only for hyperbolic T_p,q,2")
        lam = sympy.nsimplify(1 if lam is None else lam, rational=True)
        if lam == 0:
            # lambda = 0 makes the whole y-axis critical
            raise PolyError("parameter constraint violated: lambda != 0")
        return (x ** (p - 2) - y ** 2) * (x ** 2 - lam * y ** (q - 2)) + z ** 2
    raise PolyError(f"unknown germ form {form!r}")


NAMES = ("tilde_m", "check_m", "M", "L", "M_r", "N_pqr", "tpqr_germ")


def builtin_family(name: str, **params) -> MultiPoly:
    """Exact sparse polynomial of a named family.

    M, L:      optional t (left symbolic when omitted).
    M_r:       Q_r (expression in z), optional t and l.
    N_pqr:     h_pq (in x, y), Q_r (in z), optional t, l, mu; h_33 is check_m / 2.
    tpqr_germ: p, q, r, a; form='quartic' (T_4,4,2) or form='split' with lam.
    """
    tv = params.get("t", t)
    if name == "tilde_m":
        e = _tilde_m()
    elif name == "check_m":
        e = _check_m()
    elif name == "M":
        e = _M(sympy.nsimplify(tv, rational=True))
    elif name == "L":
        e = _L(sympy.nsimplify(tv, rational=True))
    elif name in ("M_r", "N_pqr"):
        if "Q_r" not in params:
            raise PolyError(f"{name} needs a user-supplied Q_r(z)")
        qr = _parse(params["Q_r"], "Q_r")
        if qr.free_symbols - {z}:
            raise PolyError("Q_r must be a polynomial in z")
        if qr.subs(z, 0) != 0:
            raise PolyError("Q_r must have no constant term")
        tv = sympy.nsimplify(tv, rational=True)
        l = sympy.nsimplify(params.get("l", 0), rational=True)
        h33 = _h * _check_m()
        if name == "M_r":
            e = h33 + (3 * z + tv * x * y) ** 2 + q3_tilde() + (1 - l) * qr
        else:
            if "h_pq" not in params:
                raise PolyError("N_pqr needs a user-supplied h_pq(x, y)")
            hpq = _parse(params["h_pq"], "h_pq")
            if hpq.free_symbols - {x, y}:
                raise PolyError("h_pq must be a polynomial in x, y")
            mu = sympy.nsimplify(params.get("mu", 0), rational=True)
            e = (1 - mu) * hpq + mu * h33 + (3 * z + tv * x * y) ** 2 + (1 - l) * qr
    elif name == "tpqr_germ":
        try:
            p, q, r = int(params["p"]), int(params["q"]), int(params["r"])
        except KeyError as k:
            raise PolyError(f"tpqr_germ needs {k}") from None
        e = _germ(p, q, r, params.get("a", 1), params.get("lam"), params.get("form", "trinomial"))
    else:
        raise PolyError(f"unknown family {name!r}; expected one of {', '.join(NAMES)}")
    return MultiPoly.from_expr(e)
