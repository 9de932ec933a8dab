"""Sparse complex polynomials with exact Gaussian-rational coefficients."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy

VARS = ("x", "y", "z", "t")
SYMS = sympy.symbols(VARS)


class PolyError(ValueError):
    pass


def _to_fraction(v) -> Fraction:
    v = sympy.nsimplify(v, rational=True)
    return Fraction(int(v.p), int(v.q))


@dataclass(frozen=True)
class MultiPoly:
    """terms: exponent 4-tuple over (x, y, z, t) -> (re, im) as Fractions."""

    terms: tuple[tuple[tuple[int, int, int, int], tuple[Fraction, Fraction]], ...]

    @classmethod
    def from_dict(cls, d: dict) -> "MultiPoly":
        items = []
        for e, (re, im) in d.items():
            re, im = Fraction(re), Fraction(im)
            if re or im:
                e = tuple(int(k) for k in e)
                if len(e) != 4 or min(e) < 0:
                    raise PolyError(f"bad exponent {e}")
                items.append((e, (re, im)))
        return cls(tuple(sorted(items)))

    @classmethod
    def from_expr(cls, expr) -> "MultiPoly":
        """Expand a sympy expression in x, y, z, t with rational complex coefficients."""
        expr = sympy.expand(sympy.nsimplify(expr, rational=True))
        free = expr.free_symbols - set(SYMS)
        if free:
            raise PolyError(f"unexpected symbols {sorted(map(str, free))}")
        poly = sympy.Poly(expr, *SYMS)
        d = {}
        for mon, c in poly.terms():
            re, im = c.as_real_imag()
            d[mon] = (_to_fraction(re), _to_fraction(im))
        return cls.from_dict(d)

    def to_expr(self):
        out = 0
        for e, (re, im) in self.terms:
            c = sympy.Rational(re.numerator, re.denominator) \
                + sympy.I * sympy.Rational(im.numerator, im.denominator)
            out += c * sympy.Mul(*(s ** k for s, k in zip(SYMS, e)))
        return out

    @property
    def variables(self) -> tuple[str, ...]:
        used = set()
        for e, _ in self.terms:
            used |= {VARS[i] for i, k in enumerate(e) if k}
        return tuple(v for v in VARS if v in used)

    def degree(self, var: str | None = None) -> int:
        if not self.terms:
            return 0
        if var is None:
            return max(sum(e) for e, _ in self.terms)
        i = VARS.index(var)
        return max(e[i] for e, _ in self.terms)

    def coefficient(self, exps: tuple[int, int, int, int]) -> complex:
        for e, (re, im) in self.terms:
            if e == tuple(exps):
                return complex(float(re), float(im))
        return 0j

    def at_t(self, t) -> "MultiPoly":
        """Specialise the parameter; t may be a float, Fraction or int."""
        t = Fraction(t) if not isinstance(t, Fraction) else t
        d: dict = {}
        for (a, b, c, k), (re, im) in self.terms:
            key = (a, b, c, 0)
            f = t ** k
            r0, i0 = d.get(key, (Fraction(0), Fraction(0)))
            d[key] = (r0 + re * f, i0 + im * f)
        return MultiPoly.from_dict(d)

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        d = {e: c for e, c in self.terms}
        for e, (re, im) in other.terms:
            r0, i0 = d.get(e, (Fraction(0), Fraction(0)))
            d[e] = (r0 - re, i0 - im)
        return MultiPoly.from_dict(d)

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(exponents[T, 4] int64, coefficients[T] complex128)."""
        if not self.terms:
            return np.zeros((0, 4), dtype=np.int64), np.zeros(0, dtype=np.complex128)
        e = np.array([t[0] for t in self.terms], dtype=np.int64)
        c = np.array([complex(float(re), float(im)) for _, (re, im) in self.terms])
        return e, c

    def evaluate(self, x, y, z, t=0.0) -> complex:
        pt = (x, y, z, t)
        return complex(sum(complex(float(re), float(im)) * np.prod([pt[i] ** k for i, k in enumerate(e)])
                           for e, (re, im) in self.terms))

    def bezout_bound(self, nvars: int = 3) -> int:
        """Product of the degrees of the partial derivatives in x, y, z."""
        out = 1
        expr = self.to_expr()
        for s in SYMS[:nvars]:
            if self.degree(str(s)) == 0:
                continue
            dp = sympy.Poly(sympy.diff(expr, s), *SYMS[:3])
            out *= max(dp.total_degree(), 1)
        return out

    def to_dict(self) -> dict:
        return {"terms": [{"exp": list(e), "re": str(re), "im": str(im)} for e, (re, im) in self.terms]}

    @classmethod
    def from_json_dict(cls, d: dict) -> "MultiPoly":
        try:
            return cls.from_dict({tuple(t["exp"]): (Fraction(t["re"]), Fraction(t.get("im", 0)))
                                  for t in d["terms"]})
        except (KeyError, ValueError, TypeError) as e:
            raise PolyError(f"malformed polynomial: {e}") from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict())
