"""Exact numbers of the form ``q * pi**(k/2)`` with ``q`` rational.

Every closed-form heat coefficient of the model catalog is a rational
multiple of an integer half-power of pi, so this small type is enough to
keep the whole coefficient pipeline exact.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

__all__ = ["ExactValue", "as_fraction", "as_exact", "parse_exact", "four_pi_power"]


def as_fraction(x) -> Fraction:
    """Convert ints, Fractions, decimal strings and floats to a Fraction.

    Floats go through their shortest repr, so ``0.1`` becomes ``1/10``.
    """
    if isinstance(x, ExactValue):
        return x.as_fraction()
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


@dataclass(frozen=True)
class ExactValue:
    """``coeff * pi**(pi_half_exponent / 2)``.

    Zero is canonical (exponent 0). Sums require equal exponents unless one
    side is zero; mixing with floats raises ``TypeError`` on purpose.
    """

    coeff: Fraction
    pi_half_exponent: int = 0

    def __post_init__(self):
        c = as_fraction(self.coeff)
        object.__setattr__(self, "coeff", c)
        if c == 0:
            object.__setattr__(self, "pi_half_exponent", 0)
        elif not isinstance(self.pi_half_exponent, int):
            raise TypeError("pi_half_exponent must be an int")

    # constructors -------------------------------------------------------
    @classmethod
    def pi(cls, power: int = 1) -> "ExactValue":
        return cls(Fraction(1), 2 * power)

    @classmethod
    def sqrt_pi(cls) -> "ExactValue":
        return cls(Fraction(1), 1)

    @classmethod
    def coerce(cls, x) -> "ExactValue":
        if isinstance(x, ExactValue):
            return x
        return cls(as_fraction(x), 0)

    # predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return self.coeff == 0

    def sign(self) -> int:
        return (self.coeff > 0) - (self.coeff < 0)

    def as_fraction(self) -> Fraction:
        if self.pi_half_exponent != 0:
            raise ValueError(f"{self} is not rational")
        return self.coeff

    # arithmetic ---------------------------------------------------------
    @staticmethod
    def _other(x):
        if isinstance(x, ExactValue):
            return x
        if isinstance(x, (int, Fraction)):
            return ExactValue(Fraction(x), 0)
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        if o.pi_half_exponent != self.pi_half_exponent:
            raise ValueError(f"cannot add {self} and {o}: different powers of pi")
        return ExactValue(self.coeff + o.coeff, self.pi_half_exponent)

    __radd__ = __add__

    def __neg__(self):
        return ExactValue(-self.coeff, self.pi_half_exponent)

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return ExactValue(self.coeff * o.coeff, self.pi_half_exponent + o.pi_half_exponent)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by exact zero")
        return ExactValue(self.coeff / o.coeff, self.pi_half_exponent - o.pi_half_exponent)

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return ExactValue(1) / (self ** (-n))
        return ExactValue(self.coeff**n, self.pi_half_exponent * n)

    def __abs__(self):
        return ExactValue(abs(self.coeff), self.pi_half_exponent)

    # comparisons --------------------------------------------------------
    def __eq__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self.coeff == o.coeff and self.pi_half_exponent == o.pi_half_exponent

    def __hash__(self):
        return hash((self.coeff, self.pi_half_exponent))

    def _cmp(self, other) -> int:
        o = self._other(other)
        if o is None:
            raise TypeError(f"cannot compare ExactValue with {type(other).__name__}")
        return (self - o).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    # conversion ---------------------------------------------------------
    def __float__(self):
        return float(self.coeff) * math.pi ** (self.pi_half_exponent / 2)

    def to_json(self) -> dict:
        return {
            "num": self.coeff.numerator,
            "den": self.coeff.denominator,
            "pi_half_exponent": self.pi_half_exponent,
        }

    @classmethod
    def from_json(cls, d: dict) -> "ExactValue":
        return cls(Fraction(int(d["num"]), int(d["den"])), int(d.get("pi_half_exponent", 0)))

    def __str__(self):
        k = self.pi_half_exponent
        if self.is_zero():
            return "0"
        if k == 0:
            return str(self.coeff)
        if k % 2 == 0:
            base = "pi" if k == 2 else f"pi^{k // 2}"
        else:
            base = "sqrt(pi)" if k == 1 else f"pi^({k}/2)"
        if self.coeff == 1:
            return base
        if self.coeff == -1:
            return "-" + base
        return f"{self.coeff}*{base}"

    def __repr__(self):
        return f"ExactValue({self.coeff!s}, {self.pi_half_exponent})"


def four_pi_power(half_exponent: int) -> ExactValue:
    """``(4 pi)**(half_exponent / 2)``; always rational times a pi half-power."""
    two_power = Fraction(2) ** half_exponent
    return ExactValue(two_power, half_exponent)


_PI_RE = re.compile(r"^\s*([-+]?[0-9./]*)\s*\*?\s*(pi|π)?\s*(?:/\s*([0-9]+))?\s*$")


def parse_exact(text: str) -> ExactValue:
    """Parse ``"3"``, ``"1/2"``, ``"0.25"``, ``"pi"``, ``"2pi"``, ``"2*pi"``, ``"pi/2"``."""
    m = _PI_RE.match(text)
    if not m or (not m.group(1) and not m.group(2)):
        raise ValueError(f"cannot parse exact value {text!r}")
    coeff_text, pi, den = m.groups()
    if coeff_text in ("", "+", "-"):
        coeff = Fraction(-1 if coeff_text == "-" else 1)
    else:
        coeff = Fraction(coeff_text)
    if den:
        coeff /= int(den)
    return ExactValue(coeff, 2 if pi else 0)


def as_exact(x) -> ExactValue:
    if isinstance(x, str):
        return parse_exact(x)
    return ExactValue.coerce(x)
