"""Truncated power series with exact rational coefficients."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence


class TruncatedSeries:
    """Power series in ``t`` known through order ``order - 1``.

    Coefficients are ``Fraction`` objects; arithmetic truncates to the
    smaller order of the operands.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable, order: int | None = None):
        c = [Fraction(x) for x in coeffs]
        if order is not None:
            c = (c + [Fraction(0)] * order)[:order]
        self.coeffs: list[Fraction] = c

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k]

    def __repr__(self) -> str:
        head = ", ".join(str(c) for c in self.coeffs[:4])
        return f"TruncatedSeries([{head}, ...], order={self.order})"

    @classmethod
    def polynomial(cls, coeffs: Sequence, order: int) -> "TruncatedSeries":
        return cls(coeffs, order)

    @classmethod
    def log1p(cls, order: int) -> "TruncatedSeries":
        """``log(1 + t) = t - t^2/2 + t^3/3 - ...``."""
        return cls([0] + [Fraction((-1) ** (n + 1), n) for n in range(1, order)], order)

    @classmethod
    def binomial(cls, a: Fraction | int, exponent: int, order: int) -> "TruncatedSeries":
        """``(1 + a t)^exponent`` for any integer exponent."""
        a = Fraction(a)
        out, c = [], Fraction(1)
        for n in range(order):
            out.append(c)
            c = c * (exponent - n) / (n + 1) * a
        return cls(out)

    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            return other
        return TruncatedSeries([other], self.order)

    def __add__(self, other):
        other = self._coerce(other)
        n = min(self.order, other.order)
        return TruncatedSeries([self.coeffs[k] + other.coeffs[k] for k in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            f = Fraction(other)
            return TruncatedSeries([c * f for c in self.coeffs])
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        nz = [j for j in range(n) if b[j]]
        out = [Fraction(0)] * n
        for i in range(n):
            ai = a[i]
            if not ai:
                continue
            for j in nz:
                if i + j >= n:
                    break
                out[i + j] += ai * b[j]
        return TruncatedSeries(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers need the reciprocal")
        result = TruncatedSeries([1], self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def reciprocal(self) -> "TruncatedSeries":
        a = self.coeffs
        if not a or a[0] == 0:
            raise ZeroDivisionError("series has no constant term")
        inv = [1 / a[0]]
        for n in range(1, self.order):
            s = sum((a[k] * inv[n - k] for k in range(1, n + 1)), Fraction(0))
            inv.append(-s / a[0])
        return TruncatedSeries(inv)

    def __truediv__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self * (1 / Fraction(other))
        return self * other.reciprocal()

    def divide_by_power(self, k: int) -> tuple["TruncatedSeries", list[Fraction]]:
        """Divide by ``t^k``; returns the quotient and the dropped low coefficients."""
        return TruncatedSeries(self.coeffs[k:]), self.coeffs[:k]

    def __call__(self, t):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc
