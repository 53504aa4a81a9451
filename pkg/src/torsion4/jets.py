"""Forward-mode first-derivative scalars (jets).

A Jet carries a float value and a dense gradient vector against a caller
declared list of independent variables.  All jets in one computation must be
seeded against the same variable list; mixing seed widths is a caller bug and
raises via numpy shape checks.
"""
from __future__ import annotations

import math

import numpy as np

__all__ = ["Jet", "seed_variables", "value", "sqrt", "sin", "cos", "atan2"]


class Jet:
    __slots__ = ("val", "grad")

    def __init__(self, val: float, grad: np.ndarray):
        self.val = float(val)
        self.grad = grad

    @staticmethod
    def constant(val: float, nvars: int) -> "Jet":
        return Jet(val, np.zeros(nvars))

    def __repr__(self) -> str:
        return f"Jet({self.val!r}, {self.grad!r})"

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.val + other.val, self.grad + other.grad)
        return Jet(self.val + other, self.grad)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet):
            return Jet(self.val - other.val, self.grad - other.grad)
        return Jet(self.val - other, self.grad)

    def __rsub__(self, other):
        return Jet(other - self.val, -self.grad)

    def __mul__(self, other):
        if isinstance(other, Jet):
            return Jet(self.val * other.val,
                       self.grad * other.val + self.val * other.grad)
        return Jet(self.val * other, self.grad * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            inv = 1.0 / other.val
            return Jet(self.val * inv,
                       (self.grad - self.val * inv * other.grad) * inv)
        return Jet(self.val / other, self.grad / other)

    def __rtruediv__(self, other):
        inv = 1.0 / self.val
        return Jet(other * inv, (-other * inv * inv) * self.grad)

    def __neg__(self):
        return Jet(-self.val, -self.grad)

    def __pos__(self):
        return self

    def __abs__(self):
        return self if self.val >= 0.0 else -self

    # comparisons act on values so branch decisions work transparently ------

    def __lt__(self, other):
        return self.val < value(other)

    def __le__(self, other):
        return self.val <= value(other)

    def __gt__(self, other):
        return self.val > value(other)

    def __ge__(self, other):
        return self.val >= value(other)

    # elementary functions ---------------------------------------------------

    def sqrt(self):
        r = math.sqrt(self.val)
        return Jet(r, self.grad / (2.0 * r))

    def sin(self):
        return Jet(math.sin(self.val), math.cos(self.val) * self.grad)

    def cos(self):
        return Jet(math.cos(self.val), -math.sin(self.val) * self.grad)


def seed_variables(values) -> list[Jet]:
    """Jets for an independent variable list, with identity gradient seeds."""
    values = [float(v) for v in values]
    n = len(values)
    out = []
    for i, v in enumerate(values):
        g = np.zeros(n)
        g[i] = 1.0
        out.append(Jet(v, g))
    return out


def value(x) -> float:
    return x.val if isinstance(x, Jet) else float(x)


def sqrt(x):
    return x.sqrt() if isinstance(x, Jet) else math.sqrt(x)


def sin(x):
    return x.sin() if isinstance(x, Jet) else math.sin(x)


def cos(x):
    return x.cos() if isinstance(x, Jet) else math.cos(x)


def atan2(y, x):
    """Two-argument arctangent with derivative (x dy - y dx)/(x^2 + y^2)."""
    yj, xj = isinstance(y, Jet), isinstance(x, Jet)
    if not yj and not xj:
        return math.atan2(y, x)
    yv = y.val if yj else float(y)
    xv = x.val if xj else float(x)
    a = math.atan2(yv, xv)
    r2 = xv * xv + yv * yv
    if yj and xj:
        g = (xv * y.grad - yv * x.grad) / r2
    elif yj:
        g = (xv / r2) * y.grad
    else:
        g = (-yv / r2) * x.grad
    return Jet(a, g)
