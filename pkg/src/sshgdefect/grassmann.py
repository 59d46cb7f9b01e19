"""Dense complex Grassmann algebra on a small, named set of generators.

Elements store all ``2**N`` coefficients, indexed by the bitmask of the
generator subset.  Leading array axes are allowed, so a whole lattice of
field values is a single :class:`GrassmannElement` whose ``coeffs`` has shape
``(n_sites, 2**N)``; every operation broadcasts over those axes.
"""

from __future__ import annotations

import functools
import math
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

MAX_GENERATORS = 12
DEFAULT_ATOL = 1e-12

EVEN = "even"
ODD = "odd"
INHOMOGENEOUS = "inhomogeneous"


class GrassmannError(ValueError):
    """Base class for algebra errors."""


class DimensionError(GrassmannError):
    pass


class GradingError(GrassmannError):
    pass


class SingularError(GrassmannError, ZeroDivisionError):
    pass


def _popcount(x: int) -> int:
    return bin(x).count("1")


def koszul_sign(s: int, t: int) -> int:
    """Sign of ``e_S e_T`` after reordering into ascending generator order.

    Counts, for every generator in T, the generators of S that sit above it.
    Zero when the subsets overlap.
    """
    if s & t:
        return 0
    swaps = 0
    tt = t
    while tt:
        low = tt & -tt
        swaps += _popcount(s & ~((low << 1) - 1))
        tt ^= low
    return -1 if swaps & 1 else 1


class GeneratorTable:
    """Ordered generator labels; label ``k`` occupies bit ``k``."""

    def __init__(self, names: Sequence[str]):
        names = list(names)
        if not 1 <= len(names) <= MAX_GENERATORS:
            raise DimensionError(f"need 1..{MAX_GENERATORS} generators, got {len(names)}")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate generator labels in {names}")
        self.names: tuple[str, ...] = tuple(names)
        self.index: dict[str, int] = {n: i for i, n in enumerate(names)}
        self.n = len(names)
        self.dim = 1 << self.n

    def __repr__(self) -> str:
        return f"GeneratorTable({list(self.names)!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, GeneratorTable) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def bit(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise KeyError(f"unknown generator {name!r}; registered: {self.names}") from None

    def mask(self, *names: str) -> int:
        m = 0
        for name in names:
            m |= 1 << self.bit(name)
        return m

    # -- element constructors ------------------------------------------------
    def zero(self, shape: tuple[int, ...] = ()) -> "GrassmannElement":
        return GrassmannElement(self, np.zeros(shape + (self.dim,), dtype=complex))

    def scalar(self, value) -> "GrassmannElement":
        value = np.asarray(value, dtype=complex)
        c = np.zeros(value.shape + (self.dim,), dtype=complex)
        c[..., 0] = value
        return GrassmannElement(self, c)

    def gen(self, name: str, coeff=1.0) -> "GrassmannElement":
        """The generator ``name`` times ``coeff`` (which may be an array)."""
        return self.monomial((name,), coeff)

    def monomial(self, names: Iterable[str], coeff=1.0) -> "GrassmannElement":
        """Product of the named generators, in the order given, times ``coeff``."""
        coeff = np.asarray(coeff, dtype=complex)
        out = self.scalar(coeff)
        for name in names:
            out = out * self.gen_unit(name)
        return out

    def gen_unit(self, name: str) -> "GrassmannElement":
        c = np.zeros(self.dim, dtype=complex)
        c[1 << self.bit(name)] = 1.0
        return GrassmannElement(self, c)

    def from_dict(self, coeffs: dict[int, complex]) -> "GrassmannElement":
        c = np.zeros(self.dim, dtype=complex)
        for mask, value in coeffs.items():
            if not 0 <= mask < self.dim:
                raise DimensionError(f"mask {mask:#x} out of range for {self.n} generators")
            c[mask] = value
        return GrassmannElement(self, c)


_DENSE_MAX = 6


@functools.lru_cache(maxsize=None)
def _tables(n: int):
    """Pair tables for products in an ``n``-generator algebra.

    Returns ``(left, right, scatter)`` where ``left``/``right`` list all
    disjoint mask pairs and ``scatter`` is a ``(pairs, 2**n)`` matrix
    carrying the Koszul sign into the union mask (dense for small algebras,
    sparse otherwise).
    """
    dim = 1 << n
    left, right, signs = [], [], []
    for s in range(dim):
        for t in range(dim):
            if s & t == 0:
                left.append(s)
                right.append(t)
                signs.append(koszul_sign(s, t))
    left = np.array(left, dtype=np.intp)
    right = np.array(right, dtype=np.intp)
    out = left | right
    scatter = sp.csr_matrix(
        (np.array(signs, dtype=float), (np.arange(len(left)), out)), shape=(len(left), dim)
    )
    if n <= _DENSE_MAX:
        return left, right, scatter.toarray()
    return left, right, scatter.T.tocsr()


@functools.lru_cache(maxsize=None)
def _grade(n: int) -> np.ndarray:
    return np.array([_popcount(m) for m in range(1 << n)], dtype=np.intp)


@functools.lru_cache(maxsize=None)
def _parity_index(n: int):
    g = _grade(n) % 2
    return np.flatnonzero(g == 1), np.flatnonzero(g == 0)


@functools.lru_cache(maxsize=None)
def _derivative_table(n: int, bit: int):
    src = np.array([m for m in range(1 << n) if m >> bit & 1], dtype=np.intp)
    dst = src ^ (1 << bit)
    sign = np.array([-1.0 if _popcount(m & ((1 << bit) - 1)) & 1 else 1.0 for m in src])
    return src, dst, sign


def _product(n: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    left, right, scatter = _tables(n)
    pairs = a[..., left] * b[..., right]
    if n <= _DENSE_MAX:
        return pairs @ scatter
    lead = pairs.shape[:-1]
    pairs = pairs.reshape(-1, len(left))
    return np.asarray(scatter @ pairs.T).T.reshape(lead + (1 << n,))


class GrassmannElement:
    """An element (or array of elements) of the algebra over ``table``."""

    __slots__ = ("table", "coeffs")
    __array_priority__ = 100

    def __init__(self, table: GeneratorTable, coeffs):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape[-1:] != (table.dim,):
            raise DimensionError(
                f"coefficient axis has length {coeffs.shape[-1:]} but algebra needs {table.dim}"
            )
        self.table = table
        self.coeffs = coeffs

    # -- introspection ----------------------------------------------------
    @property
    def generator_count(self) -> int:
        return self.table.n

    @property
    def shape(self) -> tuple[int, ...]:
        return self.coeffs.shape[:-1]

    def body(self):
        b = self.coeffs[..., 0]
        return complex(b) if b.ndim == 0 else b

    def soul(self) -> "GrassmannElement":
        c = self.coeffs.copy()
        c[..., 0] = 0.0
        return GrassmannElement(self.table, c)

    def parity(self, atol: float = 0.0) -> str:
        odd, even = _parity_index(self.table.n)
        live = self.coeffs != 0 if atol == 0 else np.abs(self.coeffs) > atol
        has_odd = bool(live[..., odd].any())
        has_even = bool(live[..., even].any())
        if has_odd and has_even:
            return INHOMOGENEOUS
        return ODD if has_odd else EVEN

    def is_even(self, atol: float = 0.0) -> bool:
        return self.parity(atol) == EVEN

    def is_odd(self, atol: float = 0.0) -> bool:
        return self.parity(atol) == ODD or not np.any(np.abs(self.coeffs) > atol)

    def even_part(self) -> "GrassmannElement":
        return self._grade_filter(0)

    def odd_part(self) -> "GrassmannElement":
        return self._grade_filter(1)

    def _grade_filter(self, p: int) -> "GrassmannElement":
        keep = (_grade(self.table.n) % 2) == p
        return GrassmannElement(self.table, np.where(keep, self.coeffs, 0.0))

    def coeff(self, *names: str):
        """Coefficient of the monomial with the named generators in ascending order."""
        c = self.coeffs[..., self.table.mask(*names)]
        return complex(c) if c.ndim == 0 else c

    def __getitem__(self, idx) -> "GrassmannElement":
        return GrassmannElement(self.table, self.coeffs[idx])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "GrassmannElement":
        if isinstance(other, GrassmannElement):
            if other.table.n != self.table.n:
                raise DimensionError(
                    f"generator counts differ: {self.table.n} vs {other.table.n}"
                )
            return other
        return self.table.scalar(other)

    def __add__(self, other):
        other = self._coerce(other)
        return GrassmannElement(self.table, self.coeffs + other.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return GrassmannElement(self.table, self.coeffs - other.coeffs)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return GrassmannElement(self.table, -self.coeffs)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, GrassmannElement):
            return multiply(self, other)
        return GrassmannElement(self.table, self.coeffs * np.asarray(other, dtype=complex)[..., None])

    def __rmul__(self, other):
        if isinstance(other, GrassmannElement):
            return multiply(other, self)
        return GrassmannElement(self.table, self.coeffs * np.asarray(other, dtype=complex)[..., None])

    def __truediv__(self, other):
        if isinstance(other, GrassmannElement):
            return self * inverse(other)
        return GrassmannElement(self.table, self.coeffs / np.asarray(other, dtype=complex)[..., None])

    def __rtruediv__(self, other):
        return self._coerce(other) * inverse(self)

    def __pow__(self, r):
        if isinstance(r, int) and r >= 0:
            out = self.table.scalar(np.ones(self.shape))
            for _ in range(r):
                out = out * self
            return out
        return power(self, r)

    def isclose(self, other, atol: float = DEFAULT_ATOL) -> bool:
        other = self._coerce(other)
        return bool(np.all(np.abs(self.coeffs - other.coeffs) <= atol))

    def __eq__(self, other):
        try:
            return self.isclose(other)
        except DimensionError:
            return False

    __hash__ = None

    def __repr__(self) -> str:
        if self.shape:
            return f"GrassmannElement(shape={self.shape}, generators={list(self.table.names)})"
        terms = []
        for mask in np.nonzero(np.abs(self.coeffs) > 0)[0]:
            label = "*".join(self.table.names[b] for b in range(self.table.n) if mask >> b & 1)
            terms.append(f"({self.coeffs[mask]:.6g})" + (f"*{label}" if label else ""))
        return " + ".join(terms) if terms else "0"

    def to_json(self) -> dict[str, list[float]]:
        if self.shape:
            raise ValueError("to_json expects a single element")
        return {
            f"{mask:x}": [float(self.coeffs[mask].real), float(self.coeffs[mask].imag)]
            for mask in range(self.table.dim)
            if self.coeffs[mask] != 0
        }

    @classmethod
    def from_json(cls, table: GeneratorTable, data: dict[str, list[float]]) -> "GrassmannElement":
        return table.from_dict({int(k, 16): complex(v[0], v[1]) for k, v in data.items()})


def multiply(a: GrassmannElement, b: GrassmannElement) -> GrassmannElement:
    if a.table.n != b.table.n:
        raise DimensionError(f"generator counts differ: {a.table.n} vs {b.table.n}")
    return GrassmannElement(a.table, _product(a.table.n, a.coeffs, b.coeffs))


# -- analytic functions of even elements ----------------------------------

def _derivs_exp(b, k):
    e = np.exp(b)
    return [e] * (k + 1)


def _derivs_sinh(b, k):
    s, c = np.sinh(b), np.cosh(b)
    return [s if j % 2 == 0 else c for j in range(k + 1)]


def _derivs_cosh(b, k):
    s, c = np.sinh(b), np.cosh(b)
    return [c if j % 2 == 0 else s for j in range(k + 1)]


def _derivs_log(b, k):
    out = [np.log(b)]
    for j in range(1, k + 1):
        out.append((-1) ** (j - 1) * math.factorial(j - 1) * b ** (-j))
    return out


def _derivs_power(r):
    def derivs(b, k):
        out = []
        coef = 1.0
        for j in range(k + 1):
            out.append(coef * b ** (r - j))
            coef *= r - j
        return out
    return derivs


_SINGULAR_AT_ZERO = {"sqrt", "inverse", "power", "log"}

# plain numbers are passed straight to numpy (same principal branches)
_NUMERIC = {
    "exp": lambda b, r: np.exp(b),
    "sinh": lambda b, r: np.sinh(b),
    "cosh": lambda b, r: np.cosh(b),
    "log": lambda b, r: np.log(b),
    "sqrt": lambda b, r: np.sqrt(b),
    "inverse": lambda b, r: 1 / b,
    "power": lambda b, r: b ** r,
}


def analytic_apply(fn: str, x: GrassmannElement, r: float | complex | None = None,
                   atol: float = 0.0) -> GrassmannElement:
    """Apply ``fn`` to an even element through its terminating Taylor series.

    ``fn`` is one of ``exp, sinh, cosh, sqrt, inverse, log, power`` (the
    last needs exponent ``r``).  Branches are principal.
    """
    if not isinstance(x, GrassmannElement):
        return _NUMERIC[fn](np.asarray(x, dtype=complex), r)
    odd = _parity_index(x.table.n)[0]
    live_odd = x.coeffs[..., odd]
    if (live_odd.any() if atol == 0 else (np.abs(live_odd) > atol).any()):
        raise GradingError(f"{fn} needs an even argument")
    if fn == "exp":
        derivs = _derivs_exp
    elif fn == "sinh":
        derivs = _derivs_sinh
    elif fn == "cosh":
        derivs = _derivs_cosh
    elif fn == "log":
        derivs = _derivs_log
    elif fn == "sqrt":
        derivs = _derivs_power(0.5)
    elif fn == "inverse":
        derivs = _derivs_power(-1)
    elif fn == "power":
        if r is None:
            raise ValueError("power needs an exponent")
        derivs = _derivs_power(r)
    else:
        raise ValueError(f"unknown function {fn!r}")
    b = x.coeffs[..., 0]
    if fn in _SINGULAR_AT_ZERO and np.any(b == 0):
        raise SingularError(f"{fn} of an element with zero body")
    soul = x.soul()
    kmax = x.table.n // 2
    # skip orders that vanish identically (soul**k == 0 when k exceeds half the live grade)
    d = derivs(b, kmax)
    out = x.table.scalar(d[0])
    term = None
    for k in range(1, kmax + 1):
        term = soul if term is None else term * soul
        if not np.any(term.coeffs):
            break
        out = out + term * (d[k] / math.factorial(k))
    return out


def exp(x): return analytic_apply("exp", x)
def sinh(x): return analytic_apply("sinh", x)
def cosh(x): return analytic_apply("cosh", x)
def sqrt(x): return analytic_apply("sqrt", x)
def log(x): return analytic_apply("log", x)
def inverse(x): return analytic_apply("inverse", x)
def power(x, r): return analytic_apply("power", x, r=r)


def left_derivative(x: GrassmannElement, name: str) -> GrassmannElement:
    """Left derivative with respect to generator ``name``."""
    bit = x.table.bit(name)
    src, dst, sign = _derivative_table(x.table.n, bit)
    c = np.zeros_like(x.coeffs)
    c[..., dst] = x.coeffs[..., src] * sign
    return GrassmannElement(x.table, c)


def parity(x: GrassmannElement, atol: float = 0.0) -> str:
    return x.parity(atol)


def body(x: GrassmannElement):
    return x.body()


def soul(x: GrassmannElement) -> GrassmannElement:
    return x.soul()


def embed(x: GrassmannElement, table: GeneratorTable) -> GrassmannElement:
    """Re-express ``x`` over a larger table whose first generators match ``x.table``."""
    if table.names[: x.table.n] != x.table.names:
        raise DimensionError("target table must extend the source table as a prefix")
    c = np.zeros(x.shape + (table.dim,), dtype=complex)
    c[..., : x.table.dim] = x.coeffs
    return GrassmannElement(table, c)


def restrict(x: GrassmannElement, table: GeneratorTable) -> GrassmannElement:
    """Keep the components of ``x`` that live in the prefix algebra ``table``."""
    if x.table.names[: table.n] != table.names:
        raise DimensionError("target table must be a prefix of the source table")
    return GrassmannElement(table, x.coeffs[..., : table.dim].copy())
