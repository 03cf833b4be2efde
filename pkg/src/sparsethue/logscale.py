"""Signed reals stored as a natural-log magnitude enclosure.

Quantities such as ``n^(800 log^2 n)`` do not fit any floating format, so they
are held as ``sign * exp([lo, hi])``. All arithmetic goes through mpmath's
interval context, which rounds endpoints outward, so an enclosure only ever
widens. Comparisons are three-valued: ``True``, ``False`` or ``None`` when the
enclosures overlap at the current working precision.
"""

from __future__ import annotations

import contextvars
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, TypeVar, Union

import gmpy2
from mpmath import iv, mp, mpf
from mpmath.libmp import to_float

PRECISION_LADDER = (256, 1024, 4096)

_PREC = contextvars.ContextVar("sparsethue_prec", default=PRECISION_LADDER[0])

T = TypeVar("T")


class Inconclusive(ArithmeticError):
    """A certified decision could not be made at the current precision."""


class PrecisionError(ArithmeticError):
    """A decision stayed inconclusive at every rung of the precision ladder."""


def current_precision() -> int:
    return _PREC.get()


@contextmanager
def working_precision(bits: int):
    token = _PREC.set(int(bits))
    try:
        yield
    finally:
        _PREC.reset(token)


@contextmanager
def interval_context(bits: int | None = None):
    """Set mpmath's interval and scalar precision for a block (both are global)."""
    bits = bits or _PREC.get()
    old_iv, old_mp = iv.prec, mp.prec
    iv.prec = bits
    mp.prec = bits
    try:
        yield
    finally:
        iv.prec = old_iv
        mp.prec = old_mp


def ladder(fn: Callable[[], T], precisions: Iterable[int] = PRECISION_LADDER) -> T:
    """Run ``fn`` at increasing precision until it returns a decided value.

    ``fn`` signals an undecided outcome by returning None or raising
    :class:`Inconclusive`.
    """
    last: str = "undecided"
    for bits in precisions:
        with working_precision(bits):
            try:
                out = fn()
            except Inconclusive as exc:
                last = str(exc) or "undecided"
                continue
        if out is not None:
            return out
    raise PrecisionError(f"inconclusive at every precision in the ladder: {last}")


def ends(v) -> tuple[mpf, mpf]:
    """Endpoints of an mpmath interval as plain mpf values (no rounding)."""
    return mp.make_mpf(v._mpi_[0]), mp.make_mpf(v._mpi_[1])


Number = Union[int, Fraction, float, mpf, "LogScaleReal"]


def to_fraction(x) -> Fraction:
    """Exact rational value of a finite mpf (``man_exp`` alone drops the sign)."""
    sign, man, exp, _ = (x if isinstance(x, mpf) else mpf(x))._mpf_
    if man == 0 and exp != 0:
        raise ValueError("not a finite number")
    v = Fraction(int(man) * 2**exp) if exp >= 0 else Fraction(int(man), 2**-exp)
    return -v if sign else v


def int_log(n: int):
    """Interval enclosure of ``ln|n|`` for a nonzero integer of any size."""
    n = abs(int(n))
    if n == 0:
        raise ValueError("log of zero")
    bits = _PREC.get() + 32
    k = max(0, gmpy2.mpz(n).bit_length() - bits)
    top = n >> k
    with interval_context():
        if k == 0:
            return iv.log(iv.mpf(top))
        # n lies in [top, top + 1] * 2^k
        return iv.log(iv.mpf([top, top + 1])) + k * iv.log(2)


def rational_log(q: Union[int, Fraction]):
    q = Fraction(q)
    if q.denominator == 1:
        return int_log(q.numerator)
    with interval_context():
        return int_log(q.numerator) - int_log(q.denominator)


@dataclass(frozen=True)
class LogScaleReal:
    sign: int
    lo: mpf
    hi: mpf

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or 1")
        if self.sign != 0 and self.lo > self.hi:
            raise ValueError("empty log enclosure")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> LogScaleReal:
        return cls(0, mpf("-inf"), mpf("-inf"))

    @classmethod
    def from_log(cls, log_enclosure, sign: int = 1) -> LogScaleReal:
        """Build ``sign * exp(log_enclosure)`` from an mpmath interval or a number."""
        with interval_context():
            v = iv.mpf(log_enclosure) if not isinstance(log_enclosure, type(iv.mpf(0))) else log_enclosure
            lo, hi = ends(v)
        return cls(sign, lo, hi)

    @classmethod
    def from_int(cls, n: int) -> LogScaleReal:
        n = int(n)
        if n == 0:
            return cls.zero()
        return cls.from_log(int_log(n), 1 if n > 0 else -1)

    @classmethod
    def from_rational(cls, q: Union[int, Fraction]) -> LogScaleReal:
        q = Fraction(q)
        if q == 0:
            return cls.zero()
        return cls.from_log(rational_log(abs(q)), 1 if q > 0 else -1)

    @classmethod
    def from_interval(cls, v) -> LogScaleReal:
        """Convert an mpmath real interval that does not contain zero."""
        with interval_context():
            v = iv.mpf(v)
            a, b = ends(v)
            if a > 0:
                return cls.from_log(iv.log(v), 1)
            if b < 0:
                return cls.from_log(iv.log(-v), -1)
            if a == 0 and b == 0:
                return cls.zero()
        raise Inconclusive("interval straddles zero")

    @classmethod
    def coerce(cls, x: Number) -> LogScaleReal:
        if isinstance(x, LogScaleReal):
            return x
        if isinstance(x, (int, Fraction)):
            return cls.from_rational(x)
        if isinstance(x, (float, mpf)):
            if x == 0:
                return cls.zero()
            return cls.from_interval(iv.mpf(x))
        raise TypeError(f"cannot coerce {type(x).__name__}")

    # -- views ---------------------------------------------------------------

    @property
    def log(self):
        """Interval enclosure of ``ln|x|``."""
        if self.sign == 0:
            raise ValueError("log of zero")
        with interval_context():
            return iv.mpf([self.lo, self.hi])

    @property
    def width(self) -> mpf:
        return self.hi - self.lo if self.sign else mpf(0)

    def to_interval(self):
        """Plain interval enclosure (only sensible when the magnitude fits an mpf exponent)."""
        if self.sign == 0:
            return iv.mpf(0)
        with interval_context():
            v = iv.exp(self.log)
            return v if self.sign > 0 else -v

    def approx(self) -> mpf:
        """Midpoint estimate of the value, for display only."""
        if self.sign == 0:
            return mpf(0)
        return self.sign * mp.exp((self.lo + self.hi) / 2)

    def log_midpoint(self) -> float:
        return float((self.lo + self.hi) / 2)

    def to_json(self) -> dict:
        if self.sign == 0:
            return {"sign": 0, "log_lo": None, "log_hi": None}
        return {
            "sign": self.sign,
            "log_lo": to_float(self.lo._mpf_, rnd="f"),
            "log_hi": to_float(self.hi._mpf_, rnd="c"),
        }

    def __repr__(self) -> str:
        if self.sign == 0:
            return "LogScaleReal(0)"
        return f"LogScaleReal({'+' if self.sign > 0 else '-'}exp[{mp.nstr(self.lo, 12)}, {mp.nstr(self.hi, 12)}])"

    # -- arithmetic ----------------------------------------------------------

    def __neg__(self) -> LogScaleReal:
        return LogScaleReal(-self.sign, self.lo, self.hi)

    def __abs__(self) -> LogScaleReal:
        return LogScaleReal(abs(self.sign), self.lo, self.hi)

    def __mul__(self, other: Number) -> LogScaleReal:
        other = LogScaleReal.coerce(other)
        if self.sign == 0 or other.sign == 0:
            return LogScaleReal.zero()
        with interval_context():
            return LogScaleReal.from_log(self.log + other.log, self.sign * other.sign)

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> LogScaleReal:
        other = LogScaleReal.coerce(other)
        if other.sign == 0:
            raise ZeroDivisionError("division by zero")
        if self.sign == 0:
            return LogScaleReal.zero()
        with interval_context():
            return LogScaleReal.from_log(self.log - other.log, self.sign * other.sign)

    def __rtruediv__(self, other: Number) -> LogScaleReal:
        return LogScaleReal.coerce(other) / self

    def __pow__(self, e) -> LogScaleReal:
        """Real power of a positive value; ``e`` may be a number, Fraction or interval."""
        if self.sign < 0:
            raise ValueError("real power of a negative value")
        if isinstance(e, Fraction):
            with interval_context():
                e = iv.mpf(e.numerator) / e.denominator
        if self.sign == 0:
            with interval_context():
                if ends(iv.mpf(e))[0] > 0:
                    return LogScaleReal.zero()
            raise ValueError("nonpositive power of zero")
        with interval_context():
            return LogScaleReal.from_log(self.log * e, 1)

    def root(self, k: Union[int, Fraction]) -> LogScaleReal:
        return self ** (1 / Fraction(k))

    def _add_same_sign(self, other: LogScaleReal) -> LogScaleReal:
        with interval_context():
            a, b = self.log, other.log
            if ends(a)[1] < ends(b)[1]:
                a, b = b, a
            return LogScaleReal.from_log(a + iv.log(1 + iv.exp(b - a)), self.sign)

    def __add__(self, other: Number) -> LogScaleReal:
        other = LogScaleReal.coerce(other)
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        if self.sign == other.sign:
            return self._add_same_sign(other)
        big, small = self, other
        if abs_cmp(self, other) is None:
            raise Inconclusive("sign of a difference is undecided")
        if abs_cmp(self, other) < 0:
            big, small = other, self
        with interval_context():
            d = small.log - big.log
            if ends(d)[1] >= 0:
                raise Inconclusive("sign of a difference is undecided")
            return LogScaleReal.from_log(big.log + iv.log(1 - iv.exp(d)), big.sign)

    __radd__ = __add__

    def __sub__(self, other: Number) -> LogScaleReal:
        return self + (-LogScaleReal.coerce(other))

    def __rsub__(self, other: Number) -> LogScaleReal:
        return LogScaleReal.coerce(other) - self

    # -- three-valued comparisons -------------------------------------------

    def lt(self, other: Number) -> bool | None:
        c = compare(self, other)
        return None if c is None else c < 0

    def le(self, other: Number) -> bool | None:
        c = compare(self, other, allow_equal=True)
        return None if c is None else c <= 0

    def gt(self, other: Number) -> bool | None:
        c = compare(self, other)
        return None if c is None else c > 0

    def ge(self, other: Number) -> bool | None:
        c = compare(self, other, allow_equal=True)
        return None if c is None else c >= 0

    def certainly_lt(self, other: Number) -> bool:
        return self.lt(other) is True

    def certainly_le(self, other: Number) -> bool:
        return self.le(other) is True


def abs_cmp(x: LogScaleReal, y: LogScaleReal) -> int | None:
    """Compare ``|x|`` and ``|y|``; None when the enclosures overlap."""
    if x.sign == 0 and y.sign == 0:
        return 0
    if x.sign == 0:
        return -1
    if y.sign == 0:
        return 1
    if x.hi < y.lo:
        return -1
    if x.lo > y.hi:
        return 1
    return None


def compare(x: Number, y: Number, allow_equal: bool = False) -> int | None:
    """Certified sign of ``x - y`` (as -1, 0, 1), or None if undecided.

    Zero is only ever reported for two exact zeros; ``allow_equal`` lets a
    non-strict comparison succeed when the enclosures are identical points.
    """
    x = LogScaleReal.coerce(x)
    y = LogScaleReal.coerce(y)
    if x.sign != y.sign:
        return -1 if x.sign < y.sign else 1
    if x.sign == 0:
        return 0
    c = abs_cmp(x, y)
    if c is None:
        if allow_equal and x.lo == x.hi == y.lo == y.hi:
            return 0
        return None
    return c * x.sign


def lmax(*xs: LogScaleReal) -> LogScaleReal:
    """Enclosure of the maximum of several nonnegative values."""
    nz = [x for x in xs if x.sign]
    if not nz:
        return LogScaleReal.zero()
    if any(x.sign < 0 for x in nz):
        raise ValueError("lmax expects nonnegative values")
    return LogScaleReal(1, max(x.lo for x in nz), max(x.hi for x in nz))
