"""Truncated Laurent arithmetic in the completions k_v and k_infinity.

A LocalNum is a window of the uniformizer expansion of an element: the
value is congruent to pi^nu * sum(coeffs[i] * pi^i) modulo pi^(nu + W),
where pi is theta + lambda at a degree-one finite place or 1/theta at the
infinite place.  Every operation computes the provable window of its
result; there are no optimistic digits.

The leading stored digit is nonzero (so nu is the exact valuation) unless
the window is empty, in which case the value is only known to be divisible
by pi^nu.  Exact zero is a separate state with infinite valuation.
"""

from __future__ import annotations

import math

from .algebra import FqContext, PolyA, RatK
from .errors import DivisionByZero, ParseError, PrecisionLoss

INF = math.inf

_PACK_BITS = 32
_PACK_MASK = (1 << _PACK_BITS) - 1


def _convolve(ctx, a, b):
    """Coefficient convolution of two F_q digit sequences."""
    if not a or not b:
        return []
    if ctx.e == 1:
        # Kronecker packing: carries cannot overflow 32-bit slots at desk scale
        pa = 0
        for i in range(len(a) - 1, -1, -1):
            pa = (pa << _PACK_BITS) | a[i]
        pb = 0
        for i in range(len(b) - 1, -1, -1):
            pb = (pb << _PACK_BITS) | b[i]
        prod = pa * pb
        p = ctx.p
        out = []
        for _ in range(len(a) + len(b) - 1):
            out.append((prod & _PACK_MASK) % p)
            prod >>= _PACK_BITS
        return out
    out = [0] * (len(a) + len(b) - 1)
    mul, add = ctx.mul, ctx.add
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] = add(out[i + j], mul(ai, bj))
    return out


class Place:
    """Shared interface of the two supported places."""

    symbol = "?"

    def ord_poly(self, f):
        raise NotImplementedError

    def ord_ratk(self, r):
        if r.is_zero():
            return INF
        return self.ord_poly(r.num) - self.ord_poly(r.den)

    def poly_digits(self, f):
        raise NotImplementedError


class PlaceV(Place):
    """Degree-one finite place with uniformizer theta + lambda."""

    symbol = "v"

    def __init__(self, ctx, lam=0):
        if not isinstance(ctx, FqContext):
            raise TypeError("FqContext expected")
        if not 0 <= lam < ctx.q:
            raise ValueError("lambda must be an element code of F_q")
        self.ctx = ctx
        self.lam = lam
        self.q = ctx.q

    @classmethod
    def from_uniformizer(cls, pi):
        """Build from a monic irreducible pi in A; refuses degree > 1."""
        if pi.degree != 1 or not pi.is_monic():
            raise ValueError("only places of degree one are supported")
        return cls(pi.ctx, pi.coeffs[0])

    def uniformizer(self):
        return PolyA(self.ctx, (self.lam, 1))

    def theta_root(self):
        """The residue of theta at this place: -lambda."""
        return self.ctx.neg(self.lam)

    def ord_poly(self, f):
        if f.is_zero():
            return INF
        root = self.theta_root()
        n = 0
        while f.eval_fq(root) == 0:
            # synthetic division by (T + lambda)
            f = _deflate(f, root)
            n += 1
        return n

    def poly_digits(self, f):
        """Exact digits of f in powers of the uniformizer (theta = pi - lambda)."""
        ctx = self.ctx
        # Horner: f(theta) = f(pi - lambda); repeatedly divide by (T + lambda)
        digits = []
        g = f
        root = self.theta_root()
        for _ in range(len(f.coeffs)):
            digits.append(g.eval_fq(root))
            g = _deflate_sub(g, root)
            if g.is_zero():
                break
        return digits

    def __eq__(self, other):
        return (isinstance(other, PlaceV) and self.ctx == other.ctx
                and self.lam == other.lam)

    def __hash__(self):
        return hash(("v", self.ctx, self.lam))

    def __repr__(self):
        return f"PlaceV(q={self.ctx.q}, lam={self.lam})"


class PlaceInf(Place):
    """The infinite place, uniformizer 1/theta."""

    symbol = "w"

    def __init__(self, ctx):
        self.ctx = ctx
        self.lam = None
        self.q = ctx.q

    def ord_poly(self, f):
        if f.is_zero():
            return INF
        return -f.degree

    def poly_digits(self, f):
        # f = theta^d * (c_d + c_{d-1} w + ... + c_0 w^d)
        return list(reversed(f.coeffs))

    def __eq__(self, other):
        return isinstance(other, PlaceInf) and self.ctx == other.ctx

    def __hash__(self):
        return hash(("inf", self.ctx))

    def __repr__(self):
        return f"PlaceInf(q={self.ctx.q})"


def _deflate(f, root):
    """f / (T - root), assuming exact divisibility."""
    coeffs = f.coeffs
    out = [0] * (len(coeffs) - 1)
    ctx = f.ctx
    carry = 0
    for i in range(len(coeffs) - 1, 0, -1):
        carry = ctx.add(coeffs[i], ctx.mul(root, carry))
        out[i - 1] = carry
    return PolyA(ctx, out)


def _deflate_sub(f, root):
    """Quotient of f by (T - root) ignoring the remainder."""
    if f.degree < 1:
        return PolyA.zero(f.ctx)
    return _deflate(f - PolyA.constant(f.ctx, f.eval_fq(root)), root)


class LocalNum:
    """Window of a uniformizer expansion; see module docstring."""

    __slots__ = ("place", "nu", "coeffs")

    def __init__(self, place, nu, coeffs):
        self.place = place
        # normalize: strip leading zero digits into the valuation
        coeffs = list(coeffs)
        i = 0
        while i < len(coeffs) and coeffs[i] == 0:
            i += 1
        if i:
            nu += i
            coeffs = coeffs[i:]
        self.nu = nu
        self.coeffs = tuple(coeffs)

    # -- constructors --------------------------------------------------

    @classmethod
    def exact_zero(cls, place):
        return cls(place, INF, ())

    @classmethod
    def zero_to_precision(cls, place, cutoff):
        return cls(place, cutoff, ())

    @classmethod
    def unit_one(cls, place, window):
        return cls(place, 0, (1,) + (0,) * (window - 1))

    # -- state ---------------------------------------------------------

    @property
    def window(self):
        return len(self.coeffs)

    @property
    def cutoff(self):
        """The value is known modulo pi^cutoff."""
        return self.nu + len(self.coeffs)

    def is_exact_zero(self):
        return self.nu is INF

    def is_zero_to_precision(self):
        return not self.coeffs

    def valuation(self):
        """Exact valuation, or None when only a lower bound is known."""
        if self.coeffs:
            return self.nu
        return None

    def valuation_lower_bound(self):
        return self.nu

    def truncate(self, cutoff):
        if self.is_exact_zero():
            return self
        if cutoff <= self.nu:
            return LocalNum.zero_to_precision(self.place, cutoff)
        keep = min(len(self.coeffs), cutoff - self.nu)
        return LocalNum(self.place, self.nu, self.coeffs[:keep])

    def digit(self, n):
        """Digit of pi^n, which must lie inside the known window."""
        if self.is_exact_zero():
            return 0
        if n >= self.cutoff:
            raise PrecisionLoss(f"digit pi^{n} beyond window")
        if n < self.nu:
            return 0
        return self.coeffs[n - self.nu]

    # -- arithmetic ----------------------------------------------------

    def _check_place(self, other):
        if self.place != other.place:
            raise ValueError("operands live at different places")

    def __add__(self, other):
        self._check_place(other)
        if self.is_exact_zero():
            return other
        if other.is_exact_zero():
            return self
        cutoff = min(self.cutoff, other.cutoff)
        base = min(self.nu, other.nu)
        if cutoff <= base:
            return LocalNum.zero_to_precision(self.place, cutoff)
        n = int(cutoff - base)
        ctx = self.place.ctx
        out = [0] * n
        for i, c in enumerate(self.coeffs):
            pos = int(self.nu - base) + i
            if pos < n:
                out[pos] = c
        add = ctx.add
        for i, c in enumerate(other.coeffs):
            pos = int(other.nu - base) + i
            if pos < n:
                out[pos] = add(out[pos], c)
        return LocalNum(self.place, base, out)

    def __neg__(self):
        if self.is_exact_zero() or not self.coeffs:
            return self
        neg = self.place.ctx.neg
        return LocalNum(self.place, self.nu, [neg(c) for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check_place(other)
        if self.is_exact_zero() or other.is_exact_zero():
            return LocalNum.exact_zero(self.place)
        cutoff = min(self.nu + other.cutoff, other.nu + self.cutoff)
        if not self.coeffs or not other.coeffs:
            return LocalNum.zero_to_precision(self.place, cutoff)
        ctx = self.place.ctx
        digits = _convolve(ctx, self.coeffs, other.coeffs)
        out = LocalNum(self.place, self.nu + other.nu, digits)
        return out.truncate(cutoff)

    def scale_fq(self, c):
        """Multiply by a nonzero constant of F_q (window preserved)."""
        if c == 0:
            raise ValueError("scale by zero loses the valuation; use mul")
        if self.is_exact_zero() or not self.coeffs:
            return self
        mul = self.place.ctx.mul
        return LocalNum(self.place, self.nu, [mul(c, x) for x in self.coeffs])

    def shift(self, n):
        """Multiply by pi^n (exact)."""
        if self.is_exact_zero():
            return self
        return LocalNum(self.place, self.nu + n, self.coeffs)

    def inv(self):
        if self.is_exact_zero() or not self.coeffs:
            raise DivisionByZero("inverse of (possible) zero")
        ctx = self.place.ctx
        W = len(self.coeffs)
        a = self.coeffs
        inv0 = ctx.inv(a[0])
        out = [0] * W
        out[0] = inv0
        # schoolbook series inversion of the unit part
        mul, add = ctx.mul, ctx.add
        for n in range(1, W):
            s = 0
            for i in range(1, n + 1):
                if i < len(a) and a[i]:
                    s = add(s, mul(a[i], out[n - i]))
            out[n] = ctx.neg(mul(inv0, s))
        return LocalNum(self.place, -self.nu, out)

    def __truediv__(self, other):
        return self * other.inv()

    def pow(self, n):
        if n < 0:
            return self.inv().pow(-n)
        if n == 0:
            if self.is_exact_zero():
                raise ValueError("0^0")
            return LocalNum(self.place, 0, (1,) + (0,) * (self.window - 1))
        out = None
        base = self
        while n:
            if n & 1:
                out = base if out is None else out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def qpow(self, n=1):
        """Raise to the q^n power by exact multiplication."""
        q = self.place.ctx.q
        out = self
        for _ in range(n):
            out = out.pow(q)
        return out

    # -- comparisons ---------------------------------------------------

    def congruent(self, other, cutoff=None):
        """True iff self - other is zero to the (common) window."""
        d = self - other
        if cutoff is not None:
            d = d.truncate(cutoff)
        return d.is_exact_zero() or not d.coeffs

    def __eq__(self, other):
        return (isinstance(other, LocalNum) and self.place == other.place
                and self.nu == other.nu and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.place, self.nu, self.coeffs))

    # -- printing ------------------------------------------------------

    def __str__(self):
        if self.is_exact_zero():
            return "0"
        sym = self.place.symbol
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            k = self.nu + i
            cs = PolyA.constant(self.place.ctx, c)._coeff_str(c)
            if k == 0:
                parts.append(cs)
            else:
                var = f"{sym}^{k}"
                parts.append(var if cs == "1" else f"{cs}*{var}")
        parts.append(f"O({sym}^{self.cutoff})")
        return " + ".join(parts)

    def __repr__(self):
        return f"LocalNum({self})"


def parse_local(place, text):
    """Parse the canonical LocalNum print form."""
    text = text.strip()
    if text == "0":
        return LocalNum.exact_zero(place)
    sym = place.symbol
    ctx = place.ctx
    cutoff = None
    digits = {}
    for part in text.split("+"):
        part = part.strip()
        if not part:
            continue
        if part.startswith("O("):
            if not part.endswith(")"):
                raise ParseError(f"bad tail {part!r}")
            inner = part[2:-1]
            if not inner.startswith(f"{sym}^"):
                raise ParseError(f"bad tail {part!r}")
            cutoff = int(inner[len(sym) + 1:])
            continue
        if sym in part:
            head, _, tail = part.partition(sym)
            head = head.rstrip("*")
            if not tail.startswith("^"):
                raise ParseError(f"bad term {part!r}")
            k = int(tail[1:])
        else:
            head, k = part, 0
        if head == "":
            c = 1
        elif head.startswith("["):
            from .algebra import _parse_fq_coeff
            c = _parse_fq_coeff(ctx, head)
        else:
            c = int(head) % ctx.p
        digits[k] = c
    if cutoff is None:
        raise ParseError("missing O(...) tail")
    if not digits:
        return LocalNum.zero_to_precision(place, cutoff)
    nu = min(digits)
    out = [0] * (cutoff - nu)
    for k, c in digits.items():
        out[k - nu] = c
    return LocalNum(place, nu, out)


def embed_poly(f, place, window):
    """Embed a polynomial with the stated window (exact valuation)."""
    if f.is_zero():
        return LocalNum.exact_zero(place)
    digits = place.poly_digits(f)
    if isinstance(place, PlaceInf):
        nu = -f.degree
    else:
        nu = 0
    x = LocalNum(place, nu, digits)
    # a polynomial is exact; pad the window with exact zero digits
    need = x.nu + window - x.cutoff
    if need > 0:
        x = LocalNum(place, x.nu, x.coeffs + (0,) * int(need))
    return x.truncate(x.nu + window)


def embed_local(r, place, window):
    """Embed r in k into its completion at the place, with W good digits."""
    if isinstance(r, PolyA):
        r = RatK(r)
    if r.is_zero():
        return LocalNum.exact_zero(place)
    num = embed_poly(r.num, place, window)
    if r.den.is_one():
        return num
    den = embed_poly(r.den, place, window)
    return num * den.inv()


def local_arith(x, y, op):
    """Dispatch form: op in {add, mul, inv, qpow}."""
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "inv":
        return x.inv()
    if op == "qpow":
        return x.qpow()
    raise ValueError(f"unknown op {op!r}")


def valuation_of(x):
    """Exact valuation, or the pair ('>=', bound) for a window-zero value."""
    v = x.valuation()
    if v is not None:
        return v
    return (">=", x.nu)
