"""Three-valued per-bit abstract domain for sound switching bounds.

Each bit of a w-bit value is known-0, known-1, or unknown. A value is encoded
as two masks: `ones` has a bit set where the bit is known 1, `unknowns` where
it is unknown; the same bit may never be set in both, and no bit outside the
width may be set in either. A fully known value denotes exactly one integer,
so the concretization is never empty.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

ZERO = "0"
ONE = "1"
UNKNOWN = "?"


@dataclass(frozen=True)
class KnownBits:
    ones: int
    unknowns: int
    width: int

    def __post_init__(self):
        mask = (1 << self.width) - 1
        if self.ones & self.unknowns:
            raise ValueError("a bit cannot be both known-1 and unknown")
        if (self.ones | self.unknowns) & ~mask:
            raise ValueError(f"bits set outside width {self.width}")

    # -- constructors -------------------------------------------------------

    @staticmethod
    def from_constant(value: int, width: int) -> "KnownBits":
        return KnownBits(value & ((1 << width) - 1), 0, width)

    @staticmethod
    def top(width: int) -> "KnownBits":
        """All bits unknown."""
        return KnownBits(0, (1 << width) - 1, width)

    @staticmethod
    def binary01(width: int) -> "KnownBits":
        """Concretization {0, 1}: low bit unknown, the rest known zero."""
        return KnownBits(0, 1, width)

    @staticmethod
    def from_str(s: str, width: int | None = None) -> "KnownBits":
        """Build from a bit string of 0/1/?, most significant first, e.g. '?10'."""
        if width is None:
            width = len(s)
        ones = unknowns = 0
        for c in s:
            ones <<= 1
            unknowns <<= 1
            if c == ONE:
                ones |= 1
            elif c == UNKNOWN:
                unknowns |= 1
            elif c != ZERO:
                raise ValueError(f"bad bit character {c!r}")
        return KnownBits(ones, unknowns, width)

    # -- views ---------------------------------------------------------------

    @property
    def mask(self) -> int:
        return (1 << self.width) - 1

    @property
    def knowns(self) -> int:
        return self.mask & ~self.unknowns

    @property
    def zeros(self) -> int:
        return self.knowns & ~self.ones

    def bit_state(self, i: int) -> str:
        if self.unknowns >> i & 1:
            return UNKNOWN
        return ONE if self.ones >> i & 1 else ZERO

    def bit_states(self) -> list[str]:
        """Per-bit states, index 0 = least significant bit."""
        return [self.bit_state(i) for i in range(self.width)]

    def is_constant(self) -> bool:
        return self.unknowns == 0

    def contains(self, value: int) -> bool:
        """True when `value` is one of the concrete values this abstracts."""
        if not 0 <= value <= self.mask:
            return False
        return value & self.knowns == self.ones

    def __str__(self):
        return "".join(self.bit_state(i) for i in reversed(range(self.width)))

    # -- lattice -------------------------------------------------------------

    def join(self, other: "KnownBits") -> "KnownBits":
        """Smallest abstract value covering both operands' concretizations."""
        _check_widths(self, other)
        ones = self.ones & other.ones
        zeros = self.zeros & other.zeros
        return KnownBits(ones, self.mask & ~(ones | zeros), self.width)

    # -- transfer functions ---------------------------------------------------

    def b_not(self) -> "KnownBits":
        return KnownBits(self.zeros, self.unknowns, self.width)

    def b_and(self, other: "KnownBits") -> "KnownBits":
        _check_widths(self, other)
        ones = self.ones & other.ones
        zeros = self.zeros | other.zeros
        return KnownBits(ones, self.mask & ~(ones | zeros), self.width)

    def b_or(self, other: "KnownBits") -> "KnownBits":
        _check_widths(self, other)
        ones = self.ones | other.ones
        zeros = self.zeros & other.zeros
        return KnownBits(ones, self.mask & ~(ones | zeros), self.width)

    def b_xor(self, other: "KnownBits") -> "KnownBits":
        _check_widths(self, other)
        both_known = self.knowns & other.knowns
        ones = (self.ones ^ other.ones) & both_known
        return KnownBits(ones, self.mask & ~both_known, self.width)

    def add(self, other: "KnownBits") -> "KnownBits":
        _check_widths(self, other)
        return _ripple(self, other, carry=ZERO)

    def sub(self, other: "KnownBits") -> "KnownBits":
        # a - b == a + ~b + 1 modulo 2**w
        _check_widths(self, other)
        return _ripple(self, other.b_not(), carry=ONE)

    def shl(self, amount: "KnownBits") -> "KnownBits":
        """Shift left by a fully known amount (mod width), else all-unknown."""
        _check_widths(self, amount)
        if not amount.is_constant():
            return KnownBits.top(self.width)
        s = amount.ones % self.width
        return KnownBits((self.ones << s) & self.mask, (self.unknowns << s) & self.mask, self.width)

    def shr(self, amount: "KnownBits") -> "KnownBits":
        _check_widths(self, amount)
        if not amount.is_constant():
            return KnownBits.top(self.width)
        s = amount.ones % self.width
        return KnownBits(self.ones >> s, self.unknowns >> s, self.width)

    def eqz(self) -> "KnownBits":
        if self.ones:
            return KnownBits.from_constant(0, self.width)
        if self.is_constant():
            return KnownBits.from_constant(1, self.width)
        return KnownBits(0, 1, self.width)


def ite(cond: KnownBits, then: KnownBits, orelse: KnownBits) -> KnownBits:
    """then if cond is certainly nonzero, orelse if certainly zero, else the join."""
    _check_widths(cond, then, orelse)
    if cond.ones:
        return then
    if cond.is_constant():
        return orelse
    return then.join(orelse)


def _check_widths(*values: KnownBits):
    w = values[0].width
    for v in values[1:]:
        if v.width != w:
            raise ValueError(f"width mismatch: {v.width} vs {w}")


def _ripple(a: KnownBits, b: KnownBits, carry: str) -> KnownBits:
    """Three-valued ripple-carry sum. The carry out of a column is known when
    at least two of its three inputs agree and are known, so known low-order
    bits survive past positions whose operand bits are both known."""
    ones = unknowns = 0
    for i in range(a.width):
        col = (a.bit_state(i), b.bit_state(i), carry)
        kn_ones = col.count(ONE)
        kn_zeros = col.count(ZERO)
        if UNKNOWN in col:
            unknowns |= 1 << i
        elif kn_ones & 1:
            ones |= 1 << i
        carry = ONE if kn_ones >= 2 else ZERO if kn_zeros >= 2 else UNKNOWN
    return KnownBits(ones, unknowns, a.width)


def knownbits_transfer(mnemonic: str, inputs: Sequence[KnownBits]) -> KnownBits:
    """Abstract counterpart of apply_mnemonic: sound for every concretization
    of the inputs. `load` and `store` behave as mov here; the abstract executor
    resolves memory state before calling."""
    from .core import ARITY  # local import keeps this module dependency-free

    if mnemonic not in ARITY:
        raise ValueError(f"unknown mnemonic {mnemonic!r}")
    if len(inputs) != ARITY[mnemonic]:
        raise ValueError(f"{mnemonic} takes {ARITY[mnemonic]} input(s), got {len(inputs)}")

    a = inputs[0]
    if mnemonic in ("mov", "store", "load"):
        return a
    if mnemonic == "not":
        return a.b_not()
    if mnemonic == "eqz":
        return a.eqz()
    if mnemonic == "and":
        return a.b_and(inputs[1])
    if mnemonic == "or":
        return a.b_or(inputs[1])
    if mnemonic == "xor":
        return a.b_xor(inputs[1])
    if mnemonic == "add":
        return a.add(inputs[1])
    if mnemonic == "sub":
        return a.sub(inputs[1])
    if mnemonic == "shl":
        return a.shl(inputs[1])
    if mnemonic == "shr":
        return a.shr(inputs[1])
    return ite(a, inputs[1], inputs[2])
