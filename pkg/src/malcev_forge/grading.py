"""Finite grading domains B (trivial or Z/p) and their sign conventions."""

from __future__ import annotations

from dataclasses import dataclass


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class GradingGroup:
    """The grading domain B: ``modulus == 1`` is the trivial grading, otherwise Z/p.

    Degrees are plain ints in ``range(modulus)``.
    """

    modulus: int = 1

    def __post_init__(self):
        if self.modulus != 1 and not _is_prime(self.modulus):
            raise ValueError(f"grading modulus must be 1 or a prime, got {self.modulus}")

    @classmethod
    def trivial(cls) -> "GradingGroup":
        return cls(1)

    @classmethod
    def zp(cls, p: int = 2) -> "GradingGroup":
        return cls(p)

    @classmethod
    def parse(cls, text: str) -> "GradingGroup":
        text = text.strip()
        if text == "trivial":
            return cls(1)
        if text == "Z2":
            return cls(2)
        if text.startswith("Zp:"):
            return cls(int(text[3:]))
        raise ValueError(f"unknown grading {text!r}")

    @property
    def name(self) -> str:
        if self.modulus == 1:
            return "trivial"
        if self.modulus == 2:
            return "Z2"
        return f"Zp:{self.modulus}"

    @property
    def is_trivial(self) -> bool:
        return self.modulus == 1

    def elements(self) -> range:
        return range(self.modulus)

    def check(self, b: int) -> int:
        if not isinstance(b, int) or not 0 <= b < self.modulus:
            raise ValueError(f"degree {b!r} is not in grading group {self.name}")
        return b

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.modulus

    def neg(self, a: int) -> int:
        return (-a) % self.modulus

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.modulus

    def order(self, b: int) -> int:
        """Additive order of ``b``; note ``order(0) == 1``."""
        b %= self.modulus
        return 1 if b == 0 else self.modulus

    def epsilon(self, b: int) -> int:
        """(-1) raised to the additive order of ``b``."""
        return -1 if self.order(b) % 2 else 1

    def sign_commute(self, a: int, b: int) -> int:
        """The sign s in ``xy = s * yx`` for homogeneous x, y of degrees a, b."""
        return self.epsilon(self.mul(a, b))

    def super_sign(self, *pairs) -> int:
        """``(-1)**sum(a*b)`` over (a, b) pairs, degrees read as integers 0..p-1."""
        return -1 if sum(a * b for a, b in pairs) % 2 else 1


def sign_commute(grading: GradingGroup, b1: int, b2: int) -> int:
    return grading.sign_commute(grading.check(b1), grading.check(b2))
