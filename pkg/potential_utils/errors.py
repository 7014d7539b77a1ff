"""Exception types shared by the numerical modules."""

from __future__ import annotations


class PotentialError(Exception):
    """Base class for every error raised by ``potential_utils``."""


class ArgumentError(PotentialError, ValueError):
    """Invalid interval, parameter or profile data."""


class RangeError(PotentialError, ValueError):
    """Index requested outside the range where a sequence is defined."""


class PreconditionError(PotentialError, ValueError):
    """A hypothesis of a theorem-level operation does not hold.

    ``hypothesis`` is a short machine-readable name such as ``"infinite_mass"``
    or ``"doubling"``; it is echoed into reports when a scenario is skipped.
    """

    def __init__(self, hypothesis: str, message: str) -> None:
        super().__init__(f"{hypothesis}: {message}")
        self.hypothesis = hypothesis


class DivergenceError(PotentialError, ArithmeticError):
    """An integral diverges at the origin or at infinity.

    ``partial`` is the finite part that was computed on the quadrature grid,
    ``where`` names the divergent regime and ``exponent`` is the fitted growth
    exponent of the integrand there (``None`` when known analytically).
    """

    def __init__(
        self,
        where: str,
        partial: float = float("nan"),
        exponent: float | None = None,
        message: str | None = None,
    ) -> None:
        text = message or f"integral diverges at {where}"
        if exponent is not None:
            text += f" (fitted exponent {exponent:.4g})"
        super().__init__(text)
        self.where = where
        self.partial = partial
        self.exponent = exponent
