"""Exception types raised by the library."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class NoTwoCycle(ArithmeticError):
    """f(f(r)) = r has no root besides fixed points of f."""


class AmbiguousCycles(ArithmeticError):
    """More than one 2-cycle was found; all of them are in ``cycles``."""

    def __init__(self, cycles):
        self.cycles = list(cycles)
        super().__init__(f"{len(self.cycles)} distinct 2-cycles found")


class WindowNotFound(ArithmeticError):
    pass


class NoFixedPoint(ArithmeticError):
    pass


class OrbitEscaped(ArithmeticError):
    """An iterate left the domain of the base map family."""

    def __init__(self, index, r):
        self.index = index
        self.r = r
        super().__init__(f"iterate {index} left the domain (r = {r!r})")


class RationalRotation(ArithmeticError):
    """The circle rotation is periodic at working resolution, so the orbit
    cannot form an epsilon-net.  ``detail`` holds the measured evidence."""

    def __init__(self, message, detail=None):
        self.detail = dict(detail or {})
        super().__init__(message)
