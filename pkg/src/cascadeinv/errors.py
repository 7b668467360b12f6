"""Exception types raised by the solvers and the optimizer."""


class CascadeError(Exception):
    """Base class for all errors raised by this package."""


class InputError(CascadeError, ValueError):
    """An argument has the wrong shape, grid, or value range."""


class CoefficientError(CascadeError, ValueError):
    """The diffusion coefficient is not strictly positive."""


class DegenerateInputError(CascadeError, ValueError):
    """A closed-form expression would divide by zero."""


class ZeroDirectionError(CascadeError, ArithmeticError):
    """A search direction or previous gradient vanished identically."""
