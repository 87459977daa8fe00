"""Exceptions shared across the package."""


class NumericalIntegrityError(RuntimeError):
    """An internal numerical consistency check failed.

    Raised when a quantity that must be real within tolerance carries a large
    imaginary residue, or when a recursion produces non-finite values.  Either
    condition indicates a defective table or an unstable computation rather
    than bad user input.
    """
