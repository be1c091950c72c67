"""Exception types shared across the package.

Input problems (wrong shapes, non-finite entries, structural preconditions)
raise :class:`ValueError` or one of its subclasses below; failures of the
numerical machinery itself (non-converged iterations, ill-conditioned
subspace extraction, residuals out of tolerance) raise
:class:`NumericalError`.  Inconclusive analysis outcomes are *results*
(``None`` returns), never exceptions.
"""


class UnstableMatrixError(ValueError):
    """A matrix required to be Hurwitz has a right-half-plane eigenvalue."""


class NumericalError(RuntimeError):
    """A numerical kernel failed to produce a trustworthy result."""
