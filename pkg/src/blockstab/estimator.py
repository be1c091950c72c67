"""Scikit-learn style facades.

`StabilityCertifier` wraps :func:`blockstab.certify` as an estimator whose
``fit`` input is the system matrix itself, so certification slots into
pipelines and parameter searches (``get_params``/``set_params``/``clone``
all behave).  `ComparisonTransform` exposes the comparison-matrix map as a
transformer.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .certificates import certify
from .comparison import block_comparison, scalar_comparison
from .linalg import DEFAULT_HINF_TOL
from .partition import make_partitioned


def _as_partitioned(X, partition):
    X = check_array(X, ensure_2d=True)
    n = X.shape[0]
    if X.shape[1] != n:
        raise ValueError(f"expected a square matrix, got shape {X.shape}")
    sizes = [n] if partition is None else list(partition)
    return make_partitioned(X, sizes)


class StabilityCertifier(BaseEstimator):
    """Certify a block-partitioned matrix as stable via fit().

    Parameters
    ----------
    partition : sequence of int or None
        Diagonal block sizes.  None treats the matrix as one block.
    strategy : str
        "auto", "a", "b", "c" or "prop4".
    epsilon : float or None
        Shift used by the decoupled Riccati routes; None picks a
        coupling-scaled default per block.
    hinf_tol : float
        Relative tolerance for the H-infinity computations.
    margin : float
        Required strict margin on the final Lyapunov inequality.
    run_all : bool
        Attempt every route even after one succeeds.

    Attributes
    ----------
    report_ : TestReport
        Per-route outcomes from the last fit.
    certificate_ : Certificate or None
    certified_ : bool
    """

    def __init__(
        self,
        partition=None,
        strategy="auto",
        epsilon=None,
        hinf_tol=DEFAULT_HINF_TOL,
        margin=0.0,
        run_all=False,
    ):
        self.partition = partition
        self.strategy = strategy
        self.epsilon = epsilon
        self.hinf_tol = hinf_tol
        self.margin = margin
        self.run_all = run_all

    def fit(self, X, y=None):
        p = _as_partitioned(X, self.partition)
        self.report_ = certify(
            p,
            self.strategy,
            epsilon=self.epsilon,
            hinf_tol=self.hinf_tol,
            margin=self.margin,
            run_all=self.run_all,
        )
        self.certificate_ = self.report_.certificate
        self.certified_ = self.report_.certified
        self.n_features_in_ = p.partition.total
        return self

    def predict(self, X=None):
        """Return the certification verdict from the last fit.

        X is accepted for pipeline compatibility and ignored; the verdict
        concerns the fitted system, not new data.
        """
        check_is_fitted(self, "report_")
        return self.certified_

    def score(self, X=None, y=None):
        """Certified Lyapunov margin (0.0 when not certified)."""
        check_is_fitted(self, "report_")
        if self.certificate_ is None:
            return 0.0
        return float(self.certificate_.lyapunov_margin)

    def solution(self):
        """Assembled block-diagonal Lyapunov solution, or None."""
        check_is_fitted(self, "report_")
        if self.certificate_ is None:
            return None
        return self.certificate_.assemble()


class ComparisonTransform(TransformerMixin, BaseEstimator):
    """Map square matrices to their comparison matrices.

    With ``partition=None`` the entrywise (scalar) comparison matrix is
    produced, otherwise the block comparison matrix for the given block
    sizes.  The map is stateless apart from its hyperparameters; ``fit``
    validates the input and keeps the fitted comparison around as
    ``comparison_`` for inspection.
    """

    def __init__(self, partition=None, hinf_tol=DEFAULT_HINF_TOL):
        self.partition = partition
        self.hinf_tol = hinf_tol

    def _compare(self, X):
        p = _as_partitioned(X, self.partition)
        if self.partition is None:
            return scalar_comparison(p.matrix)
        return block_comparison(p, tol=self.hinf_tol)

    def fit(self, X, y=None):
        self.comparison_ = self._compare(X)
        self.n_features_in_ = int(np.asarray(X).shape[0])
        return self

    def transform(self, X):
        check_is_fitted(self, "comparison_")
        return np.array(self._compare(X).matrix)
