"""scikit-learn style transformers over batches of sampled paths.

Each row of ``X`` is one path sampled at increasing (not necessarily given)
times; truncated variation ignores the time labels, so rows only need a
common ordering.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .engine import _run
from .paths import check_threshold

__all__ = ["TruncatedVariation", "LazyTubeSmoother", "check_paths"]

_OUTPUTS = ("totals", "utv_curve", "dtv_curve", "tv_curve")


def check_paths(X, *, estimator=None):
    """2-d float array of finite paths, one per row."""
    return check_array(X, dtype=np.float64, ensure_2d=True, estimator=estimator)


class TruncatedVariation(TransformerMixin, BaseEstimator):
    """Truncated variation features of each path.

    Parameters
    ----------
    c : float, default=1.0
        Truncation threshold, must be positive.
    output : {"totals", "utv_curve", "dtv_curve", "tv_curve"}, default="totals"
        ``"totals"`` gives columns ``(utv, dtv, tv)`` over the whole path;
        the curve options give the cumulative functional at every sample.

    Attributes
    ----------
    n_features_in_ : int
        Number of samples per path seen during :meth:`fit`.
    """

    def __init__(self, c=1.0, output="totals"):
        self.c = c
        self.output = output

    def _check_params(self):
        check_threshold(self.c)
        if self.output not in _OUTPUTS:
            raise ValueError(f"output must be one of {_OUTPUTS}, got {self.output!r}")

    def fit(self, X, y=None):
        self._check_params()
        X = check_paths(X, estimator=self)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        self._check_params()
        X = check_paths(X, estimator=self)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} samples per path, expected {self.n_features_in_}"
            )
        c = float(self.c)
        if self.output == "totals":
            out = np.empty((X.shape[0], 3))
        else:
            out = np.empty_like(X)
        for i, row in enumerate(X):
            _, utv, dtv, *_ = _run(row, c)
            if self.output == "totals":
                out[i] = utv[-1], dtv[-1], utv[-1] + dtv[-1]
            elif self.output == "utv_curve":
                out[i] = utv
            elif self.output == "dtv_curve":
                out[i] = dtv
            else:
                out[i] = utv + dtv
        return out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "n_features_in_")
        if self.output == "totals":
            return np.array(["utv", "dtv", "tv"], dtype=object)
        prefix = self.output.split("_")[0]
        return np.array([f"{prefix}{i}" for i in range(self.n_features_in_)], dtype=object)


class LazyTubeSmoother(TransformerMixin, BaseEstimator):
    """Replace each path by its minimal-variation approximant.

    With ``anchored=False`` the output stays within ``c / 2`` of the path
    uniformly; with ``anchored=True`` it starts at the path's first value
    and stays within ``c``. Either way its total variation equals TV^c of
    the input.
    """

    def __init__(self, c=1.0, anchored=False):
        self.c = c
        self.anchored = anchored

    def fit(self, X, y=None):
        check_threshold(self.c)
        X = check_paths(X, estimator=self)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_paths(X, estimator=self)
        c = check_threshold(self.c)
        out = np.empty_like(X)
        for i, row in enumerate(X):
            _, utv, dtv, *_ = _run(row, c)
            g0 = row[0] + utv - dtv
            if self.anchored:
                out[i] = g0
                continue
            gap = g0 - row
            lo = gap.min()
            out[i] = g0 - lo - 0.5 * (gap.max() - lo)
        return out
