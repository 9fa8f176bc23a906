"""scikit-learn style wrappers around the admission algorithm and the oracle.

The "sample" passed to ``fit`` is one ``Scenario``; predictions are boolean
masks over its eMBB users.
"""
from __future__ import annotations

from typing import Any, Mapping

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import admission, oracle
from .model import AdmissionResult, Scenario, SystemConfig
from .validation import check_config, check_scenario


def _mask(admitted, K: int) -> np.ndarray:
    out = np.zeros(K, dtype=bool)
    out[list(admitted)] = True
    return out


class AdmissionControl(BaseEstimator):
    """Sparsity-driven eMBB admission with URLLC guarantees.

    Parameters left as None fall back to the values in ``config``.
    """

    def __init__(self, config: SystemConfig | Mapping[str, Any] | None = None, delta: float | None = None,
                 stop_threshold: float | None = None, admit_tolerance: float | None = None,
                 max_outer_iters: int | None = None):
        self.config = config
        self.delta = delta
        self.stop_threshold = stop_threshold
        self.admit_tolerance = admit_tolerance
        self.max_outer_iters = max_outer_iters

    def _effective_config(self, scenario: Scenario) -> SystemConfig:
        cfg = self.config if self.config is not None else SystemConfig(
            num_embb=scenario.num_embb, num_urllc=scenario.num_urllc,
            num_antennas=scenario.num_antennas)
        overrides = {k: v for k, v in (("delta", self.delta), ("stop_threshold", self.stop_threshold),
                                       ("admit_tolerance", self.admit_tolerance),
                                       ("max_outer_iters", self.max_outer_iters)) if v is not None}
        return check_config(check_config(cfg).replace(**overrides))

    def fit(self, X: Scenario, y=None) -> "AdmissionControl":
        cfg = self._effective_config(X)
        check_scenario(X, cfg)
        res: AdmissionResult = admission.run(X, cfg)
        self.result_ = res
        self.admitted_ = res.admitted
        self.objective_trace_ = np.asarray(res.objective_trace)
        self.n_iter_ = res.outer_iterations
        self.status_ = res.status
        self.n_embb_ = X.num_embb
        return self

    def predict(self, X: Scenario | None = None) -> np.ndarray:
        """Admission mask for ``X`` (refits) or for the fitted scenario."""
        if X is not None:
            return self.fit(X).predict()
        check_is_fitted(self, "result_")
        return _mask(self.admitted_, self.n_embb_)

    def fit_predict(self, X: Scenario, y=None) -> np.ndarray:
        return self.fit(X).predict()


class ExhaustiveSearch(BaseEstimator):
    """Largest feasible eMBB subset found by enumeration (fixed split only)."""

    def __init__(self, config: SystemConfig | Mapping[str, Any] | None = None, prune: bool = True):
        self.config = config
        self.prune = prune

    def fit(self, X: Scenario, y=None) -> "ExhaustiveSearch":
        cfg = self.config if self.config is not None else SystemConfig(
            num_embb=X.num_embb, num_urllc=X.num_urllc, num_antennas=X.num_antennas)
        cfg = check_config(cfg)
        check_scenario(X, cfg)
        res = oracle.exhaustive_max_admitted(X, cfg, prune=self.prune)
        self.result_ = res
        self.admitted_ = res.subset
        self.size_ = res.size
        self.indeterminate_ = res.indeterminate
        self.n_embb_ = X.num_embb
        return self

    def predict(self, X: Scenario | None = None) -> np.ndarray:
        if X is not None:
            return self.fit(X).predict()
        check_is_fitted(self, "result_")
        return _mask(self.admitted_, self.n_embb_)

    def fit_predict(self, X: Scenario, y=None) -> np.ndarray:
        return self.fit(X).predict()
