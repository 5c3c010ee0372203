"""Feature vectors and design matrices for the three map families.

* ``rbf_grid``: unit-width Gaussian bumps on a fixed center grid,
  entry i = exp(-0.5 (x - mu_i)^2).
* ``polynomial``: powers [x, x^2, ..., x^degree] with no constant term
  (a zero prior mean supplies no intercept).
* ``constant``: the single feature [1], handy for exactly solvable cases.

Inputs are scalar (the experiments draw x ~ N(0, 1)).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import BadGrid, ConfigError

KINDS = ("rbf_grid", "polynomial", "constant")


@dataclass(frozen=True)
class FeatureMap:
    kind: str
    centers: np.ndarray | None = None
    degree: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"unknown feature map kind {self.kind!r}")
        if self.kind == "rbf_grid":
            centers = np.asarray(self.centers, dtype=float)
            if centers.ndim != 1 or centers.size < 1:
                raise BadGrid("rbf_grid requires a 1-d array of centers")
            object.__setattr__(self, "centers", centers)
        if self.kind == "polynomial" and (self.degree is None or self.degree < 1):
            raise ConfigError("polynomial map requires degree >= 1")

    @property
    def dim(self) -> int:
        if self.kind == "rbf_grid":
            return int(self.centers.size)
        if self.kind == "polynomial":
            return int(self.degree)
        return 1

    def _kernel(self, xs: np.ndarray) -> np.ndarray:
        """Rows of features for a batch of scalar inputs; the single code
        path shared by evaluate and design_matrix."""
        if self.kind == "rbf_grid":
            return np.exp(-0.5 * (xs[:, None] - self.centers[None, :]) ** 2)
        if self.kind == "polynomial":
            return xs[:, None] ** np.arange(1, self.degree + 1, dtype=float)
        return np.ones((xs.size, 1))

    def evaluate(self, x: float) -> np.ndarray:
        """Feature vector phi(x), length ``dim``."""
        x = float(np.asarray(x).reshape(()))
        return self._kernel(np.array([x]))[0]

    def design_matrix(self, inputs: np.ndarray) -> np.ndarray:
        """Matrix with row n equal to evaluate(inputs[n])."""
        inputs = np.atleast_1d(np.asarray(inputs, dtype=float)).ravel()
        if inputs.size == 0:
            return np.zeros((0, self.dim))
        return self._kernel(inputs)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind}
        if self.kind == "rbf_grid":
            out["centers"] = [float(c) for c in self.centers]
        if self.kind == "polynomial":
            out["degree"] = int(self.degree)
        return out

    @staticmethod
    def from_dict(data: dict[str, Any]) -> "FeatureMap":
        kind = data.get("kind")
        if kind == "rbf_grid":
            if "centers" in data:
                return FeatureMap("rbf_grid", centers=np.asarray(data["centers"], float))
            return make_rbf_grid(int(data["d"]), float(data["lo"]), float(data["hi"]))
        if kind == "polynomial":
            return make_polynomial(int(data["degree"]))
        if kind == "constant":
            return make_constant()
        raise ConfigError(f"unknown feature map kind {kind!r}")


def make_rbf_grid(d: int, lo: float, hi: float) -> FeatureMap:
    """RBF map with d centers equally spaced, endpoints included.

    Endpoint-inclusive spacing is the conventional reading of "evenly in the
    interval"; recorded so that downstream figures stay comparable.
    """
    if d < 2 and lo != hi:
        raise BadGrid(f"need at least 2 centers to span [{lo}, {hi}]")
    if d < 1:
        raise BadGrid("need at least one center")
    centers = np.linspace(lo, hi, d) if d > 1 else np.array([float(lo)])
    return FeatureMap("rbf_grid", centers=centers)


def make_polynomial(degree: int) -> FeatureMap:
    return FeatureMap("polynomial", degree=degree)


def make_constant() -> FeatureMap:
    return FeatureMap("constant")
