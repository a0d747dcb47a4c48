"""Model manifolds with exact boundary data, and boundary classification.

The catalog holds the solvable Einstein models used throughout the package.
Each boundary component carries a constant second fundamental form, so the
boundary integrals reduce to ``integrand * volume``.

Sign convention: ``L`` is taken with respect to the inward normal and the
disk of radius ``R`` has ``L = +1/R``. With that choice the constant heat
coefficient of the Dirichlet disk is the classical ``+1/6``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .exact import ExactValue, as_exact, as_fraction
from .exterior import SecondFundamentalForm

__all__ = [
    "BoundaryClassification",
    "BoundaryComponent",
    "BoundaryInvariants",
    "ModelManifold",
    "UmbillicOracleResult",
    "catalog",
    "classify_boundary",
    "cylinder",
    "disk",
    "hemisphere",
    "interval",
    "model_from_name",
    "pointwise_umbillic_oracle",
]

Number = Union[ExactValue, float]


@dataclass(frozen=True)
class BoundaryComponent:
    L: SecondFundamentalForm
    volume: ExactValue


@dataclass(frozen=True)
class BoundaryInvariants:
    """``I0 = L_aa[dM]``, ``I1 = L_aa L_bb[dM]``, ``I2 = L_ab L_ab[dM]``.

    Values are all ExactValue (exact route) or all float (fitted route).
    """

    I0: Number
    I1: Number
    I2: Number
    vol_dM: Number
    m: int

    @property
    def exact(self) -> bool:
        return all(isinstance(v, ExactValue) for v in (self.I0, self.I1, self.I2, self.vol_dM))

    def to_json(self) -> dict:
        out: Dict[str, Any] = {"m": self.m}
        for name in ("I0", "I1", "I2", "vol_dM"):
            v = getattr(self, name)
            out[name] = _number_json(v)
        return out


def _number_json(v) -> dict:
    if isinstance(v, ExactValue):
        return {"exact": v.to_json(), "float": _round15(float(v))}
    return {"exact": None, "float": _round15(float(v))}


def _round15(x: float) -> float:
    return float(f"{x:.15g}")


@dataclass(frozen=True)
class ModelManifold:
    name: str
    m: int
    parameters: Dict[str, ExactValue]
    tau: ExactValue
    vol_M: ExactValue
    boundary: Tuple[BoundaryComponent, ...]
    b0: int
    b1: int

    def __post_init__(self):
        if self.vol_M.sign() <= 0 or self.vol_dM.sign() <= 0:
            raise ValueError("volumes must be positive")
        for comp in self.boundary:
            if comp.L.m != self.m:
                raise ValueError("boundary second fundamental form has the wrong dimension")

    @property
    def einstein_lambda(self) -> ExactValue:
        return self.tau / self.m

    @property
    def rho_mm(self) -> ExactValue:
        """Normal-normal Ricci component; equals tau/m on an Einstein manifold."""
        return self.tau / self.m

    @property
    def vol_dM(self) -> ExactValue:
        total = ExactValue(0)
        for comp in self.boundary:
            total = total + comp.volume
        return total

    @property
    def L_const(self) -> Tuple[SecondFundamentalForm, ...]:
        return tuple(c.L for c in self.boundary)

    def invariants(self) -> BoundaryInvariants:
        I0 = I1 = I2 = ExactValue(0)
        for comp in self.boundary:
            I0 = I0 + comp.L.mean_curvature * comp.volume
            I1 = I1 + comp.L.trace_squared * comp.volume
            I2 = I2 + comp.L.norm_squared * comp.volume
        return BoundaryInvariants(I0, I1, I2, self.vol_dM, self.m)

    def param(self, name: str) -> float:
        return float(self.parameters[name])

    def parameters_text(self) -> str:
        if not self.parameters:
            return ""
        return "(" + ", ".join(f"{k}={v}" for k, v in sorted(self.parameters.items())) + ")"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "m": self.m,
            "parameters": {k: v.to_json() for k, v in self.parameters.items()},
            "tau": self.tau.to_json(),
            "einstein_lambda": self.einstein_lambda.to_json(),
            "rho_mm": self.rho_mm.to_json(),
            "vol_M": self.vol_M.to_json(),
            "vol_dM": self.vol_dM.to_json(),
            "boundary": [
                {
                    "L": [[str(x) for x in row] for row in c.L.entries],
                    "volume": c.volume.to_json(),
                }
                for c in self.boundary
            ],
            "b0": self.b0,
            "b1": self.b1,
        }


def _positive(name: str, x) -> ExactValue:
    v = as_exact(x)
    if v.sign() <= 0:
        raise ValueError(f"{name} must be positive")
    return v


def interval(length=ExactValue.pi()) -> ModelManifold:
    """``[0, length]``; the boundary is two points with vacuous L."""
    ell = _positive("length", length)
    point = BoundaryComponent(SecondFundamentalForm(1, ()), ExactValue(1))
    return ModelManifold("interval", 1, {"length": ell}, ExactValue(0), ell, (point, point), 1, 0)


def disk(radius=1) -> ModelManifold:
    """Flat disk of radius R; boundary circle with ``L = 1/R``."""
    R = _positive("radius", radius)
    r = as_fraction(R)  # L must be rational
    pi = ExactValue.pi()
    circle = BoundaryComponent(SecondFundamentalForm.scalar(2, 1 / r), 2 * pi * R)
    return ModelManifold("disk", 2, {"radius": R}, ExactValue(0), pi * R * R, (circle,), 1, 0)


def cylinder(height=ExactValue.pi(), radius=1) -> ModelManifold:
    """Flat ``[0, H] x S^1_R``; two totally geodesic boundary circles."""
    H = _positive("height", height)
    R = _positive("radius", radius)
    pi = ExactValue.pi()
    circle = BoundaryComponent(SecondFundamentalForm.zero(2), 2 * pi * R)
    return ModelManifold(
        "cylinder", 2, {"height": H, "radius": R}, ExactValue(0), 2 * pi * R * H, (circle, circle), 1, 1
    )


def hemisphere() -> ModelManifold:
    """Closed upper unit hemisphere of S^2; tau = 2 and a geodesic equator."""
    pi = ExactValue.pi()
    equator = BoundaryComponent(SecondFundamentalForm.zero(2), 2 * pi)
    return ModelManifold("hemisphere", 2, {}, ExactValue(2), 2 * pi, (equator,), 1, 0)


_CONSTRUCTORS = {"interval": interval, "disk": disk, "cylinder": cylinder, "hemisphere": hemisphere}


def model_from_name(name: str, **params) -> ModelManifold:
    try:
        ctor = _CONSTRUCTORS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; expected one of {sorted(_CONSTRUCTORS)}") from None
    return ctor(**{k: v for k, v in params.items() if v is not None})


def catalog() -> List[ModelManifold]:
    """Default instances: interval(pi), disk(1), cylinder(pi, 1), hemisphere."""
    return [interval(), disk(1), cylinder(), hemisphere()]


# --------------------------------------------------------------------------
# classification
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryClassification:
    totally_geodesic: bool
    minimal: bool
    totally_umbillic: bool
    strongly_totally_umbillic: bool
    mu: Optional[Number] = None

    def flags(self) -> Dict[str, bool]:
        return {
            "totally_geodesic": self.totally_geodesic,
            "minimal": self.minimal,
            "totally_umbillic": self.totally_umbillic,
            "strongly_totally_umbillic": self.strongly_totally_umbillic,
        }

    def to_json(self) -> dict:
        out: Dict[str, Any] = dict(self.flags())
        out["mu"] = None if self.mu is None else _number_json(self.mu)
        return out


def _is_small(x: Number, tol) -> bool:
    if tol is None:
        return x.sign() <= 0
    return float(x) <= tol


def classify_boundary(inv: BoundaryInvariants, tol: Optional[float] = None) -> BoundaryClassification:
    """Apply the integral criteria to ``(I0, I1, I2, vol_dM)``.

    * totally geodesic  <=> ``I2 <= tol``
    * minimal           <=> ``I1 <= tol``
    * totally umbillic  <=> ``(m-1) I2 - I1 <= tol``
    * strongly umbillic <=> ``min_mu I2 - 2 mu I0 + mu^2 (m-1) vol_dM <= tol``,
      attained at ``mu* = I0 / ((m-1) vol_dM)``.

    With ``tol=None`` exact invariants are compared with zero exactly; float
    invariants use ``1e-8 * vol_dM * max(1, I2)``. Geodesic boundaries get all
    flags and ``mu = 0``; strong umbillicity implies umbillicity.
    """
    exact = inv.exact
    if (float(inv.vol_dM) if not exact else inv.vol_dM.sign()) <= 0:
        raise ValueError("boundary volume must be positive")
    if tol is None and not exact:
        tol = 1e-8 * float(inv.vol_dM) * max(1.0, abs(float(inv.I2)))
    if tol is not None and tol < 0:
        raise ValueError("tolerance must be nonnegative")
    zero = ExactValue(0) if exact else 0.0
    m = inv.m
    if m == 1:
        # no tangent directions: every L-invariant vanishes identically
        return BoundaryClassification(True, True, True, True, zero)
    geodesic = _is_small(inv.I2, tol)
    minimal = _is_small(inv.I1, tol)
    umbillic = _is_small((m - 1) * inv.I2 - inv.I1, tol)
    mu = inv.I0 / ((m - 1) * inv.vol_dM)
    residual = inv.I2 - 2 * mu * inv.I0 + mu * mu * (m - 1) * inv.vol_dM
    strongly = _is_small(residual, tol)
    if geodesic:
        return BoundaryClassification(True, True, True, True, zero)
    return BoundaryClassification(False, minimal, umbillic or strongly, strongly, mu if strongly else None)


def umbillic_quadratic(mu, inv: BoundaryInvariants):
    """``I2 - 2 mu I0 + mu^2 (m-1) vol_dM`` (float evaluation)."""
    return float(inv.I2) - 2 * mu * float(inv.I0) + mu * mu * (inv.m - 1) * float(inv.vol_dM)


# --------------------------------------------------------------------------
# pointwise oracle
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class UmbillicOracleResult:
    umbillic: bool
    mu: Optional[Fraction]
    quadratic: Fraction  # (m-1) L_ab L_ab - L_aa L_bb from the entries
    spread: Fraction  # sum_{i<j} (k_i - k_j)^2 from the characteristic polynomial
    spread_numeric: float  # same sum over numerically computed eigenvalues
    sum_k2: Fraction  # sum k_i^2
    sum_k_squared: Fraction  # (sum k_i)^2


def _charpoly_int(M: Sequence[Sequence[int]]) -> List[int]:
    """Monic characteristic polynomial coefficients ``[1, c1, ..., cn]`` (Faddeev-LeVerrier)."""
    n = len(M)
    coeffs = [1]
    AM = [[0] * n for _ in range(n)]
    c = 1
    for k in range(1, n + 1):
        # AM <- M (AM + c_{k-1} I)
        B = [[AM[i][j] + (c if i == j else 0) for j in range(n)] for i in range(n)]
        AM = [[sum(M[i][t] * B[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        tr = sum(AM[i][i] for i in range(n))
        if tr % k:
            raise ArithmeticError("non-integral Faddeev-LeVerrier step")
        c = -tr // k
        coeffs.append(c)
    return coeffs


def pointwise_umbillic_oracle(L: SecondFundamentalForm) -> UmbillicOracleResult:
    """Umbillicity of one symmetric L by two independent routes.

    The entry route evaluates ``(m-1) L_ab L_ab - L_aa L_bb``. The eigenvalue
    route works from the characteristic polynomial of the integer matrix
    ``D L`` (D a common denominator): the elementary symmetric functions give
    ``sum_{i<j} (k_i - k_j)^2 = (n-1) e1^2 - 2 n e2`` and umbillicity is read
    off as ``char poly == (x - e1/n)^n``. A floating eigen-decomposition
    enumerates the pairwise spread as a further brute-force check. The routes
    must agree, otherwise ``AssertionError`` is raised.
    """
    n = L.size
    if n == 0:
        zero = Fraction(0)
        return UmbillicOracleResult(True, None, zero, zero, 0.0, zero, zero)
    quad = n * L.norm_squared - L.trace_squared
    D = math.lcm(*(x.denominator for row in L.entries for x in row))
    M = [[int(x * D) for x in row] for row in L.entries]
    coeffs = _charpoly_int(M)
    e1 = Fraction(-coeffs[1], D)
    e2 = Fraction(coeffs[2], D * D) if n >= 2 else Fraction(0)
    spread = (n - 1) * e1 * e1 - 2 * n * e2
    sum_k2 = e1 * e1 - 2 * e2
    # (x - t/n)^n with t = trace(M): compare n^n * charpoly(x) at scaled variable
    t = sum(M[i][i] for i in range(n))
    all_equal = all(
        coeffs[k] * n**k == math.comb(n, k) * (-t) ** k for k in range(n + 1)
    )
    eig = np.linalg.eigvalsh(np.array([[float(x) for x in row] for row in L.entries]))
    spread_num = float(sum((a - b) ** 2 for a, b in combinations(eig, 2)))
    if quad != spread:
        raise AssertionError(f"entry route {quad} != eigenvalue route {spread}")
    if all_equal != (quad == 0):
        raise AssertionError("umbillicity disagrees between the quadratic and the char-poly route")
    scale = 1.0 + float(sum_k2) * n
    if abs(spread_num - float(spread)) > 1e-9 * scale:
        raise AssertionError("numeric eigenvalue spread disagrees with the exact spread")
    mu = e1 / n if all_equal else None
    return UmbillicOracleResult(all_equal, mu, quad, spread, spread_num, sum_k2, L.trace_squared)
