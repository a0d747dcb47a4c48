"""Boundary invariants from heat coefficients, and transfer of boundary properties.

Given the coefficients of a pair of operators (Dirichlet+Neumann on functions,
or absolute/relative conditions on functions and 1-forms) and the Einstein
constant, the volumes, ``I0 = L_aa[dM]`` and the pair ``(I1, I2)`` are
recovered by peeling the known terms off a_0 .. a_3 and solving a 2x2 system.
Exact inputs are processed in exact arithmetic; fitted inputs in floats.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Dict, Optional, Sequence, Tuple, Union

from .coefficients import HeatCoefficientSet, heat_coefficients, star_bracket
from .exact import ExactValue, as_fraction, four_pi_power
from .exterior import (
    PAIRS,
    SecondFundamentalForm,
    Weitzenbock,
    build_fiber_operators,
    coefficient_matrix,
    extract_linear_coefficient,
    normalize_bc,
    normalize_pair,
)
from .fitting import DEFAULT_N_TERMS, FitResult, fit_spectrum
from .geometry import BoundaryClassification, BoundaryInvariants, ModelManifold, classify_boundary
from .spectra import EigenvalueList

__all__ = [
    "DEFAULT_FIT_RTOL",
    "DEFAULT_FIT_TOL",
    "HypothesisViolation",
    "InconsistentDataError",
    "PropertyTransfer",
    "RecoveryResult",
    "SpectralDataset",
    "TransferReport",
    "classify_from_spectra",
    "compare_manifolds",
    "dataset_from_fits",
    "dataset_from_model",
    "recover_invariants",
]

#: classification tolerance for fitted data, in units of vol(dM)
DEFAULT_FIT_TOL = 1e-2
#: relative agreement required between volume estimates of the two operators
DEFAULT_FIT_RTOL = 1e-3

PROPERTIES = ("totally_geodesic", "minimal", "totally_umbillic", "strongly_totally_umbillic")

Value = Union[ExactValue, float]


class HypothesisViolation(ValueError):
    """Inputs violate a standing hypothesis of the comparison (equal tau, same m, same pair)."""


class InconsistentDataError(ValueError):
    """The two operators of a pair disagree on a shared quantity."""


@dataclass(frozen=True)
class SpectralDataset:
    m: int
    tau: Fraction
    pair_kind: str
    coefficients: Tuple[Tuple[Value, ...], Tuple[Value, ...]]
    provenance: str  # "exact" or "fitted"
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "tau", as_fraction(self.tau))
        object.__setattr__(self, "pair_kind", normalize_pair(self.pair_kind))
        if self.provenance not in ("exact", "fitted"):
            raise ValueError("provenance must be 'exact' or 'fitted'")
        if len(self.coefficients) != 2 or any(len(c) < 4 for c in self.coefficients):
            raise ValueError("need a_0 .. a_3 for both operators of the pair")
        coeffs = tuple(tuple(c[:4]) for c in self.coefficients)
        if self.provenance == "exact":
            if not all(isinstance(v, ExactValue) for c in coeffs for v in c):
                raise TypeError("exact datasets need ExactValue coefficients")
        else:
            coeffs = tuple(tuple(float(v) for v in c) for c in coeffs)
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def exact(self) -> bool:
        return self.provenance == "exact"

    @property
    def members(self) -> Tuple[Tuple[int, str], Tuple[int, str]]:
        return PAIRS[self.pair_kind]

    def to_json(self) -> dict:
        def enc(v):
            if isinstance(v, ExactValue):
                return {"exact": v.to_json(), "float": float(f"{float(v):.15g}")}
            return {"exact": None, "float": float(f"{v:.15g}")}

        return {
            "label": self.label,
            "m": self.m,
            "tau": {"num": self.tau.numerator, "den": self.tau.denominator},
            "pair": self.pair_kind,
            "provenance": self.provenance,
            "coefficients": [[enc(v) for v in c] for c in self.coefficients],
        }

    @classmethod
    def from_json(cls, d: dict) -> "SpectralDataset":
        prov = d["provenance"]

        def dec(v):
            if prov == "exact":
                return ExactValue.from_json(v["exact"])
            return float(v["float"])

        tau = d["tau"]
        tau = Fraction(int(tau["num"]), int(tau["den"])) if isinstance(tau, dict) else as_fraction(tau)
        return cls(
            int(d["m"]), tau, d["pair"], tuple(tuple(dec(v) for v in c) for c in d["coefficients"]), prov,
            d.get("label", ""),
        )


@dataclass(frozen=True)
class RecoveryResult:
    vol_M: Value
    vol_dM: Value
    invariants: BoundaryInvariants
    classification: BoundaryClassification
    determinant: Fraction
    pair_kind: str
    provenance: str
    tolerance: Optional[float] = None

    @property
    def I0(self):
        return self.invariants.I0

    @property
    def I1(self):
        return self.invariants.I1

    @property
    def I2(self):
        return self.invariants.I2

    def to_json(self) -> dict:
        inv = self.invariants.to_json()
        return {
            "pair": self.pair_kind,
            "provenance": self.provenance,
            "vol_M": _enc(self.vol_M),
            "vol_dM": inv["vol_dM"],
            "I0": inv["I0"],
            "I1": inv["I1"],
            "I2": inv["I2"],
            "determinant": str(self.determinant),
            "tolerance": self.tolerance,
            "classification": self.classification.to_json(),
        }


def _enc(v: Value) -> dict:
    if isinstance(v, ExactValue):
        return {"exact": v.to_json(), "float": float(f"{float(v):.15g}")}
    return {"exact": None, "float": float(f"{v:.15g}")}


def _agree(x: Value, y: Value, exact: bool, rtol: float) -> bool:
    if exact:
        return x == y
    return abs(float(x) - float(y)) <= rtol * max(abs(float(x)), abs(float(y)))


def _member_constants(m: int, p: int, bc: str, tau: Fraction) -> Dict[str, Fraction]:
    """Fiber traces entering a_0 .. a_3 that do not involve L."""
    ops = build_fiber_operators(m, p, bc, SecondFundamentalForm.zero(m))
    dim = len(ops.basis)
    E = Weitzenbock("einstein", tau).scalar(m, ops.fiber_degree)
    sigma = extract_linear_coefficient(m, p, bc)
    return {
        "rank": Fraction(comb(m, p)),
        "tr_chi": ops.chi.trace(),
        "a2_interior": comb(m, p) * (6 * E + tau),
        "a2_boundary": 2 * dim + 12 * sigma,
        "star": star_bracket(m, p, bc, tau),
    }


def recover_invariants(
    data: SpectralDataset, tol: Optional[float] = None, rtol: float = DEFAULT_FIT_RTOL
) -> RecoveryResult:
    """Invert the coefficient formulas of a pair for ``vol_M, vol_dM, I0, I1, I2``.

    Exact data is inverted exactly and classified with exact comparisons.
    Fitted data is classified at ``tol * vol_dM`` (default
    :data:`DEFAULT_FIT_TOL`), and the two volume estimates must agree to
    ``rtol``.
    """
    m, tau, exact = data.m, data.tau, data.exact
    consts = [_member_constants(m, p, bc, tau) for p, bc in data.members]
    a = data.coefficients

    # vol(M): a_0 = (4 pi)^{-m/2} C(m, p) vol(M)
    vols = []
    for i, c in enumerate(consts):
        k = four_pi_power(-m) * c["rank"]
        vols.append(a[i][0] / k if exact else a[i][0] / float(k))
    if not _agree(vols[0], vols[1], exact, rtol):
        raise InconsistentDataError(f"vol(M) estimates disagree: {vols[0]} vs {vols[1]}")
    vol_M = vols[0]

    # vol(dM): a_1 = (4 pi)^{(1-m)/2} (1/4) Tr(chi) vol(dM), from members with Tr(chi) != 0
    scale1 = four_pi_power(1 - m) * Fraction(1, 4)
    dvols = []
    for i, c in enumerate(consts):
        if c["tr_chi"] != 0:
            k = scale1 * c["tr_chi"]
            dvols.append(a[i][1] / k if exact else a[i][1] / float(k))
    if not dvols:
        raise InconsistentDataError("no operator of the pair sees the boundary volume")
    for v in dvols[1:]:
        if not _agree(dvols[0], v, exact, rtol):
            raise InconsistentDataError(f"vol(dM) estimates disagree: {dvols[0]} vs {v}")
    vol_dM = dvols[0]

    # I0: a_2 = (4 pi)^{-m/2} (1/6) {interior vol(M) + (2 dim + 12 sigma) I0}
    scale2 = four_pi_power(-m) * Fraction(1, 6)
    I0 = None
    for i, c in enumerate(consts):
        if c["a2_boundary"] == 0:
            continue
        if exact:
            est = (a[i][2] / scale2 - c["a2_interior"] * vol_M) / c["a2_boundary"]
        else:
            est = (a[i][2] / float(scale2) - float(c["a2_interior"]) * vol_M) / float(c["a2_boundary"])
        if I0 is None:
            I0 = est
        elif exact and est != I0:
            # fitted data keeps the p = 0 estimate, which is the better conditioned one
            raise InconsistentDataError(f"I0 estimates disagree: {I0} vs {est}")
    if I0 is None:  # pragma: no cover - p = 0 members always carry the term
        raise InconsistentDataError("no operator of the pair determines I0")

    # (I1, I2): a_3 = (4 pi)^{(1-m)/2} (1/384) {star vol(dM) + alpha I1 + beta I2}
    rows, det = (None, Fraction(0)) if m < 2 else coefficient_matrix(data.pair_kind, m)
    if m < 2:
        # no tangent directions along the boundary
        I1 = I2 = ExactValue(0) if exact else 0.0
    else:
        scale3 = four_pi_power(1 - m) * Fraction(1, 384)
        rhs = []
        for i, c in enumerate(consts):
            if exact:
                rhs.append(a[i][3] / scale3 - c["star"] * vol_dM)
            else:
                rhs.append(a[i][3] / float(scale3) - float(c["star"]) * vol_dM)
        (a11, a12), (a21, a22) = rows
        if det == 0:  # pragma: no cover - the supported pairs are all regular
            raise InconsistentDataError("singular coefficient matrix")
        if exact:
            I1 = (a22 * rhs[0] - a12 * rhs[1]) / det
            I2 = (a11 * rhs[1] - a21 * rhs[0]) / det
        else:
            d = float(det)
            I1 = (float(a22) * rhs[0] - float(a12) * rhs[1]) / d
            I2 = (float(a11) * rhs[1] - float(a21) * rhs[0]) / d

    inv = BoundaryInvariants(I0, I1, I2, vol_dM, m)
    if exact:
        cls_tol = tol
    else:
        cls_tol = (DEFAULT_FIT_TOL if tol is None else tol) * float(vol_dM)
    classification = classify_boundary(inv, cls_tol)
    return RecoveryResult(vol_M, vol_dM, inv, classification, det, data.pair_kind, data.provenance, cls_tol)


# --------------------------------------------------------------------------
# dataset construction
# --------------------------------------------------------------------------


def dataset_from_model(model: ModelManifold, pair: str) -> SpectralDataset:
    """Exact forward coefficients of a catalog model."""
    pair = normalize_pair(pair)
    coeffs = tuple(heat_coefficients(model, p, bc).a for p, bc in PAIRS[pair])
    return SpectralDataset(model.m, model.tau.as_fraction(), pair, coeffs, "exact", model.name)


def dataset_from_coefficient_sets(
    sets: Sequence[HeatCoefficientSet], pair: str, tau, label: str = ""
) -> SpectralDataset:
    pair = normalize_pair(pair)
    _check_members(pair, [(s.p, s.bc) for s in sets])
    m = sets[0].m
    if any(s.m != m for s in sets):
        raise HypothesisViolation("coefficient sets have different dimensions")
    return SpectralDataset(m, tau, pair, tuple(s.a for s in sets), "exact", label)


def dataset_from_fits(fits: Sequence[FitResult], pair: str, tau, label: str = "") -> SpectralDataset:
    pair = normalize_pair(pair)
    _check_members(pair, [(f.p, f.bc) for f in fits])
    m = fits[0].m
    if any(f.m != m for f in fits):
        raise HypothesisViolation("fits have different dimensions")
    return SpectralDataset(m, tau, pair, tuple(tuple(f.a_hat[:4]) for f in fits), "fitted", label)


def _same_operator(p: int, bc: str, want_p: int, want_bc: str) -> bool:
    if p != want_p:
        return False
    bc = normalize_bc(bc)
    if bc == want_bc:
        return True
    if p == 0:  # on functions absolute is Neumann and relative is Dirichlet
        alias = {"absolute": "neumann", "relative": "dirichlet"}
        return alias.get(bc, bc) == alias.get(want_bc, want_bc)
    return False


def _check_members(pair: str, tags: Sequence[Tuple[Optional[int], Optional[str]]]) -> None:
    if len(tags) != 2:
        raise ValueError("a pair needs exactly two operators")
    for (p, bc), (want_p, want_bc) in zip(tags, PAIRS[pair]):
        if p is None or bc in (None, "unknown"):
            continue
        if not _same_operator(p, bc, want_p, want_bc):
            raise ValueError(f"pair {pair} expects (p={want_p}, {want_bc}), got (p={p}, {bc})")


def classify_from_spectra(
    spectra: Sequence[EigenvalueList],
    pair: str,
    m: int,
    tau,
    tol: float = DEFAULT_FIT_TOL,
    n_terms: int = DEFAULT_N_TERMS,
    t_grid=None,
    label: str = "",
) -> RecoveryResult:
    """Fit both spectra of a pair, then recover and classify."""
    pair = normalize_pair(pair)
    if any(s.m != m for s in spectra):
        raise HypothesisViolation("spectrum dimension differs from m")
    fits = [fit_spectrum(s, t_grid, n_terms) for s in spectra]
    return recover_invariants(dataset_from_fits(fits, pair, tau, label), tol)


# --------------------------------------------------------------------------
# comparison of two manifolds
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PropertyTransfer:
    name: str
    a_has: bool
    b_has: bool

    @property
    def holds(self) -> bool:
        return (not self.a_has) or self.b_has


@dataclass(frozen=True)
class TransferReport:
    a: RecoveryResult
    b: RecoveryResult
    transfers: Tuple[PropertyTransfer, ...]
    delta: Dict[str, Value]

    @property
    def all_hold(self) -> bool:
        return all(t.holds for t in self.transfers)

    def to_json(self) -> dict:
        return {
            "all_transfers_hold": self.all_hold,
            "properties": {
                t.name: {"a": t.a_has, "b": t.b_has, "transfer_holds": t.holds} for t in self.transfers
            },
            "delta": {k: _enc(v) for k, v in self.delta.items()},
            "a": self.a.to_json(),
            "b": self.b.to_json(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def compare_manifolds(A: SpectralDataset, B: SpectralDataset, tol: float = DEFAULT_FIT_TOL) -> TransferReport:
    """Check which boundary properties of A are forced on B.

    Refuses data with different tau: the transfer statements assume equal
    Einstein constants. Invariant differences are reported as ``B - A``.
    """
    if A.tau != B.tau:
        raise HypothesisViolation(f"tau differs ({A.tau} vs {B.tau}); the comparison assumes equal tau")
    if A.m != B.m:
        raise HypothesisViolation(f"dimension differs ({A.m} vs {B.m})")
    if A.pair_kind != B.pair_kind:
        raise HypothesisViolation(f"operator pairs differ ({A.pair_kind} vs {B.pair_kind})")
    both_exact = A.exact and B.exact
    ra = recover_invariants(A, None if A.exact else tol)
    rb = recover_invariants(B, None if B.exact else tol)
    fa, fb = ra.classification.flags(), rb.classification.flags()
    transfers = tuple(PropertyTransfer(name, fa[name], fb[name]) for name in PROPERTIES)
    delta = {}
    for name in ("I0", "I1", "I2"):
        x, y = getattr(ra, name), getattr(rb, name)
        delta[name] = (y - x) if both_exact else float(y) - float(x)
    return TransferReport(ra, rb, transfers, delta)
