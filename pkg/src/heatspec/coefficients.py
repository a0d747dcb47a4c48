"""Closed-form heat trace coefficients a_0 .. a_3 on the model catalog.

``Tr exp(-t Delta_{p,B}) ~ sum_n t^{(n-m)/2} a_n``. All fiber traces come from
:mod:`heatspec.exterior`; the integrals are exact because every catalog model
has constant curvature and constant boundary data per component.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Tuple

from .exact import ExactValue, four_pi_power
from .exterior import (
    PAIRS,
    SecondFundamentalForm,
    Weitzenbock,
    a3_bracket_trace,
    build_fiber_operators,
    extract_quadratic_coefficients,
    normalize_bc,
    normalize_pair,
)
from .geometry import ModelManifold

__all__ = [
    "HeatCoefficientSet",
    "SectionFourMismatch",
    "a0",
    "a1",
    "a2",
    "a3",
    "a3_section4_form",
    "heat_coefficients",
    "star_bracket",
]


class SectionFourMismatch(AssertionError):
    """The specialised pair formula disagrees with the general evaluator."""


@dataclass(frozen=True)
class HeatCoefficientSet:
    model: str
    m: int
    p: int
    bc: str
    a: Tuple[ExactValue, ExactValue, ExactValue, ExactValue]

    def to_json(self) -> dict:
        return {
            "model": self.model,
            "m": self.m,
            "p": self.p,
            "bc": self.bc,
            "coefficients": [
                {"n": n, "exact": v.to_json(), "text": str(v), "float": float(f"{float(v):.15g}")}
                for n, v in enumerate(self.a)
            ],
        }

    @classmethod
    def from_json(cls, d: dict) -> "HeatCoefficientSet":
        coeffs = sorted(d["coefficients"], key=lambda c: c["n"])
        return cls(
            d.get("model", "unknown"),
            int(d["m"]),
            int(d["p"]),
            normalize_bc(d["bc"]),
            tuple(ExactValue.from_json(c["exact"]) for c in coeffs[:4]),
        )


def _weitzenbock(model: ModelManifold) -> Weitzenbock:
    return Weitzenbock("einstein", model.tau.as_fraction())


def _check_degree(model: ModelManifold, p: int) -> None:
    if not 0 <= p <= model.m:
        raise ValueError(f"form degree {p} out of range for m={model.m}")


def a0(model: ModelManifold, p: int) -> ExactValue:
    """``(4 pi)^{-m/2} C(m, p) vol(M)``."""
    _check_degree(model, p)
    return four_pi_power(-model.m) * comb(model.m, p) * model.vol_M


def a1(model: ModelManifold, p: int, bc: str) -> ExactValue:
    """``(4 pi)^{-(m-1)/2} (1/4) Tr(chi) vol(dM)``."""
    _check_degree(model, p)
    total = ExactValue(0)
    for comp in model.boundary:
        tr_chi = build_fiber_operators(model.m, p, bc, comp.L).chi.trace()
        total = total + tr_chi * comp.volume
    return four_pi_power(1 - model.m) * Fraction(1, 4) * total


def a2(model: ModelManifold, p: int, bc: str) -> ExactValue:
    """``(4 pi)^{-m/2} (1/6) {Tr(6E + tau)[M] + Tr(2 L_aa + 12 S)[dM]}``."""
    _check_degree(model, p)
    m = model.m
    tau = model.tau.as_fraction()
    E = _weitzenbock(model)
    boundary = ExactValue(0)
    degree = None
    for comp in model.boundary:
        ops = build_fiber_operators(m, p, bc, comp.L)
        degree = ops.fiber_degree
        dim = len(ops.basis)
        integrand = 2 * comp.L.mean_curvature * dim + 12 * ops.S.trace()
        boundary = boundary + integrand * comp.volume
    if degree is None:
        degree = p
    interior = comb(m, p) * (6 * E.scalar(m, degree) + tau) * model.vol_M
    return four_pi_power(-m) * Fraction(1, 6) * (interior + boundary)


def a3(model: ModelManifold, p: int, bc: str) -> ExactValue:
    """``(4 pi)^{-(m-1)/2} (1/384) Tr{...}[dM]`` with the full order-3 bracket."""
    _check_degree(model, p)
    m = model.m
    tau = model.tau.as_fraction()
    rho = model.rho_mm.as_fraction()
    E = _weitzenbock(model)
    total = ExactValue(0)
    for comp in model.boundary:
        total = total + a3_bracket_trace(m, p, bc, comp.L, tau, rho, E) * comp.volume
    return four_pi_power(1 - m) * Fraction(1, 384) * total


def heat_coefficients(model: ModelManifold, p: int, bc: str) -> HeatCoefficientSet:
    bc = normalize_bc(bc)
    return HeatCoefficientSet(
        model.name, model.m, p, bc, (a0(model, p), a1(model, p, bc), a2(model, p, bc), a3(model, p, bc))
    )


def star_bracket(m: int, p: int, bc: str, tau) -> Fraction:
    """The L-independent part of the order-3 bracket (the terms written as stars).

    ``Tr{96 chi E + 16 chi tau - 8 chi rho_mm}`` with ``rho_mm = tau/m``.
    """
    tau = Fraction(tau)
    return a3_bracket_trace(
        m, p, bc, SecondFundamentalForm.zero(m), tau, tau / m, Weitzenbock("einstein", tau)
    )


def a3_section4_form(model: ModelManifold, pair: str) -> Tuple[ExactValue, ExactValue]:
    """a_3 of both pair members from ``star * vol(dM) + alpha I1 + beta I2``.

    The result is checked for exact equality against :func:`a3`.
    """
    pair = normalize_pair(pair)
    m = model.m
    tau = model.tau.as_fraction()
    inv = model.invariants()
    out = []
    for p, bc in PAIRS[pair]:
        star = star_bracket(m, p, bc, tau) * model.vol_dM
        if m >= 2:
            alpha, beta = extract_quadratic_coefficients(m, p, bc)
            quadratic = alpha * inv.I1 + beta * inv.I2
        else:
            quadratic = ExactValue(0)
        value = four_pi_power(1 - m) * Fraction(1, 384) * (star + quadratic)
        general = a3(model, p, bc)
        if value != general:
            raise SectionFourMismatch(
                f"{model.name} {pair} p={p} {bc}: specialised {value} != general {general}"
            )
        out.append(value)
    return out[0], out[1]
