"""Exact spectra of the catalog models and certified truncated heat traces.

Every list carries a Weyl constant ``W`` with ``N(lam) <= W (lam^{m/2} + 1)``
for *all* ``lam`` (``N`` counts eigenvalues with multiplicity), derived per
model below. Integrating by parts, the discarded part of the heat trace obeys

    sum_{lam_j > Lam} exp(-lam_j t) <= t * int_Lam^inf N(lam) exp(-lam t) dlam
                                    <= W * (Gamma(m/2 + 1, Lam t) / t^{m/2} + exp(-Lam t)),

which is what :func:`heat_trace` reports as ``tail_bound``.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
from scipy.special import gamma, gammaincc, jv, jvp

from .exterior import normalize_bc
from .geometry import ModelManifold

__all__ = [
    "EigenvalueList",
    "HeatTraceSample",
    "SpectrumError",
    "TailBoundError",
    "bessel_zeros_below",
    "cylinder_spectrum",
    "disk_spectrum",
    "heat_trace",
    "heat_trace_samples",
    "hemisphere_spectrum",
    "interval_spectrum",
    "one_form_spectrum_2d",
    "spectrum",
]

#: relative gap below which two computed eigenvalues are the same eigenvalue
MERGE_RTOL = 1e-11


class SpectrumError(ValueError):
    pass


class TailBoundError(ArithmeticError):
    """The truncation certificate is too weak for the requested ``t``."""


@dataclass(frozen=True, eq=False)
class EigenvalueList:
    lambdas: np.ndarray
    multiplicities: np.ndarray
    lambda_max: float
    m: int
    weyl_constant: float
    model: str = "external"
    p: int = 0
    bc: str = "unknown"
    certified: bool = True

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        mult = np.asarray(self.multiplicities, dtype=np.int64)
        if lam.shape != mult.shape or lam.ndim != 1:
            raise SpectrumError("eigenvalues and multiplicities must be 1-d and of equal length")
        if lam.size and (np.any(np.diff(lam) <= 0) or lam[0] < 0):
            raise SpectrumError("eigenvalues must be nonnegative and strictly increasing")
        if np.any(mult <= 0):
            raise SpectrumError("multiplicities must be positive")
        lam.setflags(write=False)
        mult.setflags(write=False)
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "multiplicities", mult)

    def __len__(self):
        return int(self.lambdas.size)

    @property
    def entries(self) -> List[Tuple[float, int]]:
        return list(zip(self.lambdas.tolist(), self.multiplicities.tolist()))

    def count(self, below: Optional[float] = None) -> int:
        """Eigenvalues ``<= below`` counted with multiplicity."""
        if below is None:
            return int(self.multiplicities.sum())
        k = np.searchsorted(self.lambdas, below, side="right")
        return int(self.multiplicities[:k].sum())

    def zero_modes(self) -> int:
        if self.lambdas.size and self.lambdas[0] == 0.0:
            return int(self.multiplicities[0])
        return 0

    # CSV exchange ------------------------------------------------------
    def to_csv(self) -> str:
        return "".join(f"{lam:.15g},{k}\n" for lam, k in self.entries)

    def write_csv(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")

    @classmethod
    def from_csv(
        cls,
        source: Union[str, Path, io.TextIOBase],
        m: int,
        lambda_max: Optional[float] = None,
        weyl_constant: Optional[float] = None,
        p: int = 0,
        bc: str = "unknown",
        model: str = "external",
    ) -> "EigenvalueList":
        """Read ``lambda,multiplicity`` lines; ``#`` comments and a header are skipped.

        Without an explicit ``weyl_constant`` one is estimated as twice the
        empirical maximum of ``N(lam) / (lam^{m/2} + 1)``; such lists are
        flagged ``certified=False``.
        """
        if isinstance(source, Path) or (isinstance(source, str) and Path(source).exists()):
            text = Path(source).read_text(encoding="utf-8")
        elif isinstance(source, str):
            text = source
        else:
            text = source.read()
        pairs: Dict[float, int] = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            a, _, b = line.partition(",")
            try:
                lam, mult = float(a), int(b or 1)
            except ValueError:
                if not pairs:  # header line
                    continue
                raise SpectrumError(f"bad spectrum line {line!r}") from None
            pairs[lam] = pairs.get(lam, 0) + mult
        lams = np.array(sorted(pairs))
        mults = np.array([pairs[x] for x in lams], dtype=np.int64)
        lam_max = float(lambda_max) if lambda_max is not None else (float(lams[-1]) if lams.size else 0.0)
        certified = weyl_constant is not None
        if weyl_constant is None:
            counts = np.cumsum(mults)
            weyl_constant = 2.0 * float(np.max(counts / (lams ** (m / 2) + 1.0))) if lams.size else 1.0
        return cls(lams, mults, lam_max, m, float(weyl_constant), model, p, bc, certified)


@dataclass(frozen=True)
class HeatTraceSample:
    t: float
    theta: float
    tail_bound: float


def _merge(lams: np.ndarray, mults: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    order = np.argsort(lams, kind="stable")
    lams, mults = lams[order], mults[order]
    out_l: List[float] = []
    out_m: List[int] = []
    for lam, k in zip(lams.tolist(), mults.tolist()):
        if out_l and lam - out_l[-1] <= MERGE_RTOL * max(lam, 1.0):
            out_m[-1] += k
        else:
            out_l.append(lam)
            out_m.append(k)
    return np.array(out_l, dtype=float), np.array(out_m, dtype=np.int64)


def _check_lambda_max(lambda_max: float) -> float:
    lambda_max = float(lambda_max)
    if not lambda_max > 0:
        raise SpectrumError("lambda_max must be positive")
    return lambda_max


def _scalar_bc(bc: str) -> str:
    # on functions absolute = Neumann and relative = Dirichlet
    bc = normalize_bc(bc)
    return {"absolute": "neumann", "relative": "dirichlet"}.get(bc, bc)


# --------------------------------------------------------------------------
# interval
# --------------------------------------------------------------------------


def _interval_weyl(length: float) -> float:
    # N(lam) <= length sqrt(lam)/pi + 1
    return max(length / math.pi, 1.0)


def interval_spectrum(length: float, bc: str, lambda_max: float) -> EigenvalueList:
    """``(k pi / length)^2``, ``k >= 1`` (Dirichlet) or ``k >= 0`` (Neumann)."""
    length = float(length)
    if length <= 0:
        raise SpectrumError("length must be positive")
    lambda_max = _check_lambda_max(lambda_max)
    sbc = _scalar_bc(bc)
    k_max = int(math.floor(length * math.sqrt(lambda_max) / math.pi))
    k = np.arange(0 if sbc == "neumann" else 1, k_max + 1, dtype=float)
    lams = (k * math.pi / length) ** 2
    keep = lams <= lambda_max
    return EigenvalueList(
        lams[keep], np.ones(int(keep.sum()), dtype=np.int64), lambda_max, 1, _interval_weyl(length),
        "interval", 0, normalize_bc(bc),
    )


# --------------------------------------------------------------------------
# disk: Bessel zeros
# --------------------------------------------------------------------------


def _bisect(f, a: np.ndarray, b: np.ndarray, rtol: float = 1e-15) -> np.ndarray:
    """Vectorised bisection; every bracket ``[a, b]`` must hold a sign change."""
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    if a.size == 0:
        return a
    fa = f(a)
    fb = f(b)
    if np.any(np.sign(fa) * np.sign(fb) > 0):
        raise SpectrumError("bracket without sign change in Bessel zero search")
    for _ in range(200):
        if np.all(b - a <= rtol * np.abs(b)):
            break
        c = 0.5 * (a + b)
        fc = f(c)
        left = np.sign(fc) == np.sign(fa)
        a = np.where(left, c, a)
        fa = np.where(left, fc, fa)
        b = np.where(left, b, c)
    return 0.5 * (a + b)


def _extend_zeros(n: int, zeros: np.ndarray, x_max: float, step: float = 0.5) -> np.ndarray:
    """Append zeros of J_n by forward scanning until one exceeds ``x_max``."""
    f = lambda x: jv(n, x)
    found = list(zeros)
    x = found[-1] + 1e-9 if found else max(float(n), 1e-3)
    while not found or found[-1] <= x_max:
        x1 = x + step  # zero spacing of J_n exceeds 2 > step
        if np.sign(f(x1)) != np.sign(f(x)):
            found.append(float(_bisect(f, np.array([x]), np.array([x1]))[0]))
        x = x1
    return np.array(found)


def bessel_zeros_below(x_max: float, derivative: bool = False) -> Dict[int, np.ndarray]:
    """Positive zeros of ``J_n`` (or ``J_n'``) not exceeding ``x_max``, for every order n.

    Zeros of J_{n+1} are bracketed by consecutive zeros of J_n
    (``j_{n,k} < j_{n+1,k} < j_{n,k+1}``); one zero beyond ``x_max`` is carried
    so the top bracket exists. Zeros of J_n' interlace as
    ``n <= j'_{n,1} < j_{n,1} < j'_{n,2} < ...``; for n = 0 the root at the
    origin is left out.
    """
    out: Dict[int, np.ndarray] = {}
    zeros = _extend_zeros(0, np.array([]), x_max)
    n = 0
    while n <= x_max:
        if derivative:
            if n == 0:
                a, b = zeros[:-1], zeros[1:]
            else:
                a = np.concatenate([[float(n)], zeros[:-1]])
                b = zeros
            d = _bisect(lambda x, n=n: jvp(n, x), a, b)
            sel = d[d <= x_max]
        else:
            sel = zeros[zeros <= x_max]
        if sel.size:
            out[n] = sel
        n += 1
        zeros = _bisect(lambda x, n=n: jv(n, x), zeros[:-1], zeros[1:])
        zeros = _extend_zeros(n, zeros, x_max)
    return out


def _disk_weyl(radius: float, neumann: bool) -> float:
    # j_{n,k} > j_{0,k} > (k - 1/4) pi and j_{n,1} > n give, with X = R sqrt(lam),
    #   N_D <= (2X + 1)(X/pi + 1/4),  N_N <= 1 + (2X + 1)(X/pi + 5/4);
    # then X <= (X^2 + 1)/2 turns c0 + c1 X + c2 X^2 into W (lam + 1).
    c = 1.25 if neumann else 0.25
    quad = 2.0 / math.pi
    lin = 2.0 * c + 1.0 / math.pi
    const = c + (1.0 if neumann else 0.0)
    a = (quad + lin / 2.0) * radius * radius
    b = const + lin / 2.0
    return max(a, b)


def disk_spectrum(radius: float, bc: str, lambda_max: float) -> EigenvalueList:
    """Disk of radius R: ``(j_{n,k}/R)^2`` (Dirichlet) or ``(j'_{n,k}/R)^2`` plus 0 (Neumann).

    Orders n >= 1 have multiplicity 2 (cos and sin).
    """
    radius = float(radius)
    if radius <= 0:
        raise SpectrumError("radius must be positive")
    lambda_max = _check_lambda_max(lambda_max)
    sbc = _scalar_bc(bc)
    neumann = sbc == "neumann"
    zeros = bessel_zeros_below(radius * math.sqrt(lambda_max), derivative=neumann)
    lams = [np.array([0.0])] if neumann else []
    mults = [np.array([1])] if neumann else []
    for n, z in zeros.items():
        lams.append((z / radius) ** 2)
        mults.append(np.full(z.size, 1 if n == 0 else 2))
    lam, mult = _merge(np.concatenate(lams), np.concatenate(mults))
    keep = lam <= lambda_max
    return EigenvalueList(
        lam[keep], mult[keep], lambda_max, 2, _disk_weyl(radius, neumann), "disk", 0, normalize_bc(bc)
    )


# --------------------------------------------------------------------------
# hemisphere and cylinder
# --------------------------------------------------------------------------


def hemisphere_spectrum(bc: str, lambda_max: float) -> EigenvalueList:
    """Unit hemisphere: ``l(l+1)`` with multiplicity l (Dirichlet) or l+1 (Neumann).

    Harmonics Y_l^k have parity (-1)^{l+k} under the equatorial reflection;
    the odd ones vanish on the equator and the even ones have zero normal
    derivative there.
    """
    lambda_max = _check_lambda_max(lambda_max)
    sbc = _scalar_bc(bc)
    l_max = int(math.floor((-1 + math.sqrt(1 + 4 * lambda_max)) / 2))
    while (l_max + 1) * (l_max + 2) <= lambda_max:
        l_max += 1
    while l_max * (l_max + 1) > lambda_max:
        l_max -= 1
    if sbc == "dirichlet":
        l = np.arange(1, l_max + 1)
        mult = l
    else:
        l = np.arange(0, l_max + 1)
        mult = l + 1
    # N(lam) <= (sqrt(lam)+1)(sqrt(lam)+2)/2 <= 1.25 lam + 1.75
    return EigenvalueList(
        (l * (l + 1)).astype(float), mult.astype(np.int64), lambda_max, 2, 1.75, "hemisphere", 0,
        normalize_bc(bc),
    )


def _cylinder_weyl(height: float, radius: float) -> float:
    # N(lam) <= (H sqrt(lam)/pi + 1)(2 R sqrt(lam) + 1), then sqrt(lam) <= (lam + 1)/2
    quad = 2 * radius * height / math.pi
    lin = height / math.pi + 2 * radius
    return max(quad + lin / 2, lin / 2 + 1)


def cylinder_spectrum(height: float, radius: float, bc: str, lambda_max: float) -> EigenvalueList:
    """``(k pi/H)^2 + (n/R)^2``; k >= 1 (Dirichlet) or k >= 0 (Neumann), n in Z."""
    height, radius = float(height), float(radius)
    if height <= 0 or radius <= 0:
        raise SpectrumError("height and radius must be positive")
    lambda_max = _check_lambda_max(lambda_max)
    sbc = _scalar_bc(bc)
    k = np.arange(0 if sbc == "neumann" else 1, int(height * math.sqrt(lambda_max) / math.pi) + 1)
    n = np.arange(0, int(radius * math.sqrt(lambda_max)) + 1)
    axial = (k * math.pi / height) ** 2
    ring = (n / radius) ** 2
    lam = (axial[:, None] + ring[None, :]).ravel()
    mult = np.broadcast_to(np.where(n == 0, 1, 2)[None, :], (k.size, n.size)).ravel()
    keep = lam <= lambda_max
    lam, mult = _merge(lam[keep], mult[keep].astype(np.int64))
    return EigenvalueList(
        lam, mult, lambda_max, 2, _cylinder_weyl(height, radius), "cylinder", 0, normalize_bc(bc)
    )


# --------------------------------------------------------------------------
# 1-forms on surfaces
# --------------------------------------------------------------------------


def _scalar_spectrum(model: ModelManifold, bc: str, lambda_max: float) -> EigenvalueList:
    name = model.name
    if name == "interval":
        return interval_spectrum(model.param("length"), bc, lambda_max)
    if name == "disk":
        return disk_spectrum(model.param("radius"), bc, lambda_max)
    if name == "cylinder":
        return cylinder_spectrum(model.param("height"), model.param("radius"), bc, lambda_max)
    if name == "hemisphere":
        return hemisphere_spectrum(bc, lambda_max)
    raise SpectrumError(f"no exact spectrum for model {name!r}")


def one_form_spectrum_2d(
    model: ModelManifold,
    bc: str,
    lambda_max: float,
    neumann: Optional[EigenvalueList] = None,
    dirichlet: Optional[EigenvalueList] = None,
) -> EigenvalueList:
    """Absolute (or relative) 1-form spectrum of a surface from its scalar spectra.

    Hodge decomposition ``w = df + *dg + h`` with f Neumann, g Dirichlet and h
    harmonic gives ``spec = (spec_N minus one zero) + spec_D + {0 x b1}``. On a
    surface the Hodge star maps relative 1-forms to absolute ones, so both
    conditions share this list. Precomputed scalar lists may be passed in.
    """
    bc = normalize_bc(bc)
    if bc not in ("absolute", "relative"):
        raise SpectrumError("1-form spectra are available for absolute and relative conditions")
    if model.m != 2:
        raise SpectrumError("the Hodge construction is implemented for surfaces only")
    lambda_max = _check_lambda_max(lambda_max)
    N = neumann if neumann is not None else _scalar_spectrum(model, "neumann", lambda_max)
    D = dirichlet if dirichlet is not None else _scalar_spectrum(model, "dirichlet", lambda_max)
    n_lam, n_mult = N.lambdas.copy(), N.multiplicities.copy()
    if n_lam.size and n_lam[0] == 0.0:
        n_mult[0] -= 1
    parts_l = [n_lam, D.lambdas]
    parts_m = [n_mult, D.multiplicities]
    if model.b1:
        parts_l.append(np.array([0.0]))
        parts_m.append(np.array([model.b1]))
    lam = np.concatenate(parts_l)
    mult = np.concatenate(parts_m).astype(np.int64)
    keep = (mult > 0) & (lam <= lambda_max)
    lam, mult = _merge(lam[keep], mult[keep])
    return EigenvalueList(
        lam, mult, lambda_max, 2, N.weyl_constant + D.weyl_constant + model.b1, model.name, 1, bc,
    )


def spectrum(model: ModelManifold, p: int, bc: str, lambda_max: float) -> EigenvalueList:
    """Spectrum of ``Delta_p`` on a catalog model; p = 0, or p = 1 on surfaces."""
    bc = normalize_bc(bc)
    if p == 0:
        out = _scalar_spectrum(model, bc, lambda_max)
        return EigenvalueList(
            out.lambdas, out.multiplicities, out.lambda_max, out.m, out.weyl_constant, model.name, 0, bc
        )
    if p == 1 and model.m == 2:
        return one_form_spectrum_2d(model, bc, lambda_max)
    raise SpectrumError(f"no exact spectrum for p={p} on {model.name}")


# --------------------------------------------------------------------------
# heat trace
# --------------------------------------------------------------------------


def tail_bound(spec: EigenvalueList, t: float) -> float:
    m = spec.m
    s = m / 2 + 1
    x = spec.lambda_max * t
    upper_gamma = gammaincc(s, x) * gamma(s)
    return float(spec.weyl_constant * (upper_gamma / t ** (m / 2) + math.exp(-x)))


def heat_trace(spec: EigenvalueList, t: float, max_relative_tail: float = 1e-3) -> HeatTraceSample:
    """``sum mult * exp(-lam t)`` with its truncation certificate.

    Raises :class:`TailBoundError` when the bound exceeds
    ``max_relative_tail * theta``.
    """
    t = float(t)
    if not t > 0:
        raise ValueError("t must be positive")
    theta = float(np.dot(spec.multiplicities, np.exp(-spec.lambdas * t)))
    bound = tail_bound(spec, t)
    if bound > max_relative_tail * theta:
        raise TailBoundError(
            f"tail bound {bound:.3g} exceeds {max_relative_tail:g} * theta at t={t:g}; "
            f"raise lambda_max (now {spec.lambda_max:g}) or increase t"
        )
    return HeatTraceSample(t, theta, bound)


def heat_trace_samples(
    spec: EigenvalueList, t_grid: Iterable[float], max_relative_tail: float = 1e-3
) -> List[HeatTraceSample]:
    return [heat_trace(spec, t, max_relative_tail) for t in t_grid]
