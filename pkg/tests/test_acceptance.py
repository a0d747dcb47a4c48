"""The nine acceptance criteria, each at its stated tolerance.

Every test prints one ``PASS criterion N`` or ``FAIL criterion N`` line. Run
``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""
import math
import sys
import time
from fractions import Fraction

import pytest

from heatspec.coefficients import heat_coefficients
from heatspec.discriminator import classify_from_spectra, dataset_from_model, recover_invariants
from heatspec.exact import ExactValue
from heatspec.exterior import PAIRS
from heatspec.fitting import compare, fit_spectrum
from heatspec.geometry import disk, hemisphere
from heatspec.spectra import disk_spectrum
from heatspec.verify import (
    cached_spectrum,
    suite_classify_exact,
    suite_gating,
    suite_matrices,
    suite_oracle,
    suite_pair_forms,
    suite_traces,
)

LAMBDA_MAX = 4e4
SQRT_PI = math.sqrt(math.pi)


def report(capsys, n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return ok


def criterion_1():
    t0 = time.perf_counter()
    res = suite_traces(range(2, 9), seed=0)
    dt = time.perf_counter() - t0
    n_ids = sum(int(c.detail.split()[0]) for c in res.checks if c.passed)
    return res.passed and dt < 5, f"trace tables m=2..8, {n_ids} identities exact, {dt:.2f} s"


def criterion_2():
    t0 = time.perf_counter()
    res = suite_matrices(range(2, 17))
    dt = time.perf_counter() - t0
    return res.passed, f"{len(res.checks)} determinants (-144, 1584, -432) for m=2..16, {dt:.2f} s"


def criterion_3():
    res = suite_pair_forms()
    return res.passed, f"{len(res.checks)} model/pair specializations equal"


def criterion_4():
    t0 = time.perf_counter()
    spec = disk_spectrum(1, "dirichlet", LAMBDA_MAX)
    res = fit_spectrum(spec)
    dt = time.perf_counter() - t0
    rep = compare(res, heat_coefficients(disk(1), 0, "dirichlet"), (1e-4, 1e-4, 1e-3, 1e-2))
    errs = ", ".join(f"a{c.n} {c.error:.1e}" for c in rep.checks)
    return rep.passed and dt < 60, f"disk Dirichlet rel errors {errs}; {dt:.1f} s"


def criterion_5():
    h = hemisphere()
    errs = []
    ok = True
    for bc, sign in (("dirichlet", -1), ("neumann", 1)):
        res = fit_spectrum(cached_spectrum(h, 0, bc, LAMBDA_MAX))
        want = sign * SQRT_PI / 16
        rel = abs(res.a_hat[3] - want) / abs(want)
        ok &= rel <= 1e-2
        errs.append(f"{bc} a3 rel {rel:.1e}")
    specs = [cached_spectrum(h, p, bc, LAMBDA_MAX) for p, bc in PAIRS["dirichlet+neumann"]]
    r = classify_from_spectra(specs, "dn", 2, Fraction(2), tol=1e-2)
    ok &= r.classification.totally_geodesic
    return ok, ", ".join(errs) + f"; fitted pair totally geodesic: {r.classification.totally_geodesic}"


def criterion_6():
    d = disk(1)
    f1 = fit_spectrum(cached_spectrum(d, 1, "absolute", LAMBDA_MAX))
    fD = fit_spectrum(cached_spectrum(d, 0, "dirichlet", LAMBDA_MAX))
    fN = fit_spectrum(cached_spectrum(d, 0, "neumann", LAMBDA_MAX))
    closed = float(heat_coefficients(d, 1, "absolute").a[3])
    rel = abs(f1.a_hat[3] - closed) / abs(closed)
    gap = abs(f1.a_hat[3] - fD.a_hat[3] - fN.a_hat[3])
    budget = f1.a_err[3] + fD.a_err[3] + fN.a_err[3]
    ok = rel <= 1e-2 and gap <= budget
    return ok, f"1-form a3 rel {rel:.1e} vs closed form; |gap| {gap:.1e} <= fit error {budget:.1e}"


def criterion_7():
    checks = suite_classify_exact()
    ok = all(c.passed for c in checks)
    ok &= all(
        recover_invariants(dataset_from_model(disk(R), "dn")).classification.mu == ExactValue(1 / Fraction(R))
        for R in (Fraction(1, 2), 1, 2)
    )
    return ok, f"{len(checks)} model/pair round trips exact, disk mu = 1/R for R in 1/2, 1, 2"


def criterion_8():
    t0 = time.perf_counter()
    res = suite_oracle(10_000, seed=0, max_size=4)
    dt = time.perf_counter() - t0
    return res.passed and dt < 10, f"{res.checks[0].detail}, {dt:.2f} s"


def criterion_9():
    res = suite_gating(LAMBDA_MAX)
    detail = "; ".join(c.detail for c in res.checks)
    return res.passed, detail


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("n", range(1, 10))
def test_criterion(n, capsys):
    ok, detail = CRITERIA[n - 1]()
    assert report(capsys, n, ok, detail), detail


if __name__ == "__main__":
    results = [report(None, n, *CRITERIA[n - 1]()) for n in range(1, 10)]
    sys.exit(0 if all(results) else 1)
