import json
import math
from fractions import Fraction

import pytest

from heatspec.coefficients import heat_coefficients
from heatspec.discriminator import (
    HypothesisViolation,
    InconsistentDataError,
    SpectralDataset,
    classify_from_spectra,
    compare_manifolds,
    dataset_from_coefficient_sets,
    dataset_from_fits,
    dataset_from_model,
    recover_invariants,
)
from heatspec.exact import ExactValue
from heatspec.exterior import PAIRS
from heatspec.fitting import fit_spectrum
from heatspec.geometry import catalog, classify_boundary, cylinder, disk, hemisphere, interval
from heatspec.verify import cached_spectrum

MODELS = catalog() + [disk(2), disk(Fraction(1, 3))]


# 1-forms on the interval are outside the catalog
ROUND_TRIPS = [(mdl, pair) for mdl in MODELS for pair in sorted(PAIRS) if mdl.m >= 2 or pair == "dirichlet+neumann"]


@pytest.mark.parametrize(
    "model,pair", ROUND_TRIPS, ids=[f"{m.name}{m.parameters_text()}-{p}" for m, p in ROUND_TRIPS]
)
def test_exact_round_trip(model, pair):
    r = recover_invariants(dataset_from_model(model, pair))
    truth = model.invariants()
    assert (r.I0, r.I1, r.I2, r.vol_dM) == (truth.I0, truth.I1, truth.I2, truth.vol_dM)
    assert r.vol_M == model.vol_M
    assert r.classification == classify_boundary(truth)
    if model.m < 2:
        assert r.determinant == 0  # no tangential directions, nothing to solve
        return
    assert r.determinant == {"dirichlet+neumann": -144, "absolute_01": 1584, "relative_01": -432}[pair]


@pytest.mark.parametrize("R", [Fraction(1, 4), Fraction(1, 2), 1, 3])
def test_disk_scale_equivariance(R):
    c = recover_invariants(dataset_from_model(disk(R), "dn")).classification
    assert c.strongly_totally_umbillic and c.totally_umbillic
    assert not c.minimal and not c.totally_geodesic
    assert c.mu == ExactValue(1 / Fraction(R))


def test_known_flags():
    for model in (hemisphere(), cylinder()):
        c = recover_invariants(dataset_from_model(model, "abs")).classification
        assert c.totally_geodesic and c.minimal


def test_tau_refusal():
    with pytest.raises(HypothesisViolation, match="tau"):
        compare_manifolds(dataset_from_model(hemisphere(), "dn"), dataset_from_model(disk(1), "dn"))
    with pytest.raises(HypothesisViolation):
        compare_manifolds(dataset_from_model(disk(1), "dn"), dataset_from_model(disk(1), "abs"))
    with pytest.raises(HypothesisViolation):
        compare_manifolds(dataset_from_model(interval(), "dn"), dataset_from_model(disk(1), "dn"))


def test_cylinder_vs_disk_exact():
    rep = compare_manifolds(dataset_from_model(cylinder(), "dn"), dataset_from_model(disk(1), "dn"))
    two_pi = ExactValue(2, 2)
    assert rep.delta["I1"] == two_pi and rep.delta["I2"] == two_pi
    assert rep.delta["I0"] == two_pi
    holds = {t.name: t.holds for t in rep.transfers}
    assert holds == {
        "totally_geodesic": False,
        "minimal": False,
        "totally_umbillic": True,
        "strongly_totally_umbillic": True,
    }
    assert not rep.all_hold
    assert json.loads(rep.dumps())["delta"]["I1"]["float"] == pytest.approx(2 * math.pi)


def test_same_manifold_transfers_everything():
    a = dataset_from_model(disk(1), "rel")
    assert compare_manifolds(a, a).all_hold


def test_dataset_json_round_trip():
    ds = dataset_from_model(disk(Fraction(1, 2)), "abs")
    assert SpectralDataset.from_json(json.loads(json.dumps(ds.to_json()))) == ds
    f = SpectralDataset(2, 0, "dn", ((0.25, -0.44, 0.16, 0.01), (0.25, 0.44, 0.16, 0.07)), "fitted")
    assert SpectralDataset.from_json(f.to_json()) == f


def test_coefficient_sets_pair_order():
    sets = [heat_coefficients(disk(1), 0, "dirichlet"), heat_coefficients(disk(1), 0, "neumann")]
    ds = dataset_from_coefficient_sets(sets, "dn", 0)
    assert recover_invariants(ds).classification.mu == ExactValue(1)
    with pytest.raises(ValueError, match="expects"):
        dataset_from_coefficient_sets(sets[::-1], "dn", 0)
    # absolute on functions is Neumann
    abs_sets = [heat_coefficients(disk(1), 0, "absolute"), heat_coefficients(disk(1), 1, "absolute")]
    dataset_from_coefficient_sets(abs_sets, "abs", 0)


def test_inconsistent_data():
    a = list(dataset_from_model(disk(1), "dn").coefficients)
    bad = (a[0], (a[1][0] * ExactValue(2),) + a[1][1:])
    with pytest.raises(InconsistentDataError, match="vol"):
        recover_invariants(SpectralDataset(2, 0, "dn", bad, "exact"))
    with pytest.raises(TypeError):
        SpectralDataset(2, 0, "dn", ((0.1,) * 4, (0.1,) * 4), "exact")


@pytest.mark.parametrize(
    "model,pair",
    [(hemisphere(), "dn"), (cylinder(), "dn"), (disk(1), "dn"), (disk(1), "abs"), (disk(1), "rel")],
    ids=lambda x: getattr(x, "name", x),
)
def test_fitted_classification_agrees(model, pair, lambda_max):
    specs = [cached_spectrum(model, p, bc, lambda_max) for p, bc in PAIRS[{"dn": "dirichlet+neumann", "abs": "absolute_01", "rel": "relative_01"}[pair]]]
    r = classify_from_spectra(specs, pair, model.m, model.tau.as_fraction())
    exact = recover_invariants(dataset_from_model(model, pair)).classification
    assert r.classification.flags() == exact.flags()
    assert r.provenance == "fitted"
    assert abs(float(r.vol_dM) - float(model.vol_dM)) <= 1e-3 * float(model.vol_dM)
    if exact.mu is not None and exact.mu != 0:
        assert abs(float(r.classification.mu) - float(exact.mu)) <= 2e-2


def test_fitted_cylinder_vs_disk(lambda_max):
    sets = []
    for model in (cylinder(), disk(1)):
        fits = [fit_spectrum(cached_spectrum(model, p, bc, lambda_max)) for p, bc in PAIRS["dirichlet+neumann"]]
        sets.append(dataset_from_fits(fits, "dn", 0, model.name))
    rep = compare_manifolds(*sets)
    for k in ("I1", "I2"):
        assert rep.delta[k] == pytest.approx(2 * math.pi, rel=2e-2)
