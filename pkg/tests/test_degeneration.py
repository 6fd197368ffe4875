from fractions import Fraction

import numpy as np
import pytest

from oklab.degeneration import (
    CertificateFailure,
    Cutoff,
    DegenerationRun,
    RescaledField,
    SeparationError,
    audited_constant,
    degeneration_error,
    gluing_certificate,
    rescale_basis,
    rescaled_terms,
    shrink_box,
)
from oklab.errors import InputError
from oklab.moment import Box, MomentModel, potential
from oklab.order import LEX
from oklab.sections import LeadingSet, ModelSpec, PolySection, conic_flag, leading_set

F = Fraction
z1, z2 = PolySection.variable(2, 0), PolySection.variable(2, 1)


@pytest.fixture(scope="module")
def conic():
    return leading_set(ModelSpec.projective_space(2, 2, flag=conic_flag()), 1)


@pytest.fixture(scope="module")
def toric():
    return leading_set(ModelSpec.projective_space(2, 2), 1)


def test_single_section_example():
    basis = LeadingSet(1, ((0, 1),), (z2 + z1 * z1,), LEX)
    run = DegenerationRun(basis, (4, 1), F(1, 3))
    (r,) = rescaled_terms(run)
    assert [(t.exponent, t.tau_power) for t in r.corrections] == [((2, 0), 7)]
    assert rescale_basis(run) == [z2 + z1 * z1 * F(1, 3**7)]


def test_monomial_basis_is_fixed(toric):
    run = DegenerationRun.for_basis(toric, F(1, 2))
    assert rescale_basis(run) == [PolySection.monomial(a) for a in toric.exponents]
    assert degeneration_error(run) == 0
    assert audited_constant(run) == 0


def test_conic_exponent_audit(conic):
    run = DegenerationRun.for_basis(conic, F(1, 2))
    for r in rescaled_terms(run):
        assert all(t.tau_power >= 1 for t in r.corrections)
    for a, s in zip(conic.exponents, rescale_basis(run)):
        assert s.terms[a] == 1


def test_rescaling_matches_substitution(conic):
    run = DegenerationRun.for_basis(conic, F(1, 3))
    tau = run.tau
    for a, s, r in zip(conic.exponents, conic.distinguished, rescale_basis(run)):
        scaled = [PolySection.monomial((1, 0), tau ** run.gamma[0]), PolySection.monomial((0, 1), tau ** run.gamma[1])]
        dot = sum(x * g for x, g in zip(a, run.gamma))
        assert s.substitute(scaled) * (1 / tau**dot) == r


def test_bad_weight_is_reported(conic):
    with pytest.raises(SeparationError) as info:
        rescaled_terms(DegenerationRun(conic, (1, 1), F(1, 2)))
    assert info.value.certificate["gamma"] == (1, 1)


def test_run_invariants(conic):
    with pytest.raises(InputError):
        DegenerationRun(conic, (10, 1), F(1))
    with pytest.raises(InputError):
        DegenerationRun(conic, (10, 1, 1), F(1, 2))


def test_error_bound_dominates_samples(conic):
    rng = np.random.default_rng(0)
    run = DegenerationRun.for_basis(conic, F(1, 4))
    z = rng.uniform(-1, 1, size=(1000, 2)) + 1j * rng.uniform(-1, 1, size=(1000, 2))
    z = z / np.maximum(1, np.abs(z))
    sampled = max(
        float(np.abs(r.evaluate(z) - PolySection.monomial(a).evaluate(z)).max())
        for a, r in zip(conic.exponents, rescale_basis(run))
    )
    assert 0 < sampled <= degeneration_error(run) <= audited_constant(run) * float(run.tau)


def test_error_decreases_with_tau(conic):
    gamma = DegenerationRun.for_basis(conic, F(1, 2)).gamma
    errs = [degeneration_error(DegenerationRun(conic, gamma, F(1, 2**j))) for j in range(1, 11)]
    assert all(b <= a for a, b in zip(errs, errs[1:]))


def test_envelopes_bracket_phases(conic):
    run = DegenerationRun.for_basis(conic, F(1, 2))
    field = RescaledField(rescaled_terms(run), 0.5)
    rng = np.random.default_rng(1)
    x = rng.uniform(-1, 1, size=(200, 2))
    lo, hi = field.envelopes(x)
    sections = rescale_basis(run)
    for _ in range(5):
        theta = rng.uniform(0, 2 * np.pi, size=(200, 2))
        z = np.exp(x / 2 + 1j * theta)
        psi = np.log(sum(np.abs(s.evaluate(z)) ** 2 for s in sections))
        assert np.all(lo <= psi + 1e-12) and np.all(psi <= hi + 1e-12)


def test_toric_envelopes_are_the_toric_potential(toric):
    run = DegenerationRun.for_basis(toric, F(1, 2))
    field = RescaledField(rescaled_terms(run), 0.5)
    x = np.random.default_rng(2).uniform(-2, 2, size=(50, 2))
    lo, hi = field.envelopes(x)
    expected = potential(MomentModel(toric.exponents), x)
    np.testing.assert_allclose(lo, expected, rtol=1e-13)
    np.testing.assert_allclose(hi, expected, rtol=1e-13)


def test_slice_levi_form_matches_differences(conic):
    run = DegenerationRun.for_basis(conic, F(1, 2))
    field = RescaledField(rescaled_terms(run), 0.5)
    x = np.random.default_rng(3).uniform(-1, 1, size=(20, 2))
    _, grad, levi = field.slice_value(x)
    h = 1e-5
    fd = np.stack([(field.slice_value(x + h * e)[0] - field.slice_value(x - h * e)[0]) / (2 * h) for e in np.eye(2)], -1)
    np.testing.assert_allclose(grad, fd, atol=1e-7)
    assert np.all(np.linalg.eigvalsh(levi) > 0)


def test_cutoff_values_and_derivatives():
    U, inner = Box((0.0, 0.0), (1.0, 1.0)), Box((-1.0, -0.5), (2.0, 1.5))
    f = Cutoff(U, inner)
    assert np.all(f.evaluate(U.grid(9))[0] == 0)
    assert np.all(f.evaluate(np.array([[2.0, 0.5], [0.5, -0.6], [3.0, 3.0]]))[0] == 1)
    x = np.random.default_rng(4).uniform(-1.2, 2.2, size=(40, 2))
    _, g, H = f.evaluate(x)
    h = 1e-6
    fd = np.stack([(f.evaluate(x + h * e)[1] - f.evaluate(x - h * e)[1]) / (2 * h) for e in np.eye(2)], -1)
    np.testing.assert_allclose(H, fd, atol=1e-4)
    with pytest.raises(InputError):
        Cutoff(inner, U)


def test_shrink_box():
    model = MomentModel([(0, 0), (1, 0), (0, 1), (0, 2), (0, 3), (0, 4)])
    small, large = shrink_box(model, 0.8), shrink_box(model, 0.95)
    assert small.inside(large)
    with pytest.raises(InputError):
        shrink_box(model, 1.0)


def test_toric_certificate(toric):
    model = MomentModel(toric.exponents)
    delta = 1e-2
    cert = gluing_certificate(toric, None, shrink_box(model, 0.8), shrink_box(model, 0.95), delta, 32)
    # phi and psi coincide, so both margins equal the (possibly halved) band width
    assert cert.min_margin_U == pytest.approx(cert.delta, rel=1e-9)
    assert cert.min_margin_collar == pytest.approx(cert.delta, rel=1e-9)
    assert cert.identity_U == 0 and cert.identity_collar == 0
    assert cert.stable


def test_conic_certificate_is_deterministic(conic):
    model = MomentModel(conic.exponents)
    U, K = shrink_box(model, 0.8), shrink_box(model, 0.95)
    a = gluing_certificate(conic, None, U, K, 1e-2, 32)
    b = gluing_certificate(conic, None, U, K, 1e-2, 32)
    assert a.report() == b.report()
    assert a.min_margin_U > 0 and a.min_margin_collar > 0 and a.ball_margin > 0
    assert a.min_eig_glued >= 1e-9 and a.min_eig_phi >= 1e-9
    assert a.identity_U == 0 and a.identity_collar == 0


def test_certificate_preconditions(conic):
    model = MomentModel(conic.exponents)
    U, K = shrink_box(model, 0.8), shrink_box(model, 0.95)
    with pytest.raises(InputError):
        gluing_certificate(conic, None, K, U, 1e-2, 32)
    with pytest.raises(InputError):
        gluing_certificate(conic, None, Box((0.5, -0.5), (np.inf, 0.5)), K, 1e-2, 32)


def test_certificate_failure_names_condition(conic):
    huge = Box((-30.0, -30.0), (30.0, 30.0))
    with pytest.raises(CertificateFailure) as info:
        gluing_certificate(conic, None, Box((-1.0, -1.0), (1.0, 1.0)), huge, 0.5, 8)
    assert "condition" in info.value.report
