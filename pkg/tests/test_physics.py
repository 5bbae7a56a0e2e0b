import math
from fractions import Fraction

import numpy as np
import pytest

from nskdg import (DgSpace, DoubleWell, PhysParams, build_uniform, energy,
                   l2_project, mass, momentum, pressure, steady_tanh, step_ic)


def exact_well(x: Fraction, well: DoubleWell) -> Fraction:
    s = Fraction(well.scale)
    r1, r2 = Fraction(well.r1), Fraction(well.r2)
    return s * (x - r1) ** 2 * (x - r2) ** 2


def test_well_worked_values():
    well = DoubleWell()
    assert well.w(1.5) == 0.015625
    assert well.w(1.0) == 0.0 and well.w(2.0) == 0.0
    assert well.wp(1.0) == 0.0 and well.wp(2.0) == 0.0
    assert well.wp(1.5) == 0.0  # symmetric midpoint is the local maximum
    assert pressure(well, 1.5) == -0.015625
    assert well.wpppp == 6.0


def test_derivative_ladder():
    well = DoubleWell(r1=0.5, r2=2.5, scale=0.8)
    rng = np.random.default_rng(0)
    x = rng.uniform(0.0, 3.0, 64)
    eps = 1e-6
    for f, fp in ((well.w, well.wp), (well.wp, well.wpp), (well.wpp, well.wppp)):
        fd = (f(x + eps) - f(x - eps)) / (2 * eps)
        np.testing.assert_allclose(fp(x), fd, rtol=1e-7, atol=1e-7)
    fd4 = (well.wppp(1.0 + eps) - well.wppp(1.0 - eps)) / (2 * eps)
    assert abs(well.wpppp - fd4) < 1e-6


def test_quotient_is_exact_secant():
    # q(a,b)*(b-a) == W(b)-W(a), checked against exact rational arithmetic
    well = DoubleWell()
    rng = np.random.default_rng(1)
    a, b = rng.uniform(0.0, 3.0, (2, 2000))
    q = well.quotient(a, b)
    worst = 0.0
    for ai, bi, qi in zip(a, b, q):
        fa, fb = Fraction(ai), Fraction(bi)
        rhs = exact_well(fb, well) - exact_well(fa, well)
        lhs = Fraction(qi) * (fb - fa)
        scale = max(abs(rhs), abs(fb - fa), Fraction(1, 10 ** 30))
        worst = max(worst, float(abs(lhs - rhs) / scale))
    assert worst < 1e-13


def test_quotient_symmetry_and_diagonal():
    well = DoubleWell(r1=0.9, r2=2.2, scale=0.3)
    rng = np.random.default_rng(2)
    a, b = rng.uniform(0.0, 3.0, (2, 500))
    np.testing.assert_allclose(well.quotient(a, b), well.quotient(b, a),
                               rtol=0, atol=1e-14)
    np.testing.assert_allclose(well.quotient(a, a), well.wp(a), rtol=1e-13)


def test_quotient_db_matches_finite_differences():
    well = DoubleWell()
    rng = np.random.default_rng(3)
    a, b = rng.uniform(0.2, 2.8, (2, 200))
    eps = 1e-6
    fd = (well.quotient(a, b + eps) - well.quotient(a, b - eps)) / (2 * eps)
    np.testing.assert_allclose(well.quotient_db(a, b), fd, rtol=1e-8, atol=1e-8)


def test_phys_params_validation():
    with pytest.raises(ValueError):
        PhysParams(gamma=0.0)
    with pytest.raises(ValueError):
        PhysParams(gamma=1.0, mu=-1e-9)
    p = PhysParams(gamma=1e-4)
    assert p.mu == 0.0 and p.well.r1 == 1.0


def test_steady_tanh_profile():
    prof = steady_tanh(1e-4)
    assert prof(0.0) == 1.5
    assert abs(prof(-1.0) - 2.0) < 1e-12  # dense liquid on the left
    assert abs(prof(1.0) - 1.0) < 1e-12
    # interface width scales like sqrt(gamma)
    wide, narrow = steady_tanh(1e-2), steady_tanh(1e-6)
    assert abs(wide(0.05) - 1.5) < abs(prof(0.05) - 1.5) < abs(narrow(0.05) - 1.5) + 1


def test_step_ic_values():
    rho0, v0 = step_ic()
    x = np.array([0.0, 0.4999, 0.5, 0.5001, 1.0])
    np.testing.assert_allclose(rho0(x), [1.1, 1.1, 1.1, 1.9, 1.9])
    np.testing.assert_allclose(v0(x), 0.0)


def test_functionals_worked_values():
    space = DgSpace(build_uniform(0.0, 1.0, 8), 2)
    phys = PhysParams(gamma=0.5)
    rho = l2_project(space, lambda x: 1.5 + 0 * x)
    v = l2_project(space, lambda x: 3.0 + 0 * x)
    q = l2_project(space, lambda x: 2.0 + 0 * x)
    assert abs(mass(rho) - 1.5) < 1e-14
    assert abs(momentum(rho, v) - 4.5) < 1e-14
    # E = W(1.5) + 0.5*1.5*9 + 0.5*0.5*4 over the unit interval
    assert abs(energy(rho, v, q, phys) - (0.015625 + 6.75 + 1.0)) < 1e-13


def test_functionals_quadratic_fields():
    # x-dependent fields against closed-form integrals on [0, 1]
    space = DgSpace(build_uniform(0.0, 1.0, 16), 2)
    rho = l2_project(space, lambda x: 1.0 + x)
    v = l2_project(space, lambda x: x)
    assert abs(mass(rho) - 1.5) < 1e-13
    # int (1+x) x = 1/2 + 1/3
    assert abs(momentum(rho, v) - (0.5 + 1 / 3)) < 1e-13
    # kinetic part: int (1+x) x^2 / 2 = (1/3 + 1/4) / 2
    phys = PhysParams(gamma=1.0, well=DoubleWell(r1=0.0, r2=0.0, scale=0.0))
    zero = l2_project(space, lambda x: 0 * x)
    assert abs(energy(rho, v, zero, phys) - (1 / 3 + 0.25) / 2) < 1e-13
