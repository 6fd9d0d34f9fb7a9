import numpy as np
import pytest

from optics.errors import DecompositionDomainError, DomainError, NonUnimodularError, PoleError
from optics.matrix_optics import (abcd_to_sr, compose, compose_chain, decompose, free_space,
                                  lens_part, magnifier, propagate_curvature, propagate_q,
                                  random_ray_matrix, ray_curvature, sr_compose, sr_to_abcd,
                                  thin_lens, trace_ray, trace_system)
from optics.models import QParam, Ray, RayMatrix, SRPair


def _matrix_close(m2, m1, atol=1e-12):
    return np.allclose(m2.as_array(), m1.as_array(), rtol=0.0, atol=atol)


def test_ray_matrix_rejects_non_unit_determinant():
    with pytest.raises(NonUnimodularError):
        RayMatrix(a=1.0, b=1.0, c=1.0, d=1.0)


def test_ray_matrix_rejects_non_finite():
    with pytest.raises(DomainError):
        RayMatrix(a=float("nan"), b=0.0, c=0.0, d=1.0)


def test_compose_matches_matrix_product():
    m1 = RayMatrix(a=2.0, b=1.0, c=1.0, d=1.0)
    m2 = thin_lens(0.5)
    product = compose(m2, m1)
    assert np.allclose(product.as_array(), m2.as_array() @ m1.as_array(), atol=1e-14)
    assert abs(product.det - 1.0) < 1e-12


def test_compose_chain_order():
    """元件按光束经过的顺序给出"""
    elements = [free_space(1.0), thin_lens(1.0)]
    expected = thin_lens(1.0).as_array() @ free_space(1.0).as_array()
    assert np.allclose(compose_chain(elements).as_array(), expected)
    assert _matrix_close(compose_chain([]), RayMatrix.identity())


def test_trace_free_space():
    out = trace_ray(free_space(2.0), Ray(height=1.0, direction=0.5))
    assert out.height == pytest.approx(2.0)
    assert out.direction == pytest.approx(0.5)


def test_trace_empty_system_keeps_ray():
    assert trace_system([], Ray(height=1.0, direction=0.0)) == []


def test_trace_free_lens_free():
    rays = trace_system([free_space(1.0), thin_lens(1.0), free_space(1.0)],
                        Ray(height=1.0, direction=0.0))
    assert [(r.height, r.direction) for r in rays] == [(1.0, 0.0), (1.0, -1.0), (0.0, -1.0)]
    total = compose_chain([free_space(1.0), thin_lens(1.0), free_space(1.0)])
    final = trace_ray(total, Ray(height=1.0, direction=0.0))
    assert final.height == pytest.approx(0.0, abs=1e-15)
    assert final.direction == pytest.approx(-1.0)


def test_thin_lens_and_magnifier_domain():
    with pytest.raises(DomainError):
        thin_lens(0.0)
    with pytest.raises(DomainError):
        magnifier(0.0)
    assert _matrix_close(magnifier(2.0), RayMatrix(a=2.0, b=0.0, c=0.0, d=0.5))


def test_curvature_and_pole():
    assert ray_curvature(Ray(height=2.0, direction=0.5)) == pytest.approx(4.0)
    assert propagate_curvature(free_space(1.5), 2.0) == pytest.approx(3.5)
    with pytest.raises(PoleError):
        propagate_curvature(thin_lens(1.0), 1.0)
    with pytest.raises(PoleError):
        ray_curvature(Ray(height=1.0, direction=0.0))


def test_propagate_q_free_space_adds_distance():
    q = propagate_q(free_space(0.75), QParam(q=0.25 + 1.0j))
    assert q.q == pytest.approx(1.0 + 1.0j)


def test_propagate_q_pole():
    with pytest.raises(PoleError):
        propagate_q(thin_lens(1.0), QParam(q=1.0 + 0.0j))


def test_mobius_composition_consistency(rng):
    q0 = QParam(q=0.3 + 0.8j)
    for _ in range(20):
        m1 = random_ray_matrix(rng)
        m2 = random_ray_matrix(rng)
        stepwise = propagate_q(m2, propagate_q(m1, q0)).q
        assert propagate_q(compose(m2, m1), q0).q == pytest.approx(stepwise, rel=1e-10)


def test_sr_identity_and_round_trip(rng):
    p = abcd_to_sr(RayMatrix.identity())
    assert p.s == pytest.approx(1.0)
    assert p.r == pytest.approx(0.0)
    for _ in range(20):
        m = random_ray_matrix(rng)
        assert _matrix_close(sr_to_abcd(abcd_to_sr(m)), m, atol=1e-12)


def test_sr_compose_is_homomorphism(rng):
    for _ in range(20):
        m1 = random_ray_matrix(rng)
        m2 = random_ray_matrix(rng)
        product = sr_compose(abcd_to_sr(m2), abcd_to_sr(m1))
        direct = abcd_to_sr(compose(m2, m1))
        assert product.s == pytest.approx(direct.s, rel=1e-12, abs=1e-12)
        assert product.r == pytest.approx(direct.r, rel=1e-12, abs=1e-12)


def test_sr_pair_validation():
    with pytest.raises(NonUnimodularError):
        SRPair(s=1.0, r=1.0)
    # s = i 对应旋转 (0,-1;1,0)
    assert _matrix_close(sr_to_abcd(SRPair(s=1j, r=0.0)), RayMatrix(a=0.0, b=-1.0, c=1.0, d=0.0))


def test_decompose_rebuilds_matrix():
    m = RayMatrix(a=2.0, b=1.0, c=1.0, d=1.0)
    c, a, b = decompose(m)
    assert (c, a, b) == pytest.approx((0.5, 2.0, 0.5))
    rebuilt = compose(lens_part(c), compose(magnifier(a), free_space(b)))
    assert _matrix_close(rebuilt, m)


def test_decompose_requires_positive_a():
    with pytest.raises(DecompositionDomainError):
        decompose(RayMatrix(a=-1.0, b=0.0, c=0.0, d=-1.0))


def test_random_ray_matrix_properties(rng):
    for _ in range(50):
        m = random_ray_matrix(rng)
        assert m.a > 0
        assert abs(m.det - 1.0) <= 1e-12


def test_random_ray_matrix_entry_bound(rng):
    for _ in range(50):
        m = random_ray_matrix(rng, max_entry=2.0)
        assert np.max(np.abs(m.as_array())) <= 2.0
        assert m.a > 0
    with pytest.raises(DomainError):
        random_ray_matrix(rng, magnifier_range=(3.0, 4.0), max_entry=2.0)
