import io

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dyncap.channel import dephasing as dephasing_channel
from dyncap.channel import erasure as erasure_channel
from dyncap.cqstate import cef_point, diagonal_pair_ensemble
from dyncap.entropy import binary_entropy
from dyncap.errors import ValidationError
from dyncap.region import (
    CSV_HEADER,
    RateTriple,
    UnitResourceCone,
    WeightVector,
    boundary_csv_rows,
    cef_from_bounds,
    dephasing_bounds,
    dephasing_surface,
    erasure_bounds,
    erasure_surface,
    gamma,
    in_region,
    sample_boundary,
    supporting_hyperplane,
    surface_for_channel,
    write_boundary_csv,
)

QE_MAX_DEPHASING_02 = 0.5310044064107189  # 1 - H2(0.9), attained at nu = 1/2


class TestGamma:
    def test_nu_zero(self):
        assert gamma(0.0, 0.7) == pytest.approx(1.0, abs=1e-15)

    def test_center_point(self):
        # radicand 1 - 16 * 0.1 * 0.9 * 0.25 = 0.64 exactly
        assert gamma(0.5, 0.2) == pytest.approx(0.9, abs=1e-15)

    def test_p_zero(self):
        assert gamma(0.37, 0.0) == pytest.approx(1.0, abs=1e-15)

    def test_out_of_range(self):
        with pytest.raises(ValidationError):
            gamma(1.2, 0.5)
        with pytest.raises(ValidationError):
            gamma(0.5, -0.1)

    @given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
    def test_range(self, nu, p):
        assert 0.5 - 1e-12 <= gamma(nu, p) <= 1.0 + 1e-12


class TestDephasingBounds:
    def test_frozen_center(self):
        b = dephasing_bounds(0.5, 0.2)
        assert b.cq_bound == pytest.approx(1.5310044064107189, abs=1e-12)
        assert b.qe_bound == pytest.approx(0.5310044064107189, abs=1e-12)
        assert b.cqe_bound == pytest.approx(0.5310044064107189, abs=1e-12)

    def test_nu_zero(self):
        assert dephasing_bounds(0.0, 0.2) == pytest.approx((1.0, 0.0, 1.0), abs=1e-12)

    def test_noiseless_limit(self):
        assert dephasing_bounds(0.5, 0.0) == pytest.approx((2.0, 1.0, 1.0), abs=1e-12)

    def test_rejects_folded_parameters(self):
        with pytest.raises(ValidationError):
            dephasing_bounds(0.6, 0.2)


class TestErasureBounds:
    def test_quarter(self):
        b = erasure_bounds(0.5, 0.25)
        assert b.cq_bound == pytest.approx(1.5, abs=1e-12)
        assert b.qe_bound == pytest.approx(0.5, abs=1e-12)
        assert b.cqe_bound == pytest.approx(0.5, abs=1e-12)

    def test_half(self):
        # third bound is 1 - eps - eps*H2(p) = 0 at eps = p = 1/2
        b = erasure_bounds(0.5, 0.5)
        assert b.cq_bound == pytest.approx(1.0, abs=1e-12)
        assert b.qe_bound == pytest.approx(0.0, abs=1e-12)
        assert b.cqe_bound == pytest.approx(0.0, abs=1e-12)

    def test_p_zero(self):
        for eps in (0.0, 0.3, 1.0):
            b = erasure_bounds(0.0, eps)
            assert b == pytest.approx((1 - eps, 0.0, 1 - eps), abs=1e-12)

    def test_no_quantum_rate_beyond_half(self):
        for eps in (0.5, 0.75, 1.0):
            for p in np.linspace(0.0, 0.5, 11):
                assert erasure_bounds(p, eps).qe_bound <= 1e-12

    def test_rejects_out_of_range(self):
        with pytest.raises(ValidationError):
            erasure_bounds(0.7, 0.25)


class TestUnitResourceCone:
    def test_matrix_inverse_exact(self):
        prod = UnitResourceCone.inverse @ UnitResourceCone.matrix
        np.testing.assert_allclose(prod, np.eye(3), atol=1e-12)
        prod = UnitResourceCone.matrix @ UnitResourceCone.inverse
        np.testing.assert_allclose(prod, np.eye(3), atol=1e-12)

    def test_generators_in_cone(self):
        for g in UnitResourceCone.generators:
            assert UnitResourceCone.contains(g)

    def test_random_combinations_satisfy_inequalities(self, rng):
        for _ in range(1000):
            coeff = rng.uniform(0.0, 4.0, size=3)
            r = UnitResourceCone.combine(*coeff)
            assert UnitResourceCone.contains(r, tol=1e-12)

    def test_random_members_decompose(self, rng):
        found = 0
        while found < 1000:
            r = RateTriple(*rng.uniform(-4.0, 4.0, size=3))
            if not UnitResourceCone.contains(r):
                continue
            found += 1
            coeff = UnitResourceCone.decompose(r)
            assert np.all(coeff >= -1e-9)
            np.testing.assert_allclose(
                UnitResourceCone.combine(*coeff), np.array(r), atol=1e-9
            )

    def test_outside_point(self):
        assert not UnitResourceCone.contains(RateTriple(1.0, 0.0, 0.0))


class TestInRegion:
    def test_origin_inside_dephasing(self):
        result = in_region(RateTriple(0.0, 0.0, 0.0), dephasing_surface(0.2))
        assert result.inside
        b = dephasing_bounds(result.witness, 0.2)
        assert min(b) >= -1e-9

    def test_excess_quantum_rate_outside(self):
        # Q + E = 0.532 exceeds the best qe bound 0.53100
        result = in_region(RateTriple(0.0, 0.531, 0.001), dephasing_surface(0.2))
        assert not result.inside

    def test_just_inside_quantum_boundary(self):
        result = in_region(RateTriple(0.0, 0.5305, 0.0), dephasing_surface(0.2))
        assert result.inside
        assert result.witness == pytest.approx(0.5, abs=1e-2)

    def test_classical_overshoot_outside_erasure(self):
        result = in_region(RateTriple(1.5, 0.0, 0.0), erasure_surface(0.25))
        assert not result.inside

    def test_classical_capacity_point_inside_erasure(self):
        result = in_region(RateTriple(0.75, 0.0, 0.0), erasure_surface(0.25))
        assert result.inside

    def test_boundary_corners_are_members(self):
        # corner points sit on the boundary and must count as inside
        for surface in (dephasing_surface(0.2), erasure_surface(0.25)):
            for t in (0.0, 0.2, 0.5):
                corner = cef_from_bounds(surface.bounds(t))
                result = in_region(corner, surface)
                assert result.inside, (surface.family, t)

    def test_translated_cone_points_are_members(self, rng):
        # the region is the unit cone attached to the corner curve: any
        # corner plus a cone displacement stays inside
        for surface in (dephasing_surface(0.2), erasure_surface(0.25)):
            for _ in range(20):
                t = float(rng.uniform(0.0, 0.5))
                corner = cef_from_bounds(surface.bounds(t))
                shift = UnitResourceCone.combine(*rng.uniform(0.0, 1.0, size=3))
                point = RateTriple(
                    corner.c + shift.c, corner.q + shift.q, corner.e + shift.e
                )
                assert in_region(point, surface).inside


class TestSupportingHyperplane:
    def test_erasure_cq_plane(self):
        result = supporting_hyperplane(WeightVector(1.0, 2.0, 0.0), erasure_surface(0.25))
        assert result.bounded
        assert result.value == pytest.approx(1.5, abs=1e-6)
        assert result.argmax == pytest.approx(0.5, abs=1e-6)

    def test_dephasing_qe_plane(self):
        result = supporting_hyperplane(WeightVector(0.0, 1.0, 1.0), dephasing_surface(0.2))
        assert result.bounded
        assert result.value == pytest.approx(QE_MAX_DEPHASING_02, abs=1e-6)

    def test_entanglement_only_unbounded(self):
        for surface in (dephasing_surface(0.2), erasure_surface(0.25)):
            result = supporting_hyperplane(WeightVector(0.0, 0.0, 1.0), surface)
            assert not result.bounded
            assert result.value is None


class TestSampleBoundary:
    def test_three_point_params(self):
        samples = sample_boundary(dephasing_surface(0.2), 3)
        assert [s.param for s in samples] == pytest.approx([0.0, 0.25, 0.5])
        for s in samples:
            assert s.bounds == pytest.approx(dephasing_bounds(s.param, 0.2), abs=1e-12)

    def test_two_points_are_endpoints(self):
        samples = sample_boundary(erasure_surface(0.25), 2)
        assert [s.param for s in samples] == [0.0, 0.5]

    def test_too_few_rejected(self):
        with pytest.raises(ValidationError):
            sample_boundary(erasure_surface(0.25), 1)

    def test_params_monotone(self):
        samples = sample_boundary(erasure_surface(0.25), 33)
        params = [s.param for s in samples]
        assert all(a < b for a, b in zip(params, params[1:]))

    def test_erasure_bounds_affine_in_binary_entropy(self):
        samples = sample_boundary(erasure_surface(0.25), 65)
        h = np.array([binary_entropy(s.param) for s in samples])
        design = np.stack([h, np.ones_like(h)], axis=1)
        for pick in (
            lambda s: s.bounds.cq_bound,
            lambda s: s.bounds.qe_bound,
            lambda s: s.bounds.cqe_bound,
        ):
            y = np.array([pick(s) for s in samples])
            coeff, *_ = np.linalg.lstsq(design, y, rcond=None)
            assert np.abs(design @ coeff - y).max() <= 1e-9

    def test_cef_corner_matches_canonical_ensemble(self):
        # corner reconstructed from bounds == evaluated corner of the
        # half/half diagonal ensemble, for both channel families
        for surface, ch in (
            (dephasing_surface(0.2), dephasing_channel(0.2)),
            (erasure_surface(0.25), erasure_channel(0.25)),
        ):
            for s in sample_boundary(surface, 9):
                direct = cef_point(diagonal_pair_ensemble(s.param), ch)
                assert s.cef == pytest.approx(direct, abs=1e-8)

    def test_noiseless_dephasing_matches_identity_region(self):
        b = sample_boundary(dephasing_surface(0.0), 3)[-1]
        assert b.bounds == pytest.approx((2.0, 1.0, 1.0), abs=1e-12)


class TestSurfaceLookup:
    def test_from_channel(self):
        surface = surface_for_channel(dephasing_channel(0.3))
        assert surface.family == "dephasing"
        assert surface.noise == pytest.approx(0.3)

    def test_rejects_generic_channel(self, rng):
        from conftest import random_two_kraus_qubit

        with pytest.raises(ValidationError):
            surface_for_channel(random_two_kraus_qubit(rng))


class TestCsv:
    def test_header_and_digits(self):
        samples = sample_boundary(dephasing_surface(0.2), 3)
        rows = boundary_csv_rows(samples)
        assert rows[0] == CSV_HEADER
        assert len(rows) == 4
        cells = rows[-1].split(",")
        assert cells[0] == "0.5"
        assert cells[1] == "1.53100441"  # 9 significant digits

    def test_write_stream(self):
        buf = io.StringIO()
        write_boundary_csv(sample_boundary(erasure_surface(0.25), 2), buf)
        lines = buf.getvalue().strip().split("\n")
        assert lines[0] == CSV_HEADER
        assert lines[1].startswith("0,")

    def test_no_negative_zero(self):
        rows = boundary_csv_rows(sample_boundary(erasure_surface(0.5), 3))
        assert "-0," not in "".join(rows) and not any(r.endswith("-0") for r in rows)
