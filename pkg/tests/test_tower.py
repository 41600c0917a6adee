import random
from fractions import Fraction

import pytest

from mdkit.shiftspace import (
    Periodic,
    Window,
    check_membership,
    gap_space,
    periodic_witness,
    random_window,
    sample_gap_window,
    seq_to_json,
)
from mdkit.torus import TorusVec, max_circle_dist
from mdkit.tower import (
    AnchorTable,
    DomainError,
    TowerElementTrunc,
    TowerSpec,
    factor_chain,
    factor_map,
    level_gap,
    section_domain,
    section_map,
    tower_aperiodicity_report,
    tower_element,
    verify_section_identity,
    verify_section_range,
    windows_agree_on_overlap,
)

from oracles import section_value_oracle

HALF = Fraction(1, 2)


def vecs(*values):
    return tuple(TorusVec.of(Fraction(v)) for v in values)


class TestLevelGap:
    def test_values(self):
        assert level_gap(1) == 1
        assert level_gap(3) == 6
        assert level_gap(5) == 120

    def test_recurrence(self):
        for m in range(2, 13):
            assert level_gap(m) == m * level_gap(m - 1)

    def test_error(self):
        with pytest.raises(ValueError):
            level_gap(0)


class TestFactorMap:
    def test_periodic_example(self):
        x = Periodic(vecs(0, Fraction(4, 3), Fraction(2, 3)))
        y = factor_map(2, x)
        assert y == Periodic(vecs(Fraction(4, 3), 0, Fraction(2, 3)))
        assert check_membership(gap_space(1, 1, HALF), y).passed

    def test_zero_window_stays_zero(self):
        w = Window(0, (TorusVec.zero(2),) * 8)
        y = factor_map(2, w)
        assert all(v == TorusVec.zero(2) for v in y.values)
        assert (y.start, y.end) == (0, 6)

    def test_window_domain_shrink_and_error(self):
        w = Window(-1, vecs(0, 1, 0, 1, 0, 1, 0))
        y = factor_map(3, w)  # shrink by 2 * 2! = 4
        assert (y.start, y.end) == (-1, 1)
        with pytest.raises(DomainError, match="domain shrinks to empty"):
            factor_map(3, Window(0, vecs(0, 1, 0)))

    def test_telescoping_distance_identity(self):
        # distance between outputs one sub-gap apart equals distance between
        # inputs one full gap apart, exactly, at every checkable index
        rng = random.Random(23)
        for m in (2, 3):
            q = level_gap(m - 1)
            big = level_gap(m)
            x = random_window(2, -4, 4 + 3 * big, rng)
            y = factor_map(m, x)
            for k in range(y.start, y.end - q + 1):
                assert max_circle_dist(y.value_at(k), y.value_at(k + q)) == \
                    max_circle_dist(x.value_at(k), x.value_at(k + big))

    def test_membership_carried_to_next_level(self):
        rng = random.Random(31)
        x = sample_gap_window(1, level_gap(3), HALF, -2, 30, rng)
        y = factor_map(3, x)
        assert check_membership(gap_space(1, level_gap(2), HALF), y).passed


class TestFactorChain:
    def test_single_step(self):
        rng = random.Random(1)
        x = random_window(1, 0, 20, rng)
        assert factor_chain(3, 2, x) == factor_map(3, x)

    def test_unfolds_composition(self):
        rng = random.Random(2)
        x = random_window(1, 0, 20, rng)
        assert factor_chain(3, 1, x) == factor_map(2, factor_map(3, x))

    def test_associativity(self):
        rng = random.Random(3)
        x = random_window(2, -5, 80, rng)
        assert factor_chain(4, 1, x) == factor_chain(2, 1, factor_chain(4, 2, x))

    def test_witness_chains_to_gap_one(self):
        w = periodic_witness(1, level_gap(4), HALF, 7)
        down = factor_chain(4, 1, w)
        assert check_membership(gap_space(1, 1, HALF), down).passed


class TestSectionMap:
    def test_frozen_small_example(self):
        x = Window(0, vecs(0, 1, 0, 1))
        y = section_map(2, AnchorTable.zeros(1), x)
        assert (y.start, y.end) == (0, 4)
        assert [v.coords[0].value for v in y.values] == [0, 0, 1, 1, 0]

    def test_zero_input_zero_anchor(self):
        x = Window(0, (TorusVec.zero(1),) * 6)
        y = section_map(2, AnchorTable.zeros(1), x)
        assert all(v == TorusVec.zero(1) for v in y.values)

    def test_matches_literal_case_formula(self):
        rng = random.Random(41)
        for m in (2, 3, 4):
            q = level_gap(m - 1)
            big = level_gap(m)
            for anchor in (AnchorTable.zeros(2), AnchorTable.random(2, m, rng)):
                x = random_window(2, -big, 3 * big, rng)
                y = section_map(m, anchor, x)
                lo, hi = section_domain(m, x.start, x.end)
                assert (y.start, y.end) == (lo, hi)
                for k in range(lo, hi + 1):
                    assert y.value_at(k) == section_value_oracle(m, anchor, x, k)

    def test_domain_rule(self):
        assert section_domain(2, 0, 3) == (0, 4)
        assert section_domain(3, -4, 9) == (-4, 13)
        with pytest.raises(DomainError):
            section_domain(3, 1, 9)  # must start at or below 0
        with pytest.raises(DomainError):
            section_domain(3, 0, 0)  # must reach (m-1)! - 1

    def test_missing_anchor_index_errors(self):
        anchor = AnchorTable(1, {0: TorusVec.of(0)})
        x = Window(0, vecs(0, 1, 0, 1, 0, 1))
        with pytest.raises(ValueError, match="anchor table missing index"):
            section_map(3, anchor, x)

    def test_periodic_input_rejected(self):
        with pytest.raises(TypeError, match="unroll periodic points"):
            section_map(2, AnchorTable.zeros(1), Periodic(vecs(0, 1)))

    def test_anchor_dimension_mismatch(self):
        with pytest.raises(ValueError, match="alphabet dimension mismatch"):
            section_map(2, AnchorTable.zeros(2), Window(0, vecs(0, 1, 0, 1)))


class TestSectionIdentity:
    def test_small_example_full_overlap(self):
        x = Window(0, vecs(0, 1, 0, 1))
        report = verify_section_identity(2, AnchorTable.zeros(1), x)
        assert report.passed
        assert report.overlap == (0, 3)

    def test_random_anchor_and_windows(self):
        rng = random.Random(55)
        anchor = AnchorTable.random(1, 2, rng)
        x = random_window(1, -2, 10, rng)
        report = verify_section_identity(2, anchor, x, trials=100, rng=rng)
        assert report.passed
        assert report.windows_checked == 101

    def test_level_four(self):
        rng = random.Random(56)
        x = random_window(1, 0, 3 * level_gap(4), rng)
        report = verify_section_identity(4, AnchorTable.zeros(1), x, trials=20, rng=rng)
        assert report.passed


class TestSectionRange:
    def test_valid_window_passes_next_gap(self):
        rng = random.Random(77)
        big = level_gap(3)
        x = sample_gap_window(1, level_gap(2), HALF, -big, 3 * big, rng)
        report = verify_section_range(3, AnchorTable.zeros(1), x, HALF)
        assert report.passed
        assert all(count > 0 for count in report.partition_counts.values())

    def test_random_anchor_also_passes(self):
        rng = random.Random(78)
        big = level_gap(2)
        x = sample_gap_window(2, level_gap(1), HALF, -big, 3 * big, rng)
        report = verify_section_range(2, AnchorTable.random(2, 2, rng), x, HALF)
        assert report.passed

    def test_invalid_input_rejected(self):
        x = Window(0, (TorusVec.zero(1),) * 12)
        with pytest.raises(ValueError, match="gap constraint"):
            verify_section_range(2, AnchorTable.zeros(1), x, HALF)


class TestTowerElement:
    def test_three_components_consistent(self):
        rng = random.Random(91)
        spec = TowerSpec(dim=1, delta=HALF, m_max=3)
        x = sample_gap_window(1, level_gap(2), HALF, 0, 13, rng)
        element = tower_element(spec, 2, x)
        assert element.depth == 3
        assert element.component(2) == x
        back = factor_map(3, element.component(3))
        ok, _ = windows_agree_on_overlap(back, element.component(2))
        assert ok

    def test_depth_one(self):
        spec = TowerSpec(dim=1, delta=HALF, m_max=1)
        x = Window(0, vecs(0, 1))
        element = tower_element(spec, 1, x)
        assert element.depth == 1 and element.component(1) == x

    def test_zero_window_zero_anchors(self):
        spec = TowerSpec(dim=1, delta=HALF, m_max=4)
        x = Window(-6, (TorusVec.zero(1),) * 20)
        element = tower_element(spec, 3, x)
        for level in range(1, 5):
            assert all(v == TorusVec.zero(1) for v in element.component(level).values)

    def test_domain_failure_names_level(self):
        spec = TowerSpec(dim=1, delta=HALF, m_max=4)
        # too short for the chain down to level 1
        with pytest.raises(DomainError, match="factor map to level 1"):
            tower_element(spec, 3, Window(0, vecs(0, 1, 0, 1, 0)))
        # chain fits but end = 3 < 3! - 1: the section to level 4 lacks its base block
        with pytest.raises(DomainError, match="section to level 4"):
            tower_element(spec, 3, Window(-2, vecs(0, 1, 0, 1, 0, 1)))

    def test_random_anchors_still_consistent(self):
        rng = random.Random(92)
        spec = TowerSpec(
            dim=1,
            delta=HALF,
            m_max=4,
            anchors={
                3: AnchorTable.random(1, 3, rng),
                4: AnchorTable.random(1, 4, rng),
            },
        )
        x = sample_gap_window(1, level_gap(2), HALF, -2, 3 * level_gap(2) + 2, rng)
        element = tower_element(spec, 2, x)
        for level in range(1, 4):
            ok, _ = windows_agree_on_overlap(
                factor_map(level + 1, element.component(level + 1)),
                element.component(level),
            )
            assert ok


class TestAperiodicity:
    def test_certificates(self):
        spec = TowerSpec(dim=1, delta=HALF, m_max=5)
        report = tower_aperiodicity_report(spec, 13)
        assert report.passed
        by_prime = {c["prime"]: c for c in report.certificates}
        assert set(by_prime) == {2, 3, 5, 7, 11, 13}
        for p in (2, 3, 5):
            assert by_prime[p]["kind"] == "empty"
            assert by_prime[p]["level"] == p
            assert by_prime[p]["gap"] % p == 0
        for p in (7, 11, 13):
            assert by_prime[p]["kind"] == "witness"
            assert by_prime[p]["level"] == 5
            assert "undetermined" in by_prime[p]["statement"]

    def test_witness_gap_value(self):
        spec = TowerSpec(dim=1, delta=HALF, m_max=5)
        report = tower_aperiodicity_report(spec, 7)
        witness_cert = [c for c in report.certificates if c["prime"] == 7][0]
        values = witness_cert["witness"]["values"]
        assert len(values) == 7
        assert "6/7" in witness_cert["statement"]

    def test_p_max_validation(self):
        spec = TowerSpec(dim=1, delta=HALF, m_max=3)
        with pytest.raises(ValueError):
            tower_aperiodicity_report(spec, 1)


class TestTowerSpecJson:
    def test_round_trip_with_anchors(self):
        rng = random.Random(101)
        spec = TowerSpec(
            dim=2,
            delta=Fraction(1, 3),
            m_max=3,
            anchors={2: AnchorTable.random(2, 2, rng), 3: AnchorTable.random(2, 3, rng)},
        )
        data = spec.to_json()
        assert data["N"] == 2 and data["delta"] == "1/3"
        restored = TowerSpec.from_json(data)
        assert restored.delta == spec.delta and restored.m_max == spec.m_max
        for level in (2, 3):
            size = (level - 1) * level_gap(level - 1)
            for k in range(size):
                assert restored.anchor_for(level).value_at(k) == spec.anchor_for(
                    level
                ).value_at(k)

    def test_element_json(self):
        spec = TowerSpec(dim=1, delta=HALF, m_max=2)
        x = Window(0, vecs(0, 1, 0, 1))
        element = tower_element(spec, 2, x)
        data = element.to_json()
        assert data["depth"] == 2
        assert data["components"][1] == seq_to_json(x)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            TowerSpec(dim=1, delta=Fraction(3, 2), m_max=2)
        with pytest.raises(ValueError):
            TowerSpec(dim=1, delta=HALF, m_max=0)

    def test_deep_truncation_warns(self):
        with pytest.warns(UserWarning, match="expect slow"):
            TowerSpec(dim=1, delta=HALF, m_max=7)
