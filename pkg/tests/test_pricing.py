import json
import math

import numpy as np
import pytest

from cloudviews import (
    Fleet,
    InstanceType,
    PiecewisePrice,
    PriceSegment,
    StoragePeriod,
    bundled_catalog,
    bundled_catalog_names,
    catalog_from_dict,
    catalog_to_dict,
    compute_cost,
    eval_piecewise,
    storage_cost,
    transfer_cost,
)

from oracles import scan_piecewise


def rel_close(a, b, tol=1e-6):
    return abs(a - b) <= tol * max(1.0, abs(b))


class TestEvalPiecewise:
    def test_amazon_transfer_10gb(self, ec2_s3):
        assert rel_close(eval_piecewise(ec2_s3.transfer_out, 10.0), 0.60)

    def test_zero_volume_is_first_base(self, ec2_s3, ec2_ebs):
        assert eval_piecewise(ec2_s3.transfer_out, 0.0) == 0.0
        assert eval_piecewise(ec2_ebs.storage.price, 0.0) == 0.0

    def test_s3_monthly_price_at_2560gb(self, ec2_s3):
        assert rel_close(eval_piecewise(ec2_s3.storage.price, 2560.0), 220.16)

    def test_negative_volume_rejected(self, ec2_s3):
        with pytest.raises(ValueError):
            eval_piecewise(ec2_s3.transfer_out, -1.0)

    def test_extrapolates_past_last_breakpoint(self, ec2_s3):
        price = ec2_s3.storage.price
        last = price.segments[-1]
        far = last.start_gb + 1e6
        assert rel_close(
            eval_piecewise(price, far), last.base_usd + last.usd_per_gb * (far - last.start_gb)
        )

    def test_single_segment_is_exactly_linear(self):
        price = PiecewisePrice.flat(0.10)
        for x in (0.0, 1.0, 512.0, 123456.789):
            assert eval_piecewise(price, x) == 0.10 * x


class TestTariffValidation:
    def test_discontinuous_tariff_rejected(self):
        with pytest.raises(ValueError, match="discontinuous"):
            PiecewisePrice((PriceSegment(0.0, 0.1, 0.0), PriceSegment(10.0, 0.2, 5.0)))

    def test_nonzero_first_breakpoint_rejected(self):
        with pytest.raises(ValueError):
            PiecewisePrice((PriceSegment(5.0, 0.1, 0.0),))

    def test_unsorted_breakpoints_rejected(self):
        with pytest.raises(ValueError):
            PiecewisePrice.from_rates([(0.0, 0.1), (10.0, 0.2), (10.0, 0.3)])

    def test_negative_gradient_rejected(self):
        with pytest.raises(ValueError):
            PiecewisePrice.from_rates([(0.0, -0.1)])


class TestTransferCost:
    def test_example_10gb(self, ec2_s3):
        assert rel_close(transfer_cost(10.0, ec2_s3), 0.60)

    def test_zero(self, ec2_s3):
        assert transfer_cost(0.0, ec2_s3) == 0.0

    def test_free_tier_boundary(self, ec2_s3):
        assert transfer_cost(5.0, ec2_s3) == 0.0


class TestComputeCost:
    def test_two_small_instances(self, ec2_s3):
        assert rel_close(compute_cost(50.0, ec2_s3.fleet("m1.small", 2)), 6.00)

    def test_zero_hours(self, ec2_s3):
        assert compute_cost(0.0, ec2_s3.fleet("m1.small", 2)) == 0.0

    def test_one_hour_xlarge(self, ec2_ebs):
        assert rel_close(compute_cost(1.0, ec2_ebs.fleet("m1.xlarge", 1)), 0.48)


class TestStorageCost:
    PERIODS = [StoragePeriod(512.0, 7.0), StoragePeriod(2560.0, 5.0)]

    def test_ebs_two_periods(self, ec2_ebs):
        fleet = ec2_ebs.fleet("m1.small", 2)
        assert rel_close(storage_cost(self.PERIODS, fleet, ec2_ebs), 3276.80)

    def test_s3_two_periods_fleet_independent(self, ec2_s3):
        for count in (1, 2, 7):
            fleet = ec2_s3.fleet("m1.small", count)
            assert rel_close(storage_cost(self.PERIODS, fleet, ec2_s3), 1441.28)

    def test_empty_period_list(self, ec2_s3):
        assert storage_cost([], ec2_s3.fleet("m1.small", 2), ec2_s3) == 0.0

    def test_per_instance_scales_linearly(self, ec2_ebs):
        one = storage_cost(self.PERIODS, ec2_ebs.fleet("m1.small", 1), ec2_ebs)
        five = storage_cost(self.PERIODS, ec2_ebs.fleet("m1.small", 5), ec2_ebs)
        assert rel_close(five, 5 * one)


class TestPiecewiseProperties:
    def all_prices(self):
        for name in bundled_catalog_names():
            cat = bundled_catalog(name)
            yield f"{name}.transfer", cat.transfer_out
            yield f"{name}.storage", cat.storage.price

    def test_continuity_at_breakpoints(self):
        for label, price in self.all_prices():
            for seg in price.segments[1:]:
                left = eval_piecewise(price, seg.start_gb - 1e-9)
                right = eval_piecewise(price, seg.start_gb)
                assert abs(left - right) <= 1e-9, label

    def test_monotone_on_random_grid(self):
        rng = np.random.default_rng(0)
        for label, price in self.all_prices():
            top = 2.0 * price.segments[-1].start_gb + 100.0
            xs = np.sort(rng.uniform(0.0, top, size=100))
            values = [eval_piecewise(price, float(x)) for x in xs]
            for a, b in zip(values, values[1:]):
                assert b >= a - 1e-12, label

    def test_matches_linear_scan_reference(self):
        rng = np.random.default_rng(1)
        for label, price in self.all_prices():
            segs = [(s.start_gb, s.usd_per_gb, s.base_usd) for s in price.segments]
            for x in rng.uniform(0.0, 3e5, size=50):
                assert eval_piecewise(price, float(x)) == scan_piecewise(segs, float(x)), label


class TestCatalogDocuments:
    def test_round_trip_preserves_costs(self):
        for name in bundled_catalog_names():
            cat = bundled_catalog(name)
            clone = catalog_from_dict(json.loads(json.dumps(catalog_to_dict(cat))))
            fleet = Fleet(cat.compute[0], 3)
            clone_fleet = Fleet(clone.compute[0], 3)
            for x in (0.0, 1.0, 5.0, 512.0, 2560.0, 1e5, 1e6):
                assert transfer_cost(x, cat) == transfer_cost(x, clone)
                period = [StoragePeriod(x, 12.0)]
                assert storage_cost(period, fleet, cat) == storage_cost(period, clone_fleet, clone)

    def test_malformed_document_rejected(self):
        with pytest.raises(ValueError):
            catalog_from_dict({"name": "x", "compute": []})

    def test_segments_must_start_at_zero(self, ec2_s3):
        doc = catalog_to_dict(ec2_s3)
        doc["storage"]["segments"][0]["from_gb"] = 1.0
        with pytest.raises(ValueError):
            catalog_from_dict(doc)

    def test_duplicate_instance_names_rejected(self):
        with pytest.raises(ValueError):
            catalog_from_dict(
                {
                    "name": "dup",
                    "compute": [
                        {"name": "a", "usd_per_hour": 0.1},
                        {"name": "a", "usd_per_hour": 0.2},
                    ],
                    "transfer_out": {"segments": [{"from_gb": 0, "usd_per_gb": 0.0}]},
                    "storage": {"mode": "global", "segments": [{"from_gb": 0, "usd_per_gb_month": 0.1}]},
                }
            )


def test_fleet_count_must_be_positive():
    with pytest.raises(ValueError):
        Fleet(InstanceType("m1.small", 0.06), 0)


def test_compute_cost_rejects_negative_hours(ec2_s3):
    with pytest.raises(ValueError):
        compute_cost(-1.0, ec2_s3.fleet("m1.small", 2))
