import pytest

from cloudviews import (
    CandidateView,
    GainMatrix,
    ProblemInstance,
    Query,
    bundled_catalog,
)


@pytest.fixture
def ec2_s3():
    return bundled_catalog("ec2-s3")


@pytest.fixture
def ec2_ebs():
    return bundled_catalog("ec2-ebs")


def build_instance(
    queries,
    views,
    gains,
    catalog_name="ec2-s3",
    fleet=("m1.small", 2),
    dataset_gb=512.0,
    storage_months=12.0,
    frequency=1.0,
):
    """Hand-rolled instance: queries as (time, result_gb), views as (size, mat, maint), gains keyed by index."""
    catalog = bundled_catalog(catalog_name)
    qs = tuple(
        Query(f"q{i + 1}", t, r) for i, (t, r) in enumerate(queries)
    )
    vs = tuple(
        CandidateView(f"v{k + 1}", s, m, u) for k, (s, m, u) in enumerate(views)
    )
    return ProblemInstance(
        catalog=catalog,
        fleet=catalog.fleet(*fleet),
        dataset_gb=dataset_gb,
        storage_months=storage_months,
        queries=qs,
        views=vs,
        gains=GainMatrix(len(qs), len(vs), dict(gains)),
        frequency=frequency,
    )
