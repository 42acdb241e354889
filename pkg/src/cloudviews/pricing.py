"""Provider tariffs and baseline pay-as-you-go cost arithmetic.

Transfer and storage tariffs are continuous piecewise-linear functions of
volume; compute is billed per instance-hour. Everything here is immutable
after construction, so instances can be shared freely across threads.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

# Tariffs are loaded once and must be exactly continuous; anything beyond
# this slack is a data-entry error, not float noise.
CONTINUITY_TOL = 1e-9


@dataclass(frozen=True)
class PriceSegment:
    """One linear piece of a tariff: value(x) = usd_per_gb * (x - start_gb) + base_usd."""

    start_gb: float
    usd_per_gb: float
    base_usd: float


@dataclass(frozen=True)
class PiecewisePrice:
    """Continuous piecewise-linear price curve over [0, +inf).

    Segments are half-open intervals [start_gb, next start_gb); the last
    segment extends to infinity with its own gradient.
    """

    segments: tuple[PriceSegment, ...]

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValueError("piecewise price needs at least one segment")
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if segs[0].start_gb != 0.0:
            raise ValueError("first segment must start at 0 GB")
        for seg in segs:
            if seg.usd_per_gb < 0 or seg.base_usd < 0:
                raise ValueError("negative gradient or base cost in tariff")
        for prev, cur in zip(segs, segs[1:]):
            if cur.start_gb <= prev.start_gb:
                raise ValueError("segment breakpoints must strictly increase")
            expected = prev.usd_per_gb * (cur.start_gb - prev.start_gb) + prev.base_usd
            if abs(cur.base_usd - expected) > CONTINUITY_TOL * max(1.0, expected):
                raise ValueError(
                    f"discontinuous tariff at {cur.start_gb} GB: "
                    f"base {cur.base_usd} != {expected}"
                )
        object.__setattr__(self, "_starts", tuple(s.start_gb for s in segs))

    @classmethod
    def from_rates(cls, rates: list[tuple[float, float]]) -> "PiecewisePrice":
        """Build from (from_gb, usd_per_gb) pairs; base costs follow from continuity, starting at 0."""
        if not rates:
            raise ValueError("empty rate table")
        segs: list[PriceSegment] = []
        base = 0.0
        for idx, (start, rate) in enumerate(rates):
            segs.append(PriceSegment(float(start), float(rate), base))
            if idx + 1 < len(rates):
                nxt = float(rates[idx + 1][0])
                base = rate * (nxt - start) + base
        return cls(tuple(segs))

    @classmethod
    def flat(cls, usd_per_gb: float) -> "PiecewisePrice":
        return cls((PriceSegment(0.0, float(usd_per_gb), 0.0),))

    def segment_at(self, x: float) -> PriceSegment:
        if x < 0:
            raise ValueError(f"volume must be >= 0, got {x}")
        idx = bisect_right(self._starts, x) - 1
        return self.segments[idx]

    def value_at(self, x: float) -> float:
        seg = self.segment_at(x)
        return seg.usd_per_gb * (x - seg.start_gb) + seg.base_usd


def eval_piecewise(price: PiecewisePrice, x: float) -> float:
    """Price of a volume of x GB under a piecewise-linear tariff."""
    return price.value_at(x)


@dataclass(frozen=True)
class InstanceType:
    """A rentable compute instance class and its hourly rate."""

    name: str
    usd_per_hour: float

    def __post_init__(self) -> None:
        if self.usd_per_hour < 0:
            raise ValueError("hourly price must be >= 0")


@dataclass(frozen=True)
class Fleet:
    """A constant pool of identical compute instances."""

    instance_type: InstanceType
    count: int

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError("fleet count must be >= 1")


class StorageBillingMode(str, Enum):
    # Per-instance storage (one volume per compute node) multiplies the bill
    # by the fleet size; global storage is charged once.
    PER_INSTANCE = "per_instance"
    GLOBAL = "global"


@dataclass(frozen=True)
class StorageTariff:
    """Storage price per GB-month plus how it replicates across a fleet."""

    price: PiecewisePrice
    mode: StorageBillingMode

    def replication(self, fleet: Fleet) -> int:
        return fleet.count if self.mode is StorageBillingMode.PER_INSTANCE else 1


@dataclass(frozen=True)
class StoragePeriod:
    """A span of months during which a fixed data size is held."""

    size_gb: float
    months: float

    def __post_init__(self) -> None:
        if self.size_gb < 0 or self.months < 0:
            raise ValueError("storage period size and length must be >= 0")


@dataclass(frozen=True)
class ProviderCatalog:
    """One provider's offer: compute instance types, egress tariff, storage tariff."""

    name: str
    compute: tuple[InstanceType, ...]
    transfer_out: PiecewisePrice
    storage: StorageTariff
    transfer_in_free: bool = True

    def __post_init__(self) -> None:
        names = [it.name for it in self.compute]
        if len(set(names)) != len(names):
            raise ValueError("duplicate instance type names in catalog")

    def instance_type(self, name: str) -> InstanceType:
        for it in self.compute:
            if it.name == name:
                return it
        raise ValueError(f"catalog {self.name!r} has no instance type {name!r}")

    def fleet(self, type_name: str, count: int) -> Fleet:
        return Fleet(self.instance_type(type_name), count)


def transfer_cost(download_gb: float, catalog: ProviderCatalog) -> float:
    """Egress bill for the total downloaded volume; uploads are free."""
    if not catalog.transfer_in_free:
        raise ValueError("catalogs with billed uploads are not supported")
    return eval_piecewise(catalog.transfer_out, download_gb)


def compute_cost(total_hours: float, fleet: Fleet) -> float:
    """Bill for keeping the whole fleet running for total_hours."""
    if total_hours < 0:
        raise ValueError("compute hours must be >= 0")
    return total_hours * fleet.instance_type.usd_per_hour * fleet.count


def storage_cost(
    periods: list[StoragePeriod] | tuple[StoragePeriod, ...],
    fleet: Fleet,
    catalog: ProviderCatalog,
) -> float:
    """Sum of per-period storage bills, replicated per instance when the tariff requires it."""
    n_s = catalog.storage.replication(fleet)
    total = 0.0
    for period in periods:
        total += eval_piecewise(catalog.storage.price, period.size_gb) * period.months * n_s
    return total


# ---------------------------------------------------------------------------
# Bundled catalogs (published on-demand price lists, USD).
# ---------------------------------------------------------------------------

_EC2_COMPUTE = (
    InstanceType("t1.micro", 0.02),
    InstanceType("m1.small", 0.06),
    InstanceType("m1.medium", 0.12),
    InstanceType("m1.large", 0.24),
    InstanceType("m1.xlarge", 0.48),
)

_AZURE_COMPUTE = (
    InstanceType("extra-small", 0.02),
    InstanceType("small", 0.09),
    InstanceType("medium", 0.18),
    InstanceType("large", 0.36),
    InstanceType("extra-large", 0.72),
)

# Shared AWS/Azure egress: first 5 GB free, then thinning per-GB rates by tier.
_TRANSFER_OUT = PiecewisePrice.from_rates(
    [(0.0, 0.0), (5.0, 0.12), (10240.0, 0.09), (51200.0, 0.07), (153600.0, 0.05)]
)

_S3_STORAGE = PiecewisePrice.from_rates([(0.0, 0.095), (1024.0, 0.08), (51200.0, 0.07)])
_AZURE_STORAGE = PiecewisePrice.from_rates([(0.0, 0.053), (1024.0, 0.049), (51200.0, 0.045)])


def _ec2_ebs() -> ProviderCatalog:
    return ProviderCatalog(
        name="ec2-ebs",
        compute=_EC2_COMPUTE,
        transfer_out=_TRANSFER_OUT,
        storage=StorageTariff(PiecewisePrice.flat(0.10), StorageBillingMode.PER_INSTANCE),
    )


def _ec2_s3() -> ProviderCatalog:
    return ProviderCatalog(
        name="ec2-s3",
        compute=_EC2_COMPUTE,
        transfer_out=_TRANSFER_OUT,
        storage=StorageTariff(_S3_STORAGE, StorageBillingMode.GLOBAL),
    )


def _azure() -> ProviderCatalog:
    return ProviderCatalog(
        name="azure",
        compute=_AZURE_COMPUTE,
        transfer_out=_TRANSFER_OUT,
        storage=StorageTariff(_AZURE_STORAGE, StorageBillingMode.GLOBAL),
    )


_BUNDLED = {
    "ec2-ebs": _ec2_ebs,
    "ec2-s3": _ec2_s3,
    "azure": _azure,
}


def bundled_catalog_names() -> list[str]:
    return sorted(_BUNDLED)


def bundled_catalog(name: str) -> ProviderCatalog:
    try:
        return _BUNDLED[name]()
    except KeyError:
        raise ValueError(
            f"unknown bundled catalog {name!r}; available: {', '.join(bundled_catalog_names())}"
        ) from None


# ---------------------------------------------------------------------------
# Catalog document format.
# ---------------------------------------------------------------------------


def _rates_from_doc(entries: list[dict], rate_key: str) -> PiecewisePrice:
    rates = []
    for entry in entries:
        rates.append((float(entry["from_gb"]), float(entry[rate_key])))
    if not rates or rates[0][0] != 0.0:
        raise ValueError("tariff segments must start at from_gb = 0")
    return PiecewisePrice.from_rates(rates)


def _rates_to_doc(price: PiecewisePrice, rate_key: str) -> list[dict]:
    return [{"from_gb": s.start_gb, rate_key: s.usd_per_gb} for s in price.segments]


def catalog_from_dict(doc: dict) -> ProviderCatalog:
    """Parse the catalog document format; raises ValueError on malformed input."""
    try:
        compute = tuple(
            InstanceType(str(c["name"]), float(c["usd_per_hour"])) for c in doc["compute"]
        )
        transfer = _rates_from_doc(doc["transfer_out"]["segments"], "usd_per_gb")
        storage_doc = doc["storage"]
        mode = StorageBillingMode(storage_doc["mode"])
        storage = StorageTariff(
            _rates_from_doc(storage_doc["segments"], "usd_per_gb_month"), mode
        )
        return ProviderCatalog(
            name=str(doc["name"]),
            compute=compute,
            transfer_out=transfer,
            storage=storage,
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed catalog document: {exc}") from exc


def catalog_to_dict(catalog: ProviderCatalog) -> dict:
    return {
        "name": catalog.name,
        "compute": [{"name": it.name, "usd_per_hour": it.usd_per_hour} for it in catalog.compute],
        "transfer_out": {"segments": _rates_to_doc(catalog.transfer_out, "usd_per_gb")},
        "storage": {
            "mode": catalog.storage.mode.value,
            "segments": _rates_to_doc(catalog.storage.price, "usd_per_gb_month"),
        },
    }


def resolve_catalog(ref: str | dict | ProviderCatalog, base_dir: Path | None = None) -> ProviderCatalog:
    """Accept a bundled catalog id, a document dict, a file path, or a ready catalog."""
    if isinstance(ref, ProviderCatalog):
        return ref
    if isinstance(ref, dict):
        return catalog_from_dict(ref)
    if ref in _BUNDLED:
        return bundled_catalog(ref)
    path = Path(ref)
    if base_dir is not None and not path.is_absolute():
        path = base_dir / path
    if path.is_file():
        return catalog_from_dict(json.loads(path.read_text()))
    raise ValueError(f"catalog reference {ref!r} is neither a bundled id nor a readable file")


def load_catalog(path: str | Path) -> ProviderCatalog:
    return catalog_from_dict(json.loads(Path(path).read_text()))


def dump_catalog(catalog: ProviderCatalog, path: str | Path) -> None:
    Path(path).write_text(json.dumps(catalog_to_dict(catalog), indent=2) + "\n")
