import pytest

from appforge.canonical import utc_now
from appforge.platform import Platform
from appforge.registry import PackageRegistryEntry


def seed_users(platform: Platform) -> None:
    platform.users.create_user("binita", "Binita", ("author",), "tok-binita")
    platform.users.create_user("sirak", "Sirak", ("author",), "tok-sirak")
    platform.users.create_user("yaw", "Yaw", ("author", "reviewer"), "tok-yaw")
    platform.users.create_user("marina", "Marina", ("reviewer",), "tok-marina")
    platform.users.create_user("itsec", "IT Security", ("admin",), "tok-itsec")


def seed_registry(platform: Platform, names=("pandas", "numpy", "geopandas")) -> None:
    for name in names:
        platform.registry.seed(
            PackageRegistryEntry(
                ecosystem="pypi",
                normalized_name=name,
                status="approved",
                decided_by="itsec",
                decided_at=utc_now(),
                created_at=utc_now(),
            )
        )


@pytest.fixture
def platform():
    p = Platform()
    seed_users(p)
    seed_registry(p)
    yield p
    p.close()


def roles_of(platform: Platform, user_id: str) -> tuple[str, ...]:
    return platform.users.get(user_id).roles
