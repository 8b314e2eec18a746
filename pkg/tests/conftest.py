import pytest

from bvsharp import DomainSpec, build_domain


@pytest.fixture(scope="session")
def disk128():
    return build_domain(DomainSpec.disk(1.0), 1.0 / 128)


@pytest.fixture(scope="session")
def disk256():
    return build_domain(DomainSpec.disk(1.0), 1.0 / 256)


@pytest.fixture(scope="session")
def disk512():
    return build_domain(DomainSpec.disk(1.0), 1.0 / 512)


@pytest.fixture(scope="session")
def ellipse256():
    return build_domain(DomainSpec.ellipse(2.0, 1.0), 1.0 / 256)
