import pytest

from gxcalc.catalog import CATALOG_NAMES, catalog_load


@pytest.fixture(scope="session")
def cats():
    """All catalog entries, loaded once (through the category files)."""
    return {name: catalog_load(name) for name in CATALOG_NAMES}


@pytest.fixture(scope="session")
def ising(cats):
    return cats["ising1"]


@pytest.fixture(scope="session")
def ty(cats):
    return cats["ty_z3"]


@pytest.fixture(scope="session")
def bilayer_partial(cats):
    return cats["bilayer_ising_z2x_partial"]
