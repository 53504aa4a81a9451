import pytest

from torsion4.builders import boundary_4_simplex, two_tets_sphere
from torsion4.geometry import random_embedding


@pytest.fixture(scope="session")
def two_tets():
    return two_tets_sphere()


@pytest.fixture(scope="session")
def bd4():
    return boundary_4_simplex()


@pytest.fixture(scope="session")
def bundled(two_tets, bd4):
    return {"s3_two_tets": two_tets, "s3_boundary_4simplex": bd4}


@pytest.fixture(scope="session")
def data_dir():
    from importlib import resources
    return resources.files("torsion4") / "data"


def embed(pt, seed):
    return random_embedding(pt, seed)
