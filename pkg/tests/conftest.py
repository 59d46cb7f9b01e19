import numpy as np
import pytest
from hypothesis import settings

from sshgdefect.grassmann import GeneratorTable, GrassmannElement

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


def random_element(table: GeneratorTable, rng: np.random.Generator, scale: float = 1.0,
                   parity: str = "any") -> GrassmannElement:
    c = scale * (rng.normal(size=table.dim) + 1j * rng.normal(size=table.dim))
    el = GrassmannElement(table, c)
    if parity == "even":
        return el.even_part()
    if parity == "odd":
        return el.odd_part()
    return el


@pytest.fixture
def table6():
    return GeneratorTable([f"t{i}" for i in range(6)])
