import pytest

from greenp2 import ProjMap, parse_poly


def make_map(*exprs):
    return ProjMap.validate([parse_poly(e) for e in exprs], sphere_samples=200)


@pytest.fixture(scope="session")
def power_map():
    return make_map("z^2", "w^2", "t^2")


@pytest.fixture(scope="session")
def power_map_d3():
    return make_map("z^3", "w^3", "t^3")


@pytest.fixture(scope="session")
def worked_map():
    """The degree-2 map with a non-superattracting totally invariant point."""
    return make_map("2zt+w^2", "z^2", "t^2")


@pytest.fixture(scope="session")
def lattes():
    from greenp2 import lattes_map

    return lattes_map(2)


def random_valid_map(rng, d=2):
    from greenp2.polys import HomogPoly3, n_monomials

    while True:
        comps = [
            HomogPoly3(
                d,
                rng.standard_normal(n_monomials(d)) + 1j * rng.standard_normal(n_monomials(d)),
            )
            for _ in range(3)
        ]
        try:
            return ProjMap.validate(comps, sphere_samples=200)
        except Exception:
            continue
