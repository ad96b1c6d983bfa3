"""Shared fixtures: benchmark orbits, ephemeris bodies, random samplers."""
import math

import pytest

from splinetraj import (AU, MU_SUN, Body, ClassicalElements, Epoch, Meoe,
                        classical_to_meoe)

REF_EPOCH = Epoch(56000.0)


def make_body(name, a_au, e, i_deg, raan_deg, argp_deg, nu_deg,
              ref=REF_EPOCH):
    return Body(
        name=name,
        elements=ClassicalElements(
            a=a_au * AU, e=e, i=math.radians(i_deg),
            raan=math.radians(raan_deg), argp=math.radians(argp_deg),
            nu=math.radians(nu_deg)),
        ref_epoch=ref, mu_central=MU_SUN)


@pytest.fixture(scope="session")
def bench_orbits():
    """Endpoints of the 1 AU -> 3 AU heliocentric benchmark transfer."""
    oe0 = classical_to_meoe(ClassicalElements(
        a=1.0 * AU, e=0.4, i=math.radians(10.0), raan=math.radians(15.0),
        argp=math.radians(25.0), nu=math.radians(10.0)))
    oef = classical_to_meoe(ClassicalElements(
        a=3.0 * AU, e=0.6, i=math.radians(40.0), raan=math.radians(25.0),
        argp=math.radians(25.0), nu=math.radians(40.0)))
    return oe0, oef


@pytest.fixture(scope="session")
def earth():
    return make_body("earth", 0.999584, 0.016375, 0.002666, 134.239190,
                     329.982886, 69.425162)


@pytest.fixture(scope="session")
def dionysus():
    return make_body("dionysus", 2.199238, 0.541127, 13.526692, 82.074057,
                     204.296334, 180.509774)


@pytest.fixture(scope="session")
def ao10():
    return make_body("1999ao10", 0.911569, 0.110968, 2.624497, 313.313332,
                     7.678286, 186.819009)


@pytest.fixture(scope="session")
def lg6():
    return make_body("2000lg6", 0.917259, 0.110893, 2.830149, 72.571729,
                     8.144765, 312.238767)


def random_classical(rng, i_max_deg=80.0, e_max=0.7):
    return ClassicalElements(
        a=rng.uniform(0.7, 3.5) * AU,
        e=rng.uniform(0.0, e_max),
        i=math.radians(rng.uniform(0.0, i_max_deg)),
        raan=rng.uniform(0.0, 2.0 * math.pi),
        argp=rng.uniform(0.0, 2.0 * math.pi),
        nu=rng.uniform(0.0, 2.0 * math.pi))


def random_meoe(rng, i_max_deg=80.0, e_max=0.7) -> Meoe:
    return classical_to_meoe(random_classical(rng, i_max_deg, e_max))
