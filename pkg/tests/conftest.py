import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from torzeta.spectrum import CappedExponential, LengthSpectrum, PoissonLinear, generate_synthetic  # noqa: E402


def random_spectrum(seed, max_classes=1000, with_multiplicity=False):
    """Synthetic spectrum with at most ``max_classes`` classes and random shape."""
    rng = np.random.default_rng(10_000 + seed)
    systole = float(rng.uniform(0.5, 1.5))
    cutoff = float(rng.uniform(systole + 3.0, systole + 6.0))
    rate = float(rng.uniform(5.0, min(120.0, 0.8 * max_classes / (cutoff - systole))))
    spec = generate_synthetic(seed, systole, cutoff, PoissonLinear(rate))
    if with_multiplicity:
        mults = rng.integers(1, 4, size=len(spec))
        entries = [(e.length, e.holonomy, int(m)) for e, m in zip(spec.entries, mults)]
        spec = LengthSpectrum.build(entries, cutoff, growth_constant=1e300)
        spec = LengthSpectrum.build(entries, cutoff, growth_constant=spec.growth_constant_for(2.0) * (1 + 1e-9))
    return spec


@pytest.fixture(scope="session")
def one_class():
    return LengthSpectrum.build([(1.0, 0.0, 1)], 5.0)


@pytest.fixture(scope="session")
def empty():
    return LengthSpectrum.build([], 5.0)


@pytest.fixture(scope="session")
def small_random():
    return [random_spectrum(seed, max_classes=200, with_multiplicity=seed % 2 == 1) for seed in range(4)]


@pytest.fixture(scope="session")
def large_synthetic():
    """About 6e4 classes, delta = 1, counting growth at the full exponent 2."""
    return generate_synthetic(7, 1.0, 6.5, CappedExponential(2.0, 100_000))


@pytest.fixture(scope="session")
def s_json(tmp_path_factory):
    from torzeta.cli import run
    import io

    path = tmp_path_factory.mktemp("spec") / "s.json"
    rc = run(["gen", "--seed", "7", "--systole", "1", "--cutoff", "8", "--density", "poisson-linear:3",
              "--out", str(path)], io.StringIO(), io.StringIO())
    assert rc == 0
    return path


TWO_PI = 2 * math.pi
