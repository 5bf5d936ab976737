import math

import numpy as np
import pytest

from conftest import make_fm, random_fm
from dea_bench.bootstrap import BootstrapConfig, bootstrap_dea, silverman_bandwidth
from dea_bench.data_model import Method, RTS
from dea_bench.engine import DeaConfig, radial_efficiency
from dea_bench.errors import DegenerateSample


@pytest.fixture(scope="module")
def fm():
    return random_fm(np.random.default_rng(11), n=15, m=2, s=1)


def test_bandwidth_formula():
    x = np.array([0.1, 0.4, 0.5, 0.9, 1.0])
    sd = np.std(x, ddof=1)
    iqr = np.subtract(*np.percentile(x, [75, 25]))
    assert silverman_bandwidth(x) == pytest.approx(0.9 * min(sd, iqr / 1.34) * 5 ** -0.2)


def test_bias_correction_direction(fm):
    res = bootstrap_dea(fm, DeaConfig(RTS.CRS), BootstrapConfig(200, seed=1))
    for r in res:
        assert r.bias >= 0
        assert r.bias_corrected_score <= r.original_score
        assert r.ci_lower <= r.ci_upper


def test_original_scores_are_radial(fm):
    res = bootstrap_dea(fm, DeaConfig(RTS.VRS), BootstrapConfig(20, seed=2))
    for i, r in enumerate(res):
        assert r.original_score == pytest.approx(radial_efficiency(fm, i, DeaConfig(RTS.VRS)).score, abs=1e-9)


def test_reproducible_and_seed_sensitive(fm):
    a = bootstrap_dea(fm, DeaConfig(), BootstrapConfig(50, seed=9))
    b = bootstrap_dea(fm, DeaConfig(), BootstrapConfig(50, seed=9))
    c = bootstrap_dea(fm, DeaConfig(), BootstrapConfig(50, seed=10))
    assert a == b
    assert [r.bias for r in a] != [r.bias for r in c]


def test_small_b_has_no_interval(fm):
    res = bootstrap_dea(fm, DeaConfig(), BootstrapConfig(10, seed=0))
    assert all(math.isnan(r.ci_lower) and math.isnan(r.ci_upper) for r in res)
    assert all(math.isfinite(r.bias) for r in res)


def test_degenerate_sample():
    fm = make_fm([[1.0, 2.0]] * 4, [[3.0]] * 4)
    with pytest.raises(DegenerateSample):
        bootstrap_dea(fm, DeaConfig(), BootstrapConfig(10))


def test_config_checks(fm):
    with pytest.raises(ValueError):
        BootstrapConfig(0)
    with pytest.raises(ValueError):
        BootstrapConfig(seed=-1)
    with pytest.raises(ValueError):
        BootstrapConfig(bandwidth_rule="Scott")
    with pytest.raises(ValueError):
        BootstrapConfig(confidence_level=1.0)
    with pytest.raises(ValueError):
        bootstrap_dea(fm, DeaConfig(method=Method.SBM), BootstrapConfig(5))
