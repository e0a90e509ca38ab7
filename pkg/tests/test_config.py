import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sepvol.config import GOLDEN, RunConfig, parse_values


def test_defaults_and_skip():
    assert RunConfig().skip == 7**4
    assert RunConfig(case="complex").skip == 13**4
    assert RunConfig().with_overrides(case="complex").skip == 13**4
    assert RunConfig(skip=5).with_overrides(case="complex", skip=9).skip == 9


def test_validation():
    with pytest.raises(ValueError):
        RunConfig(case="qutrit")
    with pytest.raises(ValueError):
        RunConfig(sequence="sobol")
    with pytest.raises(ValueError):
        RunConfig(grid_size=1)
    with pytest.raises(ValueError):
        RunConfig.from_dict({"colour": "blue"})


def test_grid():
    g = RunConfig(grid_size=5, extra_mu=(GOLDEN, 0.5)).grid()
    assert np.array_equal(g, np.array([0, 0.25, 0.5, GOLDEN, 0.75, 1.0]))


def test_digest_tracks_sampling_fields_only():
    base = RunConfig()
    assert base.with_overrides(points=10**7, workers=8, out="elsewhere", interp_degree=6).digest() == base.digest()
    for change in ({"seed": 1}, {"grid_size": 2001}, {"sequence": "uniform-prng"}, {"extra_mu": (0.3,)}):
        assert base.with_overrides(**change).digest() != base.digest()


def test_file_roundtrip(tmp_path):
    cfg = RunConfig(case="complex", points=4_000_000, extra_mu=(GOLDEN, 1 / 3), seed=12, switch_point=0.9)
    cfg.save(tmp_path / "run.ini")
    assert RunConfig.load(tmp_path / "run.ini") == cfg
    with pytest.raises(FileNotFoundError):
        RunConfig.load(tmp_path / "missing.ini")


def test_parse_values():
    v = parse_values({"points": "1e6", "extra_mu": "golden, 1/2", "switch_point": "0.9", "sequence": "faure"})
    assert v == {"points": 1_000_000, "extra_mu": (GOLDEN, 0.5), "switch_point": 0.9, "sequence": "faure"}
    with pytest.raises(ValueError):
        parse_values({"bogus": "1"})


@given(st.integers(0, 2**63 - 1), st.sampled_from(["faure", "scrambled-faure", "uniform-prng"]),
       st.lists(st.floats(0, 1, allow_nan=False), max_size=4))
def test_dict_roundtrip(seed, sequence, extra):
    cfg = RunConfig(seed=seed, sequence=sequence, extra_mu=tuple(extra))
    back = RunConfig.from_dict(cfg.to_dict())
    assert back == cfg and back.digest() == cfg.digest()
