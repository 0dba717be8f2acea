import pytest

from gravrec.config import RunConfig
from gravrec.gradcheck import (FIXTURE_DIM, GROUPS, fixture_config,
                               format_table, gradcheck, param_group)


def test_param_group():
    assert param_group("ind.collaboration.w0") == "channels"
    assert param_group("ind.cotopic.x") == "features"
    assert param_group("ic.w1") == "shared"
    assert param_group("ic.p0") == "edges"
    assert param_group("ind.covenue.a1") == "edges"
    assert param_group("att.q") == "fusion"
    assert param_group("align.b") == "alignment"
    assert param_group("paper.emb") == "papers"
    with pytest.raises(ValueError):
        param_group("bogus")


def test_fixture_config_keeps_switches():
    rc = RunConfig({"influence_mode": "uniform", "layers": 3,
                    "sample_sizes": [5, 5, 5]})
    fc = fixture_config(rc)
    assert fc.get("dim") == FIXTURE_DIM
    assert fc.get("influence_mode") == "uniform"
    assert fc.get("sample_sizes") == [2, 2, 2]


def test_default_config_passes():
    results = gradcheck(RunConfig())
    assert all(r.passed for r in results), format_table(results)
    assert set(r.group for r in results) == set(GROUPS)
    labels = set(r.label for r in results)
    assert labels == {"gravity", "attention/no-content"}


def test_attention_no_content_runs_once():
    results = gradcheck(
        RunConfig({"influence_mode": "attention", "use_content": False}))
    assert set(r.label for r in results) == {"attention"}
    assert all(r.passed for r in results), format_table(results)


@pytest.mark.parametrize("group", ["alignment", "channels", "fusion"])
def test_corrupt_group_fails(group):
    results = gradcheck(RunConfig(), corrupt=group)
    failed = set(r.group for r in results if not r.passed)
    assert failed == {group}


def test_format_table():
    results = gradcheck(RunConfig({"use_interdependent": False}))
    assert "shared" not in [r.group for r in results if r.label == "gravity"]
    text = format_table(results)
    assert text.splitlines()[0].split()[:2] == ["model", "group"]
    assert text.splitlines()[-1].startswith("max relative error:")
