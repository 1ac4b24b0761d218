import os
import pathlib

import pytest

import tdmkit

FIXTURES = pathlib.Path(os.environ.get("TDM_FIXTURES", pathlib.Path(__file__).parents[2] / "fixtures"))


def read(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


@pytest.fixture(scope="module")
def healthcare():
    return tdmkit.loads(read("healthcare.tdm"))


@pytest.fixture(scope="module")
def confichair():
    return tdmkit.loads(read("confichair.tdm"))


def test_load_and_validate(healthcare):
    assert healthcare.name == "healthcare"
    report = healthcare.validate()
    assert report["violations"] == []
    assert len(report["checked"]) == 9


def test_diagnostics_for_bad_text():
    diags = tdmkit.diagnostics("entity X : Bogus\n")
    assert len(diags) == 1
    assert diags[0]["severity"] == "error"
    assert "Person" in diags[0]["message"]
    with pytest.raises(ValueError):
        tdmkit.loads("entity X : Bogus\n")


def test_derived_domains(healthcare, confichair):
    names = [d["name"] for d in healthcare.domains()]
    assert names == [
        "MS1-MS2-Stats-TDom",
        "SS1-SS2-Findings-TDom",
        "SS1-SS3-Demo-TDom",
        "SS2-SS3-Demo-TDom",
        "SS3-Internal-TDom",
    ]
    assert len(confichair.domains()) == 4


def test_reachability(healthcare):
    assert healthcare.reach("SS3.Demographics", "SS3.Births") == [
        "SS3.Demographics",
        "SS3.Births",
    ]
    assert healthcare.reach("SS3.Births", "SS3.Demographics") is None


def test_flow_log_checking(healthcare):
    violations = healthcare.check_flow_log(read("healthcare-flows.log"))
    assert [v["seq"] for v in violations] == [4, 5]


def test_members(healthcare):
    assert healthcare.members("SS1-SS3-Demo-TDom") == ["SS1", "SS3"]


def test_clone_policy(healthcare):
    cloned, clone_id = healthcare.clone_policy(
        "P-Stats.Stats-TDom", "Healthcare", "Authority"
    )
    assert clone_id == "P-Stats.Stats-TDom-clone"
    assert len(cloned.domains()) == 6  # the clone derives one more trust domain


def test_simulate_and_audit(confichair):
    run = confichair.simulate(read("confichair-requests.txt"))
    kinds = [d["kind"] for d in run["decisions"]]
    assert kinds.count("Denial") == 6
    assert kinds.count("Permission") == 7
    assert kinds.count("Obligation") == 1
    assert run["decisions"][0]["influenced"] == ["P-Secrecy"]
    assert run["chain_ok"] is True
    assert run["events"] >= 20

    verdict = tdmkit.verify_store(run["store"])
    assert verdict["ok"] is True

    tampered = run["store"].replace("read-content", "read-CONTENT", 1)
    bad = tdmkit.verify_store(tampered)
    assert bad["ok"] is False
    assert bad["first_bad_index"] is not None


def test_fmt_round_trip(healthcare):
    canon = healthcare.serialize()
    assert tdmkit.fmt(canon) == canon


def test_axiom_catalog():
    catalog = tdmkit.axiom_catalog()
    assert [a["id"] for a in catalog] == [f"AX{i}" for i in range(1, 13)]
