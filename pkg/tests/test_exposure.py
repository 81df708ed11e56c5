import pytest
from hypothesis import given
from hypothesis import strategies as st

from mlagreview.exposure import (
    NETWORK_ATTRIBUTES,
    Ability,
    AttackerProfile,
    CVSSParseError,
    HumanVulnerability,
    NetworkVulnerability,
    UnresolvedVulnerabilityError,
    VulnerabilityDB,
    heaviside,
    human_access_lambda,
    network_lambda,
    normalize_cvss,
    rate_all_edges,
)
from mlagreview.graph import build_graph

unit = st.floats(0, 1)
# attribute values: zero or far enough from zero that a 5-way product cannot underflow
attr = st.one_of(st.just(0.0), st.floats(1e-3, 1))


def netvuln(ac=1.0, av=1.0, pr=1.0, cm=1.0, rc=1.0):
    return NetworkVulnerability("CVE-X", {"AC": ac, "AV": av, "PR": pr, "CM": cm, "RC": rc})


def profile(**t):
    base = {k: 0.0 for k in NETWORK_ATTRIBUTES}
    base.update(t)
    return AttackerProfile(Ability.PROFESSIONAL, base)


@pytest.mark.parametrize("z, expected", [(-0.1, 0), (0, 1), (0.0, 1), (0.3, 1), (-1e-300, 0)])
def test_heaviside(z, expected):
    assert heaviside(z) == expected


def test_normalize_full_vector():
    assert normalize_cvss("AV:N/AC:L/PR:N/E:H/RC:C") == {"AC": 0.9, "AV": 1.0, "PR": 1.0, "CM": 1.0, "RC": 1.0}


def test_normalize_defaults_for_absent_temporal_metrics():
    assert normalize_cvss("AV:P/AC:H/PR:H") == {"AC": 0.4, "AV": 0.2, "PR": 0.27, "CM": 0.7, "RC": 1.0}
    assert normalize_cvss("AV:P/AC:H/PR:H/E:X/RC:X") == normalize_cvss("AV:P/AC:H/PR:H")


def test_normalize_accepts_prefix_and_other_metrics():
    v = normalize_cvss("CVSS:3.1/AV:N/AC:L/PR:L/UI:N/S:U/C:H/I:H/A:H/E:F/RC:R")
    assert v == {"AC": 0.9, "AV": 1.0, "PR": 0.62, "CM": 0.97, "RC": 0.96}


@pytest.mark.parametrize(
    "vector, token",
    [
        ("AC:X", "AC:X"),
        ("AV:N/AC:L/PR:Q", "PR:Q"),
        ("AV:N/AC:L", "PR"),
        ("AV:N/AC/PR:N", "AC"),
        ("AV:N/AC:L/PR:N/ZZ:1", "ZZ:1"),
        ("AV:N/AV:L/AC:L/PR:N", "AV:L"),
        ("CVSS:2.0/AV:N/AC:L/PR:N", "CVSS:2.0"),
    ],
)
def test_normalize_errors_name_token(vector, token):
    with pytest.raises(CVSSParseError) as exc:
        normalize_cvss(vector)
    assert exc.value.token == token


def test_network_lambda_examples():
    assert network_lambda(netvuln(), AttackerProfile.named("naive")) == 1.0
    assert network_lambda(netvuln(ac=0.5), profile(AC=0.6)) == 0.0
    assert network_lambda(netvuln(ac=0.9), profile()) == 0.9


def test_threshold_equal_to_value_passes():
    assert network_lambda(netvuln(ac=0.6), profile(AC=0.6)) == 0.6


def test_human_lambda_examples():
    assert human_access_lambda(HumanVulnerability("v", {"AC": 1.0, "AV": 1.0})) == 1.0
    assert human_access_lambda(HumanVulnerability("v", {"AC": 1.0, "AV": 0.5})) == 0.5
    assert human_access_lambda(HumanVulnerability("v", {"AC": 0.4, "AV": 0.6})) == 0.4 * 0.6


def test_human_levels():
    v = HumanVulnerability.from_levels("Sharing credentials", "Low", "Knowledge")
    assert v.attributes == {"AC": 1.0, "AV": 1.0}
    v = HumanVulnerability.from_levels("E-mail misuse", "high", "PROXIMITY")
    assert v.attributes == {"AC": 0.4, "AV": 0.6}
    with pytest.raises(ValueError):
        HumanVulnerability.from_levels("x", "Medium", "Knowledge")


def test_named_profiles_are_ordered():
    p, a, n = (AttackerProfile.named(x) for x in ("professional", "advanced", "naive"))
    for k in NETWORK_ATTRIBUTES:
        assert p.thresholds[k] <= a.thresholds[k] <= n.thresholds[k]


def test_attribute_validation():
    with pytest.raises(ValueError):
        netvuln(ac=1.5)
    with pytest.raises(ValueError):
        NetworkVulnerability("x", {"AC": 1.0})


@given(st.lists(attr, min_size=5, max_size=5), st.lists(unit, min_size=5, max_size=5), st.integers(0, 4), unit)
def test_network_lambda_monotone(attrs, thresholds, which, bump):
    t = dict(zip(NETWORK_ATTRIBUTES, thresholds))
    base = netvuln(*attrs)
    lam = network_lambda(base, profile(**t))
    assert 0.0 <= lam <= 1.0
    raised = list(attrs)
    raised[which] = max(attrs[which], bump)
    assert network_lambda(netvuln(*raised), profile(**t)) >= lam
    t2 = dict(t)
    key = NETWORK_ATTRIBUTES[which]
    t2[key] = max(t[key], bump)
    assert network_lambda(base, profile(**t2)) <= lam
    gated = any(a < t[k] for a, k in zip(attrs, NETWORK_ATTRIBUTES)) or 0.0 in attrs
    assert (lam == 0.0) == gated


def mixed_fixture():
    g = build_graph(
        [("h", "human"), ("a", "access"), ("n1", "network"), ("n2", "network")],
        [("e1", "h", "a", "hv1"), ("e2", "a", "n1", "cve1"), ("e3", "n1", "n2", "cve2")],
        ["h"],
        ["n2"],
    )
    db = VulnerabilityDB.from_dict(
        {
            "network": [
                {"id": "cve1", "cve": "CVE-1", "cvss_vector": "AV:A/AC:L/PR:L/E:P/RC:R"},
                {"id": "cve2", "cve": "CVE-2", "cvss_vector": "AV:N/AC:H/PR:N"},
            ],
            "human": [{"id": "hv1", "name": "No logout", "ac": "Low", "av": "Proximity"}],
        }
    )
    return g, db


def test_rate_mixed_fixture():
    g, db = mixed_fixture()
    rates = rate_all_edges(g, db, AttackerProfile.named("professional"))
    # hand products: e1 = 1.0*0.6; e2 = 0.9*0.62*0.62*0.94*0.96; e3 = 0.4*1.0*1.0*0.7*1.0
    assert rates["e1"].lam == 1.0 * 0.6
    assert rates["e2"].lam == pytest.approx(0.9 * 0.62 * 0.62 * 0.94 * 0.96, abs=1e-15)
    assert rates["e3"].lam == pytest.approx(0.4 * 0.7, abs=1e-15)
    advanced = rate_all_edges(g, db, AttackerProfile.named("advanced"))
    assert advanced["e3"].lam == pytest.approx(0.28, abs=1e-15)
    naive = rate_all_edges(g, db, AttackerProfile.named("naive"))
    assert naive["e3"].lam == 0.0 and naive["e1"].lam == 0.6


def test_single_edge_fixtures():
    g = build_graph([("x", "network"), ("y", "network")], [("e", "x", "y", "v")])
    db = VulnerabilityDB({"v": netvuln()})
    assert rate_all_edges(g, db, AttackerProfile.named("professional"))["e"].lam == 1.0
    g = build_graph([("x", "human"), ("y", "human")], [("e", "x", "y", "v")])
    db = VulnerabilityDB(human={"v": HumanVulnerability("v", {"AC": 1.0, "AV": 0.5})})
    assert rate_all_edges(g, db, AttackerProfile.named("professional"))["e"].lam == 0.5


def test_unresolved_vulnerability():
    g = build_graph([("x", "network"), ("y", "network")], [("e9", "x", "y", "missing")])
    with pytest.raises(UnresolvedVulnerabilityError) as exc:
        rate_all_edges(g, VulnerabilityDB(), AttackerProfile.named("naive"))
    assert "e9" in str(exc.value) and "missing" in str(exc.value)


def test_layer_kind_mismatch_is_unresolved():
    g = build_graph([("x", "network"), ("y", "network")], [("e1", "x", "y", "hv")])
    db = VulnerabilityDB(human={"hv": HumanVulnerability("hv", {"AC": 1.0, "AV": 1.0})})
    with pytest.raises(UnresolvedVulnerabilityError, match="network-layer"):
        rate_all_edges(g, db, AttackerProfile.named("naive"))


def test_db_errors_are_located():
    with pytest.raises(ValueError, match=r"network\[0\]"):
        VulnerabilityDB.from_dict({"network": [{"id": "a", "cvss_vector": "AC:X"}]})
    with pytest.raises(ValueError, match=r"human\[0\].*'av'"):
        VulnerabilityDB.from_dict({"human": [{"id": "h", "ac": "Low"}]})
