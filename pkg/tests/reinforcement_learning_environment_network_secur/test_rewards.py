import pytest
from hypothesis import given
from hypothesis import strategies as st

from acdgym.errors import ConfigurationError
from acdgym.rewards import (EnvKind, RewardKind, RewardSpec, TransitionSummary, compute_reward,
                            reward_cage, reward_yt)

YT_TAGS = ("scan_network", "restore_node", "place_decoy")
ROLES = ("user_host", "enterprise_host", "defender_host", "op_host", "op_server")


def yt(kind):
    return RewardSpec(RewardKind[kind], EnvKind.YT)


def cage(kind):
    return RewardSpec(RewardKind[kind], EnvKind.CAGE)


def yt_summary(k, n=5, tag="scan_network"):
    return TransitionSummary(end_compromised_count=k, total_nodes=n, blue_action=tag)


def cage_summary(privileged=(), impacted=False, confined=True, tag="sleep"):
    access = tuple((role, "privileged" if role in privileged else "none") for role in ROLES)
    return TransitionSummary(end_compromised_count=0, total_nodes=13, blue_action=tag,
                             host_access=access, impacted_this_step=impacted,
                             red_confined_to_user_subnet=confined)


# -- YT examples ------------------------------------------------------------------

def test_sp_clean_network():
    assert reward_yt(yt("SP"), yt_summary(0)) == 1.0


def test_cdn_two_compromised_restore():
    assert reward_yt(yt("CDN"), yt_summary(2, tag="restore_node")) == -2.5


def test_cdn_action_costs():
    assert reward_yt(yt("CDN"), yt_summary(0, tag="place_decoy")) == -0.25
    assert reward_yt(yt("CDN"), yt_summary(0, tag="scan_network")) == 0.0


def test_ablated_sp():
    assert reward_yt(yt("ABLATED_SP"), yt_summary(0)) == 0.0
    assert reward_yt(yt("ABLATED_SP"), yt_summary(1)) == -1.0


def test_sn_fires_only_when_saturated():
    assert reward_yt(yt("SN"), yt_summary(5)) == -1.0
    assert reward_yt(yt("SN"), yt_summary(4)) == 0.0


@given(st.integers(2, 50), st.data(), st.sampled_from(YT_TAGS))
def test_yt_identities(n, data, tag):
    k = data.draw(st.integers(0, n))
    s = yt_summary(k, n, tag)
    sp, sn = reward_yt(yt("SP"), s), reward_yt(yt("SN"), s)
    assert reward_yt(yt("SPN"), s) == sp + sn
    assert reward_yt(yt("ABLATED_SP"), s) == sp - 1.0
    assert reward_yt(yt("DN"), s) == -k
    assert not (sp and sn)                # mutually exclusive triggers for n >= 2
    assert sp in (0.0, 1.0) and sn in (-1.0, 0.0)
    assert reward_yt(yt("SP"), s) == reward_yt(yt("SP"), s)


def test_count_out_of_range():
    with pytest.raises(ValueError):
        yt_summary(6, 5)


# -- CAGE examples ----------------------------------------------------------------------

def test_cage_sn_on_impact():
    assert reward_cage(cage("SN"), cage_summary(impacted=True)) == -1.0


def test_cage_cdn_enterprise_restore():
    assert reward_cage(cage("CDN"), cage_summary({"enterprise_host"}, tag="restore")) == -2.0


def test_cage_cdn_server_impact_monitor():
    assert reward_cage(cage("CDN"), cage_summary({"op_server"}, impacted=True, tag="monitor")) == -11.0


def test_cage_cdn_low_value_hosts():
    assert reward_cage(cage("CDN"), cage_summary({"user_host", "op_host"})) == pytest.approx(-0.2)


def test_cage_sp_confinement():
    assert reward_cage(cage("SP"), cage_summary(confined=True)) == 1.0
    assert reward_cage(cage("SP"), cage_summary(confined=False)) == 0.0


@given(st.booleans(), st.booleans())
def test_cage_spn_is_sum(impacted, confined):
    s = cage_summary(impacted=impacted, confined=confined)
    assert reward_cage(cage("SPN"), s) == reward_cage(cage("SP"), s) + reward_cage(cage("SN"), s)


@pytest.mark.parametrize("kind", ["DN", "ABLATED_SP"])
def test_yt_only_kinds_rejected_for_cage(kind):
    with pytest.raises(ConfigurationError):
        cage(kind)


def test_environment_mismatch():
    with pytest.raises(ConfigurationError):
        reward_yt(cage("SP"), yt_summary(0))
    with pytest.raises(ConfigurationError):
        reward_cage(yt("SP"), cage_summary())


def test_parse_and_dispatch():
    spec = RewardSpec.parse("spn", "yt")
    assert spec == yt("SPN")
    assert compute_reward(spec, yt_summary(0)) == 1.0
    with pytest.raises(ConfigurationError):
        RewardSpec.parse("XX", "YT")
