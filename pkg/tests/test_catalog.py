from __future__ import annotations

import json
import math

import pytest

from aptree.catalog import CATALOG, example_halfball_bound, get_entry, listing, power_family
from aptree.exceptions import UserError
from aptree.measures import halfball_measure


def test_listing_names():
    names = [row["name"] for row in listing()]
    assert "example-4.2" in names
    assert "lebesgue-halfline" in names
    assert "power(α)" in names
    assert len(names) == len(set(names))
    json.dumps(listing(), allow_nan=False)


def test_example_entry_cites_its_weight():
    entry = get_entry("example-4.2")
    assert entry.provenance == "μ(x)=min{1, x⁻¹}"
    assert entry.K == 1
    assert entry.mu(3.0) == pytest.approx(1 / 3)
    assert "not-admissible" in entry.tags


@pytest.mark.parametrize("entry", CATALOG, ids=lambda e: e.name)
def test_every_entry_builds(entry):
    space = entry.build_space()
    assert space.K == entry.K
    assert space.metric_from_root(5.0) > 0
    described = entry.describe()
    assert described["name"] == entry.name
    assert {"admissible", "not-admissible"} & set(described["tags"])


def test_power_family():
    entry = get_entry("power(1.5)")
    assert entry.name == "power(1.5)"
    assert entry.mu(4.0) == pytest.approx(8.0)
    assert entry.tags == ("template",)
    assert power_family(2.0, K=3).K == 3
    with pytest.raises(UserError):
        get_entry("power(-1)")
    with pytest.raises(UserError):
        get_entry("power(two)")


def test_unknown_entry():
    with pytest.raises(UserError, match="known entries"):
        get_entry("no-such-tree")


def test_example_halfball_bound():
    assert example_halfball_bound(0.5) == pytest.approx(math.log(3.0))
    for c in (0.0, 1.0, -0.2):
        with pytest.raises(UserError):
            example_halfball_bound(c)


@pytest.mark.parametrize("t", [4.0, 40.0, 400.0, 4000.0])
@pytest.mark.parametrize("beta", [0.1, 0.25, 0.5])
def test_example_halfball_stays_under_the_bound(t, beta):
    space = get_entry("example-4.2").build_space()
    r = beta * t
    measure = halfball_measure(space, space.ancestor_at(t, r), 2 * r)
    assert measure <= example_halfball_bound(0.5) + 1e-9
    assert measure == pytest.approx(math.log((1 + beta) / (1 - beta)), rel=1e-9)
