from __future__ import annotations

import csv
import io

import pytest

from cihomol import regular_module
from cihomol.construct import cx1_family, h_family, random_modules
from cihomol.errors import RingMismatchError, UsageError
from cihomol.gk import GClass, divisibility_report, gclass, subgroup_of_lengths
from cihomol.homalg import cosyzygy, syzygy
from cihomol.module import direct_sum, residue_field


def test_gclass_examples(r22, r24):
    assert gclass(regular_module(r22)) == GClass(0, 4)
    assert gclass(residue_field(r22)) == GClass(1, 4)
    for i, h in enumerate(h_family(r24, r24.variable(1)), start=1):
        assert gclass(h) == GClass(2 * i % 8, 8)


def test_gclass_arithmetic():
    assert GClass(3, 4) + GClass(2, 4) == GClass(1, 4)
    assert -GClass(1, 4) == GClass(3, 4)
    with pytest.raises(RingMismatchError):
        GClass(1, 4) + GClass(1, 8)
    with pytest.raises(UsageError):
        GClass(5, 4)


def test_subgroup_examples(r22):
    assert subgroup_of_lengths([regular_module(r22)]) == (4, 4)
    assert subgroup_of_lengths([residue_field(r22)]) == (1, 1)
    even = [m for m in random_modules(r22, 40, seed=0) if m.dim % 2 == 0]
    assert even and subgroup_of_lengths(even) == (2, 2)
    assert subgroup_of_lengths([], ring=r22) == (4, 4)
    with pytest.raises(UsageError):
        subgroup_of_lengths([])


def test_syzygy_class_is_negated(r24):
    for m in random_modules(r24, 20, seed=1):
        assert (syzygy(m).dim + m.dim) % r24.length == 0
        assert gclass(syzygy(m)) == -gclass(m)


def test_subgroup_stable_under_closure(r24):
    fam = [m for m, _ in cx1_family(r24, budget=12, seed=0)]
    base = subgroup_of_lengths(fam)
    grown = fam + [syzygy(m) for m in fam] + [cosyzygy(m) for m in fam] + [direct_sum(fam[0], fam[-1])]
    grown = [m for m in grown if m.dim]
    assert subgroup_of_lengths(grown) == base


def test_divisibility_report_examples(r22, r55):
    a = regular_module(r22)
    assert divisibility_report([a], 4).passed
    rep = divisibility_report([residue_field(r22)], 2)
    assert not rep.passed and rep.failures[0].hash == residue_field(r22).content_hash
    fam = [m for m, _ in cx1_family(r55, budget=50, seed=0)]
    rep = divisibility_report(fam, 5)
    assert len(rep.rows) == 50 and rep.passed
    rows = list(csv.reader(io.StringIO(rep.to_csv())))
    assert rows[0] == ["hash", "length", "class", "verdict"] and len(rows) == 51
    assert rep.to_json()["failures"] == []
    with pytest.raises(UsageError):
        divisibility_report([a], 1)
