"""Acceptance gate: one test per criterion, each printing its pass line.

The checks themselves live in laxkit.acceptance so that `laxkit check`
runs exactly the same battery.
"""
import pytest

from laxkit import acceptance


@pytest.mark.parametrize("name,fn",
                         [(name, fn) for name, fn, _group in acceptance.CHECKS],
                         ids=[name.replace(" ", "_")
                              for name, _fn, _g in acceptance.CHECKS])
def test_criterion(name, fn, capsys):
    ok, detail = fn()
    with capsys.disabled():
        print(f"\n[acceptance] {'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, detail
