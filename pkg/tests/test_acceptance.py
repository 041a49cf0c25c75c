"""One test per acceptance criterion; each prints its PASS/FAIL line."""
import pytest

from focusbif import acceptance
from focusbif.builtins import neuron

RESULT_LINES = []


def _run(fn):
    res = fn(0) if fn is acceptance.criterion_4 else fn()
    line = res.line()
    RESULT_LINES.append(line)
    print(line)
    return res


@pytest.mark.parametrize("fn", acceptance.CRITERIA, ids=[f"criterion_{i}" for i in range(1, 9)])
def test_criterion(fn):
    res = _run(fn)
    assert res.passed, res.line()


def test_shrinkage_for_in_region_neuron():
    # companion to criterion 5 with a neuron that does return to the threshold
    ok, detail = acceptance.shrinkage_check(neuron(-0.1, 1.0, 2.0, c=1.0))
    print(f"neuron(-0.1,1,2) shrinkage: {detail}")
    assert ok, detail
