import pytest

from smoothcert import verify


@pytest.fixture(scope="module")
def clean():
    return verify.run_all(quick=True)


def test_clean_report_passes(clean):
    text, ok = verify.report(clean)
    assert ok
    assert {c.status for c in clean} == {verify.PASS, verify.WARN}
    warned = {c.name for c in clean if c.status == verify.WARN}
    assert warned == {"TV row as printed", "Li l1 radius sign", "odd-shape closed form is conservative"}
    assert text.splitlines()[-1].endswith("0 failed")


@pytest.mark.parametrize("name", verify.CORRUPTIBLE)
def test_each_corruption_is_caught(name):
    checks = verify.run_all(corrupt=name, quick=True)
    _, ok = verify.report(checks)
    assert not ok
    assert any(c.status == verify.FAIL for c in checks)
