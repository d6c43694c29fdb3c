import pytest

ACCEPTANCE: dict[str, list[tuple[bool, str]]] = {}


@pytest.fixture
def report():
    """``report(criterion, ok, detail)`` records one acceptance check."""

    def _report(criterion: str, ok: bool, detail: str) -> None:
        ACCEPTANCE.setdefault(criterion, []).append((bool(ok), detail))

    return _report


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")

    def order(key):
        head = key.split()[0]
        return (int(head) if head.isdigit() else 99, key)

    for key in sorted(ACCEPTANCE, key=order):
        checks = ACCEPTANCE[key]
        ok = all(c for c, _ in checks)
        tr.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}")
        for c, detail in checks:
            tr.write_line(f"    [{'ok' if c else 'FAIL'}] {detail}")
