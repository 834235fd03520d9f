from __future__ import annotations

CRITERIA: dict[int, tuple[str, bool]] = {}


def record(number: int, name: str, ok: bool) -> None:
    CRITERIA[number] = (name, ok)
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {name}")


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        name, ok = CRITERIA[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {name}")
