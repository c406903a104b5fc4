import pytest

# criterion number -> [(part, ok, detail)]
ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}


@pytest.fixture
def criterion():
    def record(number: int, part: str, ok: bool, detail: str = "") -> bool:
        ACCEPTANCE.setdefault(number, []).append((part, ok, detail))
        line = f"criterion {number} [{part}]: {'PASS' if ok else 'FAIL'}"
        print(line + (f" - {detail}" if detail else ""))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[number]
        status = "PASS" if all(ok for _, ok, _ in parts) else "FAIL"
        detail = "; ".join(f"{name} {'ok' if ok else 'FAILED'}" + (f" ({d})" if d else "") for name, ok, d in parts)
        terminalreporter.write_line(f"criterion {number}: {status} | {detail}")
