from collections import defaultdict

# criterion number -> list of (part, passed, detail); filled by test_acceptance
ACCEPTANCE = defaultdict(list)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[num]
        ok = all(p for _, p, _ in parts)
        detail = "; ".join(f"{name}: {'ok' if p else 'FAIL'} {d}" for name, p, d in parts)
        tr.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
