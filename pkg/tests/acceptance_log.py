"""Pass/fail lines for the acceptance criteria, printed at the end of the pytest session."""

RESULTS = {}  # criterion number -> (passed, detail)


def record(number: int, passed: bool, detail: str) -> bool:
    RESULTS[number] = (bool(passed), detail)
    print(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
    return bool(passed)
