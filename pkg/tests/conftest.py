import pytest


@pytest.fixture
def report(capsys):
    """Print a criterion verdict line through pytest's output capture."""

    def _report(num: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d}: {detail}")

    return _report
