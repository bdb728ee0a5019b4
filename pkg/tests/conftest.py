"""Shared fixtures and the per-criterion acceptance summary."""

from collections import OrderedDict

import pytest

ACCEPTANCE_TITLES = OrderedDict(
    [
        (1, "limit law: KS distance < 0.01 at N=500"),
        (2, "average throughput vs MC, N in {40,100,200}"),
        (3, "effective throughput vs MC, A=1/2, N=100"),
        (4, "outage vs MC over T, N=30, with saturation"),
        (5, "BFSK BER vs MC, N in {50,100}"),
        (6, "unlimited-power limit of the limited forms"),
        (7, "MGF identity of the limit law"),
        (8, "negative-moment identity via Tricomi U"),
        (9, "special functions and BER/outage oracles"),
        (10, "imperfect CSI: monotone in rho, exact at rho=1"),
        (11, "compare output byte-identical across runs and threads"),
    ]
)


class Ledger:
    """Collects (ok, detail) checks per acceptance criterion."""

    def __init__(self):
        self.checks = {}

    def check(self, criterion: int, ok: bool, detail: str) -> bool:
        self.checks.setdefault(criterion, []).append((bool(ok), detail))
        return bool(ok)


_LEDGER = Ledger()


@pytest.fixture(scope="session")
def acceptance():
    return _LEDGER


def pytest_terminal_summary(terminalreporter):
    if not _LEDGER.checks:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit, title in ACCEPTANCE_TITLES.items():
        checks = _LEDGER.checks.get(crit)
        if not checks:
            tr.write_line(f"criterion {crit:2d}: NOT RUN  {title}")
            continue
        failed = [d for ok, d in checks if not ok]
        status = "PASS" if not failed else "FAIL"
        note = f" ({len(failed)}/{len(checks)} checks failed; first: {failed[0]})" if failed else f" ({len(checks)} checks)"
        tr.write_line(f"criterion {crit:2d}: {status}  {title}{note}")
