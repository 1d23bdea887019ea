import pytest

from groupbuy_inventory import AuctionParams, CostParams, auction_statistics

# Lines recorded by test_acceptance.py, echoed after the run summary so
# every criterion shows one explicit pass/fail line.
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for criterion in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[criterion])


@pytest.fixture
def base_auction() -> AuctionParams:
    return AuctionParams(n_required=100, max_time=7.0, arrival_rate=14.0)


@pytest.fixture
def base_costs() -> CostParams:
    return CostParams(
        dispatch_cost=40.0,
        unit_transport_cost=4.0,
        holding_rate=0.02,
        failure_penalty=10.0,
        reorder_cost=300.0,
    )


@pytest.fixture
def base_stats(base_auction):
    return auction_statistics(base_auction)
