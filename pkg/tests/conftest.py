import pytest

from regdeloc import complete_bipartite, complete_graph, generate_random_regular, petersen_graph


@pytest.fixture(scope="session")
def k4():
    return complete_graph(4)


@pytest.fixture(scope="session")
def petersen():
    return petersen_graph()


@pytest.fixture(scope="session")
def k33():
    return complete_bipartite(3)


@pytest.fixture(scope="session")
def rrg60():
    return generate_random_regular(60, 2, seed=11)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
