import pytest

from windsolar.synthetic import synthetic_dataset


@pytest.fixture(scope="session")
def weather_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "weather.csv"
    path.write_text(synthetic_dataset(8760, 2024).to_csv())
    return path


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
