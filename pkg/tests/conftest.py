from pathlib import Path

import pytest

from alphafit import data_path
from alphafit.ingest import read_series_csv

FIXTURES = Path(__file__).parent / "fixtures"

# 400-bit concatenation of the reference samples truncated to 8 bits each
REFERENCE_BITS = (
    "1000110010110111100110101000101101101100101001010111000011100100111101100110"
    "0010110010101000011110010001111011000001001000010110000001011101010111000111"
    "1101111011111010110011000111011011000111000111101010001100100100111100011000"
    "0101011010100100001111000110011101001001000100000100100111101001110010011101"
    "1111000110101110010111000110111110110010000011111010101010101011001101010010"
    "00010101000001011101"
)
REFERENCE_DECIMAL = (
    "0.5496765699760055703169202362353308700123406974106022231112441515212066847"
    "3990606828049163011967627260871299016527460727972"
)
# same samples through the inverse change of variables
CONJUGATE_BITS = (
    "001000010010100100100100001000010001110000100110000111010011001000"
    "111000000110110010110000100001001000100011010000001010000011000000"
    "010100101110001011000011000000111010001011010001111000101100000011"
    "100010010100001111001101100010000000011100000101100010101100011110"
    "001000100000010100100100001001000010010000110110001001110001101000"
    "011101001010000000101000100110001001110001001100001110000110000001"
    "1010"
)
CONJUGATE_DECIMAL = (
    "0.12953401382778691458786695916416542476624903080900276738757903052119237"
    "703845826610929029135345417865945367623690935237"
)
Z0_DECIMAL = (
    "0.5284726382230582232141477613114233413442412684154899609425789100214256216"
    "5617954914071030171163637703155000963962531642"
)


@pytest.fixture(scope="session")
def reference_path():
    return data_path("reference_samples.csv")


@pytest.fixture(scope="session")
def reference(reference_path):
    return read_series_csv(reference_path)


@pytest.fixture(scope="session")
def sp500_path():
    return data_path("sp500_alpha.txt")


_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config.stash[_ACCEPTANCE] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or not (rep.when == "call" or (rep.when == "setup" and not rep.passed)):
        return
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    item.config.stash[_ACCEPTANCE].append((*marker.args, rep.passed, detail))


def pytest_terminal_summary(terminalreporter, config):
    results = sorted(config.stash.get(_ACCEPTANCE, []), key=lambda r: str(r[0]))
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in results:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {title}"
        terminalreporter.write_line(line + (f" ({detail})" if detail else ""))
