import random

import pytest

from sipsteg.channels import ChannelConfig
from sipsteg.corpus import INVITE_SDP, INVITE_SMIME, WHITESPACE_SAMPLE
from sipsteg.message import parse_message


@pytest.fixture
def invite_sdp():
    return parse_message(INVITE_SDP)


@pytest.fixture
def invite_smime():
    return parse_message(INVITE_SMIME)


@pytest.fixture
def whitespace_sample():
    return parse_message(WHITESPACE_SAMPLE)


@pytest.fixture
def cfg():
    return ChannelConfig()


@pytest.fixture
def rng():
    return random.Random(20081)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
