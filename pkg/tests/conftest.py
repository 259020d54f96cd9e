import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

CORPUS = os.path.join(os.path.dirname(__file__), "..", "src", "multikoszul", "corpus")


def corpus_path(name: str) -> str:
    return os.path.abspath(os.path.join(CORPUS, name + ".alg"))


def corpus_names():
    return sorted(f[:-4] for f in os.listdir(CORPUS) if f.endswith(".alg"))


@pytest.fixture
def corpus():
    return corpus_path


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
