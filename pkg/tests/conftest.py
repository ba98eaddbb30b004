import time

import pytest

from grassres.blowup import PipelineConfig, run_pipeline

_RESULTS = {}
_ATLASES = {}


def record(criterion, ok, seconds, detail=""):
    _RESULTS[criterion] = (ok, seconds, detail)


@pytest.fixture
def report():
    return record


def shared_atlas(m, n, **kw):
    """Run a pipeline once per session; returns (atlas, seconds)."""
    key = (m, n, tuple(sorted(kw.items())))
    if key not in _ATLASES:
        t = time.perf_counter()
        atlas = run_pipeline(m, n, PipelineConfig(**kw))
        _ATLASES[key] = (atlas, time.perf_counter() - t)
    return _ATLASES[key]


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(_RESULTS):
        ok, sec, detail = _RESULTS[c]
        terminalreporter.write_line("%s criterion %2d  %7.2fs  %s" % ("PASS" if ok else "FAIL", c, sec, detail))
