import time

_ACCEPTANCE_RESULTS = {}


def record_criterion(number, label, passed, detail="", runtime=None):
    if runtime is None and number in _ACCEPTANCE_RESULTS:
        runtime = _ACCEPTANCE_RESULTS[number][3]
    _ACCEPTANCE_RESULTS[number] = (label, passed, detail, runtime)


class criterion_timer:
    def __init__(self, number, label):
        self.number = number
        self.label = label

    def __enter__(self):
        self.t0 = time.time()
        return self

    def __exit__(self, exc_type, exc, tb):
        runtime = time.time() - self.t0
        if self.number in _ACCEPTANCE_RESULTS:
            label, passed, detail, prev = _ACCEPTANCE_RESULTS[self.number]
            runtime += prev or 0.0
            if exc_type is not None:
                passed = False
            _ACCEPTANCE_RESULTS[self.number] = (label, passed, detail, runtime)
        else:
            _ACCEPTANCE_RESULTS[self.number] = (self.label, exc_type is None, "", runtime)
        return False


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_ACCEPTANCE_RESULTS):
        label, passed, detail, runtime = _ACCEPTANCE_RESULTS[number]
        status = "PASS" if passed else "FAIL"
        extra = f" ({runtime:.0f}s)" if runtime is not None else ""
        line = f"criterion {number:>2}: {status}{extra}  {label}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
