"""
Verdict labels shared by probes, checks and the task runner.
"""
from enum import Enum
from typing import Union


class Status(str, Enum):
    """Outcome of a probe, check or task."""
    PASS = "PASS"
    FAIL = "FAIL"
    COUNTEREXAMPLE = "COUNTEREXAMPLE"
    FOUND = "FOUND"
    NOT_FOUND = "NOT_FOUND"
    NOT_OPEN = "NOT_OPEN"
    DISCONTINUOUS = "DISCONTINUOUS"
    LIKELY_CONTINUOUS = "LIKELY_CONTINUOUS"
    INCONCLUSIVE = "INCONCLUSIVE"
    ERROR = "ERROR"


class Certainty(str, Enum):
    """Sampling gives evidence; exact witnesses and structural descriptions certify."""
    EVIDENCE = "EVIDENCE"
    CERTIFIED = "CERTIFIED"


# Informational outcomes (NOT_FOUND, DISCONTINUOUS, ...) do not fail a run.
_SEVERITY = {
    Status.PASS: 0,
    Status.FOUND: 0,
    Status.NOT_FOUND: 0,
    Status.DISCONTINUOUS: 0,
    Status.LIKELY_CONTINUOUS: 0,
    Status.INCONCLUSIVE: 0,
    Status.FAIL: 1,
    Status.COUNTEREXAMPLE: 1,
    Status.NOT_OPEN: 1,
    Status.ERROR: 1,
}


def severity(status: Union[Status, str]) -> int:
    """Exit-code contribution of a status."""
    return _SEVERITY[Status(status)]
