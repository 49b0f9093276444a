import json

import numpy as np
import pytest


@pytest.fixture()
def docs_jsonl(tmp_path):
    """100-document raw fixture with fused targets."""
    rng = np.random.default_rng(17)
    fillers = ["support", "burden", "treatment", "community", "stigma", "recovery"]
    verbs = ["persists", "remains", "appears", "improves"]
    path = tmp_path / "docs.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(100):
            year = 1970 + (i % 47)
            words = [fillers[int(j)] for j in rng.integers(0, len(fillers), size=4)]
            text = (
                f"The severe mental_illness {verbs[int(rng.integers(4))]}. "
                f"A {words[0]} of {words[1]} mental_health {verbs[int(rng.integers(4))]} "
                f"the {words[2]} and {words[3]}."
            )
            fh.write(json.dumps({"doc_id": f"doc-{i:03d}", "year": year, "text": text}) + "\n")
    return path


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            lines.append((name, "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.section("sidecar acceptance criteria")
        for name, status in sorted(lines):
            terminalreporter.write_line(f"{status}  {name}")
