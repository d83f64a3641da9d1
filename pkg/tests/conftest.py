from __future__ import annotations

from pathlib import Path

import pytest

from gplus import load_dataset, load_subtask_ledger

PRIMITIVES = [
    # abilities listed first on purpose: loading must reorder skills, abilities, knowledge
    ("1.A.1.a.1", "Ability", "Oral Comprehension"),
    ("1.A.3.c.3", "Ability", "Gross Body Coordination"),
    ("2.A.1.a", "Skill", "Reading Comprehension"),
    ("2.A.1.b", "Skill", "Active Listening"),
    ("2.C.1.a", "Knowledge", "Administration and Management"),
    ("2.C.4.a", "Knowledge", "Mathematics"),
]
# canonical order after load: 2.A.1.a, 2.A.1.b, 1.A.1.a.1, 1.A.3.c.3, 2.C.1.a, 2.C.4.a
CANONICAL_IDS = ["2.A.1.a", "2.A.1.b", "1.A.1.a.1", "1.A.3.c.3", "2.C.1.a", "2.C.4.a"]

OCCUPATIONS = [
    ("11-1011.00", "Chief Executives"),
    ("41-2031.00", "Retail Salespersons"),
    ("41-9012.00", "Models"),
]
# levels in canonical order
OCC_LEVELS = {
    "11-1011.00": [5.0, 4.25, 5.0, 2.0, 6.5, 3.0],
    "41-2031.00": [3.0, 4.5, 3.12, 2.5, 2.0, 2.0],
    "41-9012.00": [1.0, 1.5, 2.0, 4.0, 0.5, 0.0],
}

ACTIVITIES = [
    ("4.A.1", "Information Input"),
    ("4.A.1.a", "Looking for and Receiving Job-Related Information"),
    ("4.A.1.a.1", "Getting Information"),
    ("4.A.1.a.1.I14", "Collect data about consumer needs or opinions"),
    ("4.A.1.a.1.I14.D02", "Gather customer or product information to determine customer needs"),
    ("4.A.1.a.1.I14.D03", "Answer customer questions about goods or services"),
    ("4.A.4", "Interacting with Others"),
    ("4.A.4.a", "Communicating and Interacting"),
    ("4.A.4.a.4", "Establishing and Maintaining Interpersonal Relationships"),
    ("4.A.4.a.4.I01", "Greet or welcome people"),
    ("4.A.4.a.4.I01.D01", "Greet customers, patrons, or visitors"),
    ("4.A.4.a.4.I01.D02", "Escort visitors"),
]

TASKS = [
    (1, "11-1011.00", 90, "Core", "Resolve customer complaints regarding sales and service"),
    (20, "11-1011.00", 85, "Core", "Direct and coordinate operations"),
    (694, "41-2031.00", 96, "Core", "Greet customers and ascertain what each customer wants or needs"),
    (695, "41-2031.00", 92, "Core", "Recommend, select, and help locate or obtain merchandise"),
    (23955, "41-9012.00", 57, "Supplemental", "Pose for photographs"),
]

TASK_DWA = [
    (1, "4.A.1.a.1.I14.D03"),
    (20, "4.A.1.a.1.I14.D02"),
    (694, "4.A.1.a.1.I14.D02"),
    (694, "4.A.4.a.4.I01.D01"),
    (23955, "4.A.4.a.4.I01.D01"),
]

LEDGER_HEADER = ["subtask_id", "description", "type_tag", "first_success_date",
                 "control_mode", "succeeded", "fingerprint"]
LEDGER_ROWS = [
    ["S3", "wave hello", "UAT", "2022-03-01", "AnalogousTeleop", "true", "2.A.1.b=1.5;1.A.3.c.3=1"],
    ["S1", "read a sign", "TRL-1", "2022-01-10", "AnalogousTeleop", "true", "2.A.1.a=2;1.A.1.a.1=1.25"],
    ["S1", "read a sign", "TRL-1", "2022-02-15", "Autonomous", "true", "2.A.1.a=2;1.A.1.a.1=1.25"],
    ["S2", "count coins", "EOY-22", "2022-01-10", "AnalogousTeleop", "true", "2.C.4.a=2.5"],
    ["S4", "lift a box", "UAT", "2022-04-01", "AnalogousTeleop", "false", "1.A.3.c.3=3"],
    ["S5", "answer a question", "LLM-1", "2022-04-20", "Autonomous", "true", "2.C.1.a=3;2.A.1.b=1"],
    ["S6", "greet a customer", "UAT", "2022-05-05", "AnalogousTeleop", "true", ""],
]


def write_tsv(path: Path, header, rows) -> Path:
    lines = ["\t".join(header)] + ["\t".join(str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_fixture(directory: Path, **overrides) -> Path:
    """Write the small fixture dataset; ``overrides`` replace whole row lists by file kind."""
    directory.mkdir(parents=True, exist_ok=True)
    ratings = [
        (soc, eid, level)
        for soc, levels in OCC_LEVELS.items()
        for eid, level in zip(CANONICAL_IDS, levels)
    ]
    files = {
        "primitives": (["element_id", "kind", "name"], PRIMITIVES),
        "occupations": (["soc_code", "title"], OCCUPATIONS),
        "ratings": (["soc_code", "element_id", "level"], ratings),
        "tasks": (["task_id", "soc_code", "importance", "category", "text"], TASKS),
        "task_dwa": (["task_id", "dwa_label"], TASK_DWA),
        "activities": (["label", "title"], ACTIVITIES),
    }
    for kind, (header, rows) in files.items():
        write_tsv(directory / f"{kind}.tsv", header, overrides.get(kind, rows))
    return directory


@pytest.fixture
def data_dir(tmp_path) -> Path:
    return write_fixture(tmp_path / "data")


@pytest.fixture
def dataset(data_dir):
    return load_dataset(data_dir)


@pytest.fixture
def ledger_path(tmp_path) -> Path:
    return write_tsv(tmp_path / "subtasks.tsv", LEDGER_HEADER, LEDGER_ROWS)


@pytest.fixture
def ledger(ledger_path, dataset):
    return load_subtask_ledger(ledger_path, dataset)


# --- acceptance criterion reporting ---------------------------------------------

_CRITERIA: list[tuple[str, str]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    name = marker.args[0]
    if report.when == "call":
        status = "PASS" if report.passed else "SKIP" if report.skipped else "FAIL"
        _CRITERIA.append((name, status))
    elif report.when == "setup" and report.skipped:
        _CRITERIA.append((name, "SKIP"))
    elif report.when == "setup" and report.failed:
        _CRITERIA.append((name, "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in _CRITERIA:
        terminalreporter.write_line(f"{status:4}  {name}")
