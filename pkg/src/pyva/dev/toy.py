"""
A small synthetic VA dataset for trying the command line and for tests.

Deaths are drawn from a fixed letter-grade probability table: pick a cause
from :data:`CSMF`, then each symptom independently with the probability its
grade stands for. Cause ``c5`` is maternal and only occurs among women, so
impossible-cause removal has something to do.
"""

import pathlib

import numpy as np
import pandas as pd

from ..coders.grades import GradeTable
from ..core.config import GRADE_TABLE
from ..core.logging import logger
from ..core.utils import write_frame_atomic
from ..model.io import ID_COLUMN

SEED = 20240101
CAUSES = ("c1", "c2", "c3", "c4", "c5")
CSMF = (0.35, 0.25, 0.2, 0.12, 0.08)
CATEGORIES = {"c1": "Infectious", "c2": "Infectious", "c3": "NCD", "c4": "External", "c5": "Maternal"}
GROUPS = {"c1": "Communicable", "c2": "Communicable", "c3": "Non-communicable", "c4": "Injury", "c5": "Maternal"}
N_TRAIN = 300
N_TEST = 200
MISSING_RATE = 0.1
PHYSICIANS = ("doc1", "doc2", "doc3")
PHYSICIAN_ACCURACY = (0.9, 0.75, 0.6)

PROBBASE = {
    #        c1     c2     c3     c4     c5
    "male": ("A", "A", "A", "A+", "N"),
    "female": ("A", "A", "A", "A-", "I"),
    "s01": ("A+", "B", "B", "C", "B"),
    "s02": ("A", "B-", "C", "C", "C"),
    "s03": ("B", "A+", "B", "C", "B"),
    "s04": ("C", "A", "B-", "C", "C"),
    "s05": ("B", "B", "A+", "C", "B"),
    "s06": ("C", "B-", "A", "B", "C"),
    "s07": ("C", "C", "B", "A+", "C"),
    "s08": ("B-", "C", "C", "A", "B-"),
    "s09": ("B", "B", "B", "C", "A+"),
    "s10": ("A-", "A-", "A-", "A-", "A-"),
}

HIERARCHY = pd.DataFrame(
    [
        ("s02", "anc", "s01", "Y", "Y", "0"),
        ("s04", "notask", "s03", "N", "Y", "0"),
    ],
    columns=["symptom", "relation", "higher_symptom", "trigger_value", "implied_value", "neonate_only"],
)


def grade_values():
    table = GradeTable.read(GRADE_TABLE)
    return dict(zip(table.labels, map(float, table.values)))


def condprob():
    values = grade_values()
    return pd.DataFrame(
        {c: [values[PROBBASE[s][j]] for s in PROBBASE] for j, c in enumerate(CAUSES)},
        index=list(PROBBASE),
    )


def simulate(n, rng, prefix):
    """``n`` labeled deaths as canonical tokens plus their causes."""
    probs = condprob()
    causes = rng.choice(len(CAUSES), size=n, p=CSMF)
    rows = []
    for k in causes:
        cause = CAUSES[k]
        male = cause != "c5" and rng.random() < 0.5
        row = {"male": "Y" if male else "", "female": "" if male else "Y"}
        for symptom in list(PROBBASE)[2:]:
            if rng.random() < MISSING_RATE:
                row[symptom] = "."
            else:
                row[symptom] = "Y" if rng.random() < probs.loc[symptom, cause] else ""
        rows.append(row)
    frame = pd.DataFrame(rows, columns=list(PROBBASE))
    frame.insert(0, ID_COLUMN, [f"{prefix}{i + 1:04d}" for i in range(n)])
    frame["Cause"] = [CAUSES[k] for k in causes]
    return frame


def physician_codes(deaths, rng):
    """Two of three physicians code each death, each right with their own accuracy."""
    categories = sorted(set(CATEGORIES.values()))
    rows = []
    for death_id, cause in zip(deaths[ID_COLUMN], deaths["Cause"]):
        row = {ID_COLUMN: death_id}
        chosen = sorted(rng.choice(len(PHYSICIANS), size=2, replace=False))
        for slot, p in enumerate(chosen, start=1):
            if rng.random() < 0.05:
                code = "Unknown"
            elif rng.random() < PHYSICIAN_ACCURACY[p]:
                code = CATEGORIES[cause]
            else:
                code = rng.choice([c for c in categories if c != CATEGORIES[cause]])
            row[f"code{slot}"] = str(code)
            row[f"rev{slot}"] = PHYSICIANS[p]
        rows.append(row)
    return pd.DataFrame(rows, columns=[ID_COLUMN, "code1", "rev1", "code2", "rev2"])


def write_toy_data(directory, seed=SEED):
    """
    Write the toy dataset into ``directory`` and return the written paths.

    Files: ``train.csv`` and ``test.csv`` (canonical symptoms plus a
    ``Cause`` column), ``probbase.csv``, ``prior.csv``, ``hierarchy.csv``,
    ``grouping.csv``, ``physician.csv`` (codes for the test deaths) and
    ``categories.csv`` (cause to physician category).
    """
    directory = pathlib.Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    train = simulate(N_TRAIN, rng, "tr")
    test = simulate(N_TEST, rng, "te")
    tables = {
        "train.csv": train,
        "test.csv": test,
        "probbase.csv": pd.DataFrame(PROBBASE, index=list(CAUSES)).T.rename_axis("symptom").reset_index(),
        "prior.csv": pd.DataFrame({"cause": CAUSES, "prior": [1.0] * len(CAUSES), "group": [""] * len(CAUSES)}),
        "hierarchy.csv": HIERARCHY,
        "grouping.csv": pd.DataFrame({"cause": list(GROUPS), "group": list(GROUPS.values())}),
        "physician.csv": physician_codes(test, rng),
        "categories.csv": pd.DataFrame({"cause": list(CATEGORIES), "category": list(CATEGORIES.values())}),
    }
    written = []
    for name, frame in tables.items():
        write_frame_atomic(frame, directory / name)
        written.append(directory / name)
    logger.info(f"Wrote toy data ({N_TRAIN} training, {N_TEST} test deaths) to {directory}")
    return written
