"""Independent reference implementations used only by tests.

Everything here is written in the most literal style possible: plain
loops over strings and floats, no imports from the package under test,
no shared helpers. When a test disagrees with the package, trust this
file only after re-checking it by hand.
"""

from __future__ import annotations


def oracle_percent(answer: str) -> float:
    if answer == "N":
        return 7.5
    if answer == "P":
        return 32.5
    if answer == "L":
        return 67.5
    if answer == "F":
        return 92.5
    raise ValueError(answer)


def oracle_band(percent: float) -> str:
    # Boundary values belong to the band below them.
    if percent <= 15.0:
        return "N"
    if percent <= 50.0:
        return "P"
    if percent <= 85.0:
        return "L"
    return "F"


def oracle_mean(values: list[float]) -> float:
    total = 0.0
    for v in values:
        total = total + v
    return total / len(values)


def oracle_population_std(values: list[float]) -> float:
    m = oracle_mean(values)
    acc = 0.0
    for v in values:
        acc = acc + (v - m) * (v - m)
    return (acc / len(values)) ** 0.5


def oracle_question(answers: list[str]) -> dict:
    """answers: raw options incl. "Unable". Returns mean/band/counts."""
    usable = []
    for a in answers:
        if a != "Unable":
            usable.append(oracle_percent(a))
    if len(usable) == 0:
        return {"mean": None, "band": None, "answered": 0, "unable": len(answers)}
    return {
        "mean": oracle_mean(usable),
        "band": oracle_band(oracle_mean(usable)),
        "answered": len(usable),
        "unable": len(answers) - len(usable),
    }


def oracle_attribute(answers_by_question: dict[str, list[str]],
                     cv_threshold: float = 0.5) -> dict:
    """Pooled across questions: every non-Unable response weighs equally."""
    pool = []
    for qid in answers_by_question:
        for a in answers_by_question[qid]:
            if a != "Unable":
                pool.append(oracle_percent(a))
    if len(pool) == 0:
        return {"mean": None, "rating": "Unassessed", "cv": None,
                "low_reliability": False, "response_count": 0}
    m = oracle_mean(pool)
    cv = None
    if len(pool) >= 2 and m > 0.0:
        cv = oracle_population_std(pool) / m
    low = cv is not None and cv > cv_threshold
    return {"mean": m, "rating": oracle_band(m), "cv": cv,
            "low_reliability": low, "response_count": len(pool)}


# Attribute ids in ladder order with the capability level each belongs to.
ORACLE_ATTRS = [
    ("PA1.1", 1),
    ("PA2.1", 2), ("PA2.2", 2),
    ("PA3.1", 3), ("PA3.2", 3),
    ("PA4.1", 4), ("PA4.2", 4),
    ("PA5.1", 5), ("PA5.2", 5),
]


def oracle_capability_level(ratings: dict[str, str | None]) -> int:
    """ratings maps attribute id to "N"/"P"/"L"/"F" or None for unassessed.

    A level is reached when every attribute below it is "F" and every
    attribute at it is "L" or "F". Missing ratings satisfy neither.
    """
    best = 0
    for candidate in (1, 2, 3, 4, 5):
        ok = True
        for attr_id, level in ORACLE_ATTRS:
            r = ratings.get(attr_id)
            if level < candidate:
                if r != "F":
                    ok = False
            elif level == candidate:
                if r != "F" and r != "L":
                    ok = False
        if ok:
            best = candidate
    return best


def oracle_process_scores(drivers: list[tuple[str, int]],
                          gaps: list[tuple[str, int, int]],
                          w_importance: float = 0.5,
                          w_gap: float = 0.5) -> list[dict]:
    """drivers: (process id, importance 1..5) tuples, pooled per process.
    gaps: (process id, expectation 1..7, perception 1..7) tuples.
    Returns scored rows in listing order with dense ranks.
    """
    ids = []
    for pid, _imp in drivers:
        if pid not in ids:
            ids.append(pid)
    ids.sort()

    scored = []
    for pid in ids:
        importances = []
        for d_pid, imp in drivers:
            if d_pid == pid:
                importances.append(float(imp))
        imp_norm = (oracle_mean(importances) - 1.0) / 4.0

        diffs = []
        for g_pid, expectation, perception in gaps:
            if g_pid == pid:
                diffs.append(float(expectation) - float(perception))
        gap = oracle_mean(diffs)
        if gap < 0.0:
            gap = 0.0
        gap_norm = gap / 6.0

        combined = w_importance * imp_norm + w_gap * gap_norm
        scored.append({"process": pid, "importance_norm": imp_norm,
                       "gap_norm": gap_norm, "combined": combined})

    # Listing order: combined desc, gap desc, id asc.
    scored.sort(key=lambda s: (-s["combined"], -s["gap_norm"], s["process"]))

    rank = 0
    previous = None
    for s in scored:
        key = (s["combined"], s["gap_norm"])
        if previous is None or key != previous:
            rank = rank + 1
            previous = key
        s["rank"] = rank
    return scored
