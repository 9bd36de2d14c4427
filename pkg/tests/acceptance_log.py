"""Collects one result line per acceptance criterion for the terminal summary."""

RESULTS = {}


def record(number, title, ok, detail=""):
    line = f"criterion {number} [{title}]: {'PASS' if ok else 'FAIL'}" + (f" - {detail}" if detail else "")
    RESULTS[(number, title)] = line
    print(line)
    return ok
