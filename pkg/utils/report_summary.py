import sys

import pandas as pd


def dimension_table(rows):
    """Tabulate {algebra, field, mode, dim, ...} records"""
    df = pd.DataFrame(rows)
    if df.empty:
        return df
    return df.set_index(["algebra", "field", "mode"]).sort_index(kind="stable")


def drift_table(golden_section):
    """Expected vs computed dimensions for every drifting golden key"""
    df = pd.DataFrame(golden_section.get("drift", []), columns=["key", "expected", "computed"])
    return df


def print_summary(title, lines, table=None, ok=True, stream=None):
    """Human summary on stderr; stdout stays reserved for JSON"""
    stream = stream or sys.stderr
    print(f"{'✅' if ok else '❌'} {title}", file=stream)
    print("=" * 60, file=stream)
    for line in lines:
        print(f"  {line}", file=stream)
    if table is not None and not table.empty:
        print("", file=stream)
        print(table.to_string(), file=stream)
    stream.flush()


def print_failure(message, stream=None):
    stream = stream or sys.stderr
    print(f"❌ {message}", file=stream)
    stream.flush()
