import argparse
import csv
from pathlib import Path


def parser(description, default_slots=1_000_000):
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--out", type=Path, default=Path("results"))
    p.add_argument("--slots", type=int, default=default_slots)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--warmup", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--no-sim", action="store_true", help="analytic columns only")
    return p


def write_rows(path: Path, rows: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("%.10g" % v if isinstance(v, float) else v)
                             for k, v in row.items()})
    print(f"wrote {len(rows)} rows to {path}")
