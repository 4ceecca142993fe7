"""Regenerate the scenario fixtures in tests/data."""

import argparse
from pathlib import Path

from cfusion.golden import golden_files

DEFAULT_DIR = Path(__file__).resolve().parent.parent / "tests" / "data"


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", type=Path, default=DEFAULT_DIR)
    args = p.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, text in golden_files().items():
        (args.out / name).write_text(text, encoding="utf-8")
        print(f"wrote {args.out / name}")


if __name__ == "__main__":
    main()
