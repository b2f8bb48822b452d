"""Write the seeded synthetic fixture (CSVs + config.ini) into a directory.

    python scripts/make_synthetic_fixture.py fixture/ --seed 0 --grid-size 512
    cd fixture && distdyn dynamics --config config.ini
"""

import argparse

from distdyn.synthetic import write_fixture


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("directory")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--grid-size", type=int, default=512)
    args = ap.parse_args()
    cfg = write_fixture(args.directory, seed=args.seed, grid_size=args.grid_size)
    print(f"wrote {cfg}")


if __name__ == "__main__":
    main()
