"""B for every ordered (gap, plate) pair of the built-in table, with its spread."""
import itertools

from phononic_casimir.closedforms import b_constant
from phononic_casimir.materials import builtin_table


def main():
    mats = builtin_table()
    vals = []
    print(f"{'gap':<10}{'plate':<10}{'B':>10}")
    for gap, plate in itertools.permutations(mats, 2):
        b = b_constant(gap, plate)
        vals.append(b)
        print(f"{gap.name:<10}{plate.name:<10}{b:10.4f}")
    print(f"# {len(vals)} pairs, min {min(vals):.4g}, max {max(vals):.4g}")


if __name__ == "__main__":
    main()
