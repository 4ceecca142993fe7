"""Summarise the seeded random frame suite: bounds, and how often the
generator had to append a full-space atom."""

import argparse

import numpy as np

from cfusion.frame import frame_bounds
from cfusion.generators import RandomFrameSpec, generate_random_frame


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--count", type=int, default=500)
    p.add_argument("--max-dim", type=int, default=8)
    p.add_argument("--max-atoms", type=int, default=5)
    args = p.parse_args()

    raw, lower, upper, small_b = 0, [], [], 0
    for s in range(args.count):
        kw = dict(seed=s, ambient_dim=(1, args.max_dim), atoms=(1, args.max_atoms))
        if not frame_bounds(generate_random_frame(RandomFrameSpec(ensure_frame=False, **kw))).is_frame:
            raw += 1
        F = generate_random_frame(RandomFrameSpec(**kw))
        b = frame_bounds(F)
        lower.append(b.lower)
        upper.append(b.upper)
        small_b += b.upper < 1
    print(f"frames                      {args.count}")
    print(f"bessel-only before repair   {raw} ({raw / args.count:.1%})")
    print(f"lower bound  min/median     {min(lower):.4g} / {np.median(lower):.4g}")
    print(f"upper bound  median/max     {np.median(upper):.4g} / {max(upper):.4g}")
    print(f"frames with B < 1           {small_b}")


if __name__ == "__main__":
    main()
