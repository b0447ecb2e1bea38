#!/usr/bin/env python3
"""Generate the default procedural asset pack into a directory."""

import argparse

from obfuscation_bench.assets import build_default_pack, verify_pack


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out", help="output directory for the pack")
    parser.add_argument("--seed", type=int, default=20240001)
    args = parser.parse_args()
    build_default_pack(args.out, seed=args.seed)
    problems = verify_pack(args.out)
    if problems:
        raise SystemExit("generated pack failed verification:\n" + "\n".join(problems))
    print(f"asset pack written to {args.out}")


if __name__ == "__main__":
    main()
