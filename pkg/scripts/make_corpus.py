"""Rebuild the frozen handcrafted corpus under src/nsworkbench/data/corpus."""

from nsworkbench.corpus import build_all, freeze

if __name__ == "__main__":
    for path in freeze(build_all()):
        print(path)
