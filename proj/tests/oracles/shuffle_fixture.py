#!/usr/bin/env python3
# Re-derives the epoch shuffle in pure Python: splitmix64 finalizer keyed by
# (seed, epoch), rejection-sampled bounded integers, back-to-front
# Fisher-Yates. Prints the n=52, seed=1 permutations used as fixtures in
# tests/unit/test_textcore.cpp.
#
# Run: python3 tests/oracles/shuffle_fixture.py

M = (1 << 64) - 1


def mix64(x):
    x = (x + 0x9E3779B97F4A7C15) & M
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & M
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & M
    return x ^ (x >> 31)


class Rng:
    def __init__(self, seed, stream):
        self.key = mix64(seed) ^ mix64(stream ^ 0xD1B54A32D192ED03)
        self.counter = 0

    def next(self):
        out = mix64(self.key ^ mix64(self.counter))
        self.counter += 1
        return out

    def below(self, bound):
        limit = M - (M % bound)
        while True:
            x = self.next()
            if x < limit:
                return x % bound


def shuffle(n, epoch, seed):
    order = list(range(n))
    rng = Rng(seed, epoch)
    for i in range(n, 1, -1):
        j = rng.below(i)
        order[i - 1], order[j] = order[j], order[i - 1]
    return order


if __name__ == "__main__":
    for epoch in (1, 2):
        print(epoch, shuffle(52, epoch, 1))
