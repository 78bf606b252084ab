# Copyright 2026 The ivdid Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes ck94_synthetic.csv, a stand-in for the fast-food employment survey.

Same column names and coding as the public flat file (state 1 = New Jersey,
0 = Pennsylvania; chain 1-4; counts per wave). Store-level counts are drawn
so that group FTE means sit near 20.4 -> 21.0 (NJ) and 23.3 -> 21.2 (PA),
with heavier heaping in the first wave than in the second.

Usage: python3 generate_ck94_synthetic.py [output.csv]
"""

import random
import sys

SEED = 19940901
N_NJ = 331
N_PA = 79

CHAIN_PROBS = [0.42, 0.20, 0.24, 0.14]
CHAIN_SHIFT = {1: 1.5, 2: -2.5, 3: -0.5, 4: 0.5}

# (full-time mean, part-time mean, managers mean) per state and wave
MEANS = {
    (1, 1): (8.0, 17.4, 3.6),
    (1, 2): (8.7, 16.9, 3.5),
    (0, 1): (9.85, 19.6, 3.5),
    (0, 2): (8.2, 18.8, 3.4),
}
# probability that a count is reported rounded to a multiple of five
HEAP_PROB = {
    (1, 1): 0.55,
    (1, 2): 0.0,
    (0, 1): 0.3,
    (0, 2): 0.0,
}
DECIMAL_PROB = 0.03
MISSING_PROB = 0.025


def heap(x, p, rng):
    if rng.random() < p:
        r = 5 * round(x / 5)
        if r >= 10:
            return r
    return x


def count(mean, sd, rng):
    return max(0, round(rng.gauss(mean, sd)))


def fmt(x):
    if x is None:
        return "."
    if float(x).is_integer():
        return str(int(x))
    return f"{x:.1f}"


def store(sheet, state, rng):
    chain = rng.choices([1, 2, 3, 4], CHAIN_PROBS)[0]
    co_owned = 1 if rng.random() < 0.34 else 0
    size = rng.gauss(0.0, 1.0)
    row = {"sheet": sheet, "chain": chain, "co_owned": co_owned, "state": state}
    for wave, suffix in ((1, ""), (2, "2")):
        ft_mean, pt_mean, mgr_mean = MEANS[(state, wave)]
        shift = CHAIN_SHIFT[chain]
        ft = count(ft_mean + shift + 3.0 * size, 5.0, rng)
        pt = count(pt_mean + shift + 4.0 * size, 6.0, rng)
        mgr = min(6, max(1, count(mgr_mean, 1.0, rng)))
        ft = heap(ft, HEAP_PROB[(state, wave)], rng)
        pt = heap(pt, HEAP_PROB[(state, wave)], rng)
        if rng.random() < DECIMAL_PROB and ft > 0:
            ft = ft - 0.5
        values = [ft, pt, mgr]
        if rng.random() < MISSING_PROB:
            values[rng.randrange(3)] = None
        row["empft" + suffix], row["emppt" + suffix], row["nmgrs" + suffix] = values
    return row


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "ck94_synthetic.csv"
    rng = random.Random(SEED)
    states = [1] * N_NJ + [0] * N_PA
    rng.shuffle(states)
    sheets = rng.sample(range(1, 600), len(states))
    cols = ["sheet", "chain", "co_owned", "state", "empft", "emppt", "nmgrs", "empft2", "emppt2", "nmgrs2"]
    with open(out, "w", newline="\n") as f:
        f.write(",".join(cols) + "\n")
        for sheet, state in zip(sheets, states):
            row = store(sheet, state, rng)
            f.write(",".join(fmt(row[c]) if c.startswith(("emp", "nmg")) else str(row[c]) for c in cols) + "\n")


if __name__ == "__main__":
    main()
