#!/usr/bin/env python3
# Copyright 2026 The koopid Authors
# SPDX-License-Identifier: Apache-2.0
"""Solve a koopid conic-program dump with cvxpy and print the optimum.

usage: crosscheck_sdp.py DUMP [--solver CLARABEL] [--y OUT.txt]
"""
import argparse
import sys

import numpy as np


def load(path):
    blocks, triplets, objective, nvars = [], [], None, 0
    with open(path) as fh:
        for line in fh:
            if line.startswith("#") or not line.strip():
                continue
            tok = line.split()
            if tok[0] == "vars":
                nvars = int(tok[1])
            elif tok[0] == "blocks":
                pass
            elif tok[0] == "block":
                blocks.append((tok[1], int(tok[2])))
            elif tok[0] == "objective":
                objective = np.array([float(t) for t in tok[1:]])
            else:
                k, v, r, c = (int(t) for t in tok[:4])
                triplets.append((k, v, r, c, float(tok[4])))
    return nvars, objective, blocks, triplets


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("dump")
    ap.add_argument("--solver", default="CLARABEL")
    ap.add_argument("--y")
    args = ap.parse_args()

    import cvxpy as cp

    nvars, c, blocks, trip = load(args.dump)
    y = cp.Variable(nvars)
    per_block = [dict() for _ in blocks]
    const = [np.zeros((n, n)) for _, n in blocks]
    for k, v, r, col, val in trip:
        if v < 0:
            const[k][r, col] += val
        else:
            per_block[k].setdefault(v, []).append((r, col, val))
    cons = []
    for k, (_, n) in enumerate(blocks):
        expr = const[k]
        for v, ents in per_block[k].items():
            F = np.zeros((n, n))
            for r, col, val in ents:
                F[r, col] += val
            expr = expr + y[v] * F
        cons.append(cp.bmat([[expr]]) >> 0 if n > 1 else expr >= 0)
    prob = cp.Problem(cp.Minimize(c @ y), cons)
    prob.solve(solver=args.solver)
    print(f"status {prob.status}")
    print(f"objective {prob.value:.12e}")
    if args.y and y.value is not None:
        np.savetxt(args.y, y.value)
    return 0 if prob.status == "optimal" else 1


if __name__ == "__main__":
    sys.exit(main())
