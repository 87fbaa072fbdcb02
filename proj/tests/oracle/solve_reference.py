#!/usr/bin/env python3
"""Reference objectives for the small solver instances.

Reads the JSON emitted by tools/dump_solver_instances and solves each
instance

    min  |R_long e - I|_2^2 + alpha |R_trans e|_1 + beta |W e|_1

with cvxpy, printing one objective per line with 17 significant digits.
The frozen copies live in tests/solver_reference.hpp; regenerate with

    build/tools/dump_solver_instances instances.json
    python3 tests/oracle/solve_reference.py instances.json

and paste the printed block into the header.
"""

import json
import sys

import cvxpy as cp
import numpy as np


def solve_instance(inst):
    m = inst["num_chords"]
    n2 = 2 * inst["num_nodes"]
    r_long = np.array(inst["r_long"]).reshape(m, n2)
    r_trans = np.array(inst["r_trans"]).reshape(m, n2)
    w = np.array(inst["weighted_laplace"]).reshape(n2, n2)
    data = np.array(inst["data"])
    e = cp.Variable(n2)
    objective = (
        cp.sum_squares(r_long @ e - data)
        + inst["alpha"] * cp.norm1(r_trans @ e)
        + inst["beta"] * cp.norm1(w @ e)
    )
    prob = cp.Problem(cp.Minimize(objective))
    prob.solve(solver=cp.CLARABEL, max_iter=200000)
    if prob.status != cp.OPTIMAL:
        raise RuntimeError(f"instance {inst['index']}: status {prob.status}")
    return prob.value


def main():
    if len(sys.argv) != 2:
        sys.exit("usage: solve_reference.py instances.json")
    with open(sys.argv[1]) as f:
        instances = json.load(f)
    print("inline constexpr double kReferenceObjectives[] = {")
    for inst in instances:
        val = solve_instance(inst)
        print(f"    {val:.17g},  // instance {inst['index']}")
    print("};")


if __name__ == "__main__":
    main()
