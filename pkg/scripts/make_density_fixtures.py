"""Write small DIMACS fixtures whose clause/variable ratio matches the AES-64 KPA
instances (18, 20 and 30 plaintexts): 303.4, 304.2 and 306.6.

The clauses are random; only L and N are chosen to reproduce the densities.
"""

import argparse
from pathlib import Path

import numpy as np

# name -> (L, N)
FIXTURES = {"18vs_like": (5, 1517), "20vs_like": (5, 1521), "30vs_like": (5, 1533)}


def random_cnf(num_vars, num_clauses, seed):
    rng = np.random.default_rng(seed)
    lines = [f"c density-matched fixture, N/L = {num_clauses / num_vars}",
             f"p cnf {num_vars} {num_clauses}"]
    for _ in range(num_clauses):
        k = int(rng.integers(1, num_vars + 1))
        vars_ = rng.choice(np.arange(1, num_vars + 1), size=k, replace=False)
        signs = rng.choice([-1, 1], size=k)
        lines.append(" ".join(str(int(v * s)) for v, s in zip(vars_, signs)) + " 0")
    return "\n".join(lines) + "\n"


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "tests" / "data"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i, (name, (L, N)) in enumerate(FIXTURES.items()):
        (out / f"{name}.cnf").write_text(random_cnf(L, N, seed=i))
        print(f"{name}.cnf: L={L} N={N} density={N / L}")
