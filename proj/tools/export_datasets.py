#!/usr/bin/env python3
# Copyright 2026 The qkbench Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes UCI datasets as headered CSVs with a 0/1 `label` column.

breast_cancer comes from the copy bundled with scikit-learn. banknote and
haberman are converted from the raw UCI files when their paths are given:

  python3 tools/export_datasets.py --out data \
      --banknote data_banknote_authentication.txt --haberman haberman.data
"""

import argparse
import csv
import pathlib


def write(path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def breast_cancer(out):
    from sklearn.datasets import load_breast_cancer

    d = load_breast_cancer()
    header = [f"f{i}" for i in range(d.data.shape[1])] + ["label"]
    # sklearn codes malignant as 0; malignant is the positive class here
    rows = [[repr(float(v)) for v in x] + [int(t == 0)] for x, t in zip(d.data, d.target)]
    write(out / "breast_cancer.csv", header, rows)


def raw_rows(path):
    with open(path) as f:
        return [line.strip().split(",") for line in f if line.strip()]


def banknote(src, out):
    # variance, skewness, curtosis, entropy, class (1 = forged)
    rows = [r[:4] + [int(r[4])] for r in raw_rows(src)]
    write(out / "banknote.csv", ["variance", "skewness", "curtosis", "entropy", "label"], rows)


def haberman(src, out):
    # age, operation year, positive nodes, status (2 = died within five years)
    rows = [r[:3] + [int(r[3] == "2")] for r in raw_rows(src)]
    write(out / "haberman.csv", ["age", "year", "nodes", "label"], rows)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", type=pathlib.Path, default=pathlib.Path("data"))
    ap.add_argument("--banknote", type=pathlib.Path)
    ap.add_argument("--haberman", type=pathlib.Path)
    args = ap.parse_args()
    breast_cancer(args.out)
    if args.banknote:
        banknote(args.banknote, args.out)
    if args.haberman:
        haberman(args.haberman, args.out)


if __name__ == "__main__":
    main()
