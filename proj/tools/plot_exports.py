#!/usr/bin/env python3
# Copyright 2026 The Costtalk Authors. All rights reserved.
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

"""Plots costtalk CSV exports.

  plot_exports.py reach reach.csv reach.png
  plot_exports.py gains report.csv gains.png
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402


def plot_reach(df, ax):
  for sender, rows in df.groupby("sender"):
    reach = rows["reach_upper"].fillna(rows["reach_lower"])
    ax.plot(rows["theta"], reach, label=f"sender {sender}")
  lim = [df["theta"].min(), df["theta"].max()]
  ax.plot(lim, lim, "k:", lw=0.8, label="truth")
  ax.set_xlabel("state")
  ax.set_ylabel("reach")


def plot_gains(df, ax):
  rows = df[df["record"].isin(["witness", "coalition"])]
  for (check, sender), g in rows.groupby(["check", "sender"]):
    ax.scatter(g["theta"], g["gain"], s=12, label=f"{check} / {int(sender)}")
  ax.set_xlabel("state")
  ax.set_ylabel("gain from deviating")


def main():
  parser = argparse.ArgumentParser()
  parser.add_argument("kind", choices=["reach", "gains"])
  parser.add_argument("csv")
  parser.add_argument("png")
  args = parser.parse_args()
  df = pd.read_csv(args.csv)
  fig, ax = plt.subplots(figsize=(7, 4.5))
  (plot_reach if args.kind == "reach" else plot_gains)(df, ax)
  ax.grid(alpha=0.3)
  ax.legend(fontsize=7)
  fig.tight_layout()
  fig.savefig(args.png, dpi=120)


if __name__ == "__main__":
  main()
