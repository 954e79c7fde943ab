/// A matplotlib script that draws every emitted table: the first column on
/// the x axis against each numeric column, log-log where the data allow.
pub fn script(tables: &[String]) -> String {
    let list = tables
        .iter()
        .filter(|t| t.ends_with(".csv"))
        .map(|t| format!("    \"{t}\",\n"))
        .collect::<String>();
    format!(
        r#"#!/usr/bin/env python3
"""Quick-look plots of the tables in this directory."""
import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
TABLES = [
{list}]


def numeric_columns(path):
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    header, body = rows[0], rows[1:]
    cols = {{}}
    for i, name in enumerate(header):
        try:
            cols[name] = [float(r[i]) for r in body]
        except ValueError:
            continue
    return header[0], cols


for table in TABLES:
    xname, cols = numeric_columns(os.path.join(HERE, table))
    x = cols.pop(xname)
    fig, ax = plt.subplots()
    for name, y in cols.items():
        ax.plot(x, y, label=name)
    positive = all(v > 0 for v in x) and all(v > 0 for y in cols.values() for v in y)
    if positive:
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel(xname)
    ax.legend(fontsize="small")
    ax.set_title(table)
    fig.savefig(os.path.join(HERE, table[:-4] + ".png"), dpi=120)
    plt.close(fig)
"#
    )
}
