#!/usr/bin/env python3
"""Build the Workplace, Highschool and Hospital contact hypergraphs.

Inputs are the raw SocioPatterns contact logs shipped inside two PyPI
wheels (hypergraphx, tnetwork). Hyperedges are the maximal cliques of
each 20 s contact window; a hyperedge's weight is the number of windows
in which that exact clique appeared. Ground truth is the class/role
column of the contact log.

Usage:
    pip download hypergraphx==1.8.0 tnetwork==1.2 --no-deps -d wheels/
    python3 tools/prepare_datasets.py wheels/ data/
"""

import argparse
import collections
import glob
import io
import os
import zipfile

import networkx as nx

SOURCES = {
    "workplace": ("hypergraphx-*.whl", "tests/test_data/workplace/workplace.dat",
                  "tests/test_data/workplace/workplace_meta.csv"),
    "highschool": ("hypergraphx-*.whl", "tests/test_data/hs/High-School_data_2013.csv", None),
    "hospital": ("tnetwork-*.whl", "tnetwork/dyn_graph/toy_data/Contacts_Hospital.csv", None),
}


def read_member(wheel_dir, pattern, member):
    wheel = sorted(glob.glob(os.path.join(wheel_dir, pattern)))[-1]
    with zipfile.ZipFile(wheel) as z:
        return z.read(member).decode("utf-8")


def build(contacts, labels):
    windows = collections.defaultdict(list)
    for line in io.StringIO(contacts):
        f = line.split()
        if len(f) < 3 or not f[0].isdigit():
            continue
        windows[f[0]].append((int(f[1]), int(f[2])))
        if len(f) >= 5:
            labels.setdefault(int(f[1]), f[3])
            labels.setdefault(int(f[2]), f[4])
    counts = collections.Counter()
    for edges in windows.values():
        for clique in nx.find_cliques(nx.Graph(edges)):
            if len(clique) >= 2:
                counts[frozenset(clique)] += 1
    return counts


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("wheel_dir")
    ap.add_argument("out_dir")
    args = ap.parse_args()

    for name, (pattern, log, meta) in SOURCES.items():
        labels = {}
        if meta:
            for row in io.StringIO(read_member(args.wheel_dir, pattern, meta)):
                f = row.strip().split(",")
                if f[0] == "nodeID":
                    continue
                labels[int(f[1])] = f[2]
        counts = build(read_member(args.wheel_dir, pattern, log), labels)

        nodes = sorted({v for e in counts for v in e})
        index = {v: i for i, v in enumerate(nodes)}
        classes = sorted({labels[v] for v in nodes})
        class_id = {c: k for k, c in enumerate(classes)}

        out = os.path.join(args.out_dir, name)
        os.makedirs(out, exist_ok=True)
        edges = sorted(sorted(index[v] for v in e) for e in counts)
        with open(os.path.join(out, "hyperedges.txt"), "w") as fh:
            fh.write(f"# {name}: weight node node ...  ({len(nodes)} nodes)\n")
            for e in edges:
                key = frozenset(nodes[i] for i in e)
                fh.write(" ".join([str(counts[key])] + [str(i) for i in e]) + "\n")
        with open(os.path.join(out, "truth.txt"), "w") as fh:
            for v in nodes:
                fh.write(f"{index[v]} {class_id[labels[v]]}\n")
        with open(os.path.join(out, "nodes.csv"), "w") as fh:
            fh.write("node,original_id,class\n")
            for v in nodes:
                fh.write(f"{index[v]},{v},{labels[v]}\n")
        print(f"{name}: N={len(nodes)} |E|={len(edges)} "
              f"D={max(len(e) for e in edges)} K={len(classes)}")


if __name__ == "__main__":
    main()
