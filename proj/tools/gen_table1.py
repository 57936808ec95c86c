"""Writes scenarios/table1.json: 20 static nodes, nine CBR flows between random pairs."""
import json
import math
import random
import sys

FLOWS = [  # rate pkt/s, size B, start s
    (13.5, 112, 10), (42.65, 381, 20), (35.55, 311, 30),
    (16.99, 481, 60), (37.69, 519, 80), (18.69, 855, 90),
    (44.04, 317, 100), (46.20, 786, 110), (14.92, 402, 140),
]


def connected(pts, r):
    seen, todo = {0}, [0]
    while todo:
        a = todo.pop()
        for b in range(len(pts)):
            if b not in seen and math.dist(pts[a], pts[b]) <= r:
                seen.add(b)
                todo.append(b)
    return len(seen) == len(pts)


def main(out):
    rng = random.Random(7)
    while True:
        pts = [(round(rng.uniform(0, 1000), 1), round(rng.uniform(0, 1000), 1)) for _ in range(20)]
        if connected(pts, 250.0):
            break
    nodes = [{"id": i, "name": f"n{i}", "x": x, "y": y} for i, (x, y) in enumerate(pts)]
    flows = []
    for i, (rate, size, start) in enumerate(FLOWS, 1):
        src, dst = rng.sample(range(20), 2)
        flows.append({"id": i, "src": f"n{src}", "dst": f"n{dst}", "rate": rate,
                      "packet_size": size, "start": start})
    sc = {
        "description": "1000 m x 1000 m static network, 20 random nodes, nine scheduled CBR flows.",
        "arena": {"width": 1000, "height": 1000},
        "nodes": nodes,
        "flows": flows,
        "duration": 200,
        "seed": 7,
    }
    with open(out, "w") as f:
        json.dump(sc, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "scenarios/table1.json")
