#!/usr/bin/env python3
"""Convert a flat gate-level Verilog netlist (primitive gates only) to .bench.

Usage: verilog2bench.py in.v > out.bench
"""
import re
import sys

PRIMS = {"and": "AND", "nand": "NAND", "or": "OR", "nor": "NOR",
         "xor": "XOR", "xnor": "XNOR", "not": "NOT", "buf": "BUFF"}


def main(path):
    text = open(path).read()
    text = re.sub(r"//.*", "", text)
    stmts = [s.strip() for s in text.replace("\n", " ").split(";")]
    name, inputs, outputs, gates = None, [], [], []
    for s in stmts:
        if not s:
            continue
        head = s.split()[0]
        if head == "module":
            name = s.split()[1].split("(")[0]
        elif head in ("input", "output"):
            nets = [n.strip() for n in s[len(head):].split(",") if n.strip()]
            (inputs if head == "input" else outputs).extend(nets)
        elif head in PRIMS:
            m = re.match(r"\w+\s+\w*\s*\((.*)\)", s)
            pins = [p.strip() for p in m.group(1).split(",")]
            gates.append((pins[0], PRIMS[head], pins[1:]))
    out = [f"# {name}", f"# {len(inputs)} inputs", f"# {len(outputs)} outputs",
           f"# {len(gates)} gates", ""]
    out += [f"INPUT({n})" for n in inputs] + [""]
    out += [f"OUTPUT({n})" for n in outputs] + [""]
    out += [f"{o} = {t}({', '.join(i)})" for o, t, i in gates]
    print("\n".join(out))


if __name__ == "__main__":
    main(sys.argv[1])
