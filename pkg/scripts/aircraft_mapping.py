#!/usr/bin/env python3
"""Print the Aircraft value mapping and expand the example row."""
from fmca import fixture_path
from fmca.cnf import encode_fm_to_cnf
from fmca.fm import load_feature_model
from fmca.reduction import expand, find_mand_and_root, generate_mappings

fm = load_feature_model(fixture_path("aircraft"))
cnf = encode_fm_to_cnf(fm)
rset = find_mand_and_root(cnf)
mapping = generate_mappings(rset)

print("reduceable:", ", ".join(fm.names[i] for i in sorted(rset.reduceable)))
w = max(len(n) for n in fm.names)
print(f"{'feature':<{w}}  old     new")
for i, name in enumerate(fm.names):
    old = (2 * i, 2 * i + 1)
    new = (mapping.oldToNew(old[0]), mapping.oldToNew(old[1]))
    mark = "  *" if i in rset.reduceable else ""
    print(f"{name:<{w}}  {old[0]:>2},{old[1]:>2}   {new[0]:>2},{new[1]:>2}{mark}")
print("oldToNew(0) =", mapping.oldToNew(0), " newToOld(12) =", mapping.newToOld(12))

row = [1, 2, 5, 7, 9, 11, 12, 15, 17, 19]
print("reduced row :", row)
print("newToOld    :", [mapping.newToOld(v) for v in row])
print("expanded    :", expand([row], mapping, rset)[0])
