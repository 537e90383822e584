"""Cell complexes over Z/2: building cells by hand, stars, validation."""

from emotiontda import CellComplex, closed_star, euler_characteristic, validate

# a filled triangle, one cell at a time; ids follow insertion order
cx = CellComplex()
v = [cx.add_cell(0) for _ in range(3)]
e01 = cx.add_cell(1, {v[0], v[1]})
e12 = cx.add_cell(1, {v[1], v[2]})
e02 = cx.add_cell(1, {v[0], v[2]})
face = cx.add_cell(2, {e01, e12, e02})

print("cells per dimension:", cx.counts())
print("chi of the disk:", euler_characteristic(cx))
print("closed star of vertex 0:", sorted(closed_star(cx, v[0])))
print("violations:", validate(cx))

# drop an edge the face depends on and the checker complains
broken = cx.without([e12])
for problem in validate(broken):
    print("broken:", problem)
