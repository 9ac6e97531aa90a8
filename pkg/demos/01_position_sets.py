# Position sets as layered DFAs: build, combine, count, save.
from cgs.algebra import difference, intersection, inverse, union
from cgs.dfa import cube, deserialize, enumerate_strings, from_strings, letters, serialize

abc = letters(3)

# strings are tuples of symbol indices; parse/format convert labels
a = from_strings(abc, 4, [abc.parse(w) for w in ["abca", "abcb", "abcc", "cbaa"]])
print(a, a.layer_sizes())

# "abc?" shares one state per depth, so 4 strings need few states
print([abc.format(s) for s in enumerate_strings(a)])

# a cube fixes some squares and leaves the rest free
b = cube(abc, 4, {0: [0], 3: [0, 1]})
print("cube", b.count(), "strings,", b.num_states(), "states")

print("a | b", union(a, b).count())
print("a & b", [abc.format(s) for s in intersection(a, b)])
print("a - b", [abc.format(s) for s in difference(a, b)])
print("~a   ", inverse(a).count(), "=", 3**4, "-", a.count())

# canonical form: equal languages serialize to the same bytes
blob = serialize(a)
print(len(blob), "bytes;", deserialize(blob, abc) == a)
shuffled = from_strings(abc, 4, list(reversed(list(a))))
print("same bytes after reordering input:", serialize(shuffled) == blob)

# counts are exact big integers
huge = cube(abc, 60, {0: [1]})
print("3^59 =", huge.count(), "with", huge.num_states(), "states")
