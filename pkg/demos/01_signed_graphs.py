"""
Signed graphs, balance and spanning trees
=========================================

A signed edge is satisfied when its endpoints sit on opposite sides (sign -1)
or the same side (sign +1). A spanning tree fixes one cut that satisfies all
of its own edges, and any cut can be turned into such a tree.
"""

from stqaoa.signed_graph import (
    SignedGraph,
    balanced_cut_from_tree,
    bfs_tree,
    cut_value,
    is_balanced,
    random_regular_graph,
    random_spanning_tree,
    tree_from_cut,
)

triangle = SignedGraph(3, ((0, 1, -1), (1, 2, -1), (0, 2, -1)))
square = SignedGraph(4, ((0, 1, -1), (1, 2, -1), (2, 3, -1), (0, 3, -1)))

# an odd all-negative cycle is frustrated, an even one is not
print("triangle balanced:", is_balanced(triangle))
print("square balanced by:", is_balanced(square))
print("cut 001 on the triangle satisfies", cut_value(triangle, "001"), "edges")

# walking a tree from its root assigns every vertex
t = bfs_tree(square)
print("bfs tree:", t.edge_order, "-> cut", balanced_cut_from_tree(square, t))

# a poor cut gets repaired: components left over after removing unsatisfied edges are flipped
cut, tree = tree_from_cut(square, "0000")
print("0000 repaired to", cut, "value", cut.value, "tree", tree.edge_order)

g = random_regular_graph(10, 3, -1, seed=7)
rst = random_spanning_tree(g, seed=1)
print("random tree rooted at", rst.root, "induces cut", balanced_cut_from_tree(g, rst))
