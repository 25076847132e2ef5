import math
import os

import pytest

import distphylo

NAMES = ["A", "B", "C", "D", "E"]
ROWS = [
    [0, 2, 7, 7, 6],
    [2, 0, 7, 7, 6],
    [7, 7, 0, 5, 5],
    [7, 7, 5, 0, 3],
    [6, 6, 5, 3, 0],
]


@pytest.fixture
def matrix():
    return distphylo.DistanceMatrix(NAMES, ROWS)


def test_matrix_round_trip(matrix):
    again = distphylo.DistanceMatrix.from_phylip(matrix.to_phylip())
    assert again.labels == NAMES
    assert again.to_list() == ROWS
    assert matrix[3, 4] == 3


def test_bad_matrix_raises():
    with pytest.raises(distphylo.InputError):
        distphylo.DistanceMatrix(["a", "b"], [[0, 1], [2, 0]])


def test_neighbor_joining(matrix):
    tree = distphylo.neighbor_joining(matrix, "nj-sk")
    assert tree.newick() == "(A:1,B:1,(C:2.75,(D:1.75,E:1.25):0.75):3.25);\n"
    # The tree's own path lengths are additive, so joining them gives the same tree back.
    again = distphylo.neighbor_joining(tree.path_distances(), "nj-sk")
    assert again.newick() == tree.newick()
    assert tree.path_distance(0, 2) == pytest.approx(7.0)


def test_cluster_engines_agree(matrix):
    a = distphylo.cluster(matrix, "upgma", "naive")
    b = distphylo.cluster(matrix, "upgma", "nn-chain")
    assert a.merges == b.merges
    assert a.merges[0] == (0, 1, 1.0)


def test_goeburst_and_mst(matrix):
    assert sorted(distphylo.goeburst(matrix, 3)) == [("A", "B", 2.0), ("D", "E", 3.0)]
    full = distphylo.goeburst(matrix)
    assert sum(w for _, _, w in full) == 16
    assert ("C", "E", 5.0) in full
    assert sum(w for _, _, w in distphylo.mst(matrix, "prim")) == 16


def test_fhp():
    nodes, edges = distphylo.fhp(["S1", "S2", "S3"], ["abcde", "bbdce", "acdcd"])
    assert "abdce" in nodes.values()
    assert sorted(w for _, _, w in edges) == [1, 2, 2]


def test_jc():
    assert distphylo.jc_correct(0.0) == 0.0
    assert distphylo.jc_correct(0.3) == pytest.approx(-0.75 * math.log(1 - 0.4), abs=1e-12)
    with pytest.raises(distphylo.SaturationError):
        distphylo.jc_correct(0.75)
    assert distphylo.jc_correct(0.8, ceiling=9.0) == 9.0


def test_min_evolution(matrix):
    for scheme in ("gme", "bme"):
        tree = distphylo.min_evolution(matrix, scheme)
        assert len(tree.edges) == 7


def test_properties_and_counts():
    assert distphylo.check_property("upgma", "convexity", 1000)
    assert not distphylo.check_property("nj", "convexity", 10000)
    assert distphylo.topology_counts(4) == (3, 15)
    assert distphylo.topology_counts(30)[0] == math.prod(range(1, 2 * 30 - 4, 2))


def test_cli_entry_point():
    data = os.environ.get("DISTPHYLO_DATA", os.path.join(os.path.dirname(__file__), "..", "..", "tests", "data"))
    with open(os.path.join(data, "matrix2.phy")) as f:
        code, out, err = distphylo.run_cli(["tree", "--method", "upgma"], f.read())
    assert code == 0, err
    assert out.startswith("((A:1,B:1)")
    code, _, err = distphylo.run_cli(["tree", "--method", "bogus"])
    assert code == 2
    assert err
