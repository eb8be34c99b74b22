"""Smoke tests for the python bindings."""

import os

import pytest

import svmf


@pytest.fixture(scope="module")
def catalog():
    classes = [
        svmf.SubstructureClass(i, svmf.Kind.FUNCTIONAL_GROUP, f"fg-{i}", f"X{i}")
        for i in range(9)
    ] + [
        svmf.SubstructureClass(i, svmf.Kind.CARBON_BACKBONE, f"cb-{i}", f"C{i}")
        for i in range(9, 12)
    ]
    return svmf.Catalog.from_classes(classes)


def adjacent_pair(cls_a=2, cls_b=5):
    return svmf.DetectionSet(
        "pair",
        [
            svmf.DetectionInstance(0, cls_a, (0.0, 0.0, 10.0, 10.0), 0.9),
            svmf.DetectionInstance(1, cls_b, (9.0, 0.0, 19.0, 10.0), 0.8),
        ],
    )


def test_catalog_roundtrip(catalog):
    assert len(catalog) == 12
    assert catalog.kind_of(0) == svmf.Kind.FUNCTIONAL_GROUP
    assert catalog.kind_of(11) == svmf.Kind.CARBON_BACKBONE
    with pytest.raises(svmf.LookupError):
        catalog.kind_of(99)


def test_fingerprint_values(catalog):
    hp = svmf.Hyperparams()
    assert hp.h1 == 10.0
    assert hp.h2_table == [2.0, 2.0, 0.5, 0.125, 0.0078125]

    fp = svmf.fingerprint_detections(adjacent_pair(), catalog, hp)
    entries = fp.entries()
    assert fp.n == 12
    assert entries[svmf.linear_index(2, 2, 12)] == 10.0
    assert entries[svmf.linear_index(5, 5, 12)] == 10.0
    assert entries[svmf.linear_index(2, 5, 12)] == 2.0

    graph = svmf.build_graph(adjacent_pair(), hp.expansion_factor)
    assert graph.edge_count() == 1
    assert svmf.instance_distance(graph, 0, 1) == 0


def test_encode_decode(catalog):
    fp = svmf.fingerprint_detections(adjacent_pair(), catalog, svmf.Hyperparams())
    blob = fp.encode()
    assert blob[:4] == b"SVMF"
    assert svmf.SVMF.decode(blob) == fp
    assert svmf.SVMF.from_json(fp.to_json()) == fp


def test_similarity_and_index(catalog):
    hp = svmf.Hyperparams()
    a = svmf.fingerprint_detections(adjacent_pair(2, 5), catalog, hp)
    b = svmf.fingerprint_detections(adjacent_pair(3, 6), catalog, hp)
    assert svmf.similarity(a, a) == 0.0
    assert 0.0 < svmf.similarity(a, b) <= 1.0

    idx = svmf.FingerprintIndex()
    idx.add("a", a)
    idx.add("b", b)
    results = idx.search(a, k=2)
    assert results[0].key == "a"
    assert results[0].score == 0.0
    assert idx.rank_of(a, "a") == 1
    with pytest.raises(svmf.ConflictError):
        idx.add("a", b)


def test_matches_fingerprint(catalog):
    fp = svmf.svmf_from_matches(
        [(4, [0, 1, 2]), (8, [2, 3, 4])], None, catalog, svmf.Hyperparams()
    )
    assert fp.entries()[svmf.linear_index(4, 8, 12)] == 2.0


def test_metrics():
    assert svmf.substructure_f1({0: 1}, {0: 1}) == 1.0
    assert svmf.substructure_f1({0: 2}, {0: 1}) == pytest.approx(2.0 / 3.0)
    mean_f1, m_em = svmf.detection_report([({0: 1}, {0: 1}), ({0: 1}, {1: 1})])
    assert mean_f1 == pytest.approx(50.0)
    assert m_em == 50.0


def test_synth_determinism(catalog):
    spec = svmf.SynthSpec()
    spec.class_pool = list(range(12))
    spec.canvas_width = spec.canvas_height = 400.0
    spec.mean_box_size = 90.0
    a = svmf.generate_base(spec, 42)
    b = svmf.generate_base(spec, 42)
    assert a.to_json_line() == b.to_json_line()

    identity = svmf.PerturbationParams()
    identity.seed = 5
    out = svmf.perturb(a, identity, spec.class_pool)
    assert out.to_json_line() == a.to_json_line()


def test_reference_catalog():
    root = os.environ.get("SVMF_REPO_ROOT")
    if not root:
        pytest.skip("SVMF_REPO_ROOT not set")
    catalog = svmf.Catalog.load(os.path.join(root, "data", "catalog_1561.tsv"))
    assert len(catalog) == 1561
    assert catalog.functional_group_count == 1534
    assert catalog.carbon_backbone_count == 27
