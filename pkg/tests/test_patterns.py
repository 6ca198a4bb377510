import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from geopattern.geo import ModeEncoding
from geopattern.ntd import NTDModel
from geopattern.patterns import (
    PatternSignature,
    assign,
    cluster_signatures,
    core_signatures,
    emd,
    extract_patterns,
    medoid,
    site_signatures,
)


def lp_transport_cost(a, b):
    """Optimal-transport cost between equal-mass vectors on the positions
    1..n with ground distance |i - j|, solved as an explicit LP."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = len(a)
    cost = np.abs(np.subtract.outer(np.arange(n), np.arange(n))).ravel()
    A_eq = []
    b_eq = []
    for i in range(n):  # row sums = a
        row = np.zeros((n, n))
        row[i, :] = 1.0
        A_eq.append(row.ravel())
        b_eq.append(a[i])
    for j in range(n):  # column sums = b
        col = np.zeros((n, n))
        col[:, j] = 1.0
        A_eq.append(col.ravel())
        b_eq.append(b[j])
    res = linprog(cost, A_eq=np.array(A_eq), b_eq=np.array(b_eq), method="highs")
    assert res.status == 0
    return float(res.fun)


def sig(ids, weight=1.0, origin="core"):
    return PatternSignature(tuple(ids), weight, origin)


def encodings_for(sizes):
    return [
        ModeEncoding(f"m{k}", "binned-count", [str(i) for i in range(1, s + 1)])
        for k, s in enumerate(sizes)
    ]


class _Dataset:
    def __init__(self, tensor, encodings):
        self.tensor = tensor
        self.encodings = encodings


class TestEmd:
    def test_identical_is_zero(self):
        assert emd(sig((3, 1, 2)), sig((3, 1, 2))) == 0.0

    def test_unit_mass_two_positions(self):
        assert emd((1, 0, 0), (0, 0, 1)) == 2.0
        assert emd((1, 0, 0), (0, 0, 1)) == pytest.approx(
            lp_transport_cost((1, 0, 0), (0, 0, 1)), abs=1e-9
        )

    def test_two_units_one_position(self):
        assert emd((2, 0), (0, 2)) == 2.0
        assert emd((2, 0), (0, 2)) == pytest.approx(
            lp_transport_cost((2, 0), (0, 2)), abs=1e-9
        )

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            emd((1, 2), (1, 2, 3))

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(st.integers(min_value=0, max_value=9), min_size=1, max_size=8),
        st.data(),
    )
    def test_equals_lp_on_equal_mass_pairs(self, a, data):
        # draw b with the same total mass as a
        total = sum(a)
        n = len(a)
        b = [0] * n
        remaining = total
        for i in range(n - 1):
            b[i] = data.draw(st.integers(min_value=0, max_value=remaining))
            remaining -= b[i]
        b[n - 1] = remaining
        assert emd(a, b) == pytest.approx(lp_transport_cost(a, b), abs=1e-7)

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(st.integers(min_value=0, max_value=9), min_size=1, max_size=8),
        st.lists(st.integers(min_value=0, max_value=9), min_size=1, max_size=8),
        st.lists(st.integers(min_value=0, max_value=9), min_size=1, max_size=8),
    )
    def test_metric_properties(self, a, b, c):
        n = min(len(a), len(b), len(c))
        a, b, c = a[:n], b[:n], c[:n]
        assert emd(a, b) == emd(b, a)
        assert (emd(a, b) == 0.0) == (a == b)
        assert emd(a, c) <= emd(a, b) + emd(b, c) + 1e-12


class TestCoreSignatures:
    def model(self, core, factors):
        return NTDModel(core=np.asarray(core, float),
                        factors=[np.asarray(F, float) for F in factors])

    def test_argmax_picks_heaviest_row(self):
        core = np.array([[1.0]])
        F1 = np.array([[0.1], [0.9]])
        F2 = np.array([[1.0], [0.0]])
        out = core_signatures(self.model(core, [F1, F2]), encodings_for([2, 2]))
        assert out[0].ids == (2, 1)

    def test_single_nonzero_entry(self):
        core = np.array([[4.0, 0.0], [0.0, 0.0]])
        eye = np.eye(2)
        out = core_signatures(self.model(core, [eye, eye]), encodings_for([2, 2]))
        assert len(out) == 1
        assert out[0].ids == (1, 1)
        assert out[0].weight == 4.0

    def test_argmax_tie_prefers_smallest_index(self):
        core = np.array([[1.0]])
        F = np.array([[0.5], [0.5]])
        out = core_signatures(self.model(core, [F, F]), encodings_for([2, 2]))
        assert out[0].ids == (1, 1)

    def test_zero_core_yields_empty_list(self):
        out = core_signatures(
            self.model(np.zeros((2, 2)), [np.eye(2), np.eye(2)]),
            encodings_for([2, 2]),
        )
        assert out == []

    def test_duplicate_ids_merge_weights(self):
        # entries (0,0) and (0,1) select the same id vector -> merged weight
        core = np.array([[3.0, 1.5], [0.0, 2.0]])
        F1 = np.array([[1.0, 0.0], [0.0, 1.0]])
        F2 = np.array([[0.9, 0.8], [0.1, 0.2]])  # both columns argmax row 1
        out = core_signatures(self.model(core, [F1, F2]), encodings_for([2, 2]))
        assert [s.ids for s in out] == [(1, 1), (2, 1)]
        assert out[0].weight == pytest.approx(4.5)
        assert out[1].weight == pytest.approx(2.0)

    def test_sorted_by_descending_weight_and_top_k(self):
        core = np.diag([1.0, 5.0, 3.0])
        eye = np.eye(3)
        out = core_signatures(self.model(core, [eye, eye]), encodings_for([3, 3]))
        assert [s.weight for s in out] == [5.0, 3.0, 1.0]
        top = core_signatures(
            self.model(core, [eye, eye]), encodings_for([3, 3]), top_k=2
        )
        assert [s.weight for s in top] == [5.0, 3.0]


class TestClusterSignatures:
    def test_singletons_when_m_equals_count(self):
        sigs = [sig((i, 0)) for i in range(4)]
        clusters, diags = cluster_signatures(sigs, 4)
        assert clusters == [[0], [1], [2], [3]]
        assert diags == []

    def test_single_cluster_when_m_is_one(self):
        sigs = [sig((i, 0)) for i in range(4)]
        clusters, _ = cluster_signatures(sigs, 1)
        assert clusters == [[0, 1, 2, 3]]

    def test_recovers_two_tight_balls(self):
        ball1 = [sig((1, 1, 1)), sig((1, 1, 2)), sig((2, 1, 1))]
        ball2 = [sig((9, 9, 9)), sig((9, 9, 8)), sig((8, 9, 9))]
        sigs = ball1 + ball2
        clusters, _ = cluster_signatures(sigs, 2)
        got = sorted(tuple(c) for c in clusters)
        # exhaustive oracle: best 2-partition by average intra-cluster EMD
        best, best_score = None, None
        idx = range(len(sigs))
        for mask in range(1, 2 ** len(sigs) - 1, 2):  # fix sig 0 in part A
            a = [i for i in idx if mask >> i & 1]
            b = [i for i in idx if not mask >> i & 1]
            if not a or not b:
                continue
            score = 0.0
            for part in (a, b):
                if len(part) > 1:
                    ds = [
                        emd(sigs[i], sigs[j])
                        for i, j in itertools.combinations(part, 2)
                    ]
                    score += sum(ds) / len(ds)
            if best_score is None or score < best_score:
                best_score, best = score, sorted((tuple(sorted(a)), tuple(sorted(b))))
        assert got == list(best)

    def test_m_larger_than_count_gives_singletons_plus_diagnostic(self):
        sigs = [sig((1,)), sig((2,))]
        clusters, diags = cluster_signatures(sigs, 5)
        assert clusters == [[0], [1]]
        assert len(diags) == 1

    def test_every_signature_in_exactly_one_cluster(self):
        rng = np.random.default_rng(0)
        sigs = [sig(tuple(rng.integers(1, 6, 4).tolist())) for _ in range(12)]
        clusters, _ = cluster_signatures(sigs, 3)
        flat = sorted(i for c in clusters for i in c)
        assert flat == list(range(12))


class TestMedoid:
    def test_singleton(self):
        s = sig((5, 5))
        assert medoid([s]) is s

    def test_collinear_middle_wins(self):
        sigs = [sig((1, 0)), sig((2, 0)), sig((9, 0))]
        totals = [
            sum(emd(a, b) for b in sigs) for a in sigs
        ]  # exhaustive oracle
        assert medoid(sigs).ids == (2, 0)
        assert totals[1] == min(totals)

    def test_symmetric_pair_prefers_heavier(self):
        a, b = sig((1, 0), weight=1.0), sig((3, 0), weight=2.0)
        assert medoid([a, b]) is b

    def test_total_distance_optimality_exhaustive(self):
        rng = np.random.default_rng(1)
        sigs = [sig(tuple(rng.integers(0, 8, 3).tolist()), float(rng.random()))
                for _ in range(30)]
        chosen = medoid(sigs)
        best = min(sum(emd(a, b) for b in sigs) for a in sigs)
        assert sum(emd(chosen, b) for b in sigs) == pytest.approx(best)

    def test_empty_cluster_rejected(self):
        with pytest.raises(ValueError):
            medoid([])


class TestAssign:
    def test_exact_match_assigned_to_it(self):
        meds = [sig((1, 1)), sig((5, 5))]
        assert assign([sig((5, 5), origin="data")], meds) == [1]

    def test_single_medoid_takes_all(self):
        meds = [sig((3, 3))]
        out = assign([sig((1, 1), origin="data"), sig((9, 9), origin="data")], meds)
        assert out == [0, 0]

    def test_strictly_closer_second_wins(self):
        meds = [sig((1, 1)), sig((8, 8))]
        s = sig((7, 8), origin="data")
        dists = [emd(s, m) for m in meds]  # pairwise enumeration oracle
        assert dists[1] < dists[0]
        assert assign([s], meds) == [1]

    def test_tie_goes_to_lowest_index(self):
        meds = [sig((1, 3)), sig((3, 1))]
        s = sig((2, 2), origin="data")
        assert emd(s, meds[0]) == emd(s, meds[1])
        assert assign([s], meds) == [0]

    def test_empty_medoids_rejected(self):
        with pytest.raises(ValueError):
            assign([sig((1,))], [])


class TestSiteSignatures:
    def test_single_cell_weight_is_count(self):
        X = np.zeros((2, 2))
        X[1, 0] = 4.0
        ds = _Dataset(X, encodings_for([2, 2]))
        out = site_signatures(ds)
        assert len(out) == 1
        assert out[0].ids == (2, 1)
        assert out[0].weight == 4.0

    def test_k_cells_give_k_signatures_and_conserve_weight(self):
        rng = np.random.default_rng(2)
        X = rng.integers(0, 3, (3, 4)).astype(float)
        ds = _Dataset(X, encodings_for([3, 4]))
        out = site_signatures(ds)
        assert len(out) == int(np.count_nonzero(X))
        assert sum(s.weight for s in out) == pytest.approx(X.sum())

    def test_zero_tensor_empty(self):
        ds = _Dataset(np.zeros((2, 2)), encodings_for([2, 2]))
        assert site_signatures(ds) == []


class TestExtractPatterns:
    def make_inputs(self):
        X = np.zeros((3, 3))
        X[0, 0] = 5.0
        X[2, 2] = 4.0
        X[0, 1] = 1.0
        core = np.diag([5.0, 4.0])
        factors = [
            np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]]),
            np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]]),
        ]
        model = NTDModel(core=core, factors=factors)
        ds = _Dataset(X, encodings_for([3, 3]))
        return model, ds

    def test_pipeline_is_deterministic_and_covering(self):
        model, ds = self.make_inputs()
        a = extract_patterns(model, ds, 2)
        b = extract_patterns(model, ds, 2)
        assert [m.ids for m in a.medoids] == [m.ids for m in b.medoids]
        assert a.assignment == b.assignment
        assert len(a.assignment) == int(np.count_nonzero(ds.tensor))
        total = sum(
            ds.tensor[cell] for cell in a.assignment
        )
        assert total == pytest.approx(ds.tensor.sum())

    def test_assignment_is_emd_optimal(self):
        model, ds = self.make_inputs()
        ps = extract_patterns(model, ds, 2)
        for cell, lab in ps.assignment.items():
            ids = tuple(i + 1 for i in cell)
            dists = [emd(ids, m.ids) for m in ps.medoids]
            assert dists[lab] == min(dists)

    def test_zero_core_flagged(self):
        model, ds = self.make_inputs()
        model.core = np.zeros((2, 2))
        ps = extract_patterns(model, ds, 2)
        assert ps.medoids == []
        assert any("degenerate" in d for d in ps.diagnostics)
