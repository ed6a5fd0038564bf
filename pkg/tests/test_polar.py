import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarcs.errors import DimensionMismatchError, EmptyFrequencySetError
from polarcs.frame import atom, build_frame, circular_distance
from polarcs.polar import (
    PolarSolution,
    arc_geometry,
    arc_offsets,
    assemble_cuv,
    polar_triple,
    recover_frequencies,
    rescale,
    synthesize,
    unique_arcs,
)

# arc half-angle for N=100, c=5, computed from the atom inner product
THETA_100_5 = 0.3638566


def test_geometry(frame):
    r, theta = arc_geometry(frame)
    assert r == pytest.approx(1.0)
    assert theta == pytest.approx(THETA_100_5, abs=1e-6)
    # all arcs share the same geometry
    assert arc_geometry(frame, 123) == pytest.approx((r, theta))


def test_geometry_shrinks_with_redundancy():
    assert arc_geometry(build_frame(100, 5))[1] < arc_geometry(build_frame(100, 2))[1]


@pytest.mark.parametrize("p", [0, 7, 499])
def test_nodes_exact(frame, p):
    t = polar_triple(frame, p)
    half = frame.delta / 2
    for phi, w in [(-t.theta, p / frame.P - half), (0.0, p / frame.P), (t.theta, p / frame.P + half)]:
        assert np.max(np.abs(t.interpolate(phi) - atom(frame, w))) < 1e-10


def test_triple_index_range(frame):
    with pytest.raises(IndexError):
        polar_triple(frame, frame.P)


def test_vector_interpolation_matches_scalar(frame):
    t = polar_triple(frame, 3)
    phis = np.linspace(-t.theta, t.theta, 5)
    assert np.allclose(t.interpolate(phis)[:, 2], t.interpolate(phis[2]))


def test_endpoint_coefficients_give_endpoint_atom(frame):
    t = polar_triple(frame, 20)
    f = t.c_vec + t.r * np.cos(t.theta) * t.u_vec + t.r * np.sin(t.theta) * t.v_vec
    assert np.max(np.abs(f - atom(frame, 20.5 / frame.P))) < 1e-10


def _sup_error(frame, p=0, n=201):
    t = polar_triple(frame, p)
    phis = np.linspace(-t.theta, t.theta, n)
    w = p / frame.P + frame.delta / (2 * t.theta) * phis
    return np.max(np.abs(t.interpolate(phis) - atom(frame, w)))


def test_interpolation_error_falls_with_redundancy():
    assert _sup_error(build_frame(100, 5)) < _sup_error(build_frame(100, 2))


def test_assemble_matches_triples(frame):
    C, U, V = assemble_cuv(frame, [4, 9])
    t = polar_triple(frame, 9)
    assert np.allclose(C[:, 1], t.c_vec)
    assert np.allclose(U[:, 1], t.u_vec)
    assert np.allclose(V[:, 1], t.v_vec)


def test_assemble_errors(frame):
    with pytest.raises(EmptyFrequencySetError):
        assemble_cuv(frame, [])
    with pytest.raises(IndexError):
        assemble_cuv(frame, [frame.P])


def test_unique_arcs_keeps_first_order():
    assert unique_arcs([5, 3, 5, 1, 3]).tolist() == [5, 3, 1]


def _solution(frame, arcs, alpha, phi):
    r, theta = arc_geometry(frame)
    arcs = np.asarray(arcs)
    alpha = np.asarray(alpha, dtype=complex)
    return PolarSolution(arcs, arcs / frame.P, alpha, alpha * r * np.cos(phi),
                         alpha * r * np.sin(phi), r, theta)


def test_synthesize_shape_check(frame):
    sol = _solution(frame, [1, 2], [1, 1], np.zeros(2))
    with pytest.raises(DimensionMismatchError):
        synthesize(assemble_cuv(frame, [1]), sol)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 499), st.floats(-1, 1), st.floats(0.1, 5), st.floats(-np.pi, np.pi))
def test_parameter_round_trip(p, frac, mag, phase):
    frame = build_frame(100, 5)
    _, theta = arc_geometry(frame)
    phi = frac * theta
    sol = _solution(frame, [p], [mag * np.exp(1j * phase)], np.array([phi]))
    (w, a), = recover_frequencies(sol, frame)
    expected = (p + frac / 2) / frame.P
    assert circular_distance(w, expected) < 1e-12
    assert a == pytest.approx(mag * np.exp(1j * phase))


def test_offsets_clamped(frame):
    sol = _solution(frame, [0], [1.0], np.array([0.0]))
    sol = PolarSolution(sol.arcs, sol.centers, sol.alpha, np.array([0.1 + 0j]),
                        np.array([1.0 + 0j]), sol.r, sol.theta)
    assert arc_offsets(sol)[0] == pytest.approx(sol.theta)


def test_rescale_onto_circle(frame):
    r, theta = arc_geometry(frame)
    sol = PolarSolution(np.array([0, 1]), np.array([0, 1]) / frame.P, np.array([2.0, 1j]),
                        np.array([0.5, 0.0]), np.array([0.5, 0.0]), r, theta)
    out = rescale(sol)
    assert np.hypot(abs(out.beta[0]), abs(out.gamma[0])) == pytest.approx(2.0 * r)
    assert arc_offsets(out)[0] == pytest.approx(np.pi / 4 if np.pi / 4 < theta else theta)
    # zero (beta, gamma) goes to the arc midpoint
    assert out.beta[1] == pytest.approx(1j * r)
    assert out.gamma[1] == 0
    assert arc_offsets(out)[1] == 0.0


def test_rescale_example(frame):
    sol = PolarSolution(np.array([0]), np.array([0.0]), np.array([1.0 + 0j]),
                        np.array([0.3 + 0j]), np.array([0.4 + 0j]), 1.0, 0.5)
    out = rescale(sol, 1.0)
    assert out.beta[0] == pytest.approx(0.6)
    assert out.gamma[0] == pytest.approx(0.8)


def _fit_atom(frame, w):
    # least-squares fit of one atom on the arc nearest to it, then recover
    p = int(np.rint(w * frame.P)) % frame.P
    C, U, V = assemble_cuv(frame, [p])
    B = np.column_stack([C[:, 0], U[:, 0], V[:, 0]])
    coef, *_ = np.linalg.lstsq(B, atom(frame, w), rcond=None)
    r, theta = arc_geometry(frame)
    sol = PolarSolution(np.array([p]), np.array([p / frame.P]), coef[:1], coef[1:2], coef[2:], r, theta)
    return recover_frequencies(rescale(sol), frame)[0][0]


# largest atom->arc->frequency error over one arc, in units of the grid step,
# computed with a dense scan of _fit_atom; it is set by the interpolation error
ROUND_TRIP_FLOOR = 0.0125


def test_atom_round_trip_within_interpolation_floor(frame):
    offsets = np.linspace(-0.5, 0.5, 41)
    errs = [circular_distance(_fit_atom(frame, (37 + o) / frame.P), (37 + o) / frame.P) * frame.P
            for o in offsets]
    assert max(errs) < ROUND_TRIP_FLOOR
    # exact at the three interpolation nodes
    assert errs[0] < 1e-9 and errs[20] < 1e-9 and errs[-1] < 1e-9
