import json

import numpy as np
import pytest

import poscert as pc
from poscert.errors import PreconditionError, ValidationError
from poscert.ffnn import Activation, dump_ffnn, propagate_boxes, propagate_sectors


def single_neuron_net(w_in=1.0, w_out=1.0, kind="tanh"):
    return pc.FFNN((([[w_in]], [0.0]), ([[w_out]], [0.0])), Activation(kind))


def random_net(rng, p, m, depth, max_width=16, kinds=("tanh", "relu")):
    widths = [p] + [int(rng.integers(1, max_width + 1)) for _ in range(depth)] + [m]
    layers = []
    for i in range(len(widths) - 1):
        w = rng.normal(size=(widths[i + 1], widths[i])) * rng.uniform(0.3, 1.5)
        layers.append((w, np.zeros(widths[i + 1])))
    return pc.FFNN(tuple(layers), Activation(str(rng.choice(kinds))))


class TestForward:
    def test_zero_input_zero_output(self):
        net = single_neuron_net()
        assert pc.forward(net, np.array([0.0])) == pytest.approx(0.0)

    def test_scalar_tanh(self):
        net = single_neuron_net()
        assert pc.forward(net, np.array([1.0]))[0] == pytest.approx(np.tanh(1.0))

    def test_relu_identity_on_positives(self):
        net = pc.FFNN(((np.eye(2), np.zeros(2)), (np.eye(2), np.zeros(2))),
                      Activation("relu"))
        out = pc.forward(net, np.array([2.0, 3.0]))
        assert out == pytest.approx([2.0, 3.0])

    def test_batch_matches_loop(self):
        rng = np.random.default_rng(0)
        net = random_net(rng, 3, 2, 2)
        ys = rng.uniform(0, 2, size=(3, 7))
        batch = pc.forward(net, ys)
        for k in range(7):
            assert batch[:, k] == pytest.approx(pc.forward(net, ys[:, k]))


class TestPropagateBoxes:
    def test_center_radius_closed_form(self):
        # second layer (w=2, b=0.5) applied to the first post-activation box
        t1 = np.tanh(1.0)
        net = pc.FFNN((([[1.0]], [0.0]), ([[2.0]], [0.5]), ([[1.0]], [0.0])),
                      Activation("tanh"))
        boxes = propagate_boxes(
            net, pc.InputBox(np.array([0.0]), np.array([1.0])))
        # first layer: nu in [0, 1], omega in [0, tanh 1]
        assert boxes.postact_upper[0][0] == pytest.approx(t1)
        # second layer: c = tanh(1)/2, r = tanh(1)/2: 2c + 0.5 +/- 2r
        assert boxes.preact_lower[1][0] == pytest.approx(0.5)
        assert boxes.preact_upper[1][0] == pytest.approx(0.5 + 2 * t1)

    def test_symmetric_range_matches_hand_computation(self):
        # single input through w=2, b=0.5 over omega in [-t1, t1]
        t1 = np.tanh(1.0)
        from poscert.ffnn import _affine_interval
        lo, hi = _affine_interval(np.array([[2.0]]), np.array([0.5]),
                                  np.array([-t1]), np.array([t1]))
        assert lo[0] == pytest.approx(0.5 - 2 * t1)
        assert hi[0] == pytest.approx(0.5 + 2 * t1)

    def test_zero_weights_degenerate(self):
        net = pc.FFNN((([[0.0]], [0.0]), ([[0.0]], [0.0])), Activation("tanh"))
        boxes = propagate_boxes(net, pc.InputBox(np.array([1.0]), np.array([2.0])))
        assert boxes.preact_lower[0][0] == 0.0 == boxes.preact_upper[0][0]

    def test_monotone_image(self):
        net = pc.FFNN(((np.eye(2), np.zeros(2)), (np.eye(2), np.zeros(2))),
                      Activation("tanh"))
        boxes = propagate_boxes(net, pc.InputBox(np.ones(2), 2 * np.ones(2)))
        assert boxes.preact_lower[0] == pytest.approx([1.0, 1.0])
        assert boxes.preact_upper[0] == pytest.approx([2.0, 2.0])
        assert boxes.postact_lower[0] == pytest.approx(np.tanh([1.0, 1.0]))
        assert boxes.postact_upper[0] == pytest.approx(np.tanh([2.0, 2.0]))

    def test_sampled_preactivations_stay_inside(self):
        rng = np.random.default_rng(1)
        for _ in range(30):
            p = int(rng.integers(1, 4))
            net = random_net(rng, p, 1, int(rng.integers(1, 4)), max_width=8)
            lo = rng.uniform(0, 1, size=p)
            box = pc.InputBox(lo, lo + rng.uniform(0, 2, size=p))
            boxes = propagate_boxes(net, box)
            x = box.sample(rng, 200)
            for i, (w, b) in enumerate(net.layers[:-1]):
                nu = w @ x + b[:, None]
                assert np.all(nu >= boxes.preact_lower[i][:, None] - 1e-9)
                assert np.all(nu <= boxes.preact_upper[i][:, None] + 1e-9)
                x = net.activation(nu)


class TestActivationSector:
    def test_tanh_crossing_interval(self):
        alpha, beta = pc.activation_sector(Activation("tanh"), -1.0, 2.0)
        assert alpha == beta == 1.0

    def test_tanh_positive_interval(self):
        alpha, beta = pc.activation_sector(Activation("tanh"), 1.0, 2.0)
        assert beta == pytest.approx(np.tanh(2.0) / 2.0)
        assert alpha == pytest.approx(np.tanh(1.0))

    def test_relu_negative_interval(self):
        alpha, beta = pc.activation_sector(Activation("relu"), -3.0, -1.0)
        assert alpha == beta == 0.0

    def test_zero_endpoint_uses_derivative_limit(self):
        alpha, beta = pc.activation_sector(Activation("tanh"), 0.0, 2.0)
        assert alpha == 1.0
        assert beta == pytest.approx(np.tanh(2.0) / 2.0)

    def test_slopes_bound_activation_pointwise(self):
        rng = np.random.default_rng(2)
        for kind in ("tanh", "relu"):
            act = Activation(kind)
            for _ in range(100):
                lo, hi = np.sort(rng.uniform(-4, 4, size=2))
                alpha, beta = pc.activation_sector(act, lo, hi)
                vs = rng.uniform(lo, hi, size=50)
                phis = act(vs)
                if lo >= 0 or hi <= 0:
                    assert np.all(beta * vs <= phis + 1e-12)
                    assert np.all(phis <= alpha * vs + 1e-12)
                else:
                    assert np.all(-beta * np.abs(vs) <= phis + 1e-12)
                    assert np.all(phis <= alpha * np.abs(vs) + 1e-12)

    def test_leaky_relu(self):
        act = Activation("leaky_relu", 0.1)
        alpha, beta = pc.activation_sector(act, -2.0, -1.0)
        assert alpha == beta == pytest.approx(0.1)
        alpha, beta = pc.activation_sector(act, -1.0, 1.0)
        assert alpha == beta == 1.0


class TestPropagateSectors:
    def test_nonnegative_weights_collapse(self):
        w = np.array([[1.0, 2.0], [0.5, 3.0]])
        net = pc.FFNN(((w, np.zeros(2)), (np.eye(2), np.zeros(2))),
                      Activation("tanh"))
        box = pc.InputBox(np.zeros(2), np.ones(2))
        sectors = propagate_sectors(net, box, propagate_boxes(net, box))
        assert sectors.L[0] == pytest.approx(w)
        assert sectors.U[0] == pytest.approx(w)

    def test_mixed_sign_first_layer(self):
        # with identity running shapes, the split leaves L = U = W
        w = np.array([[1.0, -2.0]])
        net = pc.FFNN(((w, np.zeros(1)), (np.array([[1.0]]), np.zeros(1))),
                      Activation("tanh"))
        box = pc.InputBox(np.zeros(2), np.ones(2))
        sectors = propagate_sectors(net, box, propagate_boxes(net, box))
        assert sectors.L[0] == pytest.approx(w)
        assert sectors.U[0] == pytest.approx(w)

    def test_single_neuron_positive_box(self):
        net = single_neuron_net()
        box = pc.InputBox(np.array([1.0]), np.array([2.0]))
        sectors = propagate_sectors(net, box, propagate_boxes(net, box))
        assert sectors.D_lower[0][0] == pytest.approx(np.tanh(2.0) / 2.0)
        assert sectors.D_upper[0][0] == pytest.approx(np.tanh(1.0))
        assert sectors.L_hat[0] == pytest.approx(np.array([[1.0]]))
        assert sectors.U_hat[0] == pytest.approx(np.array([[1.0]]))

    def test_crossing_rows_have_definite_sign(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            net = random_net(rng, 2, 1, 2, max_width=6)
            box = pc.InputBox(np.zeros(2), rng.uniform(1, 3, size=2))
            boxes = propagate_boxes(net, box)
            sectors = propagate_sectors(net, box, boxes)
            for i in range(len(sectors.L)):
                crossing = (boxes.preact_lower[i] < 0) & (boxes.preact_upper[i] > 0)
                assert np.all(sectors.L_hat[i][crossing] <= 0)
                assert np.all(sectors.U_hat[i][crossing] >= 0)

    def test_bias_with_zero_lower_bound_rejected(self):
        net = pc.FFNN((([[1.0]], [0.5]), ([[1.0]], [0.0])), Activation("tanh"))
        box = pc.InputBox(np.array([0.0]), np.array([1.0]))
        with pytest.raises(PreconditionError):
            propagate_sectors(net, box, propagate_boxes(net, box))

    def test_bias_shares_bracket_bias(self):
        rng = np.random.default_rng(4)
        from poscert.ffnn import _bias_rows
        for _ in range(50):
            p = int(rng.integers(1, 4))
            lo = rng.uniform(0.1, 1.0, size=p)
            box = pc.InputBox(lo, lo + rng.uniform(0, 2, size=p))
            b = rng.normal(size=3)
            dlo, dhi = _bias_rows(b, box)
            ys = box.sample(rng, 100)
            assert np.all(dlo @ ys <= b[:, None] + 1e-12)
            assert np.all(dhi @ ys >= b[:, None] - 1e-12)


class TestNetworkSector:
    def test_single_hidden_neuron(self):
        net = single_neuron_net()
        sb = pc.network_sector(net, pc.InputBox(np.array([0.5]), np.array([1.0])))
        assert sb.gamma1[0, 0] == pytest.approx(np.tanh(1.0))
        assert sb.gamma2[0, 0] == pytest.approx(np.tanh(0.5) / 0.5)

    def test_zero_network(self):
        net = pc.FFNN((([[0.0]], [0.0]), ([[0.0]], [0.0])), Activation("tanh"))
        sb = pc.network_sector(net, pc.InputBox(np.array([0.0]), np.array([4.5])))
        assert sb.gamma1 == pytest.approx(0.0)
        assert sb.gamma2 == pytest.approx(0.0)

    def test_linear_nonnegative_layer_exact(self):
        w = np.array([[0.5, 2.0], [1.0, 0.0]])
        net = pc.FFNN(((w, np.zeros(2)),), Activation("tanh"))
        sb = pc.network_sector(net, pc.InputBox(np.zeros(2), np.ones(2)))
        assert sb.gamma1 == pytest.approx(w)
        assert sb.gamma2 == pytest.approx(w)

    def test_soundness_random_nets(self):
        rng = np.random.default_rng(5)
        worst = 0.0
        for _ in range(100):
            p = int(rng.integers(1, 5))
            m = int(rng.integers(1, 4))
            net = random_net(rng, p, m, int(rng.integers(0, 4)))
            lo = rng.uniform(0, 2, size=p)
            box = pc.InputBox(lo, lo + rng.uniform(0, 3, size=p))
            sb = pc.network_sector(net, box)
            ys = box.sample(rng, 300)
            outs = pc.forward(net, ys)
            worst = max(worst,
                        float(np.max(sb.gamma1 @ ys - outs)),
                        float(np.max(outs - sb.gamma2 @ ys)))
        assert worst <= 1e-9

    def test_sector_from_larger_box_sound_on_nested_box(self):
        rng = np.random.default_rng(6)
        for _ in range(30):
            p = int(rng.integers(1, 4))
            net = random_net(rng, p, 1, 2, max_width=6)
            lo = rng.uniform(0, 1, size=p)
            hi = lo + rng.uniform(1, 2, size=p)
            outer = pc.InputBox(lo, hi)
            mid = 0.5 * (lo + hi)
            inner = pc.InputBox(lo + 0.25 * (mid - lo), hi - 0.25 * (hi - mid))
            sb = pc.network_sector(net, outer)
            ys = inner.sample(rng, 200)
            outs = pc.forward(net, ys)
            assert np.all(sb.gamma1 @ ys <= outs + 1e-9)
            assert np.all(outs <= sb.gamma2 @ ys + 1e-9)


class TestLoadFFNN:
    def test_round_trip(self, controller_net):
        doc = dump_ffnn(controller_net)
        net = pc.load_ffnn(doc)
        assert net.input_dim == 1 and net.output_dim == 1
        assert net.hidden_count == 1

    def test_well_formed_two_layer(self):
        doc = {"activation": "tanh",
               "layers": [{"W": [[1.0], [2.0]], "b": [0.0, 0.0]},
                          {"W": [[1.0, 1.0]], "b": [0.0]}]}
        net = pc.load_ffnn(doc)
        assert net.hidden_count == 1

    def test_dimension_mismatch_names_layer(self):
        doc = {"activation": "tanh",
               "layers": [{"W": [[1.0], [2.0]], "b": [0.0, 0.0]},
                          {"W": [[1.0, 1.0, 1.0]], "b": [0.0]}]}
        with pytest.raises(ValidationError) as err:
            pc.load_ffnn(doc)
        assert "layers[1]" in str(err.value)

    def test_unsupported_activation(self):
        doc = {"activation": "sigmoid", "layers": [{"W": [[1.0]], "b": [0.0]}]}
        with pytest.raises(ValidationError):
            pc.load_ffnn(doc)

    def test_non_finite_entries(self):
        doc = {"activation": "tanh",
               "layers": [{"W": [[float("nan")]], "b": [0.0]}]}
        with pytest.raises(ValidationError):
            pc.load_ffnn(doc)

    def test_loads_from_path(self, tmp_path):
        path = tmp_path / "net.json"
        path.write_text(json.dumps(
            {"activation": "relu", "layers": [{"W": [[1.0]], "b": [0.0]}]}))
        net = pc.load_ffnn(path)
        assert net.activation.kind == "relu"
