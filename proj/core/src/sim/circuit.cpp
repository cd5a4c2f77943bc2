// Copyright 2026 The qcstream Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "qcstream/sim/circuit.hpp"

#include "qcstream/optim/numdiff.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qcstream::sim {

CircuitSpec CircuitSpec::reuploading(int num_qubits, int num_layers) {
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
        throw std::invalid_argument("reuploading: qubit count out of range");
    }
    if (num_layers < 1) {
        throw std::invalid_argument("reuploading: need at least one layer");
    }
    CircuitSpec spec;
    spec.num_qubits_ = num_qubits;
    spec.num_layers_ = num_layers;
    spec.param_count_ = static_cast<std::size_t>(2 * num_qubits * num_layers);
    for (int l = 0; l < num_layers; ++l) {
        for (int i = 0; i < num_qubits; ++i) {
            spec.gates_.push_back({GateOp::ry(i, 0.0), static_cast<int>(spec.ry_index(l, i)), i});
            spec.gates_.push_back({GateOp::rz(i, 0.0), static_cast<int>(spec.rz_index(l, i)), -1});
        }
        if (num_qubits > 1) {
            for (int i = 0; i < num_qubits; ++i) {
                const int next = (i + 1) % num_qubits;
                spec.gates_.push_back({GateOp::cnot(i, next), -1, -1});
            }
        }
    }
    return spec;
}

CircuitSpec CircuitSpec::with_prefix(std::vector<GateOp> prefix) const {
    for (const auto &g : prefix)
        g.validate(num_qubits_);
    CircuitSpec out = *this;
    out.prefix_ = std::move(prefix);
    return out;
}

namespace {

/// Row-major 3x3 product a * b.
void mat3_mul(const double (&a)[9], const double (&b)[9], double (&out)[9]) {
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            out[r * 3 + c] = a[r * 3] * b[c] + a[r * 3 + 1] * b[3 + c] + a[r * 3 + 2] * b[6 + c];
}

/// Mixed-state evolution with consecutive single-qubit gates on a qubit fused
/// into one transfer matrix. Exact: depolarizing is unitarily covariant, so a
/// single-qubit channel commutes with later rotations on the same qubit.
class FusedMixedRunner {
  public:
    FusedMixedRunner(int num_qubits, const NoiseParams &noise)
        : state_(QuantumState::zero(num_qubits, QuantumState::Mode::kMixed)), noise_(noise),
          pending_(static_cast<std::size_t>(num_qubits)) {}

    void single(const GateOp &g) {
        if (touches(g.target))
            flush_cnots();
        Complex u[4];
        double m[9];
        gate_matrix(g.kind, g.angle, u);
        pauli_transfer_matrix(u, m);
        if (noise_.enabled && noise_.p1 > 0.0) {
            for (double &v : m)
                v *= 1.0 - noise_.p1;
        }
        auto &slot = pending_[static_cast<std::size_t>(g.target)];
        if (!slot.active) {
            std::copy(std::begin(m), std::end(m), std::begin(slot.m));
            slot.active = true;
            return;
        }
        double prod[9];
        mat3_mul(m, slot.m, prod);
        std::copy(std::begin(prod), std::end(prod), std::begin(slot.m));
    }

    // A pending rotation on a qubit has seen no buffered CNOT touching that
    // qubit, so it commutes with the buffer and may be applied first.
    void two(const GateOp &g) {
        flush(g.control);
        flush(g.target);
        cnots_.emplace_back(g.control, g.target);
    }

    QuantumState finish() {
        flush_cnots();
        for (int q = 0; q < state_.num_qubits(); ++q)
            flush(q);
        return std::move(state_);
    }

  private:
    struct Pending {
        double m[9] = {};
        bool active = false;
    };

    [[nodiscard]] bool touches(int q) const noexcept {
        for (const auto &[c, t] : cnots_)
            if (c == q || t == q)
                return true;
        return false;
    }

    void flush_cnots() {
        if (cnots_.empty())
            return;
        state_.apply_cnot_sequence(cnots_, noise_.enabled ? noise_.p2 : 0.0);
        cnots_.clear();
    }

    void flush(int q) {
        auto &slot = pending_[static_cast<std::size_t>(q)];
        if (slot.active) {
            state_.apply_pauli_transfer(q, slot.m);
            slot.active = false;
        }
    }

    QuantumState state_;
    NoiseParams noise_;
    std::vector<Pending> pending_;
    std::vector<std::pair<int, int>> cnots_;
};

} // namespace

QuantumState run_circuit(const CircuitSpec &spec, std::span<const double> params,
                         std::span<const double> input_angles, const NoiseParams &noise) {
    if (params.size() != spec.param_count()) {
        throw std::invalid_argument("run_circuit: expected " + std::to_string(spec.param_count()) +
                                    " parameters, got " + std::to_string(params.size()));
    }
    if (input_angles.size() != static_cast<std::size_t>(spec.num_qubits())) {
        throw std::invalid_argument("run_circuit: expected " + std::to_string(spec.num_qubits()) +
                                    " input angles, got " + std::to_string(input_angles.size()));
    }
    if (noise.enabled) {
        noise.validate();
    }
    auto resolve = [&](const ParamGate &pg) {
        GateOp g = pg.op;
        if (pg.param >= 0)
            g.angle += params[static_cast<std::size_t>(pg.param)];
        if (pg.input >= 0)
            g.angle += input_angles[static_cast<std::size_t>(pg.input)];
        g.validate(spec.num_qubits());
        return g;
    };

    if (!noise.enabled) {
        auto state = QuantumState::zero(spec.num_qubits(), QuantumState::Mode::kPure);
        for (const auto &g : spec.prefix())
            state.apply_unitary(g);
        for (const auto &pg : spec.gates())
            state.apply_unitary(resolve(pg));
        return state;
    }

    FusedMixedRunner runner(spec.num_qubits(), noise);
    for (const auto &g : spec.prefix()) {
        g.is_two_qubit() ? runner.two(g) : runner.single(g);
    }
    for (const auto &pg : spec.gates()) {
        const GateOp g = resolve(pg);
        g.is_two_qubit() ? runner.two(g) : runner.single(g);
    }
    return runner.finish();
}

std::vector<double> circuit_gradient(const CircuitSpec &spec, std::span<const double> params,
                                     std::span<const double> input_angles,
                                     const NoiseParams &noise, const StateReadout &readout,
                                     const GradientOptions &options) {
    auto f = [&](std::span<const double> p) {
        return readout(run_circuit(spec, p, input_angles, noise));
    };
    switch (options.method) {
    case GradientMethod::kParameterShift: {
        if (noise.enabled) {
            throw std::invalid_argument("parameter-shift gradients require noiseless evaluation");
        }
        if (params.size() != spec.param_count()) {
            throw std::invalid_argument("circuit_gradient: parameter count mismatch");
        }
        // Every parameter drives exactly one RY/RZ, so the two-term shift rule is exact.
        constexpr double kShift = std::numbers::pi / 2.0;
        std::vector<double> grad(params.size());
        std::vector<double> probe(params.begin(), params.end());
        for (std::size_t i = 0; i < params.size(); ++i) {
            probe[i] = params[i] + kShift;
            const double up = f(probe);
            probe[i] = params[i] - kShift;
            const double down = f(probe);
            probe[i] = params[i];
            grad[i] = 0.5 * (up - down);
        }
        return grad;
    }
    case GradientMethod::kFiniteDifference:
        return optim::central_difference(f, params, options.fd_step);
    case GradientMethod::kSpsaDirection:
        return optim::spsa_direction(f, params, options.spsa_c, options.seed);
    }
    throw std::invalid_argument("unknown gradient method");
}

namespace {

struct RotationOp {
    GateKind kind;
    int qubit;
    double angle;
    int param;
    int input;
};

struct AdjointOp {
    bool is_rotation = true;
    RotationOp rot{};
    std::vector<std::pair<int, int>> cnots;
    double m[9] = {};
    double dm[9] = {};
};

void rotation_matrices(const RotationOp &op, double scale, double (&m)[9], double (&dm)[9]) {
    Complex u[4];
    gate_matrix(op.kind, op.angle, u);
    pauli_transfer_matrix(u, m);
    double up[9];
    double down[9];
    gate_matrix(op.kind, op.angle + std::numbers::pi / 2.0, u);
    pauli_transfer_matrix(u, up);
    gate_matrix(op.kind, op.angle - std::numbers::pi / 2.0, u);
    pauli_transfer_matrix(u, down);
    for (int i = 0; i < 9; ++i) {
        m[i] *= scale;
        dm[i] = 0.5 * (up[i] - down[i]) * scale;
    }
}

template <typename Fn>
void for_each_block(std::size_t size, int qubit, Fn &&fn) {
    const std::size_t s = std::size_t{1} << (2 * qubit);
    for (std::size_t hi = 0; hi < size; hi += 4 * s)
        for (std::size_t lo = 0; lo < s; ++lo)
            fn(hi + lo, s);
}

} // namespace

AdjointResult adjoint_gradient(const CircuitSpec &spec, std::span<const double> params,
                               std::span<const double> input_angles, const NoiseParams &noise,
                               std::span<const double> weights) {
    const int n = spec.num_qubits();
    if (params.size() != spec.param_count() || input_angles.size() != static_cast<std::size_t>(n) ||
        weights.size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("adjoint_gradient: size mismatch");
    }
    if (noise.enabled) {
        noise.validate();
    }
    const double scale = noise.enabled ? 1.0 - noise.p1 : 1.0;
    const double p2 = noise.enabled ? noise.p2 : 0.0;

    std::vector<AdjointOp> ops;
    auto push_cnot = [&](const GateOp &g) {
        if (ops.empty() || ops.back().is_rotation) {
            AdjointOp op;
            op.is_rotation = false;
            ops.push_back(std::move(op));
        }
        ops.back().cnots.emplace_back(g.control, g.target);
    };
    for (const auto &g : spec.prefix()) {
        if (g.is_two_qubit())
            push_cnot(g);
        else
            ops.push_back({true, {g.kind, g.target, g.angle, -1, -1}, {}, {}, {}});
    }
    for (const auto &pg : spec.gates()) {
        GateOp g = pg.op;
        if (pg.param >= 0)
            g.angle += params[static_cast<std::size_t>(pg.param)];
        if (pg.input >= 0)
            g.angle += input_angles[static_cast<std::size_t>(pg.input)];
        g.validate(n);
        if (g.is_two_qubit())
            push_cnot(g);
        else
            ops.push_back({true, {g.kind, g.target, g.angle, pg.param, pg.input}, {}, {}, {}});
    }

    const auto initial = QuantumState::zero(n, QuantumState::Mode::kMixed);
    const auto init = initial.pauli_components();
    const std::size_t size = init.size();
    thread_local std::vector<std::vector<double>> saved;
    if (saved.size() < ops.size() + 1)
        saved.resize(ops.size() + 1);
    saved[0].assign(init.begin(), init.end());

    for (std::size_t k = 0; k < ops.size(); ++k) {
        const auto &in = saved[k];
        auto &out = saved[k + 1];
        out.resize(size);
        auto &op = ops[k];
        if (op.is_rotation) {
            rotation_matrices(op.rot, scale, op.m, op.dm);
            const auto &m = op.m;
            for_each_block(size, op.rot.qubit, [&](std::size_t base, std::size_t s) {
                const double x = in[base + s], y = in[base + 2 * s], z = in[base + 3 * s];
                out[base] = in[base];
                out[base + s] = m[0] * x + m[1] * y + m[2] * z;
                out[base + 2 * s] = m[3] * x + m[4] * y + m[5] * z;
                out[base + 3 * s] = m[6] * x + m[7] * y + m[8] * z;
            });
        } else {
            const auto &table = cnot_sequence_table(n, op.cnots, p2);
            for (std::size_t src = 0; src < size; ++src)
                out[table.dest[src]] = table.factor[src] * in[src];
        }
    }

    AdjointResult r;
    const double ro = noise.readout_contraction();
    const auto &final_state = saved[ops.size()];
    thread_local std::vector<double> lambda;
    thread_local std::vector<double> next;
    lambda.assign(size, 0.0);
    r.z.resize(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) {
        const std::size_t zi = 3 * (std::size_t{1} << (2 * q));
        r.z[static_cast<std::size_t>(q)] = ro * final_state[zi];
        r.value += weights[static_cast<std::size_t>(q)] * r.z[static_cast<std::size_t>(q)];
        lambda[zi] = ro * weights[static_cast<std::size_t>(q)];
    }

    r.dparams.assign(params.size(), 0.0);
    r.dinputs.assign(input_angles.size(), 0.0);
    for (std::size_t k = ops.size(); k-- > 0;) {
        const auto &in = saved[k];
        const auto &op = ops[k];
        if (op.is_rotation) {
            const auto &m = op.m;
            const auto &dm = op.dm;
            double grad = 0.0;
            const bool wanted = op.rot.param >= 0 || op.rot.input >= 0;
            for_each_block(size, op.rot.qubit, [&](std::size_t base, std::size_t s) {
                const double x = in[base + s], y = in[base + 2 * s], z = in[base + 3 * s];
                const double lx = lambda[base + s], ly = lambda[base + 2 * s], lz = lambda[base + 3 * s];
                if (wanted) {
                    grad += lx * (dm[0] * x + dm[1] * y + dm[2] * z) +
                            ly * (dm[3] * x + dm[4] * y + dm[5] * z) +
                            lz * (dm[6] * x + dm[7] * y + dm[8] * z);
                }
                lambda[base + s] = m[0] * lx + m[3] * ly + m[6] * lz;
                lambda[base + 2 * s] = m[1] * lx + m[4] * ly + m[7] * lz;
                lambda[base + 3 * s] = m[2] * lx + m[5] * ly + m[8] * lz;
            });
            if (op.rot.param >= 0)
                r.dparams[static_cast<std::size_t>(op.rot.param)] += grad;
            if (op.rot.input >= 0)
                r.dinputs[static_cast<std::size_t>(op.rot.input)] += grad;
        } else {
            const auto &table = cnot_sequence_table(n, op.cnots, p2);
            next.resize(size);
            for (std::size_t src = 0; src < size; ++src)
                next[src] = table.factor[src] * lambda[table.dest[src]];
            lambda.swap(next);
        }
    }
    return r;
}

} // namespace qcstream::sim
