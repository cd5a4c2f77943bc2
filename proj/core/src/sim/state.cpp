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
#include "qcstream/sim/state.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <string>

namespace qcstream::sim {

namespace {

constexpr Complex kI{0.0, 1.0};

inline std::size_t stride(int qubit) noexcept { return std::size_t{1} << (2 * qubit); }
inline int digit(std::size_t p, int qubit) noexcept {
    return static_cast<int>((p >> (2 * qubit)) & 3U);
}
/// Basis-index bit of `qubit` (qubit 0 is the most significant bit).
inline std::size_t basis_bit(int num_qubits, int qubit) noexcept {
    return std::size_t{1} << (num_qubits - 1 - qubit);
}

Complex pauli_element(int d, int row, int col) {
    switch (d) {
    case 0:
        return row == col ? 1.0 : 0.0;
    case 1:
        return row != col ? 1.0 : 0.0;
    case 2:
        return row != col ? (row == 0 ? -kI : kI) : Complex{0.0};
    default:
        return row == col ? (row == 0 ? 1.0 : -1.0) : 0.0;
    }
}

void pauli_matrix(int d, Complex (&m)[4]) {
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            m[2 * r + c] = pauli_element(d, r, c);
        }
    }
}

/// X/Y digits flip the basis bit.
std::size_t flip_mask(std::size_t p, int num_qubits) {
    std::size_t mask = 0;
    for (int q = 0; q < num_qubits; ++q) {
        const int d = digit(p, q);
        if (d == 1 || d == 2) {
            mask |= basis_bit(num_qubits, q);
        }
    }
    return mask;
}

/// P[row][col] for a full Pauli string; the caller guarantees col == row ^ flip_mask.
Complex pauli_string_element(std::size_t p, int num_qubits, std::size_t row, std::size_t col) {
    Complex v{1.0};
    for (int q = 0; q < num_qubits; ++q) {
        const std::size_t b = basis_bit(num_qubits, q);
        v *= pauli_element(digit(p, q), (row & b) ? 1 : 0, (col & b) ? 1 : 0);
    }
    return v;
}

struct CnotRule {
    std::uint8_t control_digit;
    std::uint8_t target_digit;
    double sign;
};

/// Conjugation table CNOT (s_c (x) s_t) CNOT = sign * (s_c' (x) s_t'), computed
/// numerically once.
const std::array<CnotRule, 16> &cnot_rules() {
    static const std::array<CnotRule, 16> rules = [] {
        std::array<CnotRule, 16> out{};
        auto kron = [](const Complex (&a)[4], const Complex (&b)[4], Complex (&k)[16]) {
            for (int r1 = 0; r1 < 2; ++r1)
                for (int c1 = 0; c1 < 2; ++c1)
                    for (int r2 = 0; r2 < 2; ++r2)
                        for (int c2 = 0; c2 < 2; ++c2)
                            k[(2 * r1 + r2) * 4 + (2 * c1 + c2)] = a[2 * r1 + c1] * b[2 * r2 + c2];
        };
        // CNOT with the control as the high bit: |10> <-> |11>.
        const int perm[4] = {0, 1, 3, 2};
        for (int dc = 0; dc < 4; ++dc) {
            for (int dt = 0; dt < 4; ++dt) {
                Complex a[4], b[4], p[16], conj[16];
                pauli_matrix(dc, a);
                pauli_matrix(dt, b);
                kron(a, b, p);
                for (int r = 0; r < 4; ++r)
                    for (int c = 0; c < 4; ++c)
                        conj[r * 4 + c] = p[perm[r] * 4 + perm[c]];
                bool found = false;
                for (int ec = 0; ec < 4 && !found; ++ec) {
                    for (int et = 0; et < 4 && !found; ++et) {
                        Complex x[4], y[4], q[16];
                        pauli_matrix(ec, x);
                        pauli_matrix(et, y);
                        kron(x, y, q);
                        Complex overlap{0.0};
                        for (int i = 0; i < 16; ++i)
                            overlap += std::conj(q[i]) * conj[i];
                        overlap /= 4.0;
                        if (std::abs(std::abs(overlap) - 1.0) < 1e-12) {
                            out[static_cast<std::size_t>(dc * 4 + dt)] =
                                CnotRule{static_cast<std::uint8_t>(ec), static_cast<std::uint8_t>(et),
                                         overlap.real() > 0 ? 1.0 : -1.0};
                            found = true;
                        }
                    }
                }
                if (!found) {
                    throw std::logic_error("CNOT conjugation table: Pauli image not found");
                }
            }
        }
        return out;
    }();
    return rules;
}

void check_qubit(int qubit, int num_qubits, const char *what) {
    if (qubit < 0 || qubit >= num_qubits) {
        throw std::invalid_argument(std::string(what) + ": qubit index " + std::to_string(qubit) +
                                    " out of range for " + std::to_string(num_qubits) + " qubits");
    }
}

void check_probability(double p, const char *what) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
    }
}

} // namespace

void GateOp::validate(int num_qubits) const {
    check_qubit(target, num_qubits, "gate target");
    if (kind == GateKind::kCNOT) {
        check_qubit(control, num_qubits, "gate control");
        if (control == target) {
            throw std::invalid_argument("CNOT control and target must differ");
        }
    } else if (!std::isfinite(angle)) {
        throw std::invalid_argument("rotation angle must be finite");
    }
}

void NoiseParams::validate() const {
    check_probability(p1, "noise p1");
    check_probability(p2, "noise p2");
    check_probability(p_ro, "readout error");
}

void gate_matrix(GateKind kind, double angle, Complex (&u)[4]) {
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    switch (kind) {
    case GateKind::kRY:
        u[0] = c;
        u[1] = -s;
        u[2] = s;
        u[3] = c;
        break;
    case GateKind::kRZ:
        u[0] = Complex{c, -s};
        u[1] = 0.0;
        u[2] = 0.0;
        u[3] = Complex{c, s};
        break;
    case GateKind::kCNOT:
        throw std::invalid_argument("gate_matrix: CNOT is not a single-qubit gate");
    }
}

void pauli_transfer_matrix(const Complex (&u)[4], double (&m)[9]) {
    Complex udag[4] = {std::conj(u[0]), std::conj(u[2]), std::conj(u[1]), std::conj(u[3])};
    auto mul = [](const Complex (&a)[4], const Complex (&b)[4], Complex (&out)[4]) {
        out[0] = a[0] * b[0] + a[1] * b[2];
        out[1] = a[0] * b[1] + a[1] * b[3];
        out[2] = a[2] * b[0] + a[3] * b[2];
        out[3] = a[2] * b[1] + a[3] * b[3];
    };
    for (int b = 1; b <= 3; ++b) {
        Complex sb[4], t1[4], t2[4];
        pauli_matrix(b, sb);
        mul(u, sb, t1);
        mul(t1, udag, t2);
        for (int a = 1; a <= 3; ++a) {
            Complex sa[4], t3[4];
            pauli_matrix(a, sa);
            mul(sa, t2, t3);
            m[(a - 1) * 3 + (b - 1)] = 0.5 * (t3[0] + t3[3]).real();
        }
    }
}

QuantumState::QuantumState(int num_qubits, Mode mode) : num_qubits_(num_qubits), mode_(mode) {
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
        throw std::invalid_argument("number of qubits must be in [1, " +
                                    std::to_string(kMaxQubits) + "]");
    }
    if (mode == Mode::kPure) {
        amps_.assign(dim(), Complex{0.0});
    } else {
        pauli_.assign(std::size_t{1} << (2 * num_qubits), 0.0);
    }
}

QuantumState QuantumState::zero(int num_qubits, Mode mode) { return basis(num_qubits, 0, mode); }

QuantumState QuantumState::basis(int num_qubits, std::uint64_t index, Mode mode) {
    QuantumState s(num_qubits, mode);
    if (index >= s.dim()) {
        throw std::invalid_argument("basis index out of range");
    }
    if (mode == Mode::kPure) {
        s.amps_[index] = 1.0;
        return s;
    }
    // Diagonal projector: components on {I, Z}^n with sign (-1)^{bit} per Z.
    for (std::uint64_t m = 0; m < s.dim(); ++m) {
        std::size_t p = 0;
        for (int q = 0; q < num_qubits; ++q) {
            if (m & basis_bit(num_qubits, q)) {
                p += 3 * stride(q);
            }
        }
        s.pauli_[p] = (std::popcount(m & index) % 2 == 0) ? 1.0 : -1.0;
    }
    return s;
}

QuantumState QuantumState::from_amplitudes(std::vector<Complex> amplitudes) {
    const std::size_t n = amplitudes.size();
    if (n < 2 || !std::has_single_bit(n)) {
        throw std::invalid_argument("amplitude count must be a power of two >= 2");
    }
    QuantumState s(std::countr_zero(n), Mode::kPure);
    double norm = 0.0;
    for (const auto &a : amplitudes)
        norm += std::norm(a);
    if (std::abs(norm - 1.0) > 1e-10) {
        throw std::invalid_argument("amplitudes must have unit norm");
    }
    s.amps_ = std::move(amplitudes);
    return s;
}

QuantumState QuantumState::from_density(int num_qubits, std::span<const Complex> rho) {
    QuantumState s(num_qubits, Mode::kMixed);
    const std::size_t d = s.dim();
    if (rho.size() != d * d) {
        throw std::invalid_argument("density matrix has wrong size");
    }
    for (std::size_t p = 0; p < s.pauli_.size(); ++p) {
        const std::size_t x = flip_mask(p, num_qubits);
        Complex acc{0.0};
        for (std::size_t r = 0; r < d; ++r) {
            const std::size_t c = r ^ x;
            acc += rho[r * d + c] * pauli_string_element(p, num_qubits, c, r);
        }
        s.pauli_[p] = acc.real();
    }
    return s;
}

QuantumState QuantumState::maximally_mixed(int num_qubits) {
    QuantumState s(num_qubits, Mode::kMixed);
    s.pauli_[0] = 1.0;
    return s;
}

void QuantumState::require_mode(Mode mode, const char *what) const {
    if (mode_ != mode) {
        throw std::logic_error(std::string(what) + " requires a " +
                               (mode == Mode::kPure ? "pure" : "mixed") + " state");
    }
}

std::span<const Complex> QuantumState::amplitudes() const {
    require_mode(Mode::kPure, "amplitudes()");
    return amps_;
}

std::span<const double> QuantumState::pauli_components() const {
    require_mode(Mode::kMixed, "pauli_components()");
    return pauli_;
}

std::vector<Complex> QuantumState::density_matrix() const {
    const std::size_t d = dim();
    std::vector<Complex> rho(d * d, Complex{0.0});
    if (is_pure()) {
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c)
                rho[r * d + c] = amps_[r] * std::conj(amps_[c]);
        return rho;
    }
    const double scale = 1.0 / static_cast<double>(d);
    for (std::size_t p = 0; p < pauli_.size(); ++p) {
        if (pauli_[p] == 0.0)
            continue;
        const std::size_t x = flip_mask(p, num_qubits_);
        for (std::size_t r = 0; r < d; ++r) {
            const std::size_t c = r ^ x;
            rho[r * d + c] += scale * pauli_[p] * pauli_string_element(p, num_qubits_, r, c);
        }
    }
    return rho;
}

QuantumState QuantumState::to_mixed() const {
    if (!is_pure()) {
        return *this;
    }
    QuantumState s(num_qubits_, Mode::kMixed);
    const std::size_t d = dim();
    for (std::size_t p = 0; p < s.pauli_.size(); ++p) {
        const std::size_t x = flip_mask(p, num_qubits_);
        Complex acc{0.0};
        // <psi|P|psi> = sum_r conj(psi_r) P[r][r^x] psi_{r^x}
        for (std::size_t r = 0; r < d; ++r) {
            const std::size_t c = r ^ x;
            acc += std::conj(amps_[r]) * pauli_string_element(p, num_qubits_, r, c) * amps_[c];
        }
        s.pauli_[p] = acc.real();
    }
    return s;
}

std::vector<double> QuantumState::probabilities() const {
    const std::size_t d = dim();
    std::vector<double> probs(d, 0.0);
    if (is_pure()) {
        for (std::size_t b = 0; b < d; ++b)
            probs[b] = std::norm(amps_[b]);
        return probs;
    }
    std::vector<double> zcomp(d);
    for (std::size_t m = 0; m < d; ++m) {
        std::size_t p = 0;
        for (int q = 0; q < num_qubits_; ++q) {
            if (m & basis_bit(num_qubits_, q)) {
                p += 3 * stride(q);
            }
        }
        zcomp[m] = pauli_[p];
    }
    const double scale = 1.0 / static_cast<double>(d);
    for (std::size_t b = 0; b < d; ++b) {
        double acc = 0.0;
        for (std::size_t m = 0; m < d; ++m) {
            acc += (std::popcount(m & b) % 2 == 0) ? zcomp[m] : -zcomp[m];
        }
        probs[b] = std::max(0.0, acc * scale);
    }
    return probs;
}

double QuantumState::trace() const {
    if (is_pure()) {
        double n = 0.0;
        for (const auto &a : amps_)
            n += std::norm(a);
        return n;
    }
    return pauli_[0];
}

double QuantumState::z_expectation(int qubit) const {
    check_qubit(qubit, num_qubits_, "expectation");
    if (!is_pure()) {
        return pauli_[3 * stride(qubit)];
    }
    const std::size_t b = basis_bit(num_qubits_, qubit);
    double acc = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        acc += (i & b) ? -std::norm(amps_[i]) : std::norm(amps_[i]);
    }
    return acc;
}

void QuantumState::apply_unitary(const GateOp &gate) {
    gate.validate(num_qubits_);
    if (is_pure()) {
        const std::size_t tb = basis_bit(num_qubits_, gate.target);
        const std::size_t d = dim();
        if (gate.kind == GateKind::kCNOT) {
            const std::size_t cb = basis_bit(num_qubits_, gate.control);
            for (std::size_t i = 0; i < d; ++i) {
                if ((i & cb) && !(i & tb)) {
                    std::swap(amps_[i], amps_[i | tb]);
                }
            }
            return;
        }
        Complex u[4];
        gate_matrix(gate.kind, gate.angle, u);
        for (std::size_t i = 0; i < d; ++i) {
            if (i & tb)
                continue;
            const Complex a0 = amps_[i];
            const Complex a1 = amps_[i | tb];
            amps_[i] = u[0] * a0 + u[1] * a1;
            amps_[i | tb] = u[2] * a0 + u[3] * a1;
        }
        return;
    }

    if (gate.kind != GateKind::kCNOT) {
        Complex u[4];
        double m[9];
        gate_matrix(gate.kind, gate.angle, u);
        pauli_transfer_matrix(u, m);
        apply_pauli_transfer(gate.target, m);
        return;
    }

    const auto &rules = cnot_rules();
    const int c = gate.control;
    const int t = gate.target;
    const std::size_t sc = stride(c);
    const std::size_t st = stride(t);
    thread_local std::vector<double> scratch;
    scratch.assign(pauli_.size(), 0.0);
    for (std::size_t p = 0; p < pauli_.size(); ++p) {
        const double v = pauli_[p];
        if (v == 0.0)
            continue;
        const int dc = digit(p, c);
        const int dt = digit(p, t);
        const CnotRule &rule = rules[static_cast<std::size_t>(dc * 4 + dt)];
        const std::size_t q = p - static_cast<std::size_t>(dc) * sc - static_cast<std::size_t>(dt) * st +
                              rule.control_digit * sc + rule.target_digit * st;
        scratch[q] = rule.sign * v;
    }
    pauli_.swap(scratch);
}

void QuantumState::apply_pauli_transfer(int qubit, const double (&m)[9]) {
    require_mode(Mode::kMixed, "apply_pauli_transfer");
    check_qubit(qubit, num_qubits_, "pauli transfer");
    const std::size_t s = stride(qubit);
    const std::size_t block = 4 * s;
    double *data = pauli_.data();
    for (std::size_t hi = 0; hi < pauli_.size(); hi += block) {
        for (std::size_t lo = 0; lo < s; ++lo) {
            double *base = data + hi + lo;
            const double x = base[s];
            const double y = base[2 * s];
            const double z = base[3 * s];
            base[s] = m[0] * x + m[1] * y + m[2] * z;
            base[2 * s] = m[3] * x + m[4] * y + m[5] * z;
            base[3 * s] = m[6] * x + m[7] * y + m[8] * z;
        }
    }
}

void QuantumState::apply_cnot_sequence(std::span<const std::pair<int, int>> pairs, double p) {
    require_mode(Mode::kMixed, "apply_cnot_sequence");
    if (pairs.empty())
        return;
    const auto &table = cnot_sequence_table(num_qubits_, pairs, p);
    thread_local std::vector<double> scratch;
    scratch.resize(pauli_.size());
    for (std::size_t src = 0; src < pauli_.size(); ++src)
        scratch[table.dest[src]] = table.factor[src] * pauli_[src];
    pauli_.swap(scratch);
}

const SignedPermutation &cnot_sequence_table(int num_qubits,
                                             std::span<const std::pair<int, int>> pairs, double p) {
    check_probability(p, "depolarizing probability");
    for (const auto &[c, t] : pairs)
        GateOp::cnot(c, t).validate(num_qubits);
    thread_local std::map<std::vector<std::uint64_t>, SignedPermutation> cache;
    std::vector<std::uint64_t> key{static_cast<std::uint64_t>(num_qubits), std::bit_cast<std::uint64_t>(p)};
    for (const auto &[c, t] : pairs)
        key.push_back(static_cast<std::uint64_t>(c) * 16 + static_cast<std::uint64_t>(t));
    if (const auto it = cache.find(key); it != cache.end())
        return it->second;

    const auto &rules = cnot_rules();
    const std::size_t size = std::size_t{1} << (2 * num_qubits);
    SignedPermutation table;
    table.dest.resize(size);
    table.factor.resize(size);
    for (std::size_t src = 0; src < size; ++src) {
        std::size_t cur = src;
        double f = 1.0;
        for (const auto &[c, t] : pairs) {
            const int dc = digit(cur, c);
            const int dt = digit(cur, t);
            const CnotRule &rule = rules[static_cast<std::size_t>(dc * 4 + dt)];
            cur = cur - static_cast<std::size_t>(dc) * stride(c) - static_cast<std::size_t>(dt) * stride(t) +
                  rule.control_digit * stride(c) + rule.target_digit * stride(t);
            f *= rule.sign;
            if (rule.control_digit != 0 || rule.target_digit != 0)
                f *= 1.0 - p;
        }
        table.dest[src] = static_cast<std::uint32_t>(cur);
        table.factor[src] = f;
    }
    return cache.emplace(std::move(key), std::move(table)).first->second;
}

void QuantumState::depolarize(int qubit, double p) {
    require_mode(Mode::kMixed, "depolarizing channel");
    check_qubit(qubit, num_qubits_, "depolarizing channel");
    check_probability(p, "depolarizing probability");
    if (p == 0.0)
        return;
    const double keep = 1.0 - p;
    for (std::size_t i = 0; i < pauli_.size(); ++i) {
        if (digit(i, qubit) != 0) {
            pauli_[i] *= keep;
        }
    }
}

void QuantumState::depolarize(int qubit_a, int qubit_b, double p) {
    require_mode(Mode::kMixed, "depolarizing channel");
    check_qubit(qubit_a, num_qubits_, "depolarizing channel");
    check_qubit(qubit_b, num_qubits_, "depolarizing channel");
    check_probability(p, "depolarizing probability");
    if (p == 0.0)
        return;
    const double keep = 1.0 - p;
    for (std::size_t i = 0; i < pauli_.size(); ++i) {
        if (digit(i, qubit_a) != 0 || digit(i, qubit_b) != 0) {
            pauli_[i] *= keep;
        }
    }
}

QuantumState apply_gate(QuantumState state, const GateOp &gate, const NoiseParams &noise) {
    gate.validate(state.num_qubits());
    if (noise.enabled) {
        noise.validate();
        if (state.is_pure()) {
            throw std::invalid_argument("noisy gate application requires a mixed state");
        }
    }
    state.apply_unitary(gate);
    if (noise.enabled) {
        if (gate.is_two_qubit()) {
            state.depolarize(gate.control, gate.target, noise.p2);
        } else {
            state.depolarize(gate.target, noise.p1);
        }
    }
    return state;
}

double expectation_z(const QuantumState &state, int qubit, const NoiseParams &noise) {
    return state.z_expectation(qubit) * noise.readout_contraction();
}

std::vector<double> expectations_z(const QuantumState &state, const NoiseParams &noise) {
    std::vector<double> out(static_cast<std::size_t>(state.num_qubits()));
    const double k = noise.readout_contraction();
    for (int q = 0; q < state.num_qubits(); ++q) {
        out[static_cast<std::size_t>(q)] = state.z_expectation(q) * k;
    }
    return out;
}

namespace {

template <typename Visit>
void draw_shots(const QuantumState &state, std::int64_t shots, double p_ro, std::uint64_t seed,
                Visit &&visit) {
    if (shots < 1) {
        throw std::invalid_argument("shots must be >= 1");
    }
    check_probability(p_ro, "readout error");
    const auto probs = state.probabilities();
    std::mt19937_64 rng(seed);
    std::discrete_distribution<std::size_t> outcome(probs.begin(), probs.end());
    std::bernoulli_distribution flip(p_ro);
    const int n = state.num_qubits();
    for (std::int64_t s = 0; s < shots; ++s) {
        std::size_t b = outcome(rng);
        if (p_ro > 0.0) {
            for (int q = 0; q < n; ++q) {
                if (flip(rng)) {
                    b ^= basis_bit(n, q);
                }
            }
        }
        visit(b);
    }
}

} // namespace

Counts sample_counts(const QuantumState &state, std::int64_t shots, double p_ro,
                     std::uint64_t seed) {
    Counts counts;
    const int n = state.num_qubits();
    draw_shots(state, shots, p_ro, seed, [&](std::size_t b) {
        std::string key(static_cast<std::size_t>(n), '0');
        for (int q = 0; q < n; ++q) {
            if (b & basis_bit(n, q))
                key[static_cast<std::size_t>(q)] = '1';
        }
        ++counts[key];
    });
    return counts;
}

std::vector<double> sampled_expectations_z(const QuantumState &state, std::int64_t shots,
                                           double p_ro, std::uint64_t seed) {
    const int n = state.num_qubits();
    std::vector<std::int64_t> ones(static_cast<std::size_t>(n), 0);
    draw_shots(state, shots, p_ro, seed, [&](std::size_t b) {
        for (int q = 0; q < n; ++q) {
            if (b & basis_bit(n, q))
                ++ones[static_cast<std::size_t>(q)];
        }
    });
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) {
        const auto k = static_cast<double>(ones[static_cast<std::size_t>(q)]);
        out[static_cast<std::size_t>(q)] = (static_cast<double>(shots) - 2.0 * k) /
                                           static_cast<double>(shots);
    }
    return out;
}

double counts_expectation_z(const Counts &counts, int qubit) {
    std::int64_t total = 0;
    std::int64_t acc = 0;
    for (const auto &[key, n] : counts) {
        if (qubit < 0 || static_cast<std::size_t>(qubit) >= key.size()) {
            throw std::invalid_argument("counts_expectation_z: qubit out of range");
        }
        total += n;
        acc += key[static_cast<std::size_t>(qubit)] == '0' ? n : -n;
    }
    if (total == 0) {
        throw std::invalid_argument("counts_expectation_z: empty histogram");
    }
    return static_cast<double>(acc) / static_cast<double>(total);
}

StateDiagnostics diagnose(const QuantumState &state) {
    StateDiagnostics d;
    d.trace_error = std::abs(state.trace() - 1.0);
    if (state.is_pure()) {
        return d;
    }
    const auto rho = state.density_matrix();
    const auto n = static_cast<Eigen::Index>(state.dim());
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c)
            m(r, c) = rho[static_cast<std::size_t>(r * n + c)];
    d.hermiticity_error = (m - m.adjoint()).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = solver.eigenvalues().minCoeff();
    return d;
}

} // namespace qcstream::sim
