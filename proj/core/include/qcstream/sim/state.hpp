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
#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

/// @file
/// Small-register quantum state simulation. Pure states are stored as 2^n
/// amplitudes; mixed states as the 4^n real Pauli components c_P = Tr(rho P),
/// which is the density matrix in the Pauli basis. Depolarizing channels act
/// diagonally in that basis and CNOT is a signed permutation, so the noisy
/// path never touches complex 2^n x 2^n products.

namespace qcstream::sim {

using Complex = std::complex<double>;

inline constexpr int kMaxQubits = 10;

enum class GateKind { kRY, kRZ, kCNOT };

struct GateOp {
    GateKind kind = GateKind::kRY;
    int target = 0;
    int control = -1;
    double angle = 0.0;

    static GateOp ry(int target, double angle) { return {GateKind::kRY, target, -1, angle}; }
    static GateOp rz(int target, double angle) { return {GateKind::kRZ, target, -1, angle}; }
    static GateOp cnot(int control, int target) { return {GateKind::kCNOT, target, control, 0.0}; }

    [[nodiscard]] bool is_two_qubit() const noexcept { return kind == GateKind::kCNOT; }
    /// Throws std::invalid_argument on bad indices or a non-finite angle.
    void validate(int num_qubits) const;
};

struct NoiseParams {
    double p1 = 0.0;   ///< depolarizing probability after single-qubit gates
    double p2 = 0.0;   ///< depolarizing probability after two-qubit gates
    double p_ro = 0.0; ///< symmetric readout bit-flip probability
    bool enabled = false;

    static NoiseParams none() { return {}; }
    /// noise_1q = 0.001, noise_2q = 0.01, readout_error = 0.02.
    static NoiseParams nisq_defaults() { return {0.001, 0.01, 0.02, true}; }

    void validate() const;
    [[nodiscard]] double readout_contraction() const noexcept {
        return enabled ? 1.0 - 2.0 * p_ro : 1.0;
    }
};

class QuantumState {
  public:
    enum class Mode { kPure, kMixed };

    /// |0...0>.
    static QuantumState zero(int num_qubits, Mode mode);
    /// Computational basis state. Qubit 0 is the most significant bit of `index`,
    /// so basis(2, 0b01) is |01> (qubit 1 set).
    static QuantumState basis(int num_qubits, std::uint64_t index, Mode mode);
    static QuantumState from_amplitudes(std::vector<Complex> amplitudes);
    /// Row-major 2^n x 2^n density matrix.
    static QuantumState from_density(int num_qubits, std::span<const Complex> rho);
    static QuantumState maximally_mixed(int num_qubits);

    [[nodiscard]] int num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] Mode mode() const noexcept { return mode_; }
    [[nodiscard]] bool is_pure() const noexcept { return mode_ == Mode::kPure; }
    [[nodiscard]] std::size_t dim() const noexcept { return std::size_t{1} << num_qubits_; }

    [[nodiscard]] std::span<const Complex> amplitudes() const;
    [[nodiscard]] std::span<const double> pauli_components() const;

    [[nodiscard]] std::vector<Complex> density_matrix() const;
    [[nodiscard]] QuantumState to_mixed() const;
    [[nodiscard]] std::vector<double> probabilities() const;
    /// Squared norm (pure) or trace (mixed).
    [[nodiscard]] double trace() const;
    /// Noise-free <Z_q>.
    [[nodiscard]] double z_expectation(int qubit) const;

    void apply_unitary(const GateOp &gate);
    void depolarize(int qubit, double p);
    void depolarize(int qubit_a, int qubit_b, double p);

    /// Mixed mode only: c -> M c on the (X, Y, Z) components of `qubit`, identity
    /// component untouched. M is row-major 3x3. Used for fused rotations.
    void apply_pauli_transfer(int qubit, const double (&m)[9]);

    /// Mixed mode only: CNOT(control, target) for each pair in order, each
    /// followed by two-qubit depolarizing with probability p, applied as one
    /// cached signed permutation of the Pauli components.
    void apply_cnot_sequence(std::span<const std::pair<int, int>> pairs, double p);

  private:
    QuantumState(int num_qubits, Mode mode);
    void require_mode(Mode mode, const char *what) const;

    int num_qubits_ = 0;
    Mode mode_ = Mode::kPure;
    std::vector<Complex> amps_;
    std::vector<double> pauli_;
};

/// Unitary followed, when noise is enabled, by the depolarizing channel on the
/// gate's qubit(s): rho -> (1-p) rho + p (I/2^k (x) Tr_gate rho).
/// dest[p] receives factor[p] * component p.
struct SignedPermutation {
    std::vector<std::uint32_t> dest;
    std::vector<double> factor;
};

/// Cached (per thread) table for a CNOT sequence with two-qubit depolarizing
/// probability p after each gate.
const SignedPermutation &cnot_sequence_table(int num_qubits,
                                             std::span<const std::pair<int, int>> pairs, double p);

QuantumState apply_gate(QuantumState state, const GateOp &gate, const NoiseParams &noise);

/// Tr(rho Z_q), contracted by (1 - 2 p_ro) when noise is enabled.
double expectation_z(const QuantumState &state, int qubit, const NoiseParams &noise);
std::vector<double> expectations_z(const QuantumState &state, const NoiseParams &noise);

/// Bitstring histogram; character i of a key is the measured value of qubit i.
using Counts = std::map<std::string, std::int64_t>;

Counts sample_counts(const QuantumState &state, std::int64_t shots, double p_ro,
                     std::uint64_t seed);

/// Shot-estimated <Z_i> for every qubit, same sampling model as sample_counts
/// without building the histogram.
std::vector<double> sampled_expectations_z(const QuantumState &state, std::int64_t shots,
                                           double p_ro, std::uint64_t seed);

double counts_expectation_z(const Counts &counts, int qubit);

/// Numerical health of a state, for invariant checks.
struct StateDiagnostics {
    double trace_error = 0.0;       ///< |trace - 1|
    double hermiticity_error = 0.0; ///< max |rho - rho^dagger|
    double min_eigenvalue = 0.0;
};
StateDiagnostics diagnose(const QuantumState &state);

/// 3x3 transfer matrix of a single-qubit unitary on the Bloch components,
/// M_ab = Tr(s_a U s_b U^dagger) / 2 for a, b in {X, Y, Z}.
void pauli_transfer_matrix(const Complex (&u)[4], double (&m)[9]);
void gate_matrix(GateKind kind, double angle, Complex (&u)[4]);

} // namespace qcstream::sim
