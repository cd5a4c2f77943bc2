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

// Dense density-matrix reference simulator for cross-checking the Pauli-vector
// backend. Gates act through full 2^n x 2^n operators and noise through the
// Kraus decomposition of the depolarizing channels, so nothing is shared with
// the library's update rules.

#pragma once

#include "qcstream/sim/state.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <vector>

namespace qcstream::testing {

class DenseRho {
  public:
    using Mat = Eigen::MatrixXcd;

    explicit DenseRho(int n) : n_(n), rho_(Mat::Zero(1 << n, 1 << n)) { rho_(0, 0) = 1.0; }

    [[nodiscard]] int num_qubits() const noexcept { return n_; }
    [[nodiscard]] const Mat &rho() const noexcept { return rho_; }

    void apply(const sim::GateOp &g) {
        if (g.kind == sim::GateKind::kCNOT) {
            const Mat u = cnot(g.control, g.target);
            rho_ = u * rho_ * u.adjoint();
        } else {
            const Mat u = embed(one_qubit(g.kind, g.angle), g.target);
            rho_ = u * rho_ * u.adjoint();
        }
    }

    // (1 - 3p/4) rho + (p/4) sum_P P rho P over P in {X, Y, Z}.
    void depolarize(int q, double p) {
        Mat out = (1.0 - 0.75 * p) * rho_;
        for (int k = 1; k < 4; ++k) {
            const Mat e = embed(pauli(k), q);
            out += (p / 4.0) * e * rho_ * e.adjoint();
        }
        rho_ = out;
    }

    // (1 - 15p/16) rho + (p/16) sum over the 15 non-identity two-qubit Paulis.
    void depolarize(int a, int b, double p) {
        Mat out = (1.0 - 15.0 * p / 16.0) * rho_;
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                if (i == 0 && j == 0)
                    continue;
                const Mat e = embed(pauli(i), a) * embed(pauli(j), b);
                out += (p / 16.0) * e * rho_ * e.adjoint();
            }
        }
        rho_ = out;
    }

    [[nodiscard]] double z(int q) const { return (rho_ * embed(pauli(3), q)).trace().real(); }

    static Mat pauli(int k) {
        Mat m(2, 2);
        using C = std::complex<double>;
        switch (k) {
        case 1:
            m << 0, 1, 1, 0;
            break;
        case 2:
            m << 0, C(0, -1), C(0, 1), 0;
            break;
        case 3:
            m << 1, 0, 0, -1;
            break;
        default:
            m << 1, 0, 0, 1;
        }
        return m;
    }

    static Mat one_qubit(sim::GateKind kind, double angle) {
        Mat m(2, 2);
        const double c = std::cos(angle / 2.0);
        const double s = std::sin(angle / 2.0);
        if (kind == sim::GateKind::kRY) {
            m << c, -s, s, c;
        } else {
            m << std::complex<double>(c, -s), 0, 0, std::complex<double>(c, s);
        }
        return m;
    }

    // Kronecker product with qubit 0 as the leftmost (most significant) factor.
    [[nodiscard]] Mat embed(const Mat &op, int q) const {
        Mat out = Mat::Identity(1, 1);
        for (int i = 0; i < n_; ++i) {
            const Mat f = i == q ? op : Mat::Identity(2, 2);
            Mat next(out.rows() * 2, out.cols() * 2);
            for (Eigen::Index r = 0; r < out.rows(); ++r)
                for (Eigen::Index c = 0; c < out.cols(); ++c)
                    next.block(r * 2, c * 2, 2, 2) = out(r, c) * f;
            out = next;
        }
        return out;
    }

    [[nodiscard]] Mat cnot(int control, int target) const {
        const Eigen::Index dim = Eigen::Index{1} << n_;
        Mat u = Mat::Zero(dim, dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            const Eigen::Index cbit = Eigen::Index{1} << (n_ - 1 - control);
            const Eigen::Index tbit = Eigen::Index{1} << (n_ - 1 - target);
            const Eigen::Index j = (i & cbit) ? (i ^ tbit) : i;
            u(j, i) = 1.0;
        }
        return u;
    }

  private:
    int n_;
    Mat rho_;
};

} // namespace qcstream::testing
