// Test-only dense oracle: builds operator matrices by Kronecker products of
// 2x2 Paulis, a route independent of the bitmask kernels under test.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <unsupported/Eigen/KroneckerProduct>

#include "spinsplit/pauli.hpp"

namespace oracle {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using spinsplit::mask_t;

inline Mat pauli2(char axis) {
    Mat m(2, 2);
    const std::complex<double> i{0, 1};
    switch (axis) {
        case 'I': m << 1, 0, 0, 1; break;
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, -i, i, 0; break;
        case 'Z': m << 1, 0, 0, -1; break;
    }
    return m;
}

// Site i lives on bit i of the basis index, so site n-1 is the leftmost
// Kronecker factor.
inline Mat term_matrix(const spinsplit::PauliTerm& t) {
    Mat m = Mat::Identity(1, 1);
    for (int s = t.n_sites - 1; s >= 0; --s) {
        mask_t bit = mask_t{1} << s;
        char axis = 'I';
        if (t.x_mask & bit) axis = (t.z_mask & bit) ? 'Y' : 'X';
        else if (t.z_mask & bit) axis = 'Z';
        m = Eigen::kroneckerProduct(m, pauli2(axis)).eval();
    }
    const auto dim = m.rows();
    Mat g = t.coeff * (t.shifted ? (Mat::Identity(dim, dim) - m).eval() : m);
    return g;
}

inline Mat sum_matrix(const spinsplit::OperatorSum& h) {
    const auto dim = Eigen::Index(1) << h.n_sites;
    Mat m = Mat::Zero(dim, dim);
    for (const auto& t : h.terms) m += term_matrix(t);
    return m;
}

inline Mat expm_hermitian(const Mat& h, double tau) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Vec w = (-tau * es.eigenvalues().array()).exp().matrix().cast<std::complex<double>>();
    return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

inline Vec to_eigen(const spinsplit::StateVector& v) {
    Vec out(v.amp.size());
    for (size_t i = 0; i < v.amp.size(); ++i) out(i) = v.amp[i];
    return out;
}

inline spinsplit::StateVector from_eigen(int n_sites, const Vec& v) {
    spinsplit::StateVector out = spinsplit::StateVector::zero(n_sites);
    for (Eigen::Index i = 0; i < v.size(); ++i) out.amp[i] = v(i);
    return out;
}

inline double commutator_norm(const Mat& a, const Mat& b) {
    return (a * b - b * a).norm();
}

}  // namespace oracle
