#include "spinsplit/eigensolve.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <sstream>

#include "spinsplit/errors.hpp"

namespace spinsplit {

namespace {

void check_solver_dims(const OperatorSum& h, const SolverOptions& opt) {
    if (h.n_sites < 1) throw SolverError("operator has no sites");
    if (h.n_sites > opt.max_spins)
        throw SolverError("system has " + std::to_string(h.n_sites) +
                          " spins, above the configured cap of " + std::to_string(opt.max_spins));
}

StateVector random_state(int n_sites, std::mt19937_64& rng) {
    StateVector v = StateVector::zero(n_sites);
    std::normal_distribution<double> g(0.0, 1.0);
    for (auto& a : v.amp) a = complex_t{g(rng), g(rng)};
    normalize(v);
    return v;
}

struct RitzPair {
    double value;
    StateVector vec;
    double residual;
};

}  // namespace

Spectrum lowest_eigenpairs(const OperatorSum& h, const SolverOptions& opt) {
    check_solver_dims(h, opt);
    const int n = h.n_sites;
    const size_t dim = size_t{1} << n;
    const int k = opt.k;
    if (k < 1 || static_cast<size_t>(k) > dim)
        throw SolverError("requested k=" + std::to_string(k) + " eigenpairs of a " +
                          std::to_string(dim) + "-dimensional space");

    std::mt19937_64 rng(opt.seed);
    std::vector<RitzPair> locked;
    const int max_basis = std::max(8, std::min<int>(opt.max_basis, static_cast<int>(dim)));
    const double breakdown = 1e-13;

    StateVector carry;  // restart vector carried between passes
    bool have_carry = false;
    double best_unconverged_residual = -1;

    for (int restart = 0; restart < opt.max_restarts && static_cast<int>(locked.size()) < k;
         ++restart) {
        // Start vector orthogonal to everything already locked.
        StateVector v = have_carry ? carry : random_state(n, rng);
        have_carry = false;
        for (int tries = 0;; ++tries) {
            for (const auto& p : locked) axpy(-dot(p.vec, v), p.vec, v);
            double nv = norm(v);
            if (nv > 1e-8) {
                scale(v, complex_t{1.0 / nv, 0});
                break;
            }
            if (tries > 4) throw SolverError("could not build a start vector in the deflated space");
            v = random_state(n, rng);
        }

        std::vector<StateVector> basis{v};
        std::vector<double> alpha, beta;

        for (int j = 0; j < max_basis; ++j) {
            StateVector w = apply_sum(h, basis[j]);
            if (j > 0) axpy(complex_t{-beta[j - 1], 0}, basis[j - 1], w);
            double a = dot(basis[j], w).real();
            alpha.push_back(a);
            axpy(complex_t{-a, 0}, basis[j], w);
            // Full reorthogonalization against the basis and the locked set;
            // a second pass only when cancellation ate the norm.
            double pre = norm(w);
            for (int pass = 0; pass < 2; ++pass) {
                for (const auto& p : locked) axpy(-dot(p.vec, w), p.vec, w);
                for (const auto& u : basis) axpy(-dot(u, w), u, w);
                double post = norm(w);
                if (post > 0.7071 * pre) break;
                pre = post;
            }
            double b = norm(w);

            const int m = j + 1;
            bool exhausted = (b < breakdown) || (j == max_basis - 1) ||
                             (m + static_cast<int>(locked.size()) >= static_cast<int>(dim));

            // Solve the m x m tridiagonal Rayleigh problem.
            Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
            Eigen::VectorXd sub =
                m > 1 ? Eigen::Map<const Eigen::VectorXd>(beta.data(), m - 1) : Eigen::VectorXd();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
            tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
            const auto& S = tri.eigenvectors();

            // Residual estimate |b * s_last| for the bottom Ritz pair.
            bool bottom_ready = b * std::abs(S(m - 1, 0)) <= opt.tol;
            int want = k - static_cast<int>(locked.size());

            // A single Krylov run sees one copy of each degenerate eigenvalue,
            // so only the bottom pair of the deflated complement may be locked
            // per pass: inductively the locked set is then the set of smallest
            // eigenvalues counting multiplicity. Locking more is safe only
            // when the complement is fully spanned (every pair exact).
            bool complete = static_cast<int>(locked.size()) + m >= static_cast<int>(dim);

            if (exhausted || bottom_ready) {
                int take = complete ? std::min(m, want) : 1;
                for (int i = 0; i < take; ++i) {
                    StateVector y = StateVector::zero(n);
                    for (int q = 0; q < m; ++q) axpy(complex_t{S(q, i), 0}, basis[q], y);
                    for (const auto& p : locked) axpy(-dot(p.vec, y), p.vec, y);
                    double ny = norm(y);
                    if (ny < 1e-8) continue;
                    scale(y, complex_t{1.0 / ny, 0});
                    StateVector hy = apply_sum(h, y);
                    double rho = dot(y, hy).real();
                    axpy(complex_t{-rho, 0}, y, hy);
                    double res = norm(hy);
                    if (res <= opt.tol) {
                        locked.push_back({rho, std::move(y), res});
                    } else {
                        best_unconverged_residual = res;
                        if (!have_carry) {
                            carry = std::move(y);
                            have_carry = true;
                        }
                    }
                }
                break;
            }

            scale(w, complex_t{1.0 / b, 0});
            beta.push_back(b);
            basis.push_back(std::move(w));
        }
    }

    if (static_cast<int>(locked.size()) < k) {
        std::ostringstream os;
        os << "Lanczos did not converge " << k << " eigenpairs (" << locked.size()
           << " locked, best outstanding residual " << best_unconverged_residual << ")";
        throw SolverError(os.str());
    }

    std::sort(locked.begin(), locked.end(),
              [](const RitzPair& a, const RitzPair& b) { return a.value < b.value; });
    Spectrum s;
    s.n_sites = n;
    s.method = "krylov";
    for (int i = 0; i < k; ++i) {
        s.eigenvalues.push_back(locked[i].value);
        s.residual_norms.push_back(locked[i].residual);
        if (opt.want_vectors) s.eigenvectors.push_back(std::move(locked[i].vec));
    }
    return s;
}

namespace {

bool real_in_z_basis(const OperatorSum& h) {
    for (const auto& t : h.terms)
        if (std::popcount(t.x_mask & t.z_mask) & 1) return false;
    return true;
}

template <typename Mat>
void fill_dense(const OperatorSum& h, Mat& m) {
    const size_t dim = m.rows();
    for (const auto& t : h.terms) {
        const complex_t phase = t.string_phase() * t.coeff;
        for (size_t b = 0; b < dim; ++b) {
            double sign = (std::popcount(b & t.z_mask) & 1) ? -1.0 : 1.0;
            complex_t amp = phase * sign;
            size_t target = b ^ t.x_mask;
            if (t.shifted) {
                m(b, b) += t.coeff;
                if constexpr (std::is_same_v<typename Mat::Scalar, double>)
                    m(target, b) -= amp.real();
                else
                    m(target, b) -= amp;
            } else {
                if constexpr (std::is_same_v<typename Mat::Scalar, double>)
                    m(target, b) += amp.real();
                else
                    m(target, b) += amp;
            }
        }
    }
}

}  // namespace

Spectrum dense_spectrum(const OperatorSum& h, int keep_vectors) {
    if (h.n_sites < 1) throw SolverError("operator has no sites");
    if (h.n_sites > 12)
        throw SolverError("dense oracle capped at 12 spins, got " + std::to_string(h.n_sites));
    const size_t dim = size_t{1} << h.n_sites;
    keep_vectors = std::min<int>(keep_vectors, static_cast<int>(dim));

    Spectrum s;
    s.n_sites = h.n_sites;
    s.method = "dense";

    auto decision = keep_vectors > 0 ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
    if (real_in_z_basis(h)) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
        fill_dense(h, m);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, decision);
        if (es.info() != Eigen::Success) throw SolverError("dense eigensolver failed");
        s.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + dim);
        for (int i = 0; i < keep_vectors; ++i) {
            StateVector v = StateVector::zero(h.n_sites);
            for (size_t b = 0; b < dim; ++b) v.amp[b] = complex_t{es.eigenvectors()(b, i), 0};
            s.eigenvectors.push_back(std::move(v));
        }
    } else {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
        fill_dense(h, m);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, decision);
        if (es.info() != Eigen::Success) throw SolverError("dense eigensolver failed");
        s.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + dim);
        for (int i = 0; i < keep_vectors; ++i) {
            StateVector v = StateVector::zero(h.n_sites);
            for (size_t b = 0; b < dim; ++b) v.amp[b] = es.eigenvectors()(b, i);
            s.eigenvectors.push_back(std::move(v));
        }
    }
    // Residuals for the stored vectors, computed matrix-free.
    for (size_t i = 0; i < s.eigenvectors.size(); ++i) {
        StateVector hv = apply_sum(h, s.eigenvectors[i]);
        axpy(complex_t{-s.eigenvalues[i], 0}, s.eigenvectors[i], hv);
        s.residual_norms.push_back(norm(hv));
    }
    return s;
}

Spectrum solve_lowest(const OperatorSum& h, const SolverOptions& opt) {
    bool dense = opt.method == SolverOptions::Method::dense ||
                 (opt.method == SolverOptions::Method::automatic && h.n_sites <= opt.dense_cutoff);
    if (dense && h.n_sites <= 12) {
        const size_t dim = size_t{1} << h.n_sites;
        if (opt.k < 1 || static_cast<size_t>(opt.k) > dim)
            throw SolverError("requested k=" + std::to_string(opt.k) + " eigenpairs of a " +
                              std::to_string(dim) + "-dimensional space");
        return dense_spectrum(h, opt.want_vectors ? opt.k : 0);
    }
    return lowest_eigenpairs(h, opt);
}

DegeneracyClusters cluster_degeneracies(const Spectrum& s, double cluster_tol) {
    for (size_t i = 1; i < s.eigenvalues.size(); ++i)
        if (s.eigenvalues[i] < s.eigenvalues[i - 1])
            throw std::invalid_argument("spectrum must be sorted ascending");
    DegeneracyClusters out;
    out.cluster_tol = cluster_tol;
    for (size_t i = 0; i < s.eigenvalues.size(); ++i) {
        if (out.clusters.empty() ||
            s.eigenvalues[i] - s.eigenvalues[out.clusters.back().members.back()] > cluster_tol) {
            out.clusters.push_back({});
        }
        out.clusters.back().members.push_back(static_cast<int>(i));
    }
    for (auto& c : out.clusters) {
        double sum = 0;
        for (int idx : c.members) sum += s.eigenvalues[idx];
        c.mean_energy = sum / static_cast<double>(c.members.size());
    }
    return out;
}

}  // namespace spinsplit
