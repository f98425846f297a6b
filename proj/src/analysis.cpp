#include "spinsplit/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <tuple>

#include "spinsplit/errors.hpp"

namespace spinsplit {

namespace {

std::string fmt_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void check_orthonormal(const std::vector<StateVector>& basis) {
    for (size_t i = 0; i < basis.size(); ++i) {
        for (size_t j = i; j < basis.size(); ++j) {
            complex_t g = dot(basis[i], basis[j]);
            double expect = i == j ? 1.0 : 0.0;
            if (std::abs(g - complex_t{expect, 0}) > 1e-8)
                throw std::invalid_argument("ground basis is not orthonormal (Gram deviation > 1e-8)");
        }
    }
}

Eigen::MatrixXcd projected_matrix(const OperatorSum& op, const std::vector<StateVector>& basis) {
    const int m = static_cast<int>(basis.size());
    Eigen::MatrixXcd mat(m, m);
    for (int j = 0; j < m; ++j) {
        StateVector pv = apply_sum(op, basis[j]);
        for (int i = 0; i < m; ++i) mat(i, j) = dot(basis[i], pv);
    }
    // Hermitize away the numerical skew before diagonalizing.
    return 0.5 * (mat + mat.adjoint());
}

}  // namespace

std::string splitting_csv_header() {
    return "model,nu,extents,n_spins,epsilon,m,splitting_spectral,splitting_diagonal,"
           "splitting_first_order,gap_to_next,method,floor_flag";
}

std::string to_csv_row(const SplittingRecord& r) {
    std::ostringstream os;
    os << r.model << ',' << r.nu << ',' << r.extents << ',' << r.n_spins << ','
       << fmt_double(r.epsilon) << ',' << r.m << ',' << fmt_double(r.splitting_spectral) << ','
       << fmt_double(r.splitting_diagonal) << ',' << fmt_double(r.splitting_first_order) << ','
       << fmt_double(r.gap_to_next) << ',' << r.method << ',' << (r.floor_flag ? 1 : 0);
    return os.str();
}

SplittingRecord parse_csv_row(const std::string& line) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() != 12) throw DataError("bad splitting CSV row: " + line);
    SplittingRecord r;
    r.model = f[0];
    r.nu = std::stoi(f[1]);
    r.extents = f[2];
    r.n_spins = std::stoi(f[3]);
    r.epsilon = std::stod(f[4]);
    r.m = std::stoi(f[5]);
    r.splitting_spectral = std::stod(f[6]);
    r.splitting_diagonal = std::stod(f[7]);
    r.splitting_first_order = std::stod(f[8]);
    r.gap_to_next = std::stod(f[9]);
    r.method = f[10];
    r.floor_flag = f[11] == "1";
    return r;
}

SplittingTable read_splitting_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open splitting table: " + path);
    SplittingTable t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line == splitting_csv_header()) continue;
        }
        t.rows.push_back(parse_csv_row(line));
    }
    return t;
}

double diagonal_splitting(const HamiltonianSpec& h_eps,
                          const std::vector<StateVector>& ground_basis) {
    if (ground_basis.empty()) throw std::invalid_argument("empty ground basis");
    check_orthonormal(ground_basis);
    OperatorSum full = h_eps.full_operator();
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : ground_basis) best = std::max(best, expectation(full, v).real());
    return best;
}

double first_order_splitting(const OperatorSum& perturbation,
                             const std::vector<StateVector>& ground_basis, double eps) {
    if (ground_basis.empty()) throw std::invalid_argument("empty ground basis");
    check_orthonormal(ground_basis);
    if (perturbation.empty()) return 0.0;
    Eigen::MatrixXcd mat = projected_matrix(perturbation, ground_basis);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mat, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return eps * (ev(ev.size() - 1) - ev(0));
}

std::vector<StateVector> ground_basis(const HamiltonianSpec& h, const SolverOptions& opt) {
    if (h.classical_terms.all_diagonal()) {
        auto configs = ground_configurations(h, opt.cluster_tol);
        if (configs.empty()) throw DataError("no ground configurations found");
        std::vector<StateVector> basis;
        basis.reserve(configs.size());
        for (mask_t b : configs) basis.push_back(StateVector::basis_state(h.n_sites(), b));
        return basis;
    }
    // Non-diagonal classical part: compute the zero-energy cluster numerically.
    SolverOptions o = opt;
    o.want_vectors = true;
    o.k = std::max(opt.k, 6);
    Spectrum s = solve_lowest(h.classical_terms, o);
    DegeneracyClusters clusters = cluster_degeneracies(s, opt.cluster_tol);
    std::vector<StateVector> basis;
    for (int idx : clusters.clusters.front().members) {
        if (idx >= static_cast<int>(s.eigenvectors.size())) break;
        basis.push_back(s.eigenvectors[idx]);
    }
    // Re-orthonormalize (locked Lanczos vectors are orthonormal to solver
    // tolerance; tighten to working precision).
    for (size_t i = 0; i < basis.size(); ++i) {
        for (size_t j = 0; j < i; ++j) axpy(-dot(basis[j], basis[i]), basis[j], basis[i]);
        normalize(basis[i]);
    }
    return basis;
}

SplittingRecord spectral_splitting(const HamiltonianSpec& h_eps, int m, const SolverOptions& opt,
                                   const std::vector<StateVector>* basis) {
    if (m < 1) throw std::invalid_argument("cluster size m must be >= 1");
    SplittingRecord r;
    r.model = h_eps.model;
    r.nu = h_eps.lattice.nu();
    r.extents = h_eps.lattice.extents_string();
    r.n_spins = h_eps.n_sites();
    r.epsilon = h_eps.epsilon;
    r.m = m;

    SolverOptions o = opt;
    o.k = m + 1;
    o.want_vectors = false;
    Spectrum s = solve_lowest(h_eps.full_operator(), o);
    r.method = s.method;
    r.splitting_spectral = s.eigenvalues[m - 1] - s.eigenvalues[0];
    r.gap_to_next = s.eigenvalues[m] - s.eigenvalues[m - 1];
    r.dissolved = r.gap_to_next <= opt.cluster_tol;
    r.floor_flag = r.splitting_spectral < 10.0 * opt.cluster_tol;

    std::vector<StateVector> local;
    if (basis == nullptr) {
        local = ground_basis(h_eps.at_epsilon(0.0), opt);
        basis = &local;
    }
    r.splitting_diagonal = diagonal_splitting(h_eps, *basis);
    r.splitting_first_order =
        first_order_splitting(h_eps.perturbation_sum(), *basis, h_eps.epsilon);

    // Eigenvalue perturbation bound: the spectral spread of the cluster
    // cannot exceed twice the perturbation norm bound.
    double weyl = 2.0 * std::abs(h_eps.epsilon) * h_eps.perturbation.coeff_l1();
    if (r.splitting_spectral > weyl + 1e-9)
        throw SolverError("splitting exceeds the perturbation norm bound; solver output suspect");
    return r;
}

HamiltonianSpec build_plan_model(const SweepPlan& plan, const std::vector<int>& size, double eps) {
    HamiltonianSpec h;
    if (plan.model == "toric") {
        if (size.size() != 1) throw ConfigError("toric sweep sizes must be single integers L");
        h = build_toric_code(size[0]);
    } else if (plan.model == "ising") {
        TorusLattice lat = TorusLattice::build(static_cast<int>(size.size()), size);
        h = build_ising(lat);
    } else {
        throw ConfigError("sweep supports models 'ising' and 'toric', got '" + plan.model + "'");
    }
    if (!plan.seed_term.empty()) {
        PauliTerm seed = parse_pauli_term(plan.seed_term, h.n_sites());
        h.perturbation = build_seed_perturbation(h.lattice, seed);
    } else {
        h.perturbation = build_field_perturbation(h.lattice, plan.perturbation_axis,
                                                  plan.seed_support);
    }
    h.epsilon = eps;
    return h;
}

SplittingTable sweep_splitting(const SweepPlan& plan, const SolverOptions& opt,
                               const std::set<SweepKey>& done, const RecordSink& sink) {
    if (plan.sizes.empty()) throw ConfigError("sweep has no sizes");
    if (plan.epsilons.empty()) throw ConfigError("sweep has no epsilon grid");
    SplittingTable table;
    for (const auto& size : plan.sizes) {
        HamiltonianSpec h0 = build_plan_model(plan, size, 0.0);
        std::vector<StateVector> basis;
        bool basis_ready = false;
        for (double eps : plan.epsilons) {
            SweepKey key{h0.lattice.extents_string(), eps};
            if (done.count(key)) continue;
            SplittingRecord r;
            try {
                if (!basis_ready) {
                    basis = ground_basis(h0, opt);
                    basis_ready = true;
                }
                r = spectral_splitting(h0.at_epsilon(eps), plan.m, opt, &basis);
            } catch (const SolverError& e) {
                r.model = h0.model;
                r.nu = h0.lattice.nu();
                r.extents = h0.lattice.extents_string();
                r.n_spins = h0.n_sites();
                r.epsilon = eps;
                r.m = plan.m;
                r.method = "failed";
                r.error = e.what();
            }
            table.rows.push_back(r);
            if (sink) sink(r);
        }
    }
    return table;
}

std::string to_string(ScalingModel m) {
    switch (m) {
        case ScalingModel::exp_volume: return "exp_volume";
        case ScalingModel::exp_sqrt_volume: return "exp_sqrt_volume";
        case ScalingModel::inverse_volume: return "inverse_volume";
    }
    return "?";
}

namespace {

// Ordinary least squares y = a + b x; returns (a, b, rmse).
std::tuple<double, double, double> line_fit(const std::vector<double>& x,
                                            const std::vector<double>& y) {
    const size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double denom = n * sxx - sx * sx;
    double b = (n * sxy - sx * sy) / denom;
    double a = (sy - b * sx) / n;
    double sse = 0;
    for (size_t i = 0; i < n; ++i) {
        double r = y[i] - (a + b * x[i]);
        sse += r * r;
    }
    return {a, b, std::sqrt(sse / n)};
}

}  // namespace

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& volume_splitting) {
    std::vector<double> vol, logd;
    for (const auto& [v, d] : volume_splitting) {
        if (d > 0 && std::isfinite(d)) {
            vol.push_back(v);
            logd.push_back(std::log(d));
        }
    }
    if (vol.size() < 3)
        throw DataError("scaling fit needs at least 3 usable points, got " +
                        std::to_string(vol.size()));

    ScalingFit fit;
    fit.points_used = static_cast<int>(vol.size());

    {  // log D = a - c V
        auto [a, b, rmse] = line_fit(vol, logd);
        fit.fits[ScalingModel::exp_volume] = {-b, a, rmse, -b > 0 && std::isfinite(b)};
    }
    {  // log D = a - c sqrt(V)
        std::vector<double> sq(vol.size());
        for (size_t i = 0; i < vol.size(); ++i) sq[i] = std::sqrt(vol[i]);
        auto [a, b, rmse] = line_fit(sq, logd);
        fit.fits[ScalingModel::exp_sqrt_volume] = {-b, a, rmse, -b > 0 && std::isfinite(b)};
    }
    {  // log D + log V = log c  (slope pinned to -1)
        double mean = 0;
        for (size_t i = 0; i < vol.size(); ++i) mean += logd[i] + std::log(vol[i]);
        mean /= static_cast<double>(vol.size());
        double sse = 0;
        for (size_t i = 0; i < vol.size(); ++i) {
            double r = logd[i] + std::log(vol[i]) - mean;
            sse += r * r;
        }
        double c = std::exp(mean);
        fit.fits[ScalingModel::inverse_volume] = {c, mean, std::sqrt(sse / vol.size()),
                                                  std::isfinite(c) && c > 0};
    }
    {  // diagnostic free-exponent power law, never selected
        std::vector<double> lv(vol.size());
        for (size_t i = 0; i < vol.size(); ++i) lv[i] = std::log(vol[i]);
        auto [a, b, rmse] = line_fit(lv, logd);
        (void)a;
        fit.free_exponent = -b;
        fit.free_exponent_rmse = rmse;
    }

    bool found = false;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [model, mf] : fit.fits) {
        if (mf.valid && mf.rmse < best) {
            best = mf.rmse;
            fit.selected = model;
            found = true;
        }
    }
    if (!found) throw DataError("no scaling model with a positive decay constant fits the data");
    return fit;
}

double ScalingFit::predict(ScalingModel m, double volume) const {
    const ModelFit& f = fits.at(m);
    switch (m) {
        case ScalingModel::exp_volume: return std::exp(f.intercept - f.c * volume);
        case ScalingModel::exp_sqrt_volume: return std::exp(f.intercept - f.c * std::sqrt(volume));
        case ScalingModel::inverse_volume: return f.c / volume;
    }
    return 0;
}

double ScalingFit::smallest_volume_below(double delta) const {
    if (delta <= 0) throw std::invalid_argument("delta must be positive");
    const ModelFit& f = fits.at(selected);
    double v = 1;
    switch (selected) {
        case ScalingModel::exp_volume: v = (f.intercept - std::log(delta)) / f.c; break;
        case ScalingModel::exp_sqrt_volume: {
            double s = (f.intercept - std::log(delta)) / f.c;
            v = s <= 0 ? 1 : s * s;
            break;
        }
        case ScalingModel::inverse_volume: v = f.c / delta; break;
    }
    return std::max(1.0, std::ceil(v));
}

ThresholdEstimate estimate_threshold(const std::vector<SplittingRecord>& records,
                                     double separation_ratio) {
    if (records.empty()) throw DataError("threshold estimate needs at least one record");
    for (size_t i = 1; i < records.size(); ++i)
        if (records[i].epsilon < records[i - 1].epsilon)
            throw std::invalid_argument("records must be sorted by ascending epsilon");

    ThresholdEstimate est;
    for (const auto& r : records) {
        if (r.method == "failed") continue;
        ThresholdEstimate::Point p;
        p.epsilon = r.epsilon;
        p.splitting = r.splitting_spectral;
        p.gap = r.gap_to_next;
        p.ratio = r.splitting_spectral > 0
                      ? r.gap_to_next / r.splitting_spectral
                      : std::numeric_limits<double>::infinity();
        p.separated = r.gap_to_next > separation_ratio * r.splitting_spectral;
        est.curve.push_back(p);
        if (p.separated) {
            est.any_satisfied = true;
            est.epsilon_hat = std::max(est.epsilon_hat, p.epsilon);
        }
    }
    if (!est.any_satisfied) {
        est.epsilon_hat = 0;
        est.diagnostic = "no epsilon in the grid keeps the cluster separated";
    }
    return est;
}

OrderReport check_order_observable(const HamiltonianSpec& h_eps, const OperatorSum& observable,
                                   const std::vector<StateVector>& eigenstates) {
    OrderReport rep;
    if (observable.empty()) throw std::invalid_argument("empty order observable");

    // Mutual commutation of the observable terms.
    for (size_t i = 0; i < observable.terms.size() && rep.mutual_commute_ok; ++i)
        for (size_t j = i + 1; j < observable.terms.size(); ++j)
            if (!commutes(observable.terms[i], observable.terms[j])) {
                rep.mutual_commute_ok = false;
                break;
            }

    // Locality: every Hamiltonian term must commute with every observable
    // term it does not overlap (symplectic criterion, checked not assumed).
    OperatorSum full = h_eps.full_operator();
    for (const auto& t : full.terms) {
        for (const auto& o : observable.terms) {
            if ((t.support_mask() & o.support_mask()) == 0 && !commutes(t, o)) {
                rep.locality_ok = false;
            }
        }
    }

    const double vol = static_cast<double>(h_eps.n_sites());
    rep.zeta = std::numeric_limits<double>::infinity();
    for (const auto& phi : eigenstates) {
        StateVector ov = apply_sum(observable, phi);
        double mean = dot(phi, ov).real();
        double second = dot(ov, ov).real();  // <phi|O^2|phi> for Hermitian O
        rep.mean_values.push_back(mean);
        rep.second_moments.push_back(second);
        rep.zeta = std::min(rep.zeta, second / (vol * vol));
    }
    if (eigenstates.empty()) rep.zeta = 0;
    return rep;
}

std::vector<StateVector> resolve_cluster_by_symmetry(const std::vector<StateVector>& cluster,
                                                     const PauliTerm& symmetry) {
    const int m = static_cast<int>(cluster.size());
    if (m <= 1) return cluster;
    Eigen::MatrixXcd mat(m, m);
    for (int j = 0; j < m; ++j) {
        StateVector gv = apply_term(symmetry, cluster[j]);
        for (int i = 0; i < m; ++i) mat(i, j) = dot(cluster[i], gv);
    }
    mat = 0.5 * (mat + mat.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mat);
    std::vector<StateVector> out;
    out.reserve(m);
    for (int c = 0; c < m; ++c) {
        StateVector v = StateVector::zero(cluster[0].n_sites);
        for (int j = 0; j < m; ++j) axpy(es.eigenvectors()(j, c), cluster[j], v);
        normalize(v);
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<StateVector> resolve_states_by_symmetry(const OperatorSum& hamiltonian,
                                                    const std::vector<StateVector>& states,
                                                    const std::vector<double>& energies,
                                                    const PauliTerm& symmetry, double window) {
    if (energies.size() < states.size())
        throw std::invalid_argument("need one energy per state");
    std::vector<StateVector> out;
    size_t i = 0;
    while (i < states.size()) {
        size_t j = i + 1;
        while (j < states.size() && energies[j] - energies[j - 1] < window) ++j;
        std::vector<StateVector> group(states.begin() + i, states.begin() + j);
        if (group.size() > 1) {
            group = resolve_cluster_by_symmetry(group, symmetry);
            // Within symmetry sectors the rotation above is arbitrary; pin it
            // by rediagonalizing the projected Hamiltonian per sector.
            std::vector<double> sym_val;
            for (const auto& v : group)
                sym_val.push_back(dot(v, apply_term(symmetry, v)).real());
            std::vector<StateVector> fixed;
            size_t a = 0;
            while (a < group.size()) {
                size_t b = a + 1;
                while (b < group.size() && std::abs(sym_val[b] - sym_val[a]) < 1e-8) ++b;
                std::vector<StateVector> sector(group.begin() + a, group.begin() + b);
                if (sector.size() > 1) {
                    Eigen::MatrixXcd hm = projected_matrix(hamiltonian, sector);
                    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hm);
                    for (Eigen::Index c = 0; c < es.eigenvectors().cols(); ++c) {
                        StateVector v = StateVector::zero(sector[0].n_sites);
                        for (size_t q = 0; q < sector.size(); ++q)
                            axpy(es.eigenvectors()(q, c), sector[q], v);
                        normalize(v);
                        fixed.push_back(std::move(v));
                    }
                } else {
                    fixed.push_back(sector.front());
                }
                a = b;
            }
            // restore ascending energy order
            std::vector<std::pair<double, size_t>> order;
            for (size_t q = 0; q < fixed.size(); ++q)
                order.emplace_back(expectation(hamiltonian, fixed[q]).real(), q);
            std::sort(order.begin(), order.end());
            for (const auto& [e, q] : order) {
                (void)e;
                out.push_back(std::move(fixed[q]));
            }
        } else {
            out.push_back(group.front());
        }
        i = j;
    }
    return out;
}

}  // namespace spinsplit
