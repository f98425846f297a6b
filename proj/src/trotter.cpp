#include "spinsplit/trotter.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "spinsplit/errors.hpp"

namespace spinsplit {

namespace {

void check_inputs(const OperatorSum& classical, const OperatorSum& perturbation,
                  const TrotterParams& params) {
    if (classical.n_sites < 1) throw std::invalid_argument("classical part has no sites");
    if (!perturbation.empty() && perturbation.n_sites != classical.n_sites)
        throw std::invalid_argument("operator dimension mismatch");
    if (params.beta < 0) throw std::invalid_argument("beta must be nonnegative");
    if (params.steps < 1) throw std::invalid_argument("steps must be >= 1");
    for (size_t i = 0; i < classical.terms.size(); ++i)
        for (size_t j = i + 1; j < classical.terms.size(); ++j)
            if (!commutes(classical.terms[i], classical.terms[j]))
                throw VerificationError(
                    "trotter_trace requires mutually commuting classical terms");
    const int cap = params.mode == TrotterParams::Mode::exact ? 14 : 20;
    if (classical.n_sites > cap)
        throw SolverError("trotter trace capped at " + std::to_string(cap) + " spins for " +
                          (params.mode == TrotterParams::Mode::exact ? std::string("exact")
                                                                     : std::string("stochastic")) +
                          " mode");
    if (params.mode == TrotterParams::Mode::stochastic && params.probes < 1)
        throw std::invalid_argument("stochastic mode needs probes >= 1");
}

// One slice: psi <- (I - eps*dtau*P) * E0 * psi.
StateVector apply_slice(const OperatorSum& classical, const OperatorSum& perturbation, double eps,
                        double dtau, StateVector psi) {
    for (const auto& t : classical.terms) psi = apply_term_exponential(t, dtau, psi);
    if (eps != 0.0 && !perturbation.empty()) {
        StateVector kick = apply_sum(perturbation, psi);
        axpy(complex_t{-eps * dtau, 0}, kick, psi);
    }
    return psi;
}

}  // namespace

TrotterResult trotter_trace(const OperatorSum& classical, const OperatorSum& perturbation,
                            double eps, const TrotterParams& params) {
    check_inputs(classical, perturbation, params);
    const int n = classical.n_sites;
    const size_t dim = size_t{1} << n;
    const double dtau = params.dtau();

    if (params.mode == TrotterParams::Mode::exact) {
        double trace = 0;
        for (size_t b = 0; b < dim; ++b) {
            StateVector col = StateVector::basis_state(n, b);
            for (int s = 0; s < params.steps; ++s)
                col = apply_slice(classical, perturbation, eps, dtau, std::move(col));
            trace += col.amp[b].real();
        }
        return {trace, 0.0};
    }

    // Hutchinson estimator with Rademacher probes.
    std::mt19937_64 rng(params.seed);
    std::uniform_int_distribution<int> coin(0, 1);
    double sum = 0, sumsq = 0;
    for (int p = 0; p < params.probes; ++p) {
        StateVector z = StateVector::zero(n);
        for (auto& a : z.amp) a = complex_t{coin(rng) ? 1.0 : -1.0, 0};
        StateVector w = z;
        for (int s = 0; s < params.steps; ++s)
            w = apply_slice(classical, perturbation, eps, dtau, std::move(w));
        double est = dot(z, w).real();
        sum += est;
        sumsq += est * est;
    }
    double mean = sum / params.probes;
    double var = params.probes > 1 ? (sumsq - params.probes * mean * mean) / (params.probes - 1)
                                   : 0.0;
    double stderror = params.probes > 1 ? std::sqrt(std::max(var, 0.0) / params.probes) : 0.0;
    return {mean, stderror};
}

double exact_trace(const Spectrum& spectrum, double beta) {
    if (!spectrum.full())
        throw DataError("exact_trace needs the full spectrum (partial spectrum supplied)");
    double t = 0;
    for (double e : spectrum.eigenvalues) t += std::exp(-beta * e);
    return t;
}

std::vector<TrotterRow> trotter_convergence(const OperatorSum& classical,
                                            const OperatorSum& perturbation, double eps,
                                            double beta, const std::vector<int>& steps_list,
                                            TrotterParams::Mode mode, int probes,
                                            std::uint64_t seed) {
    if (steps_list.empty()) throw std::invalid_argument("steps list is empty");
    for (size_t i = 1; i < steps_list.size(); ++i)
        if (steps_list[i] <= steps_list[i - 1])
            throw std::invalid_argument("steps list must be strictly ascending");

    OperatorSum full = classical;
    if (eps != 0.0)
        for (const auto& t : perturbation.terms) full.add(t.scaled(eps));
    if (full.empty()) full.n_sites = classical.n_sites;
    double reference = exact_trace(dense_spectrum(full, 0), beta);

    std::vector<TrotterRow> rows;
    for (int steps : steps_list) {
        TrotterParams params;
        params.beta = beta;
        params.steps = steps;
        params.mode = mode;
        params.probes = probes;
        params.seed = seed;
        TrotterResult res = trotter_trace(classical, perturbation, eps, params);
        TrotterRow row;
        row.steps = steps;
        row.value = res.value;
        row.exact = reference;
        row.abs_error = std::abs(res.value - reference);
        row.error_times_steps = row.abs_error * steps;
        row.stderror = res.stderror;
        rows.push_back(row);
    }
    return rows;
}

std::string trotter_csv_header() {
    return "n_spins,epsilon,beta,steps,trotter_value,exact_value,abs_error,error_times_steps,"
           "mode,probes,stderr";
}

std::string to_csv_row(int n_spins, double eps, double beta, const TrotterRow& row,
                       TrotterParams::Mode mode, int probes) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%s,%d,%.17g",
                  n_spins, eps, beta, row.steps, row.value, row.exact, row.abs_error,
                  row.error_times_steps,
                  mode == TrotterParams::Mode::exact ? "exact" : "stochastic",
                  mode == TrotterParams::Mode::exact ? 0 : probes, row.stderror);
    return buf;
}

}  // namespace spinsplit
