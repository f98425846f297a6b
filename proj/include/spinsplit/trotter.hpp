#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spinsplit/eigensolve.hpp"
#include "spinsplit/pauli.hpp"

namespace spinsplit {

// Discretization of the inverse-temperature axis: `steps` slices of width
// dtau = beta / steps, reproducing the product-formula limit as steps grows.
struct TrotterParams {
    double beta = 1.0;
    int steps = 64;
    enum class Mode { exact, stochastic };
    Mode mode = Mode::exact;
    int probes = 64;                    // stochastic mode only
    std::uint64_t seed = 0x7e57ab1eu;

    double dtau() const { return beta / steps; }
};

struct TrotterResult {
    double value = 0;
    double stderror = 0;  // zero in exact mode
};

// Trace of [(I - eps*dtau*P) * E0]^steps with E0 the exact product of the
// commuting classical term exponentials (no intra-slice error at eps = 0).
// Exact mode sums all basis columns (capped at 14 spins); stochastic mode
// uses Rademacher probe vectors (capped at 20 spins) and reports the
// standard error of the probe mean.
TrotterResult trotter_trace(const OperatorSum& classical, const OperatorSum& perturbation,
                            double eps, const TrotterParams& params);

// Sum over exp(-beta * eigenvalue); requires the full spectrum.
double exact_trace(const Spectrum& spectrum, double beta);

struct TrotterRow {
    int steps = 0;
    double value = 0;
    double exact = 0;
    double abs_error = 0;
    double error_times_steps = 0;
    double stderror = 0;
};

// One row per entry of the ascending steps list, with the error against the
// dense-spectrum trace; error * steps levelling off exhibits the first-order
// convergence of the product formula.
std::vector<TrotterRow> trotter_convergence(const OperatorSum& classical,
                                            const OperatorSum& perturbation, double eps,
                                            double beta, const std::vector<int>& steps_list,
                                            TrotterParams::Mode mode = TrotterParams::Mode::exact,
                                            int probes = 64, std::uint64_t seed = 0x7e57ab1eu);

std::string trotter_csv_header();
std::string to_csv_row(int n_spins, double eps, double beta, const TrotterRow& row,
                       TrotterParams::Mode mode, int probes);

}  // namespace spinsplit
