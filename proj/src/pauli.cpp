#include "spinsplit/pauli.hpp"

#include <atomic>
#include <bit>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace spinsplit {

namespace {

int g_threads = 1;

void check_sites(int n_sites) {
    if (n_sites < 1 || n_sites > kHardMaxSites)
        throw std::invalid_argument("site count out of range [1, " +
                                    std::to_string(kHardMaxSites) + "]");
}

void check_same_dim(int a, int b) {
    if (a != b) throw std::invalid_argument("operator/state dimension mismatch");
}

// Runs fn(lo, hi) over a partition of [0, n); partition boundaries never
// change the per-index arithmetic, only which worker executes it.
template <typename Fn>
void parallel_ranges(size_t n, const Fn& fn) {
    int workers = g_threads;
    if (workers <= 1 || n < 4096) {
        fn(size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    size_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        size_t lo = w * chunk;
        size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

void set_thread_count(int n) { g_threads = n < 1 ? 1 : n; }
int thread_count() { return g_threads; }

PauliTerm PauliTerm::identity(int n_sites, double coeff) {
    check_sites(n_sites);
    PauliTerm t;
    t.n_sites = n_sites;
    t.coeff = coeff;
    return t;
}

PauliTerm PauliTerm::axis_string(int n_sites, char axis, const std::vector<int>& sites,
                                 double coeff) {
    check_sites(n_sites);
    PauliTerm t;
    t.n_sites = n_sites;
    t.coeff = coeff;
    for (int s : sites) {
        if (s < 0 || s >= n_sites) throw std::invalid_argument("pauli site index out of range");
        mask_t bit = mask_t{1} << s;
        switch (axis) {
            case 'X': t.x_mask |= bit; break;
            case 'Y': t.x_mask |= bit; t.z_mask |= bit; break;
            case 'Z': t.z_mask |= bit; break;
            default: throw std::invalid_argument("pauli axis must be X, Y or Z");
        }
    }
    return t;
}

PauliTerm PauliTerm::as_shifted() const {
    PauliTerm t = *this;
    t.shifted = true;
    return t;
}

PauliTerm PauliTerm::scaled(double factor) const {
    PauliTerm t = *this;
    t.coeff *= factor;
    return t;
}

int PauliTerm::support_size() const { return std::popcount(support_mask()); }

std::vector<int> PauliTerm::support() const {
    std::vector<int> sites;
    mask_t m = support_mask();
    while (m) {
        int s = std::countr_zero(m);
        sites.push_back(s);
        m &= m - 1;
    }
    return sites;
}

complex_t PauliTerm::string_phase() const {
    static const complex_t table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return table[std::popcount(x_mask & z_mask) & 3];
}

bool commutes(const PauliTerm& a, const PauliTerm& b) {
    check_same_dim(a.n_sites, b.n_sites);
    int overlap = std::popcount(a.x_mask & b.z_mask) + std::popcount(a.z_mask & b.x_mask);
    return (overlap & 1) == 0;
}

void OperatorSum::add(const PauliTerm& t) {
    if (n_sites == 0) n_sites = t.n_sites;
    check_same_dim(t.n_sites, n_sites);
    terms.push_back(t);
}

double OperatorSum::coeff_l1() const {
    double s = 0;
    for (const auto& t : terms) s += std::abs(t.coeff);
    return s;
}

bool OperatorSum::all_diagonal() const {
    for (const auto& t : terms)
        if (!t.is_diagonal()) return false;
    return true;
}

int OperatorSum::max_support_size() const {
    int m = 0;
    for (const auto& t : terms) m = std::max(m, t.support_size());
    return m;
}

double OperatorSum::diagonal_energy(mask_t bits) const {
    double e = 0;
    for (const auto& t : terms) {
        if (!t.is_diagonal())
            throw std::invalid_argument("diagonal_energy on a non-diagonal operator");
        double g = (std::popcount(bits & t.z_mask) & 1) ? -1.0 : 1.0;
        e += t.shifted ? t.coeff * (1.0 - g) : t.coeff * g;
    }
    return e;
}

StateVector StateVector::zero(int n_sites) {
    check_sites(n_sites);
    StateVector v;
    v.n_sites = n_sites;
    v.amp.assign(size_t{1} << n_sites, complex_t{0, 0});
    return v;
}

StateVector StateVector::basis_state(int n_sites, mask_t bits) {
    StateVector v = zero(n_sites);
    if (bits >= v.dim()) throw std::invalid_argument("basis bitstring out of range");
    v.amp[bits] = complex_t{1, 0};
    return v;
}

double norm(const StateVector& v) {
    double s = 0;
    for (const auto& a : v.amp) s += std::norm(a);
    return std::sqrt(s);
}

complex_t dot(const StateVector& a, const StateVector& b) {
    check_same_dim(a.n_sites, b.n_sites);
    complex_t s{0, 0};
    for (size_t i = 0; i < a.amp.size(); ++i) s += std::conj(a.amp[i]) * b.amp[i];
    return s;
}

void axpy(complex_t alpha, const StateVector& x, StateVector& y) {
    check_same_dim(x.n_sites, y.n_sites);
    for (size_t i = 0; i < x.amp.size(); ++i) y.amp[i] += alpha * x.amp[i];
}

void scale(StateVector& v, complex_t alpha) {
    for (auto& a : v.amp) a *= alpha;
}

void normalize(StateVector& v) {
    double n = norm(v);
    if (n == 0) throw std::invalid_argument("cannot normalize the zero vector");
    scale(v, complex_t{1.0 / n, 0});
}

namespace {

// out[j] += c * phase(j^x) * in[j^x] (+ identity part for shifted terms):
// gather form keeps every output index owned by exactly one worker.
void kernel_add(const PauliTerm& t, double weight, const StateVector& in, StateVector& out) {
    const mask_t x = t.x_mask, z = t.z_mask;
    const complex_t cphase = t.string_phase() * (t.coeff * weight);
    const double cident = t.shifted ? t.coeff * weight : 0.0;
    const double gsign = t.shifted ? -1.0 : 1.0;  // shifted: coeff*(I - G)
    const auto& a = in.amp;
    auto& o = out.amp;
    parallel_ranges(o.size(), [&](size_t lo, size_t hi) {
        for (size_t j = lo; j < hi; ++j) {
            size_t b = j ^ x;
            double sign = (std::popcount(b & z) & 1) ? -1.0 : 1.0;
            complex_t val = (gsign * sign) * cphase * a[b];
            if (t.shifted) val += cident * a[j];
            o[j] += val;
        }
    });
}

}  // namespace

void apply_term_add(const PauliTerm& t, const StateVector& in, StateVector& out) {
    check_same_dim(t.n_sites, in.n_sites);
    check_same_dim(in.n_sites, out.n_sites);
    kernel_add(t, 1.0, in, out);
}

StateVector apply_term(const PauliTerm& t, const StateVector& psi) {
    StateVector out = StateVector::zero(psi.n_sites);
    apply_term_add(t, psi, out);
    return out;
}

StateVector apply_sum(const OperatorSum& h, const StateVector& psi) {
    if (!h.empty()) check_same_dim(h.n_sites, psi.n_sites);
    StateVector out = StateVector::zero(psi.n_sites);
    for (const auto& t : h.terms) kernel_add(t, 1.0, psi, out);
    return out;
}

complex_t expectation(const OperatorSum& h, const StateVector& psi) {
    return dot(psi, apply_sum(h, psi));
}

complex_t matrix_element(const StateVector& bra, const OperatorSum& h, const StateVector& ket) {
    return dot(bra, apply_sum(h, ket));
}

StateVector apply_term_exponential(const PauliTerm& t, double tau, const StateVector& psi) {
    check_same_dim(t.n_sites, psi.n_sites);
    const double tc = tau * t.coeff;
    const double ch = std::cosh(tc), sh = std::sinh(tc);
    // raw:      cosh(tc) I - sinh(tc) G
    // shifted:  e^{-tc} (cosh(tc) I + sinh(tc) G)
    const double scale_all = t.shifted ? std::exp(-tc) : 1.0;
    const double wi = scale_all * ch;
    const double wg = scale_all * (t.shifted ? sh : -sh);
    const mask_t x = t.x_mask, z = t.z_mask;
    const complex_t gphase = t.string_phase() * wg;

    StateVector out = StateVector::zero(psi.n_sites);
    const auto& a = psi.amp;
    auto& o = out.amp;
    parallel_ranges(o.size(), [&](size_t lo, size_t hi) {
        for (size_t j = lo; j < hi; ++j) {
            size_t b = j ^ x;
            double sign = (std::popcount(b & z) & 1) ? -1.0 : 1.0;
            o[j] = wi * a[j] + sign * gphase * a[b];
        }
    });
    return out;
}

PauliTerm translate_operator(const PauliTerm& t, const TorusLattice& lat,
                             const std::vector<int>& shift) {
    check_same_dim(t.n_sites, lat.site_count());
    PauliTerm out = t;
    out.x_mask = 0;
    out.z_mask = 0;
    for (int s = 0; s < t.n_sites; ++s) {
        mask_t bit = mask_t{1} << s;
        if (!(t.x_mask & bit) && !(t.z_mask & bit)) continue;
        mask_t moved = mask_t{1} << lat.translate_site(s, shift);
        if (t.x_mask & bit) out.x_mask |= moved;
        if (t.z_mask & bit) out.z_mask |= moved;
    }
    return out;
}

std::string to_string(const PauliTerm& t) {
    std::ostringstream os;
    os << t.coeff << " * ";
    std::ostringstream body;
    if (t.is_identity_string()) {
        body << "I";
    } else {
        bool first = true;
        for (int s : t.support()) {
            if (!first) body << ' ';
            first = false;
            mask_t bit = mask_t{1} << s;
            char axis = (t.x_mask & bit) ? ((t.z_mask & bit) ? 'Y' : 'X') : 'Z';
            body << axis << s;
        }
    }
    if (t.shifted)
        os << "(I - " << body.str() << ")";
    else
        os << body.str();
    return os.str();
}

PauliTerm parse_pauli_term(std::string_view text, int n_sites) {
    check_sites(n_sites);
    std::string s(text);
    auto star = s.find('*');
    if (star == std::string::npos)
        throw std::invalid_argument("pauli term must look like 'coeff * P...': " + s);

    double coeff;
    try {
        size_t used = 0;
        coeff = std::stod(s.substr(0, star), &used);
        while (used < star && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
        if (used != star) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw std::invalid_argument("bad coefficient in pauli term: " + s);
    }

    std::string body = s.substr(star + 1);
    bool shifted = false;
    auto open = body.find('(');
    if (open != std::string::npos) {
        auto close = body.find(')');
        auto dash = body.find('-');
        auto eye = body.find('I');
        if (close == std::string::npos || dash == std::string::npos || eye == std::string::npos ||
            !(open < eye && eye < dash && dash < close))
            throw std::invalid_argument("bad shifted pauli term, expected '(I - P...)': " + s);
        shifted = true;
        body = body.substr(dash + 1, close - dash - 1);
    }

    PauliTerm t;
    t.n_sites = n_sites;
    t.coeff = coeff;
    t.shifted = shifted;
    std::istringstream is(body);
    std::string tok;
    bool any = false;
    while (is >> tok) {
        any = true;
        if (tok == "I") continue;
        char axis = tok[0];
        if ((axis != 'X' && axis != 'Y' && axis != 'Z') || tok.size() < 2)
            throw std::invalid_argument("bad pauli factor '" + tok + "' in: " + s);
        int site;
        try {
            site = std::stoi(tok.substr(1));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad site index in '" + tok + "'");
        }
        if (site < 0 || site >= n_sites)
            throw std::invalid_argument("site index out of range in '" + tok + "'");
        mask_t bit = mask_t{1} << site;
        if ((t.x_mask | t.z_mask) & bit)
            throw std::invalid_argument("duplicate site in pauli term: " + s);
        if (axis == 'X' || axis == 'Y') t.x_mask |= bit;
        if (axis == 'Z' || axis == 'Y') t.z_mask |= bit;
    }
    if (!any) throw std::invalid_argument("empty pauli term body: " + s);
    return t;
}

}  // namespace spinsplit
