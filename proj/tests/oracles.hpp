#ifndef CSQFC_TESTS_ORACLES_HPP
#define CSQFC_TESTS_ORACLES_HPP

// Reference computations used only by the tests. They deliberately avoid the
// library's own formulas.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = std::vector<std::vector<Complex>>;

inline Matrix identity(std::size_t n) {
    Matrix m(n, std::vector<Complex>(n));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
    return m;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
    const std::size_t n = a.size();
    Matrix c(n, std::vector<Complex>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    return c;
}

// exp(m) by scaling and squaring with a long Taylor series.
inline Matrix expm(Matrix m) {
    const std::size_t n = m.size();
    double norm = 0.0;
    for (const auto& row : m)
        for (const auto& v : row) norm = std::max(norm, std::abs(v));
    int squarings = 0;
    while (norm * static_cast<double>(n) > 0.5) {
        norm /= 2.0;
        ++squarings;
    }
    const double scale = std::ldexp(1.0, -squarings);
    for (auto& row : m)
        for (auto& v : row) v *= scale;
    Matrix result = identity(n);
    Matrix term = identity(n);
    for (int k = 1; k <= 30; ++k) {
        term = multiply(term, m);
        for (auto& row : term)
            for (auto& v : row) v /= static_cast<double>(k);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) result[i][j] += term[i][j];
    }
    for (int s = 0; s < squarings; ++s) result = multiply(result, result);
    return result;
}

// Two-mode Fock basis |ns, nc> with ns + nc <= cutoff.
struct FockBasis {
    std::vector<std::pair<int, int>> states;
    std::map<std::pair<int, int>, std::size_t> index;

    explicit FockBasis(int cutoff) {
        for (int ns = 0; ns <= cutoff; ++ns)
            for (int nc = 0; ns + nc <= cutoff; ++nc) {
                index[{ns, nc}] = states.size();
                states.emplace_back(ns, nc);
            }
    }
};

// Fock-space propagator of the beamsplitter, built from its generator
// (theta/2)(e^{-i phi} a_c^dag a_s - e^{i phi} a_s^dag a_c) and exponentiated
// numerically.
inline Matrix beamsplitter_propagator(int cutoff, double theta, double phi) {
    FockBasis basis(cutoff);
    const std::size_t n = basis.states.size();
    Matrix h(n, std::vector<Complex>(n));
    const double g = 0.5 * theta;
    for (std::size_t col = 0; col < n; ++col) {
        const auto [ns, nc] = basis.states[col];
        if (ns > 0) {  // a_c^dag a_s
            const auto row = basis.index.at({ns - 1, nc + 1});
            h[row][col] += g * std::polar(1.0, -phi) * std::sqrt(double(ns) * (nc + 1));
        }
        if (nc > 0) {  // a_s^dag a_c
            const auto row = basis.index.at({ns + 1, nc - 1});
            h[row][col] -= g * std::polar(1.0, phi) * std::sqrt(double(nc) * (ns + 1));
        }
    }
    return expm(h);
}

// One-photon sector: the 2x2 mode matrix itself, applied to the amplitudes of
// |1,0> and |0,1>. Returns P(converted photon) for an input signal photon.
inline double one_photon_conversion(double theta, double phi) {
    const Complex c = std::cos(theta / 2), s = std::sin(theta / 2);
    const Complex m[2][2] = {{c, -std::polar(1.0, phi) * s}, {std::polar(1.0, -phi) * s, c}};
    const Complex in[2] = {1.0, 0.0};
    Complex out[2] = {};
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) out[j] += m[j][k] * in[k];
    return std::norm(out[1]);
}

// Heralded cross-correlation of a single-mode thermal pair source by direct
// summation over the pair-number distribution, with threshold detectors of
// efficiencies eta_h and eta_s and no noise.
inline double thermal_g(double mu, double eta_h, double eta_s, int n_max) {
    double ph = 0.0, ps = 0.0, phs = 0.0, norm = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        const double p = std::pow(mu, n) / std::pow(1.0 + mu, n + 1);
        const double ch = 1.0 - std::pow(1.0 - eta_h, n);
        const double cs = 1.0 - std::pow(1.0 - eta_s, n);
        norm += p;
        ph += p * ch;
        ps += p * cs;
        phs += p * ch * cs;
    }
    ph /= norm;
    ps /= norm;
    phs /= norm;
    return phs / (ph * ps);
}

// Minimum number of rounds serving all demands, by exhaustive search over
// per-round matchings. Serving more links in a round never hurts, so only
// matchings that cannot be extended within the round capacity are tried.
// The memo is keyed by the remaining demand over a fixed link list and is
// shared by every query on the same oracle.
struct Link {
    int a, b, demand;
};

class RoundOracle {
public:
    // Demands must stay below 16 and the list below 17 links.
    RoundOracle(std::vector<std::pair<int, int>> links, int capacity)
        : links_(std::move(links)), capacity_(capacity) {}

    int min_rounds(const std::vector<int>& demand) {
        std::uint64_t key = 0;
        for (std::size_t i = 0; i < demand.size(); ++i) key |= static_cast<std::uint64_t>(demand[i]) << (4 * i);
        return solve(key);
    }

private:
    static int digit(std::uint64_t key, std::size_t i) { return static_cast<int>((key >> (4 * i)) & 0xf); }

    int solve(std::uint64_t key) {
        if (key == 0) return 0;
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        int best = 1 << 29;
        std::vector<std::size_t> chosen;
        std::vector<int> busy;
        auto is_busy = [&](int p) { return std::find(busy.begin(), busy.end(), p) != busy.end(); };
        std::function<void(std::size_t)> rec = [&](std::size_t i) {
            if (i == links_.size()) {
                if (chosen.empty()) return;
                if (static_cast<int>(chosen.size()) < capacity_) {
                    for (std::size_t j = 0; j < links_.size(); ++j) {
                        if (digit(key, j) == 0 || std::find(chosen.begin(), chosen.end(), j) != chosen.end()) continue;
                        if (!is_busy(links_[j].first) && !is_busy(links_[j].second)) return;  // extendable
                    }
                }
                std::uint64_t next = key;
                for (std::size_t c : chosen) next -= std::uint64_t{1} << (4 * c);
                best = std::min(best, 1 + solve(next));
                return;
            }
            if (digit(key, i) > 0 && static_cast<int>(chosen.size()) < capacity_ && !is_busy(links_[i].first) &&
                !is_busy(links_[i].second)) {
                chosen.push_back(i);
                busy.push_back(links_[i].first);
                busy.push_back(links_[i].second);
                rec(i + 1);
                busy.resize(busy.size() - 2);
                chosen.pop_back();
            }
            rec(i + 1);
        };
        rec(0);
        memo_[key] = best;
        return best;
    }

    std::vector<std::pair<int, int>> links_;
    int capacity_;
    std::unordered_map<std::uint64_t, int> memo_;
};

inline int min_rounds(const std::vector<Link>& links, int capacity) {
    std::vector<std::pair<int, int>> pairs;
    std::vector<int> demand;
    for (const auto& l : links) {
        pairs.emplace_back(l.a, l.b);
        demand.push_back(l.demand);
    }
    return RoundOracle(pairs, capacity).min_rounds(demand);
}

}  // namespace oracle

#endif
