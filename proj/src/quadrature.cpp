#include "mfm/quadrature.hpp"

#include "mfm/errors.hpp"
#include "mfm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

namespace mfm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(std::span<const double> v) {
    double m = kNegInf;
    for (const double x : v) m = std::max(m, x);
    if (m == kNegInf) return kNegInf;
    double s = 0;
    for (const double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

double log_of(const Real& x) {
    if (x <= 0) return kNegInf;
    return static_cast<double>(log(x));
}

struct HermiteRule {
    std::vector<double> nodes;
    std::vector<double> log_weights;
};

// Physicists' Gauss-Hermite rule by Newton iteration on the orthonormal
// recurrence, with the usual asymptotic starting guesses.
HermiteRule build_hermite(std::size_t n) {
    HermiteRule rule;
    rule.nodes.assign(n, 0);
    rule.log_weights.assign(n, 0);
    const double pim4 = std::pow(std::numbers::pi, -0.25);
    const std::size_t m = (n + 1) / 2;
    const double nd = static_cast<double>(n);
    double z = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (i == 0) {
            z = std::sqrt(2 * nd + 1) - 1.85575 * std::pow(2 * nd + 1, -1.0 / 6);
        } else if (i == 1) {
            z -= 1.14 * std::pow(nd, 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * rule.nodes[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * rule.nodes[1];
        } else {
            z = 2 * z - rule.nodes[i - 2];
        }
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p1 = pim4;
            double p2 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                const double jd = static_cast<double>(j);
                p1 = z * std::sqrt(2 / jd) * p2 - std::sqrt((jd - 1) / jd) * p3;
            }
            pp = std::sqrt(2 * nd) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        rule.nodes[i] = z;
        rule.nodes[n - 1 - i] = -z;
        const double lw = std::log(2.0) - 2 * std::log(std::abs(pp));
        rule.log_weights[i] = lw;
        rule.log_weights[n - 1 - i] = lw;
    }
    return rule;
}

const HermiteRule& hermite_rule(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, HermiteRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_hermite(n)).first;
    return it->second;
}

// Nodes and log weights (including the Gaussian density) for N(mean, variance).
void gaussian_nodes(double mean, double variance, const GridSpec& grid, std::vector<double>& x,
                    std::vector<double>& log_w) {
    const double sigma = std::sqrt(variance);
    x.resize(grid.points);
    log_w.resize(grid.points);
    if (grid.rule == QuadratureRule::GaussHermite) {
        const auto& rule = hermite_rule(grid.points);
        const double log_norm = -0.5 * std::log(std::numbers::pi);
        for (std::size_t k = 0; k < grid.points; ++k) {
            x[k] = mean + std::sqrt(2.0) * sigma * rule.nodes[k];
            log_w[k] = rule.log_weights[k] + log_norm;
        }
        return;
    }
    const double half = grid.kappa;
    const double h = 2 * half / static_cast<double>(grid.points - 1);
    const double log_h = std::log(h);
    const double log_norm = -0.5 * std::log(2 * std::numbers::pi);
    for (std::size_t k = 0; k < grid.points; ++k) {
        const double u = -half + h * static_cast<double>(k);
        x[k] = mean + sigma * u;
        double lw = log_h + log_norm - 0.5 * u * u;
        if (k == 0 || k + 1 == grid.points) lw -= std::log(2.0);
        log_w[k] = lw;
    }
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Uniform in (0, 1) from the top 53 bits.
double to_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

struct Moments {
    double sum = 0;
    double sum_sq = 0;
};

Moments pairwise(std::span<const Moments> parts) {
    if (parts.size() == 1) return parts.front();
    const std::size_t mid = parts.size() / 2;
    const Moments a = pairwise(parts.subspan(0, mid));
    const Moments b = pairwise(parts.subspan(mid));
    return {a.sum + b.sum, a.sum_sq + b.sum_sq};
}

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0;
        for (const double x : v) s += x;
        return s;
    }
    const std::size_t mid = v.size() / 2;
    return pairwise_sum(v.subspan(0, mid)) + pairwise_sum(v.subspan(mid));
}

}  // namespace

void GridSpec::validate() const {
    require(kappa > 0, ErrorKind::InvalidInput, "kappa must be positive");
    require(points >= 16, ErrorKind::InvalidInput, "grid needs at least 16 points");
}

double effective_kappa(const ModelSolution& solution, std::size_t i, const GridSpec& grid) {
    if (!grid.adaptive_kappa) return grid.kappa;
    const double psi = static_cast<double>(solution.model.psi());
    const double t = static_cast<double>(solution.model.dates()[i]);
    return grid.kappa + static_cast<double>(solution.steps() - i) * psi * std::sqrt(t);
}

double gaussian_expectation(const std::function<double(double)>& h, double mean, double variance,
                            const GridSpec& grid) {
    grid.validate();
    require(variance >= 0, ErrorKind::InvalidInput, "variance must be non-negative");
    if (variance == 0) return h(mean);
    std::vector<double> x;
    std::vector<double> log_w;
    gaussian_nodes(mean, variance, grid, x, log_w);
    std::vector<double> terms(x.size());
    parallel_for(x.size(), [&](std::size_t k) { terms[k] = h(x[k]) * std::exp(log_w[k]); });
    return pairwise_sum(terms);
}

double gaussian_log_expectation(const std::function<double(double)>& log_h, double mean,
                                double variance, const GridSpec& grid) {
    grid.validate();
    require(variance >= 0, ErrorKind::InvalidInput, "variance must be non-negative");
    if (variance == 0) return log_h(mean);
    std::vector<double> x;
    std::vector<double> log_w;
    gaussian_nodes(mean, variance, grid, x, log_w);
    std::vector<double> terms(x.size());
    parallel_for(x.size(), [&](std::size_t k) { terms[k] = log_h(x[k]) + log_w[k]; });
    return log_sum_exp(terms);
}

NIntegrand::NIntegrand(const ModelSolution& solution, std::size_t i)
    : psi_(static_cast<double>(solution.model.psi())),
      t_(static_cast<double>(solution.model.dates().at(i))) {
    require(i < solution.steps(), ErrorKind::Domain, "slice index out of range");
    PrecisionScope scope(solution.model.precision_bits());
    for (const auto& c : solution.coeffs.row(i)) log_c_.push_back(log_of(c));
}

double NIntegrand::log_bond(double x) const {
    double m = kNegInf;
    thread_local std::vector<double> terms;
    terms.resize(log_c_.size());
    for (std::size_t j = 0; j < log_c_.size(); ++j) {
        const double jp = static_cast<double>(j) * psi_;
        terms[j] = log_c_[j] + jp * x - 0.5 * jp * jp * t_;
        m = std::max(m, terms[j]);
    }
    if (m == kNegInf) return kNegInf;
    double s = 0;
    for (const double v : terms) s += std::exp(v - m);
    return m + std::log(s);
}

double NIntegrand::log_value(double x) const {
    const double gauss = t_ > 0 ? -0.5 * x * x / t_ - 0.5 * std::log(2 * std::numbers::pi * t_) : 0;
    return log_bond(x) + psi_ * x - 0.5 * psi_ * psi_ * t_ + gauss;
}

double NIntegrand::value(double x) const { return std::exp(log_value(x)); }

double n_by_grid(const ModelSolution& solution, std::size_t i, const GridSpec& grid) {
    const NIntegrand f(solution, i);
    GridSpec g = grid;
    g.kappa = effective_kappa(solution, i, grid);
    const double psi = f.psi();
    const double t = f.t();
    return std::exp(gaussian_log_expectation(
        [&](double x) { return f.log_bond(x) + psi * x - 0.5 * psi * psi * t; }, 0, t, g));
}

double counter_normal(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t key = splitmix64(seed);
    const double u1 = to_unit(splitmix64(key ^ (2 * index)));
    const double u2 = to_unit(splitmix64(key ^ (2 * index + 1)));
    return std::sqrt(-2 * std::log(u1)) * std::cos(2 * std::numbers::pi * u2);
}

MonteCarloEstimate n_by_mc(const ModelSolution& solution, std::size_t i, std::size_t paths,
                           std::uint64_t seed) {
    require(paths >= 1000, ErrorKind::InvalidInput, "Monte Carlo needs at least 1000 paths");
    const NIntegrand f(solution, i);
    const double psi = f.psi();
    const double t = f.t();
    const double sd = std::sqrt(t);
    constexpr std::size_t kChunk = 4096;
    const std::size_t chunks = (paths + kChunk - 1) / kChunk;
    std::vector<Moments> parts(chunks);
    parallel_for(chunks, [&](std::size_t c) {
        Moments m;
        const std::size_t end = std::min(paths, (c + 1) * kChunk);
        for (std::size_t p = c * kChunk; p < end; ++p) {
            const double x = sd * counter_normal(seed, p);
            const double v = std::exp(f.log_bond(x) + psi * x - 0.5 * psi * psi * t);
            m.sum += v;
            m.sum_sq += v * v;
        }
        parts[c] = m;
    });
    const Moments total = pairwise(parts);
    const double n = static_cast<double>(paths);
    MonteCarloEstimate out;
    out.paths = paths;
    out.mean = total.sum / n;
    const double var = std::max(0.0, (total.sum_sq / n - out.mean * out.mean) * n / (n - 1));
    out.standard_error = std::sqrt(var / n);
    return out;
}

IntegrandProfile integrand_profile(const ModelSolution& solution, std::size_t i,
                                   std::span<const double> x_grid) {
    const NIntegrand f(solution, i);
    IntegrandProfile out;
    out.x.assign(x_grid.begin(), x_grid.end());
    out.log_value.resize(out.x.size());
    out.value.resize(out.x.size());
    parallel_for(out.x.size(), [&](std::size_t k) {
        out.log_value[k] = f.log_value(out.x[k]);
        out.value[k] = std::exp(out.log_value[k]);
    });
    for (std::size_t k = 1; k + 1 < out.x.size(); ++k) {
        if (out.log_value[k] > out.log_value[k - 1] && out.log_value[k] >= out.log_value[k + 1]) {
            out.maxima.push_back(out.x[k]);
        }
    }
    return out;
}

std::vector<MartingaleResidual> martingale_residuals(const ModelSolution& solution,
                                                     const GridSpec& grid) {
    grid.validate();
    PrecisionScope scope(solution.model.precision_bits());
    const std::size_t n = solution.steps();
    const double psi = static_cast<double>(solution.model.psi());
    const auto& dates = solution.model.dates();
    std::vector<double> log_weight(n);
    std::vector<double> target(n);
    std::vector<double> one_step_at_zero(n);
    for (std::size_t i = 0; i < n; ++i) {
        log_weight[i] = log_of(solution.adjusted_libors[i] * solution.accruals[i]);
        target[i] = static_cast<double>(solution.curve.values[i]);
        one_step_at_zero[i] = static_cast<double>(one_step_rebased_bond(solution, i, Real(0)));
    }
    std::vector<NIntegrand> integrands;
    integrands.reserve(n);
    for (std::size_t i = 0; i < n; ++i) integrands.emplace_back(solution, i);

    std::vector<MartingaleResidual> out(n);
    parallel_for(n, [&](std::size_t i) {
        const auto& f = integrands[i];
        const double t = f.t();
        // log(P^_{i,i+1}(x) (1 + L~ tau exp(psi x - psi^2 t / 2)))
        auto log_h = [&](double x) {
            const double u = log_weight[i] + psi * x - 0.5 * psi * psi * t;
            const double softplus = u > 0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
            return f.log_bond(x) + softplus;
        };
        GridSpec g = grid;
        g.kappa = effective_kappa(solution, i, grid);
        const double uncond = std::exp(gaussian_log_expectation(log_h, 0, t, g));
        out[i].slice = i;
        out[i].unconditional = std::abs(uncond - target[i]) / target[i];
        if (i > 0) {
            const double dt = t - static_cast<double>(dates[i - 1]);
            const double cond = std::exp(gaussian_log_expectation(log_h, 0, dt, g));
            out[i].conditional = std::abs(cond - one_step_at_zero[i - 1]) / one_step_at_zero[i - 1];
        }
    });
    return out;
}

}  // namespace mfm
