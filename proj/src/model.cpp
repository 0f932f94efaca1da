#include "mfm/model.hpp"

#include "mfm/errors.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace mfm {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

TenorModel::TenorModel(std::vector<Real> dates, std::vector<Real> discounts, Real psi,
                       unsigned precision_bits)
    : precision_bits_(precision_bits) {
    require(precision_bits >= kMinPrecisionBits, ErrorKind::InvalidInput,
            "precision_bits must be at least 64");
    require(dates.size() >= 2, ErrorKind::InvalidInput, "need at least two tenor dates");
    require(dates.size() == discounts.size(), ErrorKind::InvalidInput,
            "dates and discounts differ in length");
    require(dates.front() == 0, ErrorKind::InvalidInput, "first tenor date must be 0");
    require(discounts.front() == 1, ErrorKind::InvalidInput, "P(0, t_0) must equal 1");
    require(psi >= 0, ErrorKind::InvalidInput, "volatility must be non-negative");

    PrecisionScope scope(precision_bits);
    dates_.reserve(dates.size());
    discounts_.reserve(discounts.size());
    for (std::size_t i = 0; i < dates.size(); ++i) {
        if (i > 0) {
            require(dates[i] > dates[i - 1], ErrorKind::InvalidInput,
                    "tenor dates must be strictly increasing");
        }
        require(discounts[i] > 0, ErrorKind::InvalidInput, "discount factors must be positive");
        dates_.push_back(rounded_to(dates[i], precision_bits));
        discounts_.push_back(rounded_to(discounts[i], precision_bits));
    }
    psi_ = rounded_to(psi, precision_bits);
}

std::vector<Real> TenorModel::accruals() const {
    PrecisionScope scope(precision_bits_);
    std::vector<Real> tau;
    tau.reserve(steps());
    for (std::size_t i = 0; i < steps(); ++i) tau.push_back(accrual(i));
    return tau;
}

std::vector<Real> TenorModel::zero_rates() const {
    PrecisionScope scope(precision_bits_);
    std::vector<Real> r;
    r.reserve(dates_.size());
    r.push_back(std::numeric_limits<Real>::quiet_NaN());
    for (std::size_t i = 1; i < dates_.size(); ++i) r.push_back(-log(discounts_[i]) / dates_[i]);
    return r;
}

TenorModel TenorModel::with_psi(Real psi) const {
    return TenorModel(dates_, discounts_, std::move(psi), precision_bits_);
}

TenorModel flat_curve(const Real& r0, std::size_t n, const Real& tau, unsigned precision_bits) {
    require(n >= 2, ErrorKind::InvalidInput, "flat curve needs n >= 2 steps");
    require(tau > 0, ErrorKind::InvalidInput, "accrual must be positive");
    require(r0 >= 0, ErrorKind::InvalidInput, "flat rate must be non-negative");
    PrecisionScope scope(precision_bits);
    const Real rate = rounded_to(r0, precision_bits);
    const Real step = rounded_to(tau, precision_bits);
    std::vector<Real> dates;
    std::vector<Real> discounts;
    for (std::size_t i = 0; i <= n; ++i) {
        Real t = step * static_cast<unsigned long>(i);
        discounts.push_back(exp(-rate * t));
        dates.push_back(std::move(t));
    }
    return TenorModel(std::move(dates), std::move(discounts), Real(0), precision_bits);
}

TenorModel flat_curve(double r0, std::size_t n, double tau, unsigned precision_bits) {
    PrecisionScope scope(precision_bits);
    return flat_curve(Real(r0), n, Real(tau), precision_bits);
}

RebasedCurve rebase(const TenorModel& model) {
    PrecisionScope scope(model.precision_bits());
    const auto& p = model.discounts();
    RebasedCurve curve;
    curve.values.reserve(p.size());
    for (const auto& v : p) curve.values.push_back(v / p.back());
    return curve;
}

std::vector<Real> forward_libors(const RebasedCurve& curve, std::span<const Real> accruals) {
    require(accruals.size() + 1 == curve.values.size(), ErrorKind::InvalidInput,
            "accruals must have one entry fewer than the curve");
    std::vector<Real> fwd;
    fwd.reserve(accruals.size());
    for (std::size_t j = 0; j < accruals.size(); ++j) {
        fwd.push_back((curve.values[j] / curve.values[j + 1] - 1) / accruals[j]);
    }
    return fwd;
}

std::vector<Real> forward_libors(const TenorModel& model) {
    PrecisionScope scope(model.precision_bits());
    const auto tau = model.accruals();
    return forward_libors(rebase(model), tau);
}

TenorModel scale(const TenorModel& model, const Real& lambda) {
    require(lambda > 0, ErrorKind::InvalidInput, "scale factor must be positive");
    PrecisionScope scope(model.precision_bits());
    std::vector<Real> dates;
    dates.reserve(model.dates().size());
    for (const auto& t : model.dates()) dates.push_back(t * lambda);
    // P_0i = exp(-r_i t_i) is invariant when r_i -> r_i / lambda and t_i -> lambda t_i.
    return TenorModel(std::move(dates), model.discounts(), model.psi() / sqrt(lambda),
                      model.precision_bits());
}

bool is_flat(const TenorModel& model, FlatParameters* out) {
    PrecisionScope scope(model.precision_bits());
    const auto tau = model.accruals();
    const auto fwd = forward_libors(model);
    const Real tol = precision_tolerance(model.precision_bits(), 8);
    for (std::size_t j = 1; j < tau.size(); ++j) {
        if (relative_difference(tau[j], tau[0]) > tol) return false;
        if (relative_difference(fwd[j], fwd[0]) > tol) return false;
    }
    if (out != nullptr) {
        out->tau = tau[0];
        out->r0 = log1p(fwd[0] * tau[0]) / tau[0];
    }
    return true;
}

TenorModel read_curve_csv(std::istream& in, Real psi, unsigned precision_bits) {
    PrecisionScope scope(precision_bits);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorKind::InvalidInput, "empty curve file");
    {
        std::string header = trim(line);
        header.erase(std::remove(header.begin(), header.end(), ' '), header.end());
        require(header == "t,P", ErrorKind::InvalidInput, "curve header must be `t,P`");
    }
    std::vector<Real> dates;
    std::vector<Real> discounts;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        const auto comma = line.find(',');
        require(comma != std::string::npos, ErrorKind::InvalidInput,
                "line " + std::to_string(line_no) + ": expected two columns");
        const std::string t_text = trim(line.substr(0, comma));
        const std::string p_text = trim(line.substr(comma + 1));
        Real t;
        Real p;
        try {
            t = parse_real(t_text);
            p = parse_real(p_text);
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidInput,
                        "line " + std::to_string(line_no) + ": not a decimal number");
        }
        require(dates.empty() || t > dates.back(), ErrorKind::InvalidInput,
                "line " + std::to_string(line_no) + ": t must be strictly increasing");
        dates.push_back(std::move(t));
        discounts.push_back(std::move(p));
    }
    return TenorModel(std::move(dates), std::move(discounts), std::move(psi), precision_bits);
}

TenorModel read_curve_csv(const std::filesystem::path& path, Real psi, unsigned precision_bits) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::InvalidInput, "cannot open curve file " + path.string());
    return read_curve_csv(in, std::move(psi), precision_bits);
}

void write_curve_csv(std::ostream& out, const TenorModel& model) {
    out << "t,P\n";
    for (std::size_t i = 0; i < model.dates().size(); ++i) {
        out << model.dates()[i].str(12, std::ios_base::fixed) << ','
            << to_decimal(model.discounts()[i]) << '\n';
    }
}

}  // namespace mfm
