#include "mfm/export.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace mfm {

std::string format_double(double value, int significant) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", significant, value);
    return buf;
}

nlohmann::json solution_json(const ModelSolution& solution) {
    PrecisionScope scope(solution.model.precision_bits());
    const auto fwd = forward_libors(solution.model);
    const Real subnormal(std::numeric_limits<double>::denorm_min());
    nlohmann::json out;
    out["psi"] = to_decimal(solution.model.psi());
    out["precision_bits"] = solution.model.precision_bits();
    auto& slices = out["slices"] = nlohmann::json::array();
    for (std::size_t i = 0; i < solution.steps(); ++i) {
        nlohmann::json s;
        s["i"] = i;
        s["t"] = to_decimal(solution.model.dates()[i]);
        s["L_fwd"] = to_decimal(fwd[i]);
        s["L_tilde"] = to_decimal(solution.adjusted_libors[i]);
        s["N"] = to_decimal(solution.expectations[i]);
        auto& coeffs = s["coeffs"] = nlohmann::json::array();
        for (const auto& c : solution.coeffs.row(i)) coeffs.push_back(to_decimal(c));
        s["below_double_subnormal"] = solution.adjusted_libors[i] < subnormal;
        slices.push_back(std::move(s));
    }
    return out;
}

std::string libor_csv(const ModelSolution& solution, int significant) {
    PrecisionScope scope(solution.model.precision_bits());
    const auto fwd = forward_libors(solution.model);
    std::ostringstream out;
    out << "i,t,L_fwd,L_tilde,N\n";
    for (std::size_t i = 0; i < solution.steps(); ++i) {
        // L_tilde may sit below the double range; keep it as a decimal string.
        out << i << ',' << format_double(static_cast<double>(solution.model.dates()[i]), significant)
            << ',' << format_double(static_cast<double>(fwd[i]), significant) << ','
            << to_decimal(solution.adjusted_libors[i], significant) << ','
            << to_decimal(solution.expectations[i], significant) << '\n';
    }
    return out.str();
}

std::string genfunc_csv(const GenFunction& gf) {
    std::ostringstream out;
    out << "j,c_j\n";
    for (std::size_t j = 0; j < gf.coeffs.size(); ++j) {
        out << j << ',' << to_decimal(gf.coeffs[j]) << '\n';
    }
    return out.str();
}

std::string locus_csv(std::span<const RootSet> locus, int significant) {
    std::ostringstream out;
    out << "psi,k,re,im,modulus\n";
    for (const auto& rs : locus) {
        const std::string psi = format_double(static_cast<double>(rs.psi), significant);
        for (std::size_t k = 0; k < rs.roots.size(); ++k) {
            const auto& z = rs.roots[k];
            out << psi << ',' << k << ',' << format_double(static_cast<double>(z.re), significant)
                << ',' << format_double(static_cast<double>(z.im), significant) << ','
                << format_double(static_cast<double>(abs(z)), significant) << '\n';
        }
    }
    return out.str();
}

nlohmann::json critical_json(const CriticalReport& report) {
    nlohmann::json out;
    out["i"] = report.slice;
    out["psi_cr"] = report.psi_cr;
    out["z_star"] = report.z_star;
    out["formula_psi_cr"] =
        report.formula_psi_cr ? nlohmann::json(*report.formula_psi_cr) : nlohmann::json();
    out["bracket"] = {report.bracket_lo, report.bracket_hi};
    out["tolerance"] = report.tolerance;
    out["min_root_modulus"] = report.min_root_modulus;
    out["crossings"] = report.crossings;
    out["indicator_monotone"] = report.indicator_monotone;
    return out;
}

std::string profile_csv(const IntegrandProfile& profile, int significant) {
    std::ostringstream out;
    out << "x,integrand\n";
    for (std::size_t k = 0; k < profile.x.size(); ++k) {
        out << format_double(profile.x[k], significant) << ','
            << format_double(profile.value[k], significant) << '\n';
    }
    return out.str();
}

nlohmann::json residual_json(std::span<const MartingaleResidual> residuals) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& r : residuals) {
        out[std::to_string(r.slice)] = {{"unconditional", r.unconditional},
                                        {"conditional", r.conditional}};
    }
    return out;
}

std::string logn_csv(std::span<const LogNPoint> points, int significant) {
    std::ostringstream out;
    out << "psi,logN,logNinf,dlogN_dpsi\n";
    for (const auto& p : points) {
        out << format_double(p.psi, significant) << ',' << format_double(p.log_n, significant)
            << ',' << format_double(p.log_n_inf, significant) << ','
            << format_double(p.derivative, significant) << '\n';
    }
    return out.str();
}

}  // namespace mfm
