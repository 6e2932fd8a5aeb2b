#pragma once

#include <charconv>
#include <fstream>
#include <optional>
#include <string>

#include "apf/diagnostics.hpp"

namespace apf {

/// Locale-independent decimal with 17 significant digits (round-trip exact).
inline std::string csv_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

inline std::string csv_number(const std::optional<double>& v) {
    return v ? csv_number(*v) : std::string();
}

inline constexpr const char* kEnergyCsvHeader =
    "t,E,d_visc,d_grad,d_quart,d_lin,u_sq,cum_visc,cum_grad,cum_quart,cum_lin,balance_defect";

inline std::string energy_csv(const EnergyLedger& led) {
    std::string s = kEnergyCsvHeader;
    s += '\n';
    for (const EnergyRow& r : led.rows) {
        s += csv_number(r.t) + ',' + csv_number(r.E) + ',' + csv_number(r.d_visc) + ',' +
             csv_number(r.d_grad) + ',' + csv_number(r.d_quart) + ',' + csv_number(r.d_lin) +
             ',' + csv_number(r.u_sq) + ',' + csv_number(r.cum_visc) + ',' +
             csv_number(r.cum_grad) + ',' + csv_number(r.cum_quart) + ',' +
             csv_number(r.cum_lin) + ',' + csv_number(r.balance_defect) + '\n';
    }
    return s;
}

inline constexpr const char* kRelativeCsvHeader =
    "t,E_rel,W_rel,K_val,r1_norm,r2_norm,pairing1,pairing2,lhs,rhs";

inline std::string relative_csv(const GronwallReport& rep) {
    std::string s = kRelativeCsvHeader;
    s += '\n';
    for (const RelRow& r : rep.rows) {
        s += csv_number(r.t) + ',' + csv_number(r.E_rel) + ',' + csv_number(r.W_rel) + ',' +
             csv_number(r.K_val) + ',' + csv_number(r.r1_norm) + ',' + csv_number(r.r2_norm) +
             ',' + csv_number(r.pairing1) + ',' + csv_number(r.pairing2) + ',' +
             csv_number(r.lhs) + ',' + csv_number(r.rhs) + '\n';
    }
    return s;
}

struct SweepRow {
    double eps = 0.0;
    double sup_p_dist = 0.0;  // sup_t ||p_eps - p~||_L2 against the reduced run
    double int_u_sq = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // eps strictly decreasing
    std::optional<double> slope_p;
    std::optional<double> slope_u;
    std::string note;
};

/// Least-squares slope of log y against log x.
inline std::optional<double> loglog_slope(const std::vector<double>& x,
                                          const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) return std::nullopt;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::nullopt;
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return std::nullopt;
    return (n * sxy - sx * sy) / denom;
}

inline constexpr const char* kSweepCsvHeader = "eps,sup_p_dist,int_u_sq,slope_p,slope_u";

inline std::string sweep_csv(const SweepResult& sw) {
    std::string s = kSweepCsvHeader;
    s += '\n';
    for (const SweepRow& r : sw.rows) {
        s += csv_number(r.eps) + ',' + csv_number(r.sup_p_dist) + ',' + csv_number(r.int_u_sq) +
             ',' + csv_number(sw.slope_p) + ',' + csv_number(sw.slope_u) + '\n';
    }
    return s;
}

inline void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << body;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace apf
