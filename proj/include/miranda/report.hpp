#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "miranda/harness.hpp"

// Deterministic output assembly: report.json, per-experiment CSVs and
// plot-ready data files. Wall-clock runtimes go to the console only,
// so repeated runs with the same seed are byte-identical.

namespace miranda {

struct RunOutcome {
  std::vector<SuiteReport> suites;
  std::optional<ScanResult> scan;
  std::string config_hash;

  bool pass() const {
    for (const auto& s : suites)
      if (!s.pass()) return false;
    return true;
  }
};

/// Runs the suites selected by `which` ("all" or one subcommand name).
/// Missing configuration sections raise ConfigError.
inline RunOutcome run_suites(const ExperimentConfig& cfg,
                             const std::string& which) {
  RunOutcome out;
  out.config_hash = hex_hash(cfg.canonical());
  quadrature_settings().upsample_cap = cfg.quadrature.upsample_cap;
  quadrature_settings().d_min_rel = cfg.quadrature.d_min_rel;
  const bool all = which == "all";

  auto need = [&](bool present, const std::string& section) {
    if (!present)
      throw ConfigError("config has no \"" + section +
                        "\" section required by this subcommand");
  };

  if (all ? cfg.identities.has_value() : which == "identities") {
    need(cfg.identities.has_value(), "identities");
    out.suites.push_back(run_identity_suite(*cfg.identities, cfg.seed));
  }
  if (all ? cfg.modulus_scan.has_value() : which == "modulus-scan") {
    need(cfg.modulus_scan.has_value(), "modulus_scan");
    out.scan = run_modulus_scan(*cfg.modulus_scan, cfg.seed, out.config_hash);
    out.suites.push_back(scan_report(*cfg.modulus_scan, *out.scan));
  }
  if (all ? cfg.kernels.has_value() : which == "kernels") {
    need(cfg.kernels.has_value(), "kernels");
    out.suites.push_back(run_kernel_suite(*cfg.kernels, cfg.seed));
  }
  if (all ? cfg.pde_residual.has_value() : which == "pde-residual") {
    need(cfg.pde_residual.has_value(), "pde_residual");
    out.suites.push_back(run_pde_residual_suite(*cfg.pde_residual, cfg.seed));
  }
  if (all ? cfg.second_derivative.has_value()
          : which == "second-derivative") {
    need(cfg.second_derivative.has_value(), "second_derivative");
    out.suites.push_back(
        run_second_derivative_probe(*cfg.second_derivative, cfg.seed));
  }
  if (out.suites.empty())
    throw ConfigError("no suite selected; config sections: none matched \"" +
                      which + "\"");
  return out;
}

namespace report_detail {

inline std::string csv_escape_bool(bool b) { return b ? "1" : "0"; }

inline void write_identities_csv(const Json& details,
                                 const std::filesystem::path& dir) {
  auto out = open_output(dir / "identities.csv");
  auto plot = open_output(dir / "plotdata" / "identity_convergence.csv");
  out << "case,kernel,curve,density,N,slayder_defect,dlayder_defect\n";
  plot << "case,N,slayder_defect,dlayder_defect\n";
  int ci = 0;
  for (const auto& cs : details.at("cases")) {
    if (cs.contains("field_samples")) {
      const std::string suffix = "_case" + std::to_string(ci) + ".csv";
      auto fv = open_output(dir / "plotdata" / ("field_v" + suffix));
      auto fw = open_output(dir / "plotdata" / ("field_w" + suffix));
      fv << "x1,x2,re,im\n";
      fw << "x1,x2,re,im\n";
      for (const auto& s : cs.at("field_samples")) {
        fv << format_double(s.at("x1").get<double>()) << ','
           << format_double(s.at("x2").get<double>()) << ','
           << format_double(s.at("v_re").get<double>()) << ','
           << format_double(s.at("v_im").get<double>()) << '\n';
        fw << format_double(s.at("x1").get<double>()) << ','
           << format_double(s.at("x2").get<double>()) << ','
           << format_double(s.at("w_re").get<double>()) << ','
           << format_double(s.at("w_im").get<double>()) << '\n';
      }
    }
    for (const auto& row : cs.at("ladder")) {
      out << ci << ',' << cs.at("kernel").get<std::string>() << ','
          << cs.at("curve").get<std::string>() << ','
          << cs.at("density").get<std::string>() << ','
          << row.at("N").get<int>() << ','
          << format_double(row.at("slayder_defect").get<double>()) << ','
          << format_double(row.at("dlayder_defect").get<double>()) << '\n';
      plot << ci << ',' << row.at("N").get<int>() << ','
           << format_double(row.at("slayder_defect").get<double>()) << ','
           << format_double(row.at("dlayder_defect").get<double>()) << '\n';
    }
    ++ci;
  }
}

inline void write_scan_csv(const Json& details,
                           const std::filesystem::path& dir) {
  auto out = open_output(dir / "scan.csv");
  auto plot = open_output(dir / "plotdata" / "scan_ratios.csv");
  out << "k,h,pairs,omega1_sup,lip_sup,extra_sup,argmax_t,"
         "argmax_separation,quad_error_estimate,excluded\n";
  plot << "k,h,omega1_sup,lip_sup,extra_sup\n";
  for (const auto& r : details.at("records")) {
    out << r.at("k").get<int>() << ','
        << format_double(r.at("h").get<double>()) << ','
        << r.at("pairs").get<int>() << ','
        << format_double(r.at("omega1_sup").get<double>()) << ','
        << format_double(r.at("lip_sup").get<double>()) << ','
        << format_double(r.at("extra_sup").get<double>()) << ','
        << format_double(r.at("argmax_t").get<double>()) << ','
        << format_double(r.at("argmax_separation").get<double>()) << ','
        << format_double(r.at("quad_error_estimate").get<double>()) << ','
        << csv_escape_bool(r.at("excluded").get<bool>()) << '\n';
    plot << r.at("k").get<int>() << ','
         << format_double(r.at("h").get<double>()) << ','
         << format_double(r.at("omega1_sup").get<double>()) << ','
         << format_double(r.at("lip_sup").get<double>()) << ','
         << format_double(r.at("extra_sup").get<double>()) << '\n';
  }
}

inline void write_kernels_csv(const Json& details,
                              const std::filesystem::path& dir) {
  if (details.contains("remainder_decay") &&
      !details.at("remainder_decay").empty()) {
    auto out = open_output(dir / "plotdata" / "remainder_decay.csv");
    out << "j,r,k_row\n";
    for (const auto& r : details.at("remainder_decay"))
      out << r.at("j").get<int>() << ','
          << format_double(r.at("r").get<double>()) << ','
          << format_double(r.at("k_row").get<double>()) << '\n';
  }
  if (details.contains("extension_seminorms")) {
    auto out = open_output(dir / "kernels_extension.csv");
    out << "N,omega1_seminorm\n";
    for (const auto& r : details.at("extension_seminorms"))
      out << r.at("N").get<int>() << ','
          << format_double(r.at("omega1_seminorm").get<double>()) << '\n';
  }
  if (details.contains("class_norm_growth")) {
    auto out = open_output(dir / "kernels_class_norm.csv");
    out << "N,term1,term2\n";
    for (const auto& r : details.at("class_norm_growth"))
      out << r.at("N").get<int>() << ','
          << format_double(r.at("term1").get<double>()) << ','
          << format_double(r.at("term2").get<double>()) << '\n';
  }
}

inline void write_pde_csv(const Json& details,
                          const std::filesystem::path& dir) {
  auto out = open_output(dir / "pde_residual.csv");
  out << "case,kernel,points,max_rel_residual_v,max_rel_residual_w\n";
  int ci = 0;
  for (const auto& cs : details.at("cases"))
    out << ci++ << ',' << cs.at("kernel").get<std::string>() << ','
        << cs.at("points").get<int>() << ','
        << format_double(cs.at("max_rel_residual_v").get<double>()) << ','
        << format_double(cs.at("max_rel_residual_w").get<double>()) << '\n';
}

inline void write_second_derivative_csv(const Json& details,
                                        const std::filesystem::path& dir) {
  auto out = open_output(dir / "second_derivative.csv");
  out << "x1,x2,two_path_defect,hessian_symmetry\n";
  for (const auto& r : details.at("points"))
    out << format_double(r.at("x1").get<double>()) << ','
        << format_double(r.at("x2").get<double>()) << ','
        << format_double(r.at("two_path_defect").get<double>()) << ','
        << format_double(r.at("hessian_symmetry").get<double>()) << '\n';
  if (details.contains("m2_scan")) {
    auto plot = open_output(dir / "plotdata" / "m2_scan.csv");
    plot << "k,h,omega1_sup\n";
    for (const auto& r : details.at("m2_scan"))
      plot << r.at("k").get<int>() << ','
           << format_double(r.at("h").get<double>()) << ','
           << format_double(r.at("omega1_sup").get<double>()) << '\n';
  }
}

}  // namespace report_detail

/// Writes report.json, per-suite CSVs and plotdata/ under `dir`.
inline void write_outputs(const ExperimentConfig& cfg, const RunOutcome& out,
                          const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "plotdata");
  Json report;
  report["version"] = 1;
  report["seed"] = cfg.seed;
  report["config_hash"] = out.config_hash;
  report["config"] = cfg.to_json();
  Json suites;
  Json checks = Json::array();
  for (const auto& s : out.suites) {
    suites[s.name] = s.details;
    for (const auto& c : s.checks)
      checks.push_back({{"id", s.name + "." + c.id},
                        {"value", c.value},
                        {"threshold", c.threshold},
                        {"pass", c.pass}});
    if (s.name == "identities")
      report_detail::write_identities_csv(s.details, dir);
    else if (s.name == "modulus_scan")
      report_detail::write_scan_csv(s.details, dir);
    else if (s.name == "kernels")
      report_detail::write_kernels_csv(s.details, dir);
    else if (s.name == "pde_residual")
      report_detail::write_pde_csv(s.details, dir);
    else if (s.name == "second_derivative")
      report_detail::write_second_derivative_csv(s.details, dir);
  }
  report["suites"] = suites;
  report["checks"] = checks;
  report["pass"] = out.pass();
  auto f = open_output(dir / "report.json");
  f << report.dump(2) << '\n';

  auto cc = open_output(dir / "checks.csv");
  cc << "id,value,threshold,pass\n";
  for (const auto& c : checks)
    cc << c.at("id").get<std::string>() << ','
       << format_double(c.at("value").get<double>()) << ','
       << format_double(c.at("threshold").get<double>()) << ','
       << report_detail::csv_escape_bool(c.at("pass").get<bool>()) << '\n';
}

/// Console summary; one line per check plus suite runtimes.
inline void print_summary(const RunOutcome& out, std::ostream& os) {
  for (const auto& s : out.suites) {
    for (const auto& c : s.checks)
      os << (c.pass ? "[PASS] " : "[FAIL] ") << s.name << "." << c.id << "  "
         << format_double(c.value) << " vs " << format_double(c.threshold)
         << "\n";
    os << "# " << s.name << " runtime " << format_double(s.runtime_seconds)
       << " s\n";
  }
}

}  // namespace miranda
