#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "miranda/errors.hpp"
#include "miranda/geometry.hpp"
#include "miranda/kernels.hpp"
#include "miranda/moduli.hpp"
#include "miranda/operators.hpp"

#include <json.hpp>

// Experiment configuration: a versioned JSON schema with one section
// per suite. Unknown keys are rejected so that typos surface as schema
// diagnostics (exit code 2) instead of silently running defaults.

namespace miranda {

using Json = nlohmann::json;

struct KernelSpec {
  KernelFamily family = KernelFamily::laplace;
  double k = 1.0;
  int n = 2;
  MatN a2 = MatN::identity(2);  // anisotropic_principal only

  FundamentalSolution make() const {
    switch (family) {
      case KernelFamily::laplace:
        return FundamentalSolution::laplace(n);
      case KernelFamily::anisotropic_principal:
        return FundamentalSolution::anisotropic(a2, n);
      case KernelFamily::yukawa:
        return FundamentalSolution::yukawa(k, n);
      case KernelFamily::helmholtz:
        return FundamentalSolution::helmholtz(k, n);
    }
    throw ConfigError("kernel: unknown family");
  }
};

struct CurveSpec {
  std::string kind = "ellipse";
  double a = 1.0, b = 1.0;          // ellipse
  double r0 = 1.0, eps = 0.2;       // star
  int lobes = 5;                    // star
  double c = 0.1;                   // c11_blend

  BoundaryCurve make() const {
    if (kind == "ellipse") return BoundaryCurve::ellipse(a, b);
    if (kind == "star") return BoundaryCurve::star(r0, eps, lobes);
    if (kind == "c11_blend") return BoundaryCurve::c11_blend(r0, c);
    throw ConfigError("curve: unknown kind \"" + kind + "\"");
  }
};

struct DensitySpec {
  std::string kind = "cos";
  int m = 1;
  double t0 = 0.0;
  double value = 1.0;

  BoundaryDensity make(const BoundaryFrame& frame) const {
    if (kind == "constant") return density_constant(frame, Complex(value));
    if (kind == "cos") return density_fourier(frame, m, false);
    if (kind == "sin") return density_fourier(frame, m, true);
    if (kind == "lipschitz_hat") return density_lipschitz_hat(frame, t0);
    if (kind == "c11_hat") return density_c11_hat(frame, t0);
    throw ConfigError("density: unknown kind \"" + kind + "\"");
  }
};

struct ModulusSpec {
  std::string kind = "omega1";
  double alpha = 0.9;

  ModulusFunction make() const {
    if (kind == "omega1") return ModulusFunction::omega1();
    if (kind == "power") return ModulusFunction::power(alpha);
    throw ConfigError("modulus: unknown kind \"" + kind + "\"");
  }
};

struct IdentityCaseConfig {
  KernelSpec kernel;
  CurveSpec curve;
  DensitySpec density;
  std::vector<int> ladder{128, 256};
  double tolerance = 1e-8;
  double min_order = 3.0;
  double exterior_radius_factor = 1.5;  // times the curve scale
};

struct IdentitySuiteConfig {
  int interior_points = 25;
  int exterior_points = 25;
  double offset_lo = 0.12;
  double offset_hi = 0.30;
  double exterior_tolerance = 1e-8;
  std::vector<IdentityCaseConfig> cases;
};

struct ScanConfig {
  std::string field = "grad_single";  // or grad_double
  KernelSpec kernel;
  CurveSpec curve{.kind = "c11_blend"};
  DensitySpec density{.kind = "lipschitz_hat"};
  int N = 512;
  int k0 = 3;
  int k1 = 9;
  int pairs_per_scale = 64;
  ModulusSpec extra_modulus{.kind = "power", .alpha = 0.9};
  double boundedness_factor = 2.0;
  int last_scales = 4;
};

struct KernelSuiteConfig {
  KernelSpec kernel{.family = KernelFamily::yukawa};
  CurveSpec curve{.kind = "c11_blend"};
  DensitySpec density{.kind = "lipschitz_hat"};
  std::vector<int> ladder{64, 128, 256, 512};
  double parity_tolerance = 1e-12;
  double remainder_target = 1e-3;
  int remainder_depth = 20;
};

struct PdeResidualCaseConfig {
  KernelSpec kernel;
  CurveSpec curve;
  DensitySpec density;
  int N = 128;
  int points = 100;
  double rel_tolerance = 1e-6;
};

struct PdeResidualSuiteConfig {
  std::vector<PdeResidualCaseConfig> cases;
};

struct SecondDerivativeConfig {
  KernelSpec kernel;
  CurveSpec curve;
  DensitySpec density;
  int N = 512;
  double tolerance = 1e-5;
  double hessian_symmetry_tolerance = 1e-6;
  int points = 8;
  DensitySpec scan_density{.kind = "c11_hat"};
};

struct QuadratureConfig {
  int upsample_cap = 64;
  double d_min_rel = 1e-6;
};

struct ExperimentConfig {
  std::uint64_t seed = 7;
  std::string output = "out";
  QuadratureConfig quadrature;
  std::optional<IdentitySuiteConfig> identities;
  std::optional<ScanConfig> modulus_scan;
  std::optional<KernelSuiteConfig> kernels;
  std::optional<PdeResidualSuiteConfig> pde_residual;
  std::optional<SecondDerivativeConfig> second_derivative;

  static ExperimentConfig from_json(const Json& j);
  static ExperimentConfig from_file(const std::filesystem::path& p);
  Json to_json() const;
  std::string canonical() const { return to_json().dump(); }
};

namespace config_detail {

inline void expect_keys(const Json& j, const std::vector<std::string>& keys,
                        const std::string& where) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const auto& k : keys)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError(where + ": unknown key \"" + item.key() + "\"");
  }
}

inline KernelFamily parse_family(const std::string& s) {
  if (s == "laplace") return KernelFamily::laplace;
  if (s == "anisotropic_principal" || s == "anisotropic")
    return KernelFamily::anisotropic_principal;
  if (s == "yukawa") return KernelFamily::yukawa;
  if (s == "helmholtz") return KernelFamily::helmholtz;
  throw ConfigError("kernel: unknown family \"" + s + "\"");
}

inline KernelSpec parse_kernel(const Json& j) {
  expect_keys(j, {"family", "k", "n", "a2"}, "kernel");
  KernelSpec s;
  if (j.contains("family")) s.family = parse_family(j["family"]);
  if (j.contains("k")) s.k = j["k"].get<double>();
  if (j.contains("n")) s.n = j["n"].get<int>();
  if (s.n != 2 && s.n != 3) throw ConfigError("kernel: n must be 2 or 3");
  if (j.contains("a2")) {
    const auto& rows = j["a2"];
    if (!rows.is_array() || static_cast<int>(rows.size()) != s.n)
      throw ConfigError("kernel: a2 must be n x n");
    s.a2.n = s.n;
    for (int i = 0; i < s.n; ++i)
      for (int k2 = 0; k2 < s.n; ++k2)
        s.a2(i, k2) = rows[static_cast<std::size_t>(i)]
                          [static_cast<std::size_t>(k2)]
                              .get<double>();
  } else if (s.family == KernelFamily::anisotropic_principal) {
    throw ConfigError("kernel: anisotropic_principal requires a2");
  }
  return s;
}

inline CurveSpec parse_curve(const Json& j) {
  expect_keys(j, {"kind", "a", "b", "r0", "eps", "k", "c"}, "curve");
  CurveSpec s;
  if (j.contains("kind")) s.kind = j["kind"].get<std::string>();
  if (j.contains("a")) s.a = j["a"].get<double>();
  if (j.contains("b")) s.b = j["b"].get<double>();
  if (j.contains("r0")) s.r0 = j["r0"].get<double>();
  if (j.contains("eps")) s.eps = j["eps"].get<double>();
  if (j.contains("k")) s.lobes = j["k"].get<int>();
  if (j.contains("c")) s.c = j["c"].get<double>();
  return s;
}

inline DensitySpec parse_density(const Json& j) {
  expect_keys(j, {"kind", "m", "t0", "value"}, "density");
  DensitySpec s;
  if (j.contains("kind")) s.kind = j["kind"].get<std::string>();
  if (j.contains("m")) s.m = j["m"].get<int>();
  if (j.contains("t0")) s.t0 = j["t0"].get<double>();
  if (j.contains("value")) s.value = j["value"].get<double>();
  return s;
}

inline ModulusSpec parse_modulus(const Json& j) {
  expect_keys(j, {"kind", "alpha"}, "modulus");
  ModulusSpec s;
  if (j.contains("kind")) s.kind = j["kind"].get<std::string>();
  if (j.contains("alpha")) s.alpha = j["alpha"].get<double>();
  return s;
}

inline Json dump_kernel(const KernelSpec& s) {
  Json j;
  j["family"] = family_name(s.family);
  j["k"] = s.k;
  j["n"] = s.n;
  if (s.family == KernelFamily::anisotropic_principal) {
    Json rows = Json::array();
    for (int i = 0; i < s.n; ++i) {
      Json row = Json::array();
      for (int k2 = 0; k2 < s.n; ++k2) row.push_back(s.a2(i, k2));
      rows.push_back(row);
    }
    j["a2"] = rows;
  }
  return j;
}

inline Json dump_curve(const CurveSpec& s) {
  Json j;
  j["kind"] = s.kind;
  if (s.kind == "ellipse") {
    j["a"] = s.a;
    j["b"] = s.b;
  } else if (s.kind == "star") {
    j["r0"] = s.r0;
    j["eps"] = s.eps;
    j["k"] = s.lobes;
  } else {
    j["r0"] = s.r0;
    j["c"] = s.c;
  }
  return j;
}

inline Json dump_density(const DensitySpec& s) {
  Json j;
  j["kind"] = s.kind;
  if (s.kind == "cos" || s.kind == "sin") j["m"] = s.m;
  if (s.kind == "lipschitz_hat" || s.kind == "c11_hat") j["t0"] = s.t0;
  if (s.kind == "constant") j["value"] = s.value;
  return j;
}

}  // namespace config_detail

inline ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  using namespace config_detail;
  expect_keys(j,
              {"seed", "output", "quadrature", "identities", "modulus_scan",
               "kernels", "pde_residual", "second_derivative"},
              "config");
  ExperimentConfig c;
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("output")) c.output = j["output"].get<std::string>();
  if (j.contains("quadrature")) {
    const Json& q = j["quadrature"];
    expect_keys(q, {"upsample_cap", "d_min_rel"}, "quadrature");
    if (q.contains("upsample_cap"))
      c.quadrature.upsample_cap = q["upsample_cap"].get<int>();
    if (q.contains("d_min_rel"))
      c.quadrature.d_min_rel = q["d_min_rel"].get<double>();
    const int cap = c.quadrature.upsample_cap;
    if (cap < 1 || cap > 64 || (cap & (cap - 1)) != 0)
      throw ConfigError("quadrature: upsample_cap must be a power of two <= 64");
    if (!(c.quadrature.d_min_rel > 0.0))
      throw ConfigError("quadrature: d_min_rel must be positive");
  }

  if (j.contains("identities")) {
    const Json& s = j["identities"];
    expect_keys(s,
                {"points", "cases", "exterior_tolerance"},
                "identities");
    IdentitySuiteConfig suite;
    if (s.contains("points")) {
      const Json& p = s["points"];
      expect_keys(p, {"interior", "exterior", "offset_lo", "offset_hi"},
                  "identities.points");
      if (p.contains("interior")) suite.interior_points = p["interior"];
      if (p.contains("exterior")) suite.exterior_points = p["exterior"];
      if (p.contains("offset_lo")) suite.offset_lo = p["offset_lo"];
      if (p.contains("offset_hi")) suite.offset_hi = p["offset_hi"];
    }
    if (s.contains("exterior_tolerance"))
      suite.exterior_tolerance = s["exterior_tolerance"];
    if (!s.contains("cases") || !s["cases"].is_array() || s["cases"].empty())
      throw ConfigError("identities: needs a nonempty \"cases\" array");
    for (const Json& cs : s["cases"]) {
      expect_keys(cs,
                  {"kernel", "curve", "density", "ladder", "tolerance",
                   "min_order", "exterior_radius_factor"},
                  "identities.case");
      IdentityCaseConfig ic;
      if (cs.contains("kernel")) ic.kernel = parse_kernel(cs["kernel"]);
      if (cs.contains("curve")) ic.curve = parse_curve(cs["curve"]);
      if (cs.contains("density")) ic.density = parse_density(cs["density"]);
      if (cs.contains("ladder"))
        ic.ladder = cs["ladder"].get<std::vector<int>>();
      if (ic.ladder.empty() ||
          !std::is_sorted(ic.ladder.begin(), ic.ladder.end()) ||
          std::adjacent_find(ic.ladder.begin(), ic.ladder.end()) !=
              ic.ladder.end())
        throw ConfigError("identities: ladder must be strictly increasing");
      if (cs.contains("tolerance")) ic.tolerance = cs["tolerance"];
      if (cs.contains("min_order")) ic.min_order = cs["min_order"];
      if (cs.contains("exterior_radius_factor"))
        ic.exterior_radius_factor = cs["exterior_radius_factor"];
      suite.cases.push_back(ic);
    }
    c.identities = suite;
  }

  if (j.contains("modulus_scan")) {
    const Json& s = j["modulus_scan"];
    expect_keys(s,
                {"field", "kernel", "curve", "density", "N", "k0", "k1",
                 "pairs_per_scale", "modulus", "boundedness_factor",
                 "last_scales"},
                "modulus_scan");
    ScanConfig sc;
    if (s.contains("field")) sc.field = s["field"].get<std::string>();
    if (sc.field != "grad_single" && sc.field != "grad_double")
      throw ConfigError("modulus_scan: field must be grad_single|grad_double");
    if (s.contains("kernel")) sc.kernel = parse_kernel(s["kernel"]);
    if (s.contains("curve")) sc.curve = parse_curve(s["curve"]);
    if (s.contains("density")) sc.density = parse_density(s["density"]);
    if (s.contains("N")) sc.N = s["N"];
    if (s.contains("k0")) sc.k0 = s["k0"];
    if (s.contains("k1")) sc.k1 = s["k1"];
    if (sc.k1 <= sc.k0) throw ConfigError("modulus_scan: need k1 > k0");
    if (s.contains("pairs_per_scale")) sc.pairs_per_scale = s["pairs_per_scale"];
    if (s.contains("modulus")) sc.extra_modulus = parse_modulus(s["modulus"]);
    if (s.contains("boundedness_factor"))
      sc.boundedness_factor = s["boundedness_factor"];
    if (s.contains("last_scales")) sc.last_scales = s["last_scales"];
    c.modulus_scan = sc;
  }

  if (j.contains("kernels")) {
    const Json& s = j["kernels"];
    expect_keys(s,
                {"kernel", "curve", "density", "ladder", "parity_tolerance",
                 "remainder_target", "remainder_depth"},
                "kernels");
    KernelSuiteConfig ks;
    if (s.contains("kernel")) ks.kernel = parse_kernel(s["kernel"]);
    if (s.contains("curve")) ks.curve = parse_curve(s["curve"]);
    if (s.contains("density")) ks.density = parse_density(s["density"]);
    if (s.contains("ladder")) ks.ladder = s["ladder"].get<std::vector<int>>();
    if (s.contains("parity_tolerance"))
      ks.parity_tolerance = s["parity_tolerance"];
    if (s.contains("remainder_target"))
      ks.remainder_target = s["remainder_target"];
    if (s.contains("remainder_depth"))
      ks.remainder_depth = s["remainder_depth"];
    c.kernels = ks;
  }

  if (j.contains("pde_residual")) {
    const Json& s = j["pde_residual"];
    expect_keys(s, {"cases"}, "pde_residual");
    PdeResidualSuiteConfig ps;
    if (!s.contains("cases") || s["cases"].empty())
      throw ConfigError("pde_residual: needs a nonempty \"cases\" array");
    for (const Json& cs : s["cases"]) {
      expect_keys(cs,
                  {"kernel", "curve", "density", "N", "points",
                   "rel_tolerance"},
                  "pde_residual.case");
      PdeResidualCaseConfig pc;
      if (cs.contains("kernel")) pc.kernel = parse_kernel(cs["kernel"]);
      if (cs.contains("curve")) pc.curve = parse_curve(cs["curve"]);
      if (cs.contains("density")) pc.density = parse_density(cs["density"]);
      if (cs.contains("N")) pc.N = cs["N"];
      if (cs.contains("points")) pc.points = cs["points"];
      if (cs.contains("rel_tolerance")) pc.rel_tolerance = cs["rel_tolerance"];
      ps.cases.push_back(pc);
    }
    c.pde_residual = ps;
  }

  if (j.contains("second_derivative")) {
    const Json& s = j["second_derivative"];
    expect_keys(s,
                {"kernel", "curve", "density", "N", "tolerance",
                 "hessian_symmetry_tolerance", "points", "scan_density"},
                "second_derivative");
    SecondDerivativeConfig sd;
    if (s.contains("kernel")) sd.kernel = parse_kernel(s["kernel"]);
    if (s.contains("curve")) sd.curve = parse_curve(s["curve"]);
    if (s.contains("density")) sd.density = parse_density(s["density"]);
    if (s.contains("N")) sd.N = s["N"];
    if (s.contains("tolerance")) sd.tolerance = s["tolerance"];
    if (s.contains("hessian_symmetry_tolerance"))
      sd.hessian_symmetry_tolerance = s["hessian_symmetry_tolerance"];
    if (s.contains("points")) sd.points = s["points"];
    if (s.contains("scan_density"))
      sd.scan_density = parse_density(s["scan_density"]);
    c.second_derivative = sd;
  }

  return c;
}

inline ExperimentConfig ExperimentConfig::from_file(
    const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open config file: " + p.string());
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
  return from_json(j);
}

inline Json ExperimentConfig::to_json() const {
  using namespace config_detail;
  Json j;
  j["seed"] = seed;
  j["output"] = output;
  j["quadrature"] = {{"upsample_cap", quadrature.upsample_cap},
                     {"d_min_rel", quadrature.d_min_rel}};
  if (identities) {
    Json s;
    s["points"] = {{"interior", identities->interior_points},
                   {"exterior", identities->exterior_points},
                   {"offset_lo", identities->offset_lo},
                   {"offset_hi", identities->offset_hi}};
    s["exterior_tolerance"] = identities->exterior_tolerance;
    Json cases = Json::array();
    for (const auto& ic : identities->cases) {
      Json cs;
      cs["kernel"] = dump_kernel(ic.kernel);
      cs["curve"] = dump_curve(ic.curve);
      cs["density"] = dump_density(ic.density);
      cs["ladder"] = ic.ladder;
      cs["tolerance"] = ic.tolerance;
      cs["min_order"] = ic.min_order;
      cs["exterior_radius_factor"] = ic.exterior_radius_factor;
      cases.push_back(cs);
    }
    s["cases"] = cases;
    j["identities"] = s;
  }
  if (modulus_scan) {
    Json s;
    s["field"] = modulus_scan->field;
    s["kernel"] = dump_kernel(modulus_scan->kernel);
    s["curve"] = dump_curve(modulus_scan->curve);
    s["density"] = dump_density(modulus_scan->density);
    s["N"] = modulus_scan->N;
    s["k0"] = modulus_scan->k0;
    s["k1"] = modulus_scan->k1;
    s["pairs_per_scale"] = modulus_scan->pairs_per_scale;
    s["modulus"] = {{"kind", modulus_scan->extra_modulus.kind},
                    {"alpha", modulus_scan->extra_modulus.alpha}};
    s["boundedness_factor"] = modulus_scan->boundedness_factor;
    s["last_scales"] = modulus_scan->last_scales;
    j["modulus_scan"] = s;
  }
  if (kernels) {
    Json s;
    s["kernel"] = dump_kernel(kernels->kernel);
    s["curve"] = dump_curve(kernels->curve);
    s["density"] = dump_density(kernels->density);
    s["ladder"] = kernels->ladder;
    s["parity_tolerance"] = kernels->parity_tolerance;
    s["remainder_target"] = kernels->remainder_target;
    s["remainder_depth"] = kernels->remainder_depth;
    j["kernels"] = s;
  }
  if (pde_residual) {
    Json cases = Json::array();
    for (const auto& pc : pde_residual->cases) {
      Json cs;
      cs["kernel"] = dump_kernel(pc.kernel);
      cs["curve"] = dump_curve(pc.curve);
      cs["density"] = dump_density(pc.density);
      cs["N"] = pc.N;
      cs["points"] = pc.points;
      cs["rel_tolerance"] = pc.rel_tolerance;
      cases.push_back(cs);
    }
    j["pde_residual"] = {{"cases", cases}};
  }
  if (second_derivative) {
    Json s;
    s["kernel"] = dump_kernel(second_derivative->kernel);
    s["curve"] = dump_curve(second_derivative->curve);
    s["density"] = dump_density(second_derivative->density);
    s["N"] = second_derivative->N;
    s["tolerance"] = second_derivative->tolerance;
    s["hessian_symmetry_tolerance"] =
        second_derivative->hessian_symmetry_tolerance;
    s["points"] = second_derivative->points;
    s["scan_density"] = dump_density(second_derivative->scan_density);
    j["second_derivative"] = s;
  }
  return j;
}

}  // namespace miranda
