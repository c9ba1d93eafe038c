#pragma once

#include <string>

#include "json.hpp"
#include "phg/catalog.hpp"
#include "phg/riemannian.hpp"
#include "phg/sampling.hpp"

namespace phg {

struct ReportOptions {
  std::uint64_t seed = 1;
  int samples = 100;
  double tol = 1e-7;
};

/// Assembles the stable JSON report. All inputs are deterministic in
/// (geometry, seed, samples, tol), so the serialized form is byte-stable.
inline nlohmann::json make_report(const GeometrySpec& spec, const ReportOptions& opt) {
  CertifyResult cert = certify_flat(spec, opt.samples, opt.tol, opt.seed);

  nlohmann::json j;
  j["geometry"] = spec.name;
  j["seed"] = opt.seed;
  j["samples"] = opt.samples;
  j["tolerances"] = {{"curvature", cert.tol}, {"holonomy", cert.holonomy_tol}};
  j["evidence"] = {{"I_max", cert.I_max},
                   {"R_max", cert.R_max},
                   {"lin_max", cert.lin_max},
                   {"holonomy", cert.holonomy}};

  std::string verdict = cert.flat ? "Flat" : "NotFlat";
  nlohmann::json checks = nlohmann::json::array();
  auto check = [&checks](const std::string& name, bool pass, double value, double tol) {
    checks.push_back({{"name", name}, {"pass", pass}, {"value", value}, {"tol", tol}});
  };
  check("closed_form_curvature", cert.R_max <= cert.tol, cert.R_max, cert.tol);
  check("linearized_curvature", cert.lin_max <= cert.tol, cert.lin_max, cert.tol);
  check("loop_defect", cert.holonomy <= cert.holonomy_tol, cert.holonomy, cert.holonomy_tol);
  check("routes_consistent", cert.consistent, cert.consistent ? 0.0 : 1.0, 0.0);

  if (spec.kind == GeometryKind::Riemannian) {
    MetricPair M = spec.riemannian();
    BoxSampler sampler(spec.domain, opt.seed ^ 0xc1a5'51fe'0d4b'7a63ULL);
    ClassifyResult cls =
        classify(M, opt.samples, opt.tol, [&sampler](int s) { return sampler.point(s); });
    j["fit"] = {{"c", cls.c_mean},
                {"spread", cls.c_spread},
                {"max_residual", cls.max_fit_residual},
                {"one_flat_residual", cls.one_flat_residual}};
    j["classification"] = to_string(cls.verdict);
    check("one_flat", cls.one_flat_residual <= opt.tol, cls.one_flat_residual, opt.tol);
  }
  j["verdict"] = verdict;
  j["checks"] = checks;
  return j;
}

inline std::string render_report(const GeometrySpec& spec, const ReportOptions& opt) {
  return make_report(spec, opt).dump(2) + "\n";
}

}  // namespace phg
