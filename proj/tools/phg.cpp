// Command-line front end: catalog lookup, geometry-file ingestion, curvature
// computation, flatness certification, holonomy sweeps, and JSON reports.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "phg/phg.hpp"

namespace {

phg::GeometrySpec resolve_geometry(const std::string& arg) {
  for (phg::GeometrySpec& s : phg::builtin_catalog())
    if (s.name == arg) return std::move(s);
  std::ifstream in(arg);
  if (!in) throw phg::SchemaError("no catalog entry or readable file named '" + arg + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return phg::load_geometry(buf.str());
}

phg::Point parse_point(const std::string& text, int n) {
  phg::Point p;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      p.push_back(std::stod(part));
    } catch (const std::exception&) {
      throw phg::SchemaError("bad coordinate '" + part + "' in point '" + text + "'");
    }
  }
  if (static_cast<int>(p.size()) != n)
    throw phg::SchemaError("point '" + text + "' has wrong dimension");
  return p;
}

nlohmann::json block_to_json(const phg::BlockT<double>& b) {
  nlohmann::json j = nlohmann::json::object();
  phg::for_each_index(b, [&](const std::vector<int>& idx) {
    std::string key;
    for (std::size_t s = 0; s < idx.size(); ++s) {
      if (s) key += ",";
      key += std::to_string(idx[s] + 1);
    }
    j[key] = b.at(idx);
  });
  return j;
}

void emit(const nlohmann::json& j, bool json_mode) {
  if (json_mode)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << j.dump(2) << "\n";
}

struct CommonOpts {
  std::string geometry;
  std::uint64_t seed = 1;
  int samples = 100;
  double tol = 1e-7;
  bool json = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--geometry", o.geometry, "Catalog name or geometry JSON file")->required();
  cmd->add_option("--seed", o.seed, "Sampling seed");
  cmd->add_option("--samples", o.samples, "Sample budget");
  cmd->add_option("--tol", o.tol, "Curvature tolerance");
  cmd->add_flag("--json", o.json, "Emit JSON");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chart-based flatness engine for frame, affine, and metric structures"};
  app.require_subcommand(1);

  CommonOpts compute_o, certify_o, holonomy_o, lie3_o, classify_o, report_o;
  std::string object_name = "gamma", point_s, point2_s;
  double loop_size = 0.05;
  bool expect_flat = false;

  CLI::App* compute = app.add_subcommand("compute", "Evaluate a named object at a point");
  add_common(compute, compute_o);
  compute->add_option("--object", object_name, "gamma|I|I1|I2|christoffel|R|r");
  compute->add_option("--point", point_s, "Comma-separated coordinates")->required();
  compute->add_option("--point2", point2_s, "Second point (for R)");

  CLI::App* certify = app.add_subcommand("certify", "Run the three-route flatness certificate");
  add_common(certify, certify_o);
  certify->add_flag("--expect-flat", expect_flat, "Exit 3 unless the verdict is Flat");

  CLI::App* holonomy = app.add_subcommand("holonomy", "Rectangle-loop defect sweep");
  add_common(holonomy, holonomy_o);
  holonomy->add_option("--point", point_s, "Loop base point")->required();
  holonomy->add_option("--loop-size", loop_size, "Largest loop side length");

  CLI::App* lie3 = app.add_subcommand("lie3", "Three evidence channels side by side");
  add_common(lie3, lie3_o);

  CLI::App* classify_cmd = app.add_subcommand("classify", "Metric-pair classification");
  add_common(classify_cmd, classify_o);

  CLI::App* report = app.add_subcommand("report", "Full JSON report");
  add_common(report, report_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (compute->parsed()) {
      phg::GeometrySpec spec = resolve_geometry(compute_o.geometry);
      phg::Point x = parse_point(point_s, spec.n);
      nlohmann::json out;
      out["geometry"] = spec.name;
      out["object"] = object_name;
      if (object_name == "gamma") {
        phg::BlockT<double> b = spec.kind == phg::GeometryKind::Parallelism
                                    ? spec.parallelism().gamma_at(x)
                                    : spec.affine().gamma_at(x);
        out["value"] = block_to_json(b);
      } else if (object_name == "I") {
        phg::BlockT<double> b = spec.kind == phg::GeometryKind::Parallelism
                                    ? spec.parallelism().integrability_at(x)
                                    : spec.affine().integrability_at(x);
        out["value"] = block_to_json(b);
      } else if (object_name == "I1") {
        out["value"] = block_to_json(spec.riemannian().I1_at(x));
      } else if (object_name == "I2") {
        out["value"] = block_to_json(spec.riemannian().I2_at(x));
      } else if (object_name == "christoffel") {
        out["value"] = block_to_json(spec.riemannian().christoffel_at(x));
      } else if (object_name == "R") {
        if (point2_s.empty()) throw phg::SchemaError("--object R needs --point2");
        phg::Point y = parse_point(point2_s, spec.n);
        if (spec.kind == phg::GeometryKind::Parallelism) {
          out["value"] = block_to_json(spec.parallelism().nonlinear_curvature(x, y));
        } else if (spec.kind == phg::GeometryKind::Affine) {
          phg::AffineObject A = spec.affine();
          out["value"] =
              block_to_json(A.nonlinear_curvature(x, y, phg::SqMat<double>::identity(spec.n)));
        } else {
          phg::MetricPair M = spec.riemannian();
          phg::OneArrow arrow = M.metric_arrow_sampler(x, y, compute_o.seed);
          auto [rho, sigma] = M.riemann_curvature_pair(x, y, arrow.f1);
          out["value"] = {{"rho", block_to_json(rho)}, {"sigma", block_to_json(sigma)}};
        }
      } else if (object_name == "r") {
        if (spec.kind == phg::GeometryKind::Parallelism) {
          out["value"] = block_to_json(spec.parallelism().linear_curvature_at(x));
        } else if (spec.kind == phg::GeometryKind::Affine) {
          phg::AffineObject A = spec.affine();
          std::uint64_t st = compute_o.seed;
          out["value"] = block_to_json(A.linear_curvature(phg::random_jet(spec.n, st), x));
        } else {
          phg::MetricPair M = spec.riemannian();
          phg::JetVector xi = M.metric_jet_sampler(x, compute_o.seed);
          auto [rho, sigma] = M.linear_curvature(xi, x);
          out["value"] = {{"rho", block_to_json(rho)}, {"sigma", block_to_json(sigma)}};
        }
      } else {
        throw phg::SchemaError("unknown object '" + object_name + "'");
      }
      emit(out, compute_o.json);
      return 0;
    }

    if (certify->parsed()) {
      phg::GeometrySpec spec = resolve_geometry(certify_o.geometry);
      phg::CertifyResult res =
          phg::certify_flat(spec, certify_o.samples, certify_o.tol, certify_o.seed);
      nlohmann::json out = {{"geometry", spec.name},
                            {"verdict", res.flat ? "Flat" : "NotFlat"},
                            {"consistent", res.consistent},
                            {"evidence",
                             {{"I_max", res.I_max},
                              {"R_max", res.R_max},
                              {"lin_max", res.lin_max},
                              {"holonomy", res.holonomy}}},
                            {"tolerances", {{"curvature", res.tol}, {"holonomy", res.holonomy_tol}}}};
      emit(out, certify_o.json);
      if (!res.consistent) return 2;
      if (expect_flat && !res.flat) return 3;
      return 0;
    }

    if (holonomy->parsed()) {
      phg::GeometrySpec spec = resolve_geometry(holonomy_o.geometry);
      phg::Point base = parse_point(point_s, spec.n);
      nlohmann::json sweeps = nlohmann::json::array();
      phg::StructureObjectW W;
      phg::AffineObject A;
      phg::TransportKind kind;
      if (spec.kind == phg::GeometryKind::Parallelism) {
        W = spec.parallelism();
        kind = phg::TransportKind::Linear;
      } else {
        A = spec.kind == phg::GeometryKind::Affine ? spec.affine() : spec.riemannian().affine();
        kind = phg::TransportKind::Affine;
      }
      for (int j = 1; j <= spec.n; ++j)
        for (int k = j + 1; k <= spec.n; ++k) {
          phg::HolonomyReport rep = phg::loop_defect(kind, &W, &A, base, j, k, loop_size);
          nlohmann::json s = {{"plane", {j, k}},
                              {"sizes", rep.sizes},
                              {"defects", rep.defect_norms}};
          if (kind == phg::TransportKind::Linear) {
            s["defect_per_area"] = rep.extrapolated_per_area;
            s["curvature_slice"] = rep.curvature_slice_norm;
            s["relative_mismatch"] = rep.relative_mismatch;
          }
          sweeps.push_back(s);
        }
      emit({{"geometry", spec.name}, {"base", base}, {"loops", sweeps}}, holonomy_o.json);
      return 0;
    }

    if (lie3->parsed()) {
      phg::GeometrySpec spec = resolve_geometry(lie3_o.geometry);
      phg::CertifyResult res = phg::certify_flat(spec, lie3_o.samples, lie3_o.tol, lie3_o.seed);
      bool a = res.R_max <= res.tol, b = res.lin_max <= res.tol,
           c = res.holonomy <= res.holonomy_tol;
      nlohmann::json out = {{"geometry", spec.name},
                            {"closed_form_R", {{"max", res.R_max}, {"flat", a}}},
                            {"linear_r", {{"max", res.lin_max}, {"flat", b}}},
                            {"loop_defect", {{"max", res.holonomy}, {"flat", c}}},
                            {"channels_agree", a == b && b == c},
                            {"consistent", res.consistent}};
      emit(out, lie3_o.json);
      return res.consistent ? 0 : 2;
    }

    if (classify_cmd->parsed()) {
      phg::GeometrySpec spec = resolve_geometry(classify_o.geometry);
      if (spec.kind != phg::GeometryKind::Riemannian)
        throw phg::SchemaError("classify needs a riemannian geometry");
      phg::MetricPair M = spec.riemannian();
      phg::BoxSampler sampler(spec.domain, classify_o.seed);
      phg::ClassifyResult cls = phg::classify(M, classify_o.samples, classify_o.tol,
                                              [&sampler](int s) { return sampler.point(s); });
      nlohmann::json out = {{"geometry", spec.name},
                            {"verdict", phg::to_string(cls.verdict)},
                            {"one_flat_residual", cls.one_flat_residual},
                            {"fit",
                             {{"c", cls.c_mean},
                              {"spread", cls.c_spread},
                              {"max_residual", cls.max_fit_residual}}}};
      emit(out, classify_o.json);
      return 0;
    }

    if (report->parsed()) {
      phg::GeometrySpec spec = resolve_geometry(report_o.geometry);
      phg::ReportOptions opt{report_o.seed, report_o.samples, report_o.tol};
      std::cout << phg::render_report(spec, opt);
      return 0;
    }
  } catch (const phg::DomainEscape& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const phg::SingularFrame& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const phg::SingularArrow& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const phg::DegenerateMetric& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const phg::DomainError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
