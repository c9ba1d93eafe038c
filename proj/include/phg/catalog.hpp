#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "phg/affine.hpp"
#include "phg/chart.hpp"
#include "phg/errors.hpp"
#include "phg/expr.hpp"
#include "phg/parallelism.hpp"
#include "phg/riemannian.hpp"
#include "phg/sampling.hpp"
#include "phg/transport.hpp"

namespace phg {

enum class GeometryKind { Parallelism, Affine, Riemannian };

inline const char* to_string(GeometryKind k) {
  switch (k) {
    case GeometryKind::Parallelism: return "parallelism";
    case GeometryKind::Affine: return "affine";
    case GeometryKind::Riemannian: return "riemannian";
  }
  return "?";
}

/// A geometry as declared in a catalog entry or a JSON file: expression
/// strings keyed "i,j" (frame/metric) or "i,j,k" (connection), 1-based.
/// Missing components default to zero; symmetric slots are stored once.
struct GeometrySpec {
  std::string name;
  GeometryKind kind = GeometryKind::Parallelism;
  int n = 0;
  Box domain;
  std::map<std::string, std::string> w;      // kind: parallelism
  std::map<std::string, std::string> gamma;  // kind: affine | riemannian
  std::map<std::string, std::string> g;      // kind: riemannian, keys with i <= j
  bool expected_flat = false;                // catalog metadata; not serialized

  StructureObjectW parallelism() const {
    std::vector<std::vector<ScalarExpr>> comps(n, std::vector<ScalarExpr>(n, ScalarExpr::parse("0")));
    for (const auto& [key, text] : w) {
      auto [i, j] = parse_key2(key);
      comps[i][j] = checked_expr(text);
    }
    return StructureObjectW(n, std::move(comps), domain);
  }

  AffineObject affine() const {
    std::vector<std::vector<std::vector<ScalarExpr>>> comps(
        n, std::vector<std::vector<ScalarExpr>>(n, std::vector<ScalarExpr>(n, ScalarExpr::parse("0"))));
    for (const auto& [key, text] : gamma) {
      auto [i, j, k] = parse_key3(key);
      ScalarExpr e = checked_expr(text);
      comps[i][j][k] = e;
      comps[i][k][j] = e;  // lower symmetry
    }
    return AffineObject(n, std::move(comps), domain);
  }

  MetricPair riemannian() const {
    std::vector<std::vector<ScalarExpr>> metric(n, std::vector<ScalarExpr>(n, ScalarExpr::parse("0")));
    for (const auto& [key, text] : g) {
      auto [i, j] = parse_key2(key);
      ScalarExpr e = checked_expr(text);
      metric[i][j] = e;
      metric[j][i] = e;
    }
    return MetricPair(n, std::move(metric), affine(), domain);
  }

  std::pair<int, int> parse_key2(const std::string& key) const {
    auto idx = split_key(key, 2);
    return {idx[0], idx[1]};
  }

  std::tuple<int, int, int> parse_key3(const std::string& key) const {
    auto idx = split_key(key, 3);
    return {idx[0], idx[1], idx[2]};
  }

 private:
  std::vector<int> split_key(const std::string& key, int count) const {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos <= key.size()) {
      std::size_t comma = key.find(',', pos);
      std::string part = key.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      try {
        out.push_back(std::stoi(part) - 1);
      } catch (const std::exception&) {
        throw SchemaError("bad component key '" + key + "'");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (static_cast<int>(out.size()) != count)
      throw SchemaError("component key '" + key + "' needs " + std::to_string(count) + " indices");
    for (int i : out)
      if (i < 0 || i >= n) throw SchemaError("index out of range in key '" + key + "'");
    return out;
  }

  ScalarExpr checked_expr(const std::string& text) const {
    ScalarExpr e = ScalarExpr::parse(text);
    if (e.max_var() > n)
      throw SchemaError("expression '" + text + "' uses a variable beyond x" + std::to_string(n));
    return e;
  }
};

/// Canonical JSON form; load(save(spec)) == spec and save is byte-stable.
inline nlohmann::json to_json(const GeometrySpec& spec) {
  nlohmann::json j;
  j["name"] = spec.name;
  j["kind"] = to_string(spec.kind);
  j["n"] = spec.n;
  nlohmann::json dom = nlohmann::json::array();
  for (const auto& [lo, hi] : spec.domain.axes) dom.push_back({lo, hi});
  j["domain"] = dom;
  nlohmann::json comps = nlohmann::json::object();
  if (spec.kind == GeometryKind::Parallelism) comps["w"] = spec.w;
  if (spec.kind == GeometryKind::Affine || spec.kind == GeometryKind::Riemannian)
    comps["gamma"] = spec.gamma;
  if (spec.kind == GeometryKind::Riemannian) comps["g"] = spec.g;
  j["components"] = comps;
  j["expected_flat"] = spec.expected_flat;
  return j;
}

inline std::string save_geometry(const GeometrySpec& spec) { return to_json(spec).dump(2) + "\n"; }

inline GeometrySpec load_geometry(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  GeometrySpec spec;
  try {
    spec.name = j.at("name").get<std::string>();
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "parallelism")
      spec.kind = GeometryKind::Parallelism;
    else if (kind == "affine")
      spec.kind = GeometryKind::Affine;
    else if (kind == "riemannian")
      spec.kind = GeometryKind::Riemannian;
    else
      throw SchemaError("unknown kind '" + kind + "'");
    spec.n = j.at("n").get<int>();
    if (spec.n < 1 || spec.n > 8) throw SchemaError("n out of range");
    for (const auto& axis : j.at("domain")) {
      double lo = axis.at(0).get<double>();
      double hi = axis.at(1).get<double>();
      if (!(lo < hi)) throw SchemaError("degenerate domain axis");
      spec.domain.axes.emplace_back(lo, hi);
    }
    if (static_cast<int>(spec.domain.axes.size()) != spec.n)
      throw SchemaError("domain axis count does not match n");
    const auto& comps = j.at("components");
    if (spec.kind == GeometryKind::Parallelism) {
      for (const auto& [key, val] : comps.at("w").items()) spec.w[key] = val.get<std::string>();
    } else {
      if (comps.contains("gamma"))
        for (const auto& [key, val] : comps.at("gamma").items())
          spec.gamma[key] = val.get<std::string>();
      if (spec.kind == GeometryKind::Riemannian)
        for (const auto& [key, val] : comps.at("g").items()) spec.g[key] = val.get<std::string>();
    }
    spec.expected_flat = j.value("expected_flat", false);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("schema violation: ") + e.what());
  }

  // Normalize symmetric keys to canonical order, rejecting contradictions.
  std::map<std::string, std::string> canon_gamma;
  for (const auto& [key, text] : spec.gamma) {
    auto [i, j, k] = spec.parse_key3(key);
    int lo = std::min(j, k), hi = std::max(j, k);
    std::string ck = std::to_string(i + 1) + "," + std::to_string(lo + 1) + "," + std::to_string(hi + 1);
    auto it = canon_gamma.find(ck);
    if (it != canon_gamma.end() && it->second != text)
      throw SymmetryError("gamma components " + key + " and " + ck + " disagree");
    canon_gamma[ck] = text;
  }
  spec.gamma = std::move(canon_gamma);
  std::map<std::string, std::string> canon_g;
  for (const auto& [key, text] : spec.g) {
    auto [i, j] = spec.parse_key2(key);
    int lo = std::min(i, j), hi = std::max(i, j);
    std::string ck = std::to_string(lo + 1) + "," + std::to_string(hi + 1);
    auto it = canon_g.find(ck);
    if (it != canon_g.end() && it->second != text)
      throw SymmetryError("metric components " + key + " and " + ck + " disagree");
    canon_g[ck] = text;
  }
  spec.g = std::move(canon_g);

  // Validate the expressions (and by construction the key format).
  switch (spec.kind) {
    case GeometryKind::Parallelism: spec.parallelism(); break;
    case GeometryKind::Affine: spec.affine(); break;
    case GeometryKind::Riemannian: spec.riemannian(); break;
  }
  return spec;
}

inline std::vector<GeometrySpec> builtin_catalog() {
  std::vector<GeometrySpec> out;
  auto add = [&out](GeometrySpec s) { out.push_back(std::move(s)); };

  Box square{{{-1, 1}, {-1, 1}}};
  Box small{{{-0.55, 0.55}, {-0.55, 0.55}}};

  add({"trans2", GeometryKind::Parallelism, 2, square, {{"1,1", "1"}, {"2,2", "1"}}, {}, {}, true});
  add({"axb",
       GeometryKind::Parallelism,
       2,
       Box{{{0.5, 3}, {-1, 1}}},
       {{"1,1", "x1"}, {"2,2", "x1"}},
       {},
       {},
       true});
  add({"heis3",
       GeometryKind::Parallelism,
       3,
       Box{{{-1, 1}, {-1, 1}, {-1, 1}}},
       {{"1,1", "1"}, {"2,2", "1"}, {"3,2", "x1"}, {"3,3", "1"}},
       {},
       {},
       true});
  add({"pert2",
       GeometryKind::Parallelism,
       2,
       square,
       {{"1,1", "1"}, {"2,2", "1+0.3*sin(x1)"}},
       {},
       {},
       false});

  add({"affine-zero", GeometryKind::Affine, 2, square, {}, {}, {}, true});
  add({"affine-pullback-flat",
       GeometryKind::Affine,
       2,
       square,
       {},
       {{"1,2,2", "-2"}},
       {},
       true});

  // Conformal connection of the round metric 4 delta / (1+|x|^2)^2.
  std::map<std::string, std::string> sphere_gamma = {
      {"1,1,1", "-2*x1/(1+x1^2+x2^2)"}, {"1,1,2", "-2*x2/(1+x1^2+x2^2)"},
      {"1,2,2", "2*x1/(1+x1^2+x2^2)"},  {"2,1,1", "2*x2/(1+x1^2+x2^2)"},
      {"2,1,2", "-2*x1/(1+x1^2+x2^2)"}, {"2,2,2", "-2*x2/(1+x1^2+x2^2)"}};
  Box disk{{{-0.55, 0.55}, {-0.55, 0.55}}};
  add({"affine-sphere", GeometryKind::Affine, 2, disk, {}, sphere_gamma, {}, false});

  add({"euclid2",
       GeometryKind::Riemannian,
       2,
       square,
       {},
       {},
       {{"1,1", "1"}, {"2,2", "1"}},
       true});
  add({"sphere2",
       GeometryKind::Riemannian,
       2,
       disk,
       {},
       sphere_gamma,
       {{"1,1", "4/(1+x1^2+x2^2)^2"}, {"2,2", "4/(1+x1^2+x2^2)^2"}},
       true});
  std::map<std::string, std::string> hyper_gamma = {
      {"1,1,1", "2*x1/(1-x1^2-x2^2)"},  {"1,1,2", "2*x2/(1-x1^2-x2^2)"},
      {"1,2,2", "-2*x1/(1-x1^2-x2^2)"}, {"2,1,1", "-2*x2/(1-x1^2-x2^2)"},
      {"2,1,2", "2*x1/(1-x1^2-x2^2)"},  {"2,2,2", "2*x2/(1-x1^2-x2^2)"}};
  add({"hyper2",
       GeometryKind::Riemannian,
       2,
       small,
       {},
       hyper_gamma,
       {{"1,1", "4/(1-x1^2-x2^2)^2"}, {"2,2", "4/(1-x1^2-x2^2)^2"}},
       true});
  add({"mismatch2",
       GeometryKind::Riemannian,
       2,
       disk,
       {},
       sphere_gamma,
       {{"1,1", "1"}, {"2,2", "1"}},
       false});
  add({"bump2",
       GeometryKind::Riemannian,
       2,
       square,
       {},
       {{"1,2,2", "-x1"}, {"2,1,2", "x1/(1+x1^2)"}},
       {{"1,1", "1"}, {"2,2", "1+x1^2"}},
       false});

  return out;
}

inline GeometrySpec find_geometry(const std::string& name) {
  for (GeometrySpec& s : builtin_catalog())
    if (s.name == name) return std::move(s);
  throw SchemaError("unknown catalog geometry '" + name + "'");
}

inline JetVector random_jet(int n, std::uint64_t& state) {
  std::vector<double> xi0(n);
  SqMat<double> xi1(n);
  for (double& v : xi0) v = 2 * uniform01(state) - 1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) xi1(i, j) = 2 * uniform01(state) - 1;
  return JetVector::order1(std::move(xi0), std::move(xi1));
}

struct CertifyResult {
  bool flat = false;
  bool consistent = true;
  double I_max = 0;    // integrability object: evidence of nontriviality, not flatness
  double R_max = 0;    // route (a): closed-form nonlinear curvature
  double lin_max = 0;  // route (b): linearized curvature on sampled jets
  double holonomy = 0; // route (c): loop defect per squared loop size
  double tol = 0;
  double holonomy_tol = 0;
};

/// Flatness certificate by three independent routes: closed-form curvature on
/// sampled point pairs, linearized curvature on sampled jets, and rectangle
/// loop transport. Flat iff all three stay below tolerance; a split decision
/// with strong evidence on both sides (beyond 10x tolerance) is flagged as an
/// internal inconsistency rather than resolved silently.
inline CertifyResult certify_flat(const GeometrySpec& spec, int samples, double tol,
                                  std::uint64_t seed) {
  CertifyResult res;
  res.tol = tol;
  res.holonomy_tol = std::max(tol, 1e-6);
  BoxSampler sampler(spec.domain, seed);
  BoxSampler pair_sampler(spec.domain, seed ^ 0x5bf0'3635'dc2a'9e17ULL);

  // Loop bases live in a shrunken box so the rectangle stays inside.
  const double h = 0.05;
  Box loop_box;
  for (auto [lo, hi] : spec.domain.axes) {
    double m = 0.05 * (hi - lo);
    loop_box.axes.emplace_back(lo + m, hi - m - h);
  }
  BoxSampler loop_sampler(loop_box, seed ^ 0x94d0'49bb'1331'11ebULL);
  const int loops = std::min(5, samples);

  if (spec.kind == GeometryKind::Parallelism) {
    StructureObjectW W = spec.parallelism();
    for (int s = 0; s < samples; ++s) {
      Point x = sampler.point(s);
      Point y = pair_sampler.point(s);
      res.I_max = std::max(res.I_max, W.integrability_at(x).max_abs());
      res.R_max = std::max(res.R_max, W.nonlinear_curvature(x, y).max_abs());
      res.lin_max = std::max(res.lin_max, W.linear_curvature_at(x).max_abs());
    }
    for (int s = 0; s < loops; ++s) {
      Point base = loop_sampler.point(s);
      for (int j = 1; j <= spec.n; ++j)
        for (int k = j + 1; k <= spec.n; ++k) {
          HolonomyReport rep = loop_defect(TransportKind::Linear, &W, nullptr, base, j, k, h);
          res.holonomy = std::max(res.holonomy, rep.extrapolated_per_area);
        }
    }
  } else if (spec.kind == GeometryKind::Affine) {
    AffineObject A = spec.affine();
    std::uint64_t st = seed ^ 0x7c3d'9c1f'ab12'44d9ULL;
    for (int s = 0; s < samples; ++s) {
      Point x = sampler.point(s);
      Point y = pair_sampler.point(s);
      res.I_max = std::max(res.I_max, A.integrability_at(x).max_abs());
      SqMat<double> f1 = SqMat<double>::identity(spec.n);
      for (int i = 0; i < spec.n; ++i)
        for (int j = 0; j < spec.n; ++j) f1(i, j) += 0.3 * (2 * uniform01(st) - 1);
      res.R_max = std::max(res.R_max, A.nonlinear_curvature(x, y, f1).max_abs());
      JetVector xi = random_jet(spec.n, st);
      res.lin_max = std::max(res.lin_max, A.linear_curvature(xi, x).max_abs());
    }
    for (int s = 0; s < loops; ++s) {
      Point base = loop_sampler.point(s);
      for (int j = 1; j <= spec.n; ++j)
        for (int k = j + 1; k <= spec.n; ++k) {
          HolonomyReport rep = loop_defect(TransportKind::Affine, nullptr, &A, base, j, k, h);
          res.holonomy = std::max(res.holonomy,
                                  rep.defect_norms.back() / (rep.sizes.back() * rep.sizes.back()));
        }
    }
  } else {
    MetricPair M = spec.riemannian();
    for (int s = 0; s < samples; ++s) {
      Point x = sampler.point(s);
      Point y = pair_sampler.point(s);
      auto [i1, i2] = M.full_I_at(x);
      res.I_max = std::max({res.I_max, i1.max_abs(), i2.max_abs()});
      OneArrow arrow = M.metric_arrow_sampler(x, y, seed + 1000 + s);
      auto [rho, sigma] = M.riemann_curvature_pair(x, y, arrow.f1);
      res.R_max = std::max({res.R_max, rho.max_abs(), sigma.max_abs()});
      JetVector xi = M.metric_jet_sampler(x, seed + 2000 + s);
      auto [lrho, lsigma] = M.linear_curvature(xi, x);
      res.lin_max = std::max({res.lin_max, lrho.max_abs(), lsigma.max_abs()});
    }
    // Loop route: transport the frame system from metric-arrow initial data;
    // the defect vanishes exactly when such data extends to a solution.
    for (int s = 0; s < loops; ++s) {
      Point base = loop_sampler.point(s);
      Point y0 = loop_sampler.point(s + loops);
      OneArrow arrow = M.metric_arrow_sampler(base, y0, seed + 3000 + s);
      AffineState s0{y0, arrow.f1};
      for (int j = 1; j <= spec.n; ++j)
        for (int k = j + 1; k <= spec.n; ++k) {
          PathSpec loop = PathSpec::rectangle_loop(base, h, h, j, k);
          AffineState out = transport_affine(M.affine(), loop, s0);
          double defect = 0;
          for (int i = 0; i < spec.n; ++i) defect += (out.f0[i] - y0[i]) * (out.f0[i] - y0[i]);
          for (int a = 0; a < spec.n; ++a)
            for (int b = 0; b < spec.n; ++b) {
              double d = out.f1(a, b) - arrow.f1(a, b);
              defect += d * d;
            }
          res.holonomy = std::max(res.holonomy, std::sqrt(defect) / (h * h));
        }
    }
  }

  bool flat_a = res.R_max <= tol;
  bool flat_b = res.lin_max <= tol;
  bool flat_c = res.holonomy <= res.holonomy_tol;
  res.flat = flat_a && flat_b && flat_c;
  // A route voting nonflat with evidence below 10x tolerance is borderline,
  // not contradictory; beyond that a split verdict is an inconsistency.
  auto strong = [tol](double v) { return v > 10 * tol; };
  bool any_flat = !flat_a || !flat_b || !flat_c;
  bool all_nonflat = !flat_a && !flat_b && !flat_c;
  if (any_flat && !all_nonflat) {
    res.consistent = !((!flat_a && strong(res.R_max) && (flat_b || flat_c)) ||
                       (!flat_b && strong(res.lin_max) && (flat_a || flat_c)) ||
                       (!flat_c && res.holonomy > 10 * res.holonomy_tol && (flat_a || flat_b)));
  }
  return res;
}

}  // namespace phg
