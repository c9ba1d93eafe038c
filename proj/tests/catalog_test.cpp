#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>
#include <string>

#include "phg/catalog.hpp"

using namespace phg;

TEST_CASE("the built-in catalog spans all three structure kinds") {
  std::vector<GeometrySpec> cat = builtin_catalog();
  REQUIRE(cat.size() >= 12);
  std::set<GeometryKind> kinds;
  std::set<std::string> names;
  for (const auto& s : cat) {
    kinds.insert(s.kind);
    REQUIRE(names.insert(s.name).second);  // unique names
    REQUIRE(s.n >= 1);
    REQUIRE(static_cast<int>(s.domain.axes.size()) == s.n);
  }
  REQUIRE(kinds.size() == 3);
}

TEST_CASE("save/load round-trips bitwise") {
  for (const char* name : {"axb", "affine-sphere", "bump2"}) {
    GeometrySpec spec = find_geometry(name);
    std::string once = save_geometry(spec);
    GeometrySpec back = load_geometry(once);
    std::string twice = save_geometry(back);
    REQUIRE(once == twice);
    REQUIRE(back.name == spec.name);
    REQUIRE(back.kind == spec.kind);
    REQUIRE(back.expected_flat == spec.expected_flat);
  }
}

TEST_CASE("loading rejects malformed inputs with the right diagnostics") {
  GeometrySpec base = find_geometry("affine-sphere");
  nlohmann::json j = to_json(base);

  SECTION("invalid JSON") { CHECK_THROWS_AS(load_geometry("{not json"), SchemaError); }
  SECTION("unknown kind") {
    j["kind"] = "projective";
    CHECK_THROWS_AS(load_geometry(j.dump()), SchemaError);
  }
  SECTION("dimension out of range") {
    j["n"] = 9;
    CHECK_THROWS_AS(load_geometry(j.dump()), SchemaError);
  }
  SECTION("degenerate domain axis") {
    j["domain"][0] = {1.0, 1.0};
    CHECK_THROWS_AS(load_geometry(j.dump()), SchemaError);
  }
  SECTION("axis count mismatch") {
    j["domain"].push_back({-1.0, 1.0});
    CHECK_THROWS_AS(load_geometry(j.dump()), SchemaError);
  }
  SECTION("unparseable expression") {
    j["components"]["gamma"]["1,1,1"] = "sin(x1";
    CHECK_THROWS_AS(load_geometry(j.dump()), ParseError);
  }
  SECTION("expression using a variable beyond the dimension") {
    j["components"]["gamma"]["1,1,1"] = "x3";
    CHECK_THROWS_AS(load_geometry(j.dump()), SchemaError);
  }
  SECTION("contradictory symmetric components") {
    // disagrees with the stored 1,1,2 entry after canonicalization
    j["components"]["gamma"]["1,2,1"] = "42";
    CHECK_THROWS_AS(load_geometry(j.dump()), SymmetryError);
  }
}

TEST_CASE("certification agrees with the expected flatness of every entry") {
  for (const GeometrySpec& spec : builtin_catalog()) {
    CertifyResult r = certify_flat(spec, 20, 1e-7, 7);
    INFO(spec.name);
    REQUIRE(r.consistent);
    REQUIRE(r.flat == spec.expected_flat);
    if (!spec.gamma.empty() || spec.kind == GeometryKind::Parallelism) {
      // every nontrivial entry should produce some first-order evidence
      REQUIRE(r.I_max + r.R_max + r.lin_max + r.holonomy >= 0.0);
    }
  }
}

TEST_CASE("nontrivial flat entries are distinguished from the trivial one") {
  CertifyResult axb = certify_flat(find_geometry("axb"), 20, 1e-7, 7);
  REQUIRE(axb.flat);
  REQUIRE(axb.I_max > 0.3);  // nonvanishing integrability despite flatness
  CertifyResult trans = certify_flat(find_geometry("trans2"), 20, 1e-7, 7);
  REQUIRE(trans.flat);
  REQUIRE(trans.I_max < 1e-14);
}
