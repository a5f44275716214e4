#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <set>

#include "doctest.h"
#include "json.hpp"
#include "sdq/gallery.hpp"

using namespace sdq;

namespace {

const std::set<std::string> kCatalog = {
    "S3-1",  "S3-2",  "S3-3",  "S3-4",  "S3-5",  "S8-1",  "S11-1",
    "S11-2", "S11-3", "S11-4", "S11-5", "S12-1", "S12-2", "S12-3",
    "S12-4", "S12-5", "S12-6", "S12-7", "S12-8", "S12-9", "S12-10",
    "S12-11", "S12-12", "S12-13", "S12-14"};

}  // namespace

TEST_CASE("builders are internally cross-checked and consistent") {
  CHECK(build_d1().size() == 81);
  CHECK(build_d1_pointed().size() == 81);
  CHECK(build_d2().size() == 729);
  CHECK(build_c().size() == 729);
  CHECK(build_loop(1).size() == 729);
  CHECK(build_nabla(2).size() == 729);
  CHECK(build_example_810vi().size() == 15);
  CHECK(build_nabla(1) == build_d2());
  CHECK_THROWS_AS(build_tau(3), MagmaError);
  CHECK_THROWS_AS(build_loop(0), MagmaError);
  CHECK_THROWS_AS(build_nabla(7), MagmaError);
  CHECK_THROWS_AS(build_quasimodule(-1), MagmaError);
}

TEST_CASE("pointwise maps are consistent with each other") {
  FiniteModule c = build_c();
  for (elem a : {0, 1, 27, 100, 333, 728}) {
    // xi = lambda + sigma coordinatewise
    CHECK(gallery_xi(a) == c.add(gallery_lambda(a), gallery_sigma(a)));
    // kappa and mu fix the kernel conditions used by the catalogue rows
    CHECK(gallery_kappa(0) == 0);
    CHECK(gallery_mu(0) == 0);
  }
  // theta is additive in the last slot and alternating in the first two
  for (elem a : {1, 30, 100})
    for (elem b : {2, 41, 200}) {
      CHECK(gallery_theta(a, b, c.add(a, b)) ==
            c.add(gallery_theta(a, b, a), gallery_theta(a, b, b)));
      CHECK(gallery_theta(a, a, b) == 0);
    }
}

TEST_CASE("catalogue lists every claim exactly once") {
  GalleryReport all = verify_paper("all");
  REQUIRE(all.rows.size() == kCatalog.size());
  std::set<std::string> seen;
  for (const GalleryRow& r : all.rows) {
    CAPTURE(r.claim);
    CHECK(kCatalog.count(r.claim) == 1);
    CHECK(seen.insert(r.claim).second);  // no duplicates
    CHECK(!r.statement.empty());
    CHECK((r.status == "pass" || r.status == "fail"));
    CHECK(r.status == "pass");
    CHECK(!r.witness.empty());
    CHECK(r.millis >= 0);
  }
  CHECK(all.all_pass());
  // JSON round-trips through a real parser with the fixed key set
  nlohmann::json j = nlohmann::json::parse(all.to_json());
  REQUIRE(j.is_array());
  REQUIRE(j.size() == kCatalog.size());
  for (const auto& row : j) {
    CHECK(row.size() == 5);
    for (const char* key : {"claim", "statement", "status", "witness", "millis"})
      CHECK(row.contains(key));
  }
  // compact form parses to the same document
  CHECK(nlohmann::json::parse(all.to_json(-1)) == j);
}

TEST_CASE("suites partition the catalogue") {
  GalleryReport s3 = verify_paper("section3");
  GalleryReport s11 = verify_paper("section11");
  for (const GalleryRow& r : s3.rows)
    CHECK((r.claim.rfind("S3-", 0) == 0 || r.claim.rfind("S8-", 0) == 0));
  CHECK(s3.rows.size() == 6);
  CHECK(s11.rows.size() == 5);
  CHECK(s3.all_pass());
  CHECK(s11.all_pass());
  CHECK_THROWS_AS(verify_paper("section9"), MagmaError);
  CHECK_THROWS_AS(verify_paper(""), MagmaError);
}

TEST_CASE("reports are deterministic modulo timing") {
  GalleryReport a = verify_paper("section3");
  GalleryReport b = verify_paper("section3");
  REQUIRE(a.rows.size() == b.rows.size());
  for (size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].claim == b.rows[i].claim);
    CHECK(a.rows[i].statement == b.rows[i].statement);
    CHECK(a.rows[i].status == b.rows[i].status);
    CHECK(a.rows[i].witness == b.rows[i].witness);
  }
}

TEST_CASE("an empty report does not claim success") {
  GalleryReport empty;
  CHECK(!empty.all_pass());
  GalleryRow bad{"X-1", "synthetic", "fail", "boom", 0.0};
  GalleryReport failing;
  failing.rows.push_back(bad);
  CHECK(!failing.all_pass());
  CHECK(nlohmann::json::parse(failing.to_json())[0]["status"] == "fail");
}
