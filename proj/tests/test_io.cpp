#include <doctest.h>

#include <cmath>

#include "xnas/csv.hpp"
#include "xnas/manifest.hpp"
#include "xnas/rng.hpp"
#include "xnas/stats.hpp"

using namespace xnas;

TEST_CASE("format_number round-trips doubles with the shortest form") {
  CHECK(io::format_number(0.1) == "0.1");
  CHECK(io::format_number(1.0) == "1");
  CHECK(io::format_number(-2.5e-7) == "-2.5e-07");
  CHECK(std::stod(io::format_number(7.446594822118068e-4)) == 7.446594822118068e-4);
  CHECK(io::format_number(std::int64_t{7'500'000}) == "7500000");
}

TEST_CASE("manifest hash is stable and reflects content") {
  io::RunManifest m;
  m.subcommand = "lr-plan";
  m.config = {{"epochs", 50}, {"validation_size", 25000}};
  m.seed = 0;
  m.version = io::kToolVersion;
  m.outputs = {"out.csv"};
  const auto h1 = m.hash();
  CHECK(h1 == io::RunManifest{m}.hash());
  m.config["epochs"] = 51;
  CHECK(m.hash() != h1);
  CHECK(io::hash_hex(0xdeadbeefULL) == "00000000deadbeef");
}

TEST_CASE("manifest path replaces the extension") {
  CHECK(io::manifest_path_for("out/run.csv") == "out/run.manifest.json");
  CHECK(io::manifest_path_for("run") == "run.manifest.json");
  CHECK(io::manifest_path_for("a.b/run") == "a.b/run.manifest.json");
}

TEST_CASE("rng streams are reproducible and well distributed") {
  rng::Stream a(123), b(123), c(124);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  bool differs = false;
  for (int i = 0; i < 10; ++i) differs |= a.next_u64() != c.next_u64();
  CHECK(differs);

  rng::Stream g(5);
  double mean = 0.0, var = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = g.gaussian();
    mean += x;
    var += x * x;
  }
  mean /= n;
  var = var / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);

  CHECK(rng::derive(1, "tag") == rng::derive(1, "tag"));
  CHECK(rng::derive(1, "tag") != rng::derive(1, "gat"));
  CHECK(rng::derive(1, 0.5) != rng::derive(1, 0.25));
}

TEST_CASE("spearman handles monotone, reversed and tied data") {
  CHECK(stats::spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{10, 20, 30, 40}) ==
        doctest::Approx(1.0));
  CHECK(stats::spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{9, 7, 5, 3}) ==
        doctest::Approx(-1.0));
  CHECK(stats::spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 1, 2, 2}) ==
        doctest::Approx(0.8944271909999159).epsilon(1e-9));
}

TEST_CASE("fit_scale_residual prefers the generating shape") {
  std::vector<double> g1, g2, y;
  for (int n : {2, 4, 8, 16, 32}) {
    g1.push_back(std::sqrt(std::log(n)));
    g2.push_back(std::sqrt(static_cast<double>(n)));
    y.push_back(3.0 * std::sqrt(std::log(n)));
  }
  CHECK(stats::fit_scale_residual(y, g1) < 1e-20);
  CHECK(stats::fit_scale_residual(y, g2) > 1e-3);
}

TEST_CASE("std_error degenerate cases") {
  CHECK(stats::std_error(std::vector<double>{1.0}) == 0.0);
  CHECK(stats::std_error(std::vector<double>{2.0, 2.0, 2.0}) == 0.0);
}
