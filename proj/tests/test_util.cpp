#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "aicon/util/config.hpp"
#include "aicon/util/csv.hpp"
#include "aicon/util/manifest.hpp"
#include "aicon/util/pose.hpp"
#include "aicon/util/rng.hpp"

using namespace aicon;

TEST_CASE("rng streams are deterministic and platform-pinned") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  // Frozen oracle values: first draws of seed 7 computed once and pinned so a
  // library or platform change cannot silently shift every benchmark.
  Rng c(7);
  CHECK(c.bounded(1000) == 15);
  CHECK(c.uniform_int(10, 20) == 17);
  Rng d(7);
  double u = d.uniform01();
  CHECK(u == doctest::Approx(0.754385304153).epsilon(1e-9));
}

TEST_CASE("rng bounded is unbiased over small ranges") {
  Rng r(1);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 50000; ++i) ++counts[r.bounded(5)];
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}

TEST_CASE("rng gaussian moments") {
  Rng r(3);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double x = r.gaussian();
    sum += x;
    sq += x * x;
  }
  CHECK(sum / n == doctest::Approx(0.0).epsilon(0.02));
  CHECK(sq / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("rng mix decorrelates adjacent cells") {
  CHECK(Rng::mix(0, 0) != Rng::mix(0, 1));
  CHECK(Rng::mix(0, 0) != Rng::mix(1, 0));
  CHECK(Rng::mix(5, 9) == Rng::mix(5, 9));
}

TEST_CASE("config parses sections, arrays, strings") {
  Config cfg = Config::from_string(
      "# comment\n"
      "[world]\n"
      "p = [0.8, 0.0, 0.1]\n"
      "phi = 3.14\n"
      "name = \"main\"\n"
      "[engine]\n"
      "max_depth = 6\n"
      "enabled = true\n");
  CHECK(cfg.get_double("world.phi", 0) == doctest::Approx(3.14));
  CHECK(cfg.get_int("engine.max_depth", 0) == 6);
  CHECK(cfg.get_bool("engine.enabled", false));
  CHECK(cfg.get_string("world.name", "") == "main");
  auto arr = cfg.get_array("world.p", {});
  REQUIRE(arr.size() == 3);
  CHECK(arr[0] == doctest::Approx(0.8));
  CHECK(cfg.get_double("missing.key", 9.5) == 9.5);
  CHECK_THROWS_AS(cfg.get_double("missing.key"), ConfigError);
}

TEST_CASE("config canonical form is stable and hash depends on content") {
  Config a = Config::from_string("[s]\nb = 2\na = 1\n");
  Config b = Config::from_string("[s]\na = 1\nb = 2\n");
  CHECK(a.canonical() == b.canonical());
  CHECK(a.hash() == b.hash());
  Config c = Config::from_string("[s]\na = 1\nb = 3\n");
  CHECK(a.hash() != c.hash());
}

TEST_CASE("fmt_num is locale-free and round-trip stable") {
  CHECK(fmt_num(0.5) == "0.5");
  CHECK(fmt_num(1.0) == "1");
  CHECK(fmt_num(1e-9) == fmt_num(1e-9));
  double v = 0.123456789012345;
  CHECK(std::stod(fmt_num(v)) == doctest::Approx(v).epsilon(1e-11));
}

TEST_CASE("csv write and read round trip") {
  std::string path = "test_util_tmp.csv";
  {
    CsvWriter w(path, {"a", "b"});
    w.row({"1", "x"});
    w.row({"2", "y"});
  }
  CsvTable t = CsvTable::read(path);
  REQUIRE(t.header.size() == 2);
  CHECK(t.col("b") == 1);
  CHECK(t.col("zz") == -1);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][1] == "y");
  std::remove(path.c_str());
}

TEST_CASE("pose compose and inverse") {
  Rng r(11);
  for (int i = 0; i < 20; ++i) {
    Eigen::Matrix<double, 6, 1> v;
    for (int k = 0; k < 6; ++k) v(k) = r.uniform(-1, 1);
    Pose p = pose_from_local(v);
    Pose id = p.compose(p.inverse());
    CHECK(id.t.norm() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(id.rot.w()) == doctest::Approx(1.0).epsilon(1e-12));
    Eigen::Vector3d x(0.3, -0.2, 0.9);
    CHECK((p.inverse().apply(p.apply(x)) - x).norm() ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("spherical direction is unit and jacobian matches FD") {
  Rng r(12);
  for (int i = 0; i < 50; ++i) {
    double phi = r.uniform(-3, 3), theta = r.uniform(0.1, 3.0);
    CHECK(spherical_dir(phi, theta).norm() == doctest::Approx(1.0));
    auto J = spherical_dir_jacobian(phi, theta);
    double h = 1e-6;
    Eigen::Vector3d dphi =
        (spherical_dir(phi + h, theta) - spherical_dir(phi - h, theta)) /
        (2 * h);
    Eigen::Vector3d dtheta =
        (spherical_dir(phi, theta + h) - spherical_dir(phi, theta - h)) /
        (2 * h);
    CHECK((J.col(0) - dphi).norm() < 1e-8);
    CHECK((J.col(1) - dtheta).norm() < 1e-8);
  }
}

TEST_CASE("manifest writes valid json atomically") {
  RunManifest m;
  m.command_line = "aicon test";
  m.seeds = {1, 2};
  m.started_at = iso8601_now();
  m.finished_at = iso8601_now();
  m.outputs = {"out.csv"};
  std::string path = "test_manifest_tmp.json";
  m.write(path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("\"command_line\"") != std::string::npos);
  CHECK(text.find("aicon test") != std::string::npos);
  std::remove(path.c_str());
}
