#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>

#include "csbp/instance.hpp"
#include "test_helpers.hpp"

using namespace csbp;

namespace {

std::string temp_path(const char* name) {
  return std::string("csbp_test_") + name + ".txt";
}

}  // namespace

TEST_CASE("ensemble spec validation") {
  CHECK_THROWS_AS(EnsembleSpec::dense(10, 10), std::invalid_argument);   // m < n required
  CHECK_THROWS_AS(EnsembleSpec::regular(40, 20, 10, 19), std::invalid_argument);  // n*j != m*k
  CHECK_THROWS_AS(EnsembleSpec::regular(4, 2, 1, 2), std::invalid_argument);      // j >= 2
  CHECK_THROWS_AS(EnsembleSpec::regular(40, 4, 10, 100), std::invalid_argument);  // k <= n
  CHECK_NOTHROW(EnsembleSpec::regular(40, 20, 10, 20));
}

TEST_CASE("regular ensemble: exact degrees at (40, 20, 10, 20)") {
  const auto spec = EnsembleSpec::regular(40, 20, 10, 20);
  const auto F = gen_regular_sparse_matrix(spec, RngSeed{1, 2});
  CHECK(F.edge_count() == 400);
  for (int i = 0; i < 40; ++i) CHECK(F.column_degree(i) == 10);
  for (int mu = 0; mu < 20; ++mu) CHECK(F.row_degree(mu) == 20);

  // determinism within a build
  const auto F2 = gen_regular_sparse_matrix(spec, RngSeed{1, 2});
  REQUIRE(F2.edge_count() == F.edge_count());
  for (int e = 0; e < F.edge_count(); ++e) {
    CHECK(F.edge(e).row == F2.edge(e).row);
    CHECK(F.edge(e).col == F2.edge(e).col);
    CHECK(F.edge(e).value == F2.edge(e).value);
  }
}

TEST_CASE("regular ensemble: (3, 2, 2, 3) is forced to the complete bipartite graph") {
  const auto F = gen_regular_sparse_matrix(EnsembleSpec::regular(3, 2, 2, 3), RngSeed{7, 0});
  REQUIRE(F.edge_count() == 6);
  std::set<std::pair<int, int>> pairs;
  for (const Edge& e : F.edges()) pairs.insert({e.row, e.col});
  CHECK(pairs.size() == 6);  // every (row, col) pair exactly once
}

TEST_CASE("regular ensemble at production size: degree spike and centered values") {
  const auto spec = EnsembleSpec::regular(3200, 1600, 10, 20);
  const auto F = gen_regular_sparse_matrix(spec, RngSeed{11, 3});
  for (int i = 0; i < F.n(); ++i) REQUIRE(F.column_degree(i) == 10);
  for (int mu = 0; mu < F.m(); ++mu) REQUIRE(F.row_degree(mu) == 20);
  double mean = 0.0;
  for (const Edge& e : F.edges()) mean += e.value;
  mean /= F.edge_count();
  CHECK(std::abs(mean) <= 4.0 / std::sqrt(32000.0));
}

TEST_CASE("dense ensemble: determinism, column norms, grand variance") {
  const auto spec = EnsembleSpec::dense(1000, 500);
  const auto F = gen_dense_matrix(spec, RngSeed{21, 0});
  const auto F2 = gen_dense_matrix(spec, RngSeed{21, 0});
  CHECK((F.values - F2.values).lpNorm<Eigen::Infinity>() == 0.0);

  double norm_mean = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double sq = F.values.col(i).squaredNorm();
    CHECK(std::abs(sq - 0.5) <= 0.15);  // concentrates near alpha
    norm_mean += sq;
  }
  CHECK(std::abs(norm_mean / 1000.0 - 0.5) <= 0.01);

  const double var = F.values.squaredNorm() / (1000.0 * 500.0);
  CHECK(var == doctest::Approx(1.0 / 1000.0).epsilon(0.10));
}

TEST_CASE("signal generation density") {
  const auto zero = gen_signal(100, 0.0, RngSeed{5, 5});
  CHECK(zero.values.lpNorm<Eigen::Infinity>() == 0.0);

  const auto full = gen_signal(10000, 1.0, RngSeed{5, 6});
  int zeros = 0;
  for (int i = 0; i < full.values.size(); ++i)
    if (full.values[i] == 0.0) ++zeros;
  CHECK(zeros == 0);

  const int n = 100000;
  const auto x = gen_signal(n, 0.2, RngSeed{5, 7});
  int nnz = 0;
  for (int i = 0; i < n; ++i)
    if (x.values[i] != 0.0) ++nnz;
  const double frac = static_cast<double>(nnz) / n;
  CHECK(std::abs(frac - 0.2) <= 4.0 * std::sqrt(0.2 * 0.8 / n));
  CHECK(x.density == 0.2);
}

TEST_CASE("measure: hand values and zero signal") {
  DenseMeasurementMatrix F;
  F.values.resize(1, 2);
  F.values << 1.0, 2.0;
  SignalVector x;
  x.values.resize(2);
  x.values << 3.0, -1.0;
  CHECK(measure(F, x).values[0] == doctest::Approx(1.0));

  SignalVector z;
  z.values = Eigen::VectorXd::Zero(2);
  CHECK(measure(F, z).values.lpNorm<Eigen::Infinity>() == 0.0);

  SignalVector bad;
  bad.values = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(measure(F, bad), std::invalid_argument);
}

TEST_CASE("sparse measure agrees with the densified product") {
  RandomStream rng(RngSeed{31, 0});
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 20 + static_cast<int>(rng.below(91)) * 2;  // even, <= 200
    const int m = n / 2;
    const auto spec = EnsembleSpec::regular(n, m, 3, 6);
    const auto F = gen_regular_sparse_matrix(spec, rng);
    const auto x = gen_signal(n, 0.3, rng);
    const Eigen::VectorXd sparse_y = measure(F, x).values;
    const Eigen::VectorXd dense_y = F.to_dense() * x.values;
    const double scale = std::max(1.0, dense_y.lpNorm<Eigen::Infinity>());
    CHECK((sparse_y - dense_y).lpNorm<Eigen::Infinity>() <= 1e-12 * scale);
  }
}

TEST_CASE("instance file round trip is bit exact") {
  RandomStream rng(RngSeed{41, 0});
  Instance inst;
  const auto spec = EnsembleSpec::regular(12, 6, 3, 6);
  inst.matrix = gen_regular_sparse_matrix(spec, rng);
  inst.signal = gen_signal(12, 0.25, rng);
  inst.measurements = measure(inst.sparse(), inst.signal);

  const std::string path = temp_path("roundtrip_sparse");
  save_instance(path, inst);
  const Instance back = load_instance(path);
  REQUIRE(back.is_sparse());
  REQUIRE(back.sparse().edge_count() == inst.sparse().edge_count());
  for (int e = 0; e < inst.sparse().edge_count(); ++e) {
    CHECK(back.sparse().edge(e).row == inst.sparse().edge(e).row);
    CHECK(back.sparse().edge(e).col == inst.sparse().edge(e).col);
    CHECK(back.sparse().edge(e).value == inst.sparse().edge(e).value);
  }
  CHECK((back.signal.values - inst.signal.values).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(back.signal.density == inst.signal.density);
  CHECK((back.measurements.values - inst.measurements.values).lpNorm<Eigen::Infinity>() == 0.0);
  std::remove(path.c_str());

  Instance dinst;
  dinst.matrix = gen_dense_matrix(EnsembleSpec::dense(7, 3), rng);
  dinst.signal = gen_signal(7, 0.5, rng);
  dinst.measurements = measure(dinst.dense(), dinst.signal);
  const std::string dpath = temp_path("roundtrip_dense");
  save_instance(dpath, dinst);
  const Instance dback = load_instance(dpath);
  REQUIRE(!dback.is_sparse());
  CHECK((dback.dense().values - dinst.dense().values).lpNorm<Eigen::Infinity>() == 0.0);
  std::remove(dpath.c_str());
}

TEST_CASE("truncated instance file reports the offending line") {
  const std::string path = temp_path("truncated");
  {
    std::ofstream out(path);
    out << "sparse 3 2 4\n0 0 1.5\n0 1 -2\n";  // promises 4 edges, has 2
  }
  try {
    load_instance(path);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 4") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("hand-written sparse instance file parses to the exact edges") {
  const std::string path = temp_path("handwritten");
  {
    std::ofstream out(path);
    out << "sparse 3 2 4\n"
        << "0 0 1.5\n0 1 -2\n1 1 0.25\n1 2 3\n"
        << "signal 3 0.5\n0\n1.25\n0\n"
        << "measurements 2\n-2.5\n0.3125\n";
  }
  const Instance inst = load_instance(path);
  REQUIRE(inst.is_sparse());
  const auto& F = inst.sparse();
  CHECK(F.n() == 3);
  CHECK(F.m() == 2);
  REQUIRE(F.edge_count() == 4);
  CHECK(F.edge(0).row == 0);
  CHECK(F.edge(0).col == 0);
  CHECK(F.edge(0).value == 1.5);
  CHECK(F.edge(2).value == 0.25);
  CHECK(F.edge(3).row == 1);
  CHECK(F.edge(3).col == 2);
  CHECK(inst.signal.density == 0.5);
  CHECK(inst.measurements.values[1] == 0.3125);
  std::remove(path.c_str());
}

TEST_CASE("duplicate edges are rejected with a line number") {
  const std::string path = temp_path("dup");
  {
    std::ofstream out(path);
    out << "sparse 2 1 2\n0 0 1\n0 0 2\nsignal 2 0\n0\n0\nmeasurements 1\n0\n";
  }
  CHECK_THROWS_AS(load_instance(path), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("complete bipartite wrapper matches the dense matrix") {
  RandomStream rng(RngSeed{51, 0});
  const auto D = gen_dense_matrix(EnsembleSpec::dense(8, 4), rng);
  const auto S = complete_bipartite_from_dense(D);
  CHECK(S.edge_count() == 32);
  for (int i = 0; i < 8; ++i) CHECK(S.column_degree(i) == 4);
  for (int mu = 0; mu < 4; ++mu) CHECK(S.row_degree(mu) == 8);
  CHECK((S.to_dense() - D.values).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("pairing helpers reject inconsistent degree requests") {
  RandomStream rng(RngSeed{61, 0});
  CHECK_THROWS_AS(draw_regular_pairing(3, 2, 2, 2, rng), std::invalid_argument);
}
