#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cutgraph/errors.hpp"
#include "cutgraph/io.hpp"
#include "oracles.hpp"

using namespace cutgraph;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("cutgraph_io_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace

TEST_CASE("kernel round trip") {
  TempDir tmp;
  RngStream rng(81);
  for (int trial = 0; trial < 10; ++trial) {
    const StepKernel k =
        oracles::random_kernel(1 + rng.below(6), 3.0, trial % 2 == 1, rng);
    const std::string path = tmp.file("k.json");
    save_kernel(k, path);
    const StepKernel back = load_kernel(path);
    CHECK(back.masses() == k.masses());
    CHECK(back.values() == k.values());
    CHECK(back.is_signed() == k.is_signed());
  }
  CHECK_THROWS_AS(load_kernel(tmp.file("missing.json")), ConfigError);

  std::ofstream bad(tmp.file("bad.json"));
  bad << "{\"masses\": [0.5, 0.5]}";
  bad.close();
  CHECK_THROWS_AS(load_kernel(tmp.file("bad.json")), ConfigError);
}

TEST_CASE("matrix round trips: dense, sparse, typed") {
  TempDir tmp;
  const WeightMatrix dense =
      WeightMatrix::dense(3, {0, 1.5, 0, 1.5, 0, 2, 0, 2, 0});
  save_matrix(dense, tmp.file("dense.json"));
  const WeightMatrix d = load_matrix(tmp.file("dense.json"));
  CHECK_FALSE(d.typed());
  CHECK(d.entries() == dense.entries());

  save_matrix(dense, tmp.file("sparse.json"), /*sparse=*/true);
  const WeightMatrix s = load_matrix(tmp.file("sparse.json"));
  CHECK(s.entries() == dense.entries());

  RngStream rng(82);
  const WeightMatrix typed =
      sample_iid_types(StepKernel::constant(2.0, 3), 40, rng);
  save_matrix(typed, tmp.file("typed.json"));
  const WeightMatrix t = load_matrix(tmp.file("typed.json"));
  CHECK(t.typed());
  CHECK(t.types() == typed.types());
  CHECK(t.table().values() == typed.table().values());

  // Sparse triples must have i <= j.
  std::ofstream bad(tmp.file("badsp.json"));
  bad << R"({"n": 3, "sparse": true, "entries": [[2, 1, 1.0]]})";
  bad.close();
  CHECK_THROWS_AS(load_matrix(tmp.file("badsp.json")), ConfigError);
}

TEST_CASE("graph file format") {
  TempDir tmp;
  RngStream rng(83);
  const SparseGraph g = oracles::random_graph(25, 0.2, rng);
  save_graph(g, tmp.file("g.txt"));
  const SparseGraph back = load_graph(tmp.file("g.txt"));
  CHECK(back.n == g.n);
  CHECK(back.edges == g.edges);
  CHECK_FALSE(back.multigraph);

  SparseGraph multi;
  multi.n = 3;
  multi.multigraph = true;
  multi.edges = {{0, 1}, {0, 1}, {1, 2}};
  save_graph(multi, tmp.file("m.txt"));
  const SparseGraph mback = load_graph(tmp.file("m.txt"));
  CHECK(mback.multigraph);
  CHECK(mback.edges == multi.edges);

  // Header and payload must agree.
  std::ofstream bad(tmp.file("bad.txt"));
  bad << "3 2\n0 1\n";
  bad.close();
  CHECK_THROWS_AS(load_graph(tmp.file("bad.txt")), ConfigError);
}

TEST_CASE("hypermatrix file format") {
  TempDir tmp;
  SparseHypermatrix h(8, 4);
  h.set({0, 3}, 1.25);
  h.set({1, 2, 5}, 0.5);
  h.set({2, 4, 6, 7}, 2.0);
  save_hypermatrix(h, tmp.file("h.txt"));
  const SparseHypermatrix back = load_hypermatrix(tmp.file("h.txt"));
  CHECK(back.size() == 8);
  CHECK(back.max_arity() == 4);
  CHECK(back.entries() == h.entries());

  std::ofstream bad(tmp.file("bad.txt"));
  bad << "4 3\n3 0 1\n";  // truncated tuple
  bad.close();
  CHECK_THROWS_AS(load_hypermatrix(tmp.file("bad.txt")), ConfigError);
}

TEST_CASE("hyperkernel round trip") {
  TempDir tmp;
  const HyperStepKernel k({0.25, 0.75},
                          {ArityKernel{2, {1, 2, 2, 0.5}},
                           ArityKernel{3, std::vector<double>(8, 0.125)}});
  save_hyperkernel(k, tmp.file("hk.json"));
  const HyperStepKernel back = load_hyperkernel(tmp.file("hk.json"));
  CHECK(back.masses() == k.masses());
  REQUIRE(back.layers().size() == 2);
  CHECK(back.layers()[0].values == k.layers()[0].values);
  CHECK(back.layers()[1].values == k.layers()[1].values);
}
