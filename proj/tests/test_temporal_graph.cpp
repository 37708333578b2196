#include "doctest.h"

#include <unistd.h>

#include "evotrack/errors.hpp"
#include "evotrack/rng.hpp"
#include "evotrack/temporal_graph.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace evotrack;
using testutil::TempDir;

TEST_SUITE("temporal_graph") {

TEST_CASE("two snapshot files with one edge each") {
  TempDir dir("load");
  dir.write_file("t1.edges", "a b\n");
  dir.write_file("t2.edges", "a b\n");
  LoadStats stats;
  const TemporalNetwork net = load_snapshots(dir.path(), "t{}.edges", &stats);
  REQUIRE(net.snapshot_count() == 2);
  for (int t = 1; t <= 2; ++t) {
    CHECK(net.snapshot_at(t).node_count() == 2);
    CHECK(net.snapshot_at(t).edge_count() == 1);
  }
  const NodeId a = *net.interner().find("a");
  const NodeId b = *net.interner().find("b");
  CHECK(net.snapshot_at(1).has_edge(a, b));
  CHECK(net.snapshot_at(1).has_edge(b, a));
  CHECK(stats.files == std::vector<std::string>{"t1.edges", "t2.edges"});
}

TEST_CASE("self-loop is dropped with a counted warning") {
  TempDir dir("selfloop");
  dir.write_file("t1.edges", "a a\n");
  dir.write_file("t2.edges", "a b\n");
  LoadStats stats;
  const TemporalNetwork net = load_snapshots(dir.path(), "t{}.edges", &stats);
  CHECK(net.snapshot_at(1).node_count() == 1);
  CHECK(net.snapshot_at(1).edge_count() == 0);
  CHECK(stats.self_loops_dropped == 1);
}

TEST_CASE("duplicate edges are dropped with a counted warning") {
  TempDir dir("dup");
  dir.write_file("t1.edges", "a b\nb a\na b\n");
  dir.write_file("t2.edges", "a b\n");
  LoadStats stats;
  const TemporalNetwork net = load_snapshots(dir.path(), "t{}.edges", &stats);
  CHECK(net.snapshot_at(1).edge_count() == 1);
  CHECK(stats.duplicate_edges_dropped == 2);
}

TEST_CASE("missing ordinal is a hard error naming the gap") {
  TempDir dir("gap");
  dir.write_file("t1.edges", "a b\n");
  dir.write_file("t3.edges", "a b\n");
  CHECK_THROWS_WITH_AS(load_snapshots(dir.path(), "t{}.edges"),
                       doctest::Contains("gap at ordinal 2"), DataError);
}

TEST_CASE("malformed line reports file and line number") {
  TempDir dir("badline");
  dir.write_file("t1.edges", "a b\nx y z\n");
  dir.write_file("t2.edges", "a b\n");
  CHECK_THROWS_WITH_AS(load_snapshots(dir.path(), "t{}.edges"), doctest::Contains("line 2"),
                       DataError);
}

TEST_CASE("single-token lines declare isolated nodes; comments ignored") {
  TempDir dir("isolate");
  dir.write_file("t1.edges", "# header\nlonely\na b\n");
  dir.write_file("t2.edges", "a b\n");
  const TemporalNetwork net = load_snapshots(dir.path(), "t{}.edges");
  CHECK(net.snapshot_at(1).node_count() == 3);
  CHECK(net.snapshot_at(1).has_node(*net.interner().find("lonely")));
  CHECK(net.snapshot_at(1).neighbors(*net.interner().find("lonely")).empty());
}

TEST_CASE("fewer than two snapshots is an error") {
  TempDir dir("single");
  dir.write_file("t1.edges", "a b\n");
  CHECK_THROWS_AS(load_snapshots(dir.path(), "t{}.edges"), DataError);
}

TEST_CASE("ordinals may start anywhere but must be consecutive") {
  TempDir dir("offset");
  dir.write_file("snap7.edges", "a b\n");
  dir.write_file("snap8.edges", "b c\n");
  const TemporalNetwork net = load_snapshots(dir.path(), "snap{}.edges");
  REQUIRE(net.snapshot_count() == 2);
  CHECK(net.snapshot_at(1).timestamp_index() == 1);
  CHECK(net.snapshot_at(2).timestamp_index() == 2);
}

TEST_CASE("reloading the same directory is deterministic") {
  TempDir dir("determinism");
  dir.write_file("t1.edges", "alpha beta\ngamma delta\n");
  dir.write_file("t2.edges", "beta gamma\nalpha delta\n");
  const TemporalNetwork first = load_snapshots(dir.path(), "t{}.edges");
  const TemporalNetwork second = load_snapshots(dir.path(), "t{}.edges");
  REQUIRE(first.interner().size() == second.interner().size());
  for (NodeId id = 0; id < first.interner().size(); ++id)
    CHECK(first.interner().token(id) == second.interner().token(id));
  for (int t = 1; t <= 2; ++t) {
    CHECK(first.snapshot_at(t).nodes() == second.snapshot_at(t).nodes());
    for (NodeId v : first.snapshot_at(t).nodes())
      CHECK(first.snapshot_at(t).neighbors(v) == second.snapshot_at(t).neighbors(v));
  }
}

TEST_CASE("degree_within on a triangle") {
  const Snapshot snap = oracles::make_snapshot(1, {{1, 2}, {2, 3}, {1, 3}});
  const std::vector<NodeId> all{1, 2, 3};
  CHECK(degree_within(all, snap, 1) == 2);
  CHECK(degree_within(all, snap, 2) == 2);
  CHECK(degree_within(all, snap, 3) == 2);
}

TEST_CASE("degree_within: isolated node scores zero") {
  const Snapshot snap = oracles::make_snapshot(1, {{1, 2}}, {5});
  CHECK(degree_within({1, 2, 5}, snap, 5) == 0);
}

TEST_CASE("degree_within restricted to a subgraph excludes outside edges") {
  const Snapshot snap = oracles::make_snapshot(1, {{1, 2}, {2, 3}});
  CHECK(degree_within({1, 2}, snap, 2) == 1);
}

TEST_CASE("degree_within rejects a node outside the subgraph") {
  const Snapshot snap = oracles::make_snapshot(1, {{1, 2}, {2, 3}});
  CHECK_THROWS_AS(degree_within({1, 2}, snap, 3), std::invalid_argument);
}

TEST_CASE("degree sum equals twice the edge count") {
  Rng rng(42);
  for (int round = 0; round < 20; ++round) {
    const Snapshot snap = oracles::random_er_snapshot(1, 25, 0.3, rng);
    long total = 0;
    for (NodeId v : snap.nodes()) total += degree_within(snap.nodes(), snap, v);
    CHECK(total == 2 * static_cast<long>(snap.edge_count()));
  }
}

TEST_CASE("network manifest records counts per snapshot") {
  TempDir dir("manifest");
  dir.write_file("t1.edges", "a b\nb c\n");
  dir.write_file("t2.edges", "a b\n");
  LoadStats stats;
  const TemporalNetwork net = load_snapshots(dir.path(), "t{}.edges", &stats);
  const std::string json = network_manifest_json(net, stats);
  CHECK(json.find("\"t1.edges\"") != std::string::npos);
  CHECK(json.find("\"nodes\": 3") != std::string::npos);
  CHECK(json.find("\"edges\": 2") != std::string::npos);
}

}  // TEST_SUITE
