#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gsnn/kg.hpp"
#include "gsnn/protocols.hpp"
#include "gsnn/query.hpp"

using namespace gsnn;
namespace fs = std::filesystem;

namespace {

SimParams graph_params() {
  SimParams p;
  p.n_neurons = 1000;
  p.lambda = 0.05;
  p.window_ms = 10;
  p.repetitions = 8;
  return p;
}

Network encoded_arb() {
  Network net(graph_params());
  bind_symbols({{"a", "r", "b"}, {"ctl", "r2", "ctl2"}}, net);
  encode_triple(net, "a", "r", "b", EncodingProtocol::from(net.params));
  return net;
}

}  // namespace

TEST_CASE("query on an untrained network has an empty answer set") {
  Network net(graph_params());
  bind_symbols({{"a", "r", "b"}}, net);
  QueryResult res = query(net, "a", "r", net.params.theta);
  CHECK(res.answers.empty());
}

TEST_CASE("query is side-effect-free on weights, eligibility and state") {
  Network net = encoded_arb();
  auto syn_before = net.synapses.state_hash();
  Vec v_before = net.state.v;
  double clock_before = net.state.clock_ms;
  query(net, "a", "r", net.params.theta);
  CHECK(net.synapses.state_hash() == syn_before);
  CHECK(net.state.v == v_before);
  CHECK(net.state.clock_ms == clock_before);
}

TEST_CASE("repeated queries return identical results") {
  Network net = encoded_arb();
  QueryResult r1 = query(net, "a", "r", net.params.theta);
  QueryResult r2 = query(net, "a", "r", net.params.theta);
  REQUIRE(r1.candidates.size() == r2.candidates.size());
  for (std::size_t i = 0; i < r1.candidates.size(); ++i) {
    CHECK(r1.candidates[i].label == r2.candidates[i].label);
    CHECK(r1.candidates[i].peak_sim == r2.candidates[i].peak_sim);
  }
  CHECK(r1.answers == r2.answers);
}

TEST_CASE("unknown cue symbols are errors") {
  Network net = encoded_arb();
  CHECK_THROWS_AS(query(net, "ghost", "r", 0.5), ExperimentError);
  CHECK_THROWS_AS(verify_triple(net, "a", "r", "ghost", 0.5), ExperimentError);
}

TEST_CASE("candidates exclude the cue symbols and rank by peak similarity") {
  Network net = encoded_arb();
  QueryResult res = query(net, "a", "r", net.params.theta);
  for (const auto& c : res.candidates) {
    CHECK(c.label != "a");
    CHECK(c.label != "r");
  }
  for (std::size_t i = 1; i < res.candidates.size(); ++i)
    CHECK(res.candidates[i - 1].peak_sim >= res.candidates[i].peak_sim);
}

TEST_CASE("theta = 0 answers whenever any tail member fires: edge case") {
  Network net = encoded_arb();
  // With theta 0, even the faintest trace puts b in the answer set; the
  // trained pair drives b well above that.
  QueryResult res = query(net, "a", "r", 0.0);
  CHECK(res.contains_answer("b"));
}

TEST_CASE("exported trace files mirror the in-memory result") {
  Network net = encoded_arb();
  QueryResult res = query(net, "a", "r", net.params.theta);
  auto base = (fs::temp_directory_path() / "gsnn_trace_export").string();
  export_reasoning_trace(res, base + ".csv", base + ".json");

  std::ifstream csv(base + ".csv");
  REQUIRE(csv.good());
  std::string header;
  std::getline(csv, header);
  CHECK(header == "time_ms,label,sim,sim_smoothed");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == res.trace.rows() * res.trace.columns().size());

  std::ifstream js(base + ".json");
  std::stringstream buf;
  buf << js.rdbuf();
  CHECK(buf.str().find("\"head\"") != std::string::npos);
  fs::remove(base + ".csv");
  fs::remove(base + ".json");
}

TEST_CASE("empty-result export writes a header-only CSV") {
  QueryResult res;
  auto base = (fs::temp_directory_path() / "gsnn_trace_empty").string();
  export_reasoning_trace(res, base + ".csv", base + ".json");
  std::ifstream csv(base + ".csv");
  std::string header, rest;
  std::getline(csv, header);
  CHECK(header == "time_ms,label,sim");
  CHECK(!std::getline(csv, rest));
  fs::remove(base + ".csv");
  fs::remove(base + ".json");
}
