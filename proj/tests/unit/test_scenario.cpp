#include <fstream>
#include <regex>
#include <sstream>

#include <gtest/gtest.h>

#include "orbitedge/errors.hpp"
#include "orbitedge/experiments.hpp"
#include "orbitedge/scenario.hpp"

using namespace orbitedge;
using namespace orbitedge::scenario;

namespace {

const std::string kDir = std::string(ORBITEDGE_DATA_DIR) + "/scenarios";
const std::string kBaseline = kDir + "/worldview3_baseline.yaml";

std::string baseline_text() {
  std::ifstream in(kBaseline);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> problems_of(const std::string& text) {
  try {
    parse_scenario(text, kDir, "case.yaml");
  } catch (const ValidationError& e) {
    return e.problems();
  }
  return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& p : v)
    if (p.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST(Scenario, BaselineLoadsReferenceSettings) {
  const auto s = load_scenario(kBaseline);
  EXPECT_EQ(s.constellation.n_sats_edge, 23);
  EXPECT_DOUBLE_EQ(s.constellation.altitude_e_km, 617.0);
  EXPECT_DOUBLE_EQ(s.agility.p_man_w, 2.0);
  EXPECT_DOUBLE_EQ(s.agility.e_max_j, 1000.0);
  EXPECT_DOUBLE_EQ(s.agility.prc_s, 10.0);
  EXPECT_DOUBLE_EQ(s.agility.gsd_nadir, 0.31);
  EXPECT_EQ(s.frame.n_img, 2601);
  EXPECT_DOUBLE_EQ(s.frame.img_bits, 788513.0);
  EXPECT_DOUBLE_EQ(s.workload.rho, 2346.0);
  EXPECT_DOUBLE_EQ(s.link.r_isl_bps, 10e9);
  EXPECT_DOUBLE_EQ(s.link.g_dl_db, 66.33);
  EXPECT_EQ(s.link.modcods.size(), 66u);
  EXPECT_EQ(s.stations.stations.size(), 26u);
  EXPECT_DOUBLE_EQ(s.turbulence.threshold, 2e-14);
  EXPECT_EQ(s.platform(s.edge_platform).id, "jetson_agx");
}

TEST(Scenario, RoundTrip) {
  const auto s = load_scenario(kBaseline);
  const std::string text = save_scenario(s);
  const auto back = parse_scenario(text, kDir, "saved.yaml");
  EXPECT_EQ(save_scenario(back), text);
  EXPECT_EQ(back.seed, s.seed);
  EXPECT_EQ(back.experiments.observe_target_counts, s.experiments.observe_target_counts);
  EXPECT_EQ(back.link.modcods.size(), s.link.modcods.size());
}

TEST(Scenario, RhoBelowOneRejected) {
  const auto text = std::regex_replace(baseline_text(), std::regex("rho: 2346"), "rho: 0.5");
  const auto p = problems_of(text);
  ASSERT_FALSE(p.empty());
  EXPECT_TRUE(mentions(p, "workload.rho")) << p.front();
}

TEST(Scenario, MissingModcodFileNamed) {
  const auto text =
      std::regex_replace(baseline_text(), std::regex("modcod_file: \\.\\./dvbs2x_modcod.csv"), "modcod_file: nope.csv");
  const auto p = problems_of(text);
  EXPECT_TRUE(mentions(p, "nope.csv"));
  // Shannon mode does not read the table.
  const auto shannon = std::regex_replace(text, std::regex("threshold_mode: table"), "threshold_mode: shannon");
  EXPECT_TRUE(problems_of(shannon).empty());
}

TEST(Scenario, UnknownKeysAndBadTypesCollected) {
  auto text = std::regex_replace(baseline_text(), std::regex("p_man_w: 2"), "p_man_w: two\n  spin_rate: 3");
  const auto p = problems_of(text);
  EXPECT_TRUE(mentions(p, "agility.p_man_w"));
  EXPECT_TRUE(mentions(p, "spin_rate"));
  EXPECT_GE(p.size(), 2u);
}

TEST(Scenario, SyntaxErrorCarriesLine) {
  const auto p = problems_of("name: x\nconstellation: [1, 2\n");
  ASSERT_FALSE(p.empty());
  EXPECT_TRUE(std::regex_search(p.front(), std::regex(":[0-9]+:[0-9]+"))) << p.front();
}

TEST(Scenario, StationsCsv) {
  const auto gs = load_ground_stations_csv(std::string(ORBITEDGE_DATA_DIR) + "/ksat_stations.csv");
  ASSERT_EQ(gs.stations.size(), 26u);
  for (const auto& s : gs.stations) {
    EXPECT_GE(s.lat_deg, -90.0);
    EXPECT_LE(s.lat_deg, 90.0);
  }
  EXPECT_THROW(load_ground_stations_csv("/no/such/file.csv"), ConfigError);
}

TEST(Scenario, OverridesApply) {
  auto s = load_scenario(kBaseline);
  experiments::Overrides o;
  o.seed = 5;
  o.solver = obs::SolverKind::kFifo;
  o.replicas = 7;
  const auto t = experiments::apply_overrides(s, o);
  EXPECT_EQ(t.seed, 5u);
  EXPECT_EQ(t.observe.solver, obs::SolverKind::kFifo);
  EXPECT_EQ(t.pipeline.replicas, 7);
  o.replicas = 0;
  EXPECT_THROW(experiments::apply_overrides(s, o), ValidationError);
}

TEST(Scenario, ExperimentNames) {
  for (auto e : {experiments::Experiment::kValidate, experiments::Experiment::kObserve,
                 experiments::Experiment::kTurbulenceMc, experiments::Experiment::kCapacity,
                 experiments::Experiment::kPipeline, experiments::Experiment::kSweep})
    EXPECT_EQ(experiments::parse_experiment(experiments::to_string(e)), e);
  EXPECT_THROW(experiments::parse_experiment("dance"), ConfigError);
}
