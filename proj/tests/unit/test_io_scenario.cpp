#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

#include "hema/io.hpp"
#include "hema/scenario.hpp"
#include "hema/synthetic.hpp"
#include "hema/units.hpp"

using namespace hema;
namespace fs = std::filesystem;

namespace {

const char* kMinimal =
    "battery.U_V = 750\n"
    "battery.R_ohm = 0.01\n"
    "battery.E_min_MJ = 221\n"
    "battery.E_max_MJ = 939\n"
    "limits.p_gt_min_MW = 0\n"
    "limits.p_gt_max_MW = 5\n"
    "limits.p_em_min_MW = 0\n"
    "limits.p_em_max_MW = 2\n"
    "mission.m0_kg = 42000\n"
    "mission.dry_mass_kg = 34000\n";

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::InvalidArgument;
}

fs::path temp_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("hema_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(FlightPlanCsv, RoundTrip) {
  const auto plan = synthetic::default_flight_plan();
  const auto back = io::parse_flight_plan(io::format_flight_plan(plan));
  ASSERT_EQ(back.steps.size(), plan.steps.size());
  EXPECT_DOUBLE_EQ(back.delta, plan.delta);
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    EXPECT_DOUBLE_EQ(back.steps[i].h, plan.steps[i].h);
    EXPECT_DOUBLE_EQ(back.steps[i].v, plan.steps[i].v);
    EXPECT_DOUBLE_EQ(back.steps[i].gamma, plan.steps[i].gamma);
  }
}

TEST(FlightPlanCsv, GammaDerivedWhenAbsent) {
  const auto plan = io::parse_flight_plan("t_s,h_m,v_mps\n0,0,100\n10,50,100\n20,50,100\n");
  EXPECT_NEAR(plan.steps[0].gamma, std::asin(0.05), 1e-15);
  EXPECT_DOUBLE_EQ(plan.steps[1].gamma, 0.0);
}

TEST(FlightPlanCsv, Errors) {
  EXPECT_EQ(kind_of([] { io::parse_flight_plan("t_s,h_m,v_mps\n0,0,100\n10,0,100\n25,0,100\n"); }), ErrorKind::Config);
  EXPECT_EQ(kind_of([] { io::parse_flight_plan("t_s,h_m\n0,0\n10,0\n"); }), ErrorKind::Config);
  EXPECT_EQ(kind_of([] { io::parse_flight_plan("t_s,h_m,v_mps\n0,0,abc\n10,0,100\n"); }), ErrorKind::Config);
  EXPECT_EQ(kind_of([] { io::parse_flight_plan("t_s,h_m,v_mps\n0,0,0\n10,0,100\n"); }), ErrorKind::Config);
  EXPECT_EQ(kind_of([] { io::load_flight_plan("/nonexistent/plan.csv"); }), ErrorKind::Io);
}

TEST(FlightPlanCsv, ResampleKeepsEndpoints) {
  const auto plan = synthetic::default_flight_plan();
  const auto coarse = io::resample(plan, 20.0);
  EXPECT_EQ(coarse.stages(), 180u);
  EXPECT_DOUBLE_EQ(coarse.steps.back().h, plan.steps.back().h);
  EXPECT_DOUBLE_EQ(coarse.steps[30].h, plan.steps[60].h);
  EXPECT_EQ(kind_of([&] { io::resample(plan, 7.0); }), ErrorKind::Config);
}

TEST(MapsCsv, RoundTrip) {
  const auto fan = synthetic::fan_map();
  const auto f2 = io::parse_fan_map(io::format_fan_map(fan));
  EXPECT_EQ(f2.omega, fan.omega);
  EXPECT_EQ(f2.powers.size(), fan.powers.size());
  const auto tab = synthetic::coeff_table();
  const auto t2 = io::parse_coeff_table(io::format_coeff_table(tab));
  ASSERT_EQ(t2.rows.size(), tab.rows.size());
  EXPECT_DOUBLE_EQ(t2.rows[3].loss.kappa2, tab.rows[3].loss.kappa2);
  EXPECT_DOUBLE_EQ(t2.rows[3].fuel.beta1, tab.rows[3].fuel.beta1);
}

TEST(MapsCsv, Errors) {
  EXPECT_EQ(kind_of([] { io::parse_fan_map("h_m,p_drv_MW,Omega\n0,0,1\n0,1,2\n1000,0,1\n"); }), ErrorKind::Config);
  EXPECT_EQ(kind_of([] { io::parse_fan_map("h_m,p_drv_MW,Omega\n0,0,2\n0,1,1\n"); }), ErrorKind::Config);
  EXPECT_EQ(kind_of([] {
              io::parse_coeff_table("omega_radps,kappa2,kappa1,kappa0,beta2,beta1,beta0\n100,0,1,0,0,-1,0\n");
            }),
            ErrorKind::Config);
  EXPECT_EQ(kind_of([] {
              io::parse_coeff_table("omega_radps,kappa2,kappa1,kappa0,beta2,beta1,beta0\n100,0,1,0,0,1,0\n90,0,1,0,0,1,0\n");
            }),
            ErrorKind::Config);
}

TEST(Scenario, MinimalFileUsesSyntheticData) {
  const auto s = parse_scenario(kMinimal, "/tmp/minimal.scn");
  EXPECT_EQ(s.name, "minimal");
  EXPECT_EQ(s.plan.stages(), 360u);
  EXPECT_DOUBLE_EQ(s.params.battery.E_max, units::MJ(939.0));
  EXPECT_DOUBLE_EQ(s.params.limits.p_gt_max, units::MW(5.0));
  EXPECT_DOUBLE_EQ(s.params.E0, s.params.battery.E_max);
  EXPECT_DOUBLE_EQ(s.lambda, 0.0);
}

TEST(Scenario, UnitsConvertedAtIngestion) {
  const auto s = parse_scenario(std::string(kMinimal) + "strategy.lambda_kg_per_MJ = 0.1\n", "x.scn");
  EXPECT_DOUBLE_EQ(s.lambda, 1e-7);
}

TEST(Scenario, RejectsMalformedInput) {
  const std::string base = kMinimal;
  EXPECT_EQ(kind_of([&] { parse_scenario(base + "battery.colour = red\n", "x.scn"); }), ErrorKind::Config);
  EXPECT_EQ(kind_of([&] { parse_scenario(base + "battery.U_V = 800\n", "x.scn"); }), ErrorKind::Config);
  EXPECT_EQ(kind_of([&] { parse_scenario(base + "mission.E0_MJ =\n", "x.scn"); }), ErrorKind::Config);
  EXPECT_EQ(kind_of([&] { parse_scenario(base + "just words\n", "x.scn"); }), ErrorKind::Config);
  EXPECT_EQ(kind_of([&] { parse_scenario(base + "mission.E0_MJ = 1000\n", "x.scn"); }), ErrorKind::Config);
  EXPECT_EQ(kind_of([&] { parse_scenario(base + "aero.n_arrangements = 2.5\n", "x.scn"); }), ErrorKind::Config);
  EXPECT_EQ(kind_of([&] { parse_scenario(base + "strategy.lambda_kg_per_MJ = -1\n", "x.scn"); }), ErrorKind::Config);
  EXPECT_EQ(kind_of([&] { parse_scenario(base + "files.flight_plan = missing.csv\n", "/tmp/x.scn"); }), ErrorKind::Io);
  EXPECT_EQ(kind_of([] { parse_scenario("battery.U_V = 750\n", "x.scn"); }), ErrorKind::Config);
}

TEST(Scenario, DeltaOverrideResamples) {
  const auto s = parse_scenario(kMinimal, "x.scn", 20.0);
  EXPECT_DOUBLE_EQ(s.plan.delta, 20.0);
  EXPECT_EQ(s.plan.stages(), 180u);
}

TEST(Scenario, BundledScenariosLoad) {
  for (const char* name : {"default", "windmilling", "heavy_fuel", "saturated"}) {
    const auto s = load_scenario(name);
    EXPECT_EQ(s.name, name);
    EXPECT_EQ(s.plan.stages(), 360u);
  }
  EXPECT_DOUBLE_EQ(load_scenario("windmilling").params.limits.p_em_min, -units::MW(2.0));
  EXPECT_DOUBLE_EQ(load_scenario("saturated").params.limits.p_gt_max, units::MW(3.0));
  EXPECT_EQ(load_scenario("heavy_fuel").target_mass_change, 0.15);
  EXPECT_EQ(kind_of([] { load_scenario("no_such_scenario"); }), ErrorKind::Config);
}

TEST(Scenario, SearchPathFromEnvironment) {
  const auto dir = temp_dir("scenarios");
  io::write_file(dir / "mine.scn", std::string(kMinimal) + "scenario.name = mine\n");
  ::setenv("HEMA_SCENARIO_DIR", dir.c_str(), 1);
  EXPECT_EQ(load_scenario("mine").name, "mine");
  ::unsetenv("HEMA_SCENARIO_DIR");
  EXPECT_EQ(load_scenario((dir / "mine.scn").string()).name, "mine");
  fs::remove_all(dir);
}

TEST(Scenario, BundledDataMatchesGenerator) {
  const auto s = load_scenario("default");
  EXPECT_EQ(io::format_flight_plan(s.plan), io::format_flight_plan(synthetic::default_flight_plan()));
  EXPECT_EQ(io::format_coeff_table(s.params.maps.table), io::format_coeff_table(synthetic::coeff_table()));
  EXPECT_EQ(io::format_fan_map(s.params.maps.fan), io::format_fan_map(synthetic::fan_map()));
}
