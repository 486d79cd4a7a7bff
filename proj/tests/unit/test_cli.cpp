#include <gtest/gtest.h>

#include <sstream>

#include "commands.hpp"
#include "nvbeat/errors.hpp"
#include "run_config.hpp"

using namespace nvbeat;
using namespace nvbeat::cli;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.cfg");
}

template <typename Fn>
std::string error_of(Fn fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

std::vector<std::vector<std::string>> rows(const std::string& csv) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    out.push_back(cells);
  }
  return out;
}

Context reference_context() {
  Context ctx;
  ctx.config = load_config(NVBEAT_DATA_DIR "/reference.cfg");
  return ctx;
}

}  // namespace

TEST(RunConfig, EmitParseRoundTrip) {
  const auto cfg = load_config(NVBEAT_DATA_DIR "/reference.cfg");
  const std::string text = emit_config(cfg);
  const auto again = parse(text);
  EXPECT_EQ(emit_config(again), text);
  EXPECT_EQ(config_digest(again), config_digest(cfg));
  EXPECT_EQ(config_digest(cfg).size(), 16u);
  EXPECT_DOUBLE_EQ(cfg.system.tensor.a, -90.3);
  EXPECT_FALSE(config_keys().empty());
}

TEST(RunConfig, DefaultsAndComments) {
  const auto cfg = parse("# comment\n\nfield.b = 12.5\n");
  EXPECT_DOUBLE_EQ(cfg.b, 12.5);
  EXPECT_DOUBLE_EQ(cfg.theta, 40.0);
  EXPECT_FALSE(cfg.pi_duration.has_value());
}

TEST(RunConfig, ErrorsNameKeyAndLine) {
  const std::string unknown = error_of([] { parse("field.b = 1\ntensor.a_xy = 3\n"); });
  EXPECT_NE(unknown.find("test.cfg:2"), std::string::npos) << unknown;
  EXPECT_NE(unknown.find("a_xy"), std::string::npos) << unknown;
  EXPECT_NE(error_of([] { parse("field.b = 1\nfield.b = 2\n"); }).find("field.b"), std::string::npos);
  EXPECT_NE(error_of([] { parse("field.b = abc\n"); }).find("field.b"), std::string::npos);
  EXPECT_THROW(parse("ramsey.tau_max = 0\n"), InvalidInput);
  EXPECT_THROW(parse("field.b = -1\n"), InvalidInput);
  EXPECT_THROW(load_config("/nonexistent.cfg"), InvalidInput);
}

TEST(RunConfig, LabFrameConversion) {
  const auto cfg = parse("field.frame = lab\nfield.theta = 30\nfield.phi = 0\nfield.nv_axis_theta = 30\n");
  const auto f = cfg.field();
  EXPECT_EQ(f.frame(), Frame::nv);
  EXPECT_NEAR(f.theta(), 0.0, 1e-9);
}

TEST(Commands, SpectrumAtSingleTransitionAxis) {
  auto ctx = reference_context();
  std::ostringstream out;
  cmd_spectrum(ctx, {true, 0.0}, out);
  EXPECT_EQ(out.str().rfind(csv_preamble(ctx.config), 0), 0u);
  const auto r = rows(out.str());
  ASSERT_GE(r.size(), 5u);
  EXPECT_EQ(r[0][0], "frequency_mhz");
  double strongest = 0.0, weakest = 1e9;
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (r[i][4] != "ms0" || r[i][5] != "ms_minus") continue;
    strongest = std::max(strongest, std::stod(r[i][1]));
    weakest = std::min(weakest, std::stod(r[i][1]));
  }
  EXPECT_LT(weakest, 0.03 * strongest);
}

TEST(Commands, SpectrumZeroTensor) {
  Context ctx;
  ctx.config = parse("field.theta = 0\n");
  std::ostringstream out;
  cmd_spectrum(ctx, {}, out);
  std::set<long> freqs;
  for (std::size_t i = 1; i < rows(out.str()).size(); ++i) {
    freqs.insert(std::lround(std::stod(rows(out.str())[i][0]) * 1000));
  }
  const double d = 2870.0, g = 2.8025 * 40.3;
  EXPECT_EQ(freqs, (std::set<long>{std::lround((d - g) * 1000), std::lround((d + g) * 1000)}));
}

TEST(Commands, ZqScanShapes) {
  auto ctx = reference_context();
  std::ostringstream phi_out;
  cmd_zq_scan(ctx, {SweepAxis::phi, 0.0, 90.0, 90.0}, phi_out);
  auto r = rows(phi_out.str());
  ASSERT_EQ(r.size(), 3u);
  EXPECT_NEAR(std::stod(r[1][1]), 9.6, 0.1);
  EXPECT_NEAR(std::stod(r[2][1]), 6.2, 0.1);
  std::ostringstream theta_out;
  cmd_zq_scan(ctx, {SweepAxis::theta, 0.0, 90.0, 30.0}, theta_out);
  r = rows(theta_out.str());
  ASSERT_EQ(r.size(), 5u);
  const double top = std::stod(r[4][2]);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(std::stod(r[static_cast<std::size_t>(i + 1)][2]), top * std::sin(deg_to_rad(30.0 * i)), 1e-9);
  }
  std::ostringstream bad;
  EXPECT_THROW(cmd_zq_scan(ctx, {SweepAxis::phi, 0.0, 90.0, 0.0}, bad), InvalidInput);
  EXPECT_THROW(cmd_zq_scan(ctx, {SweepAxis::theta, 0.0, 190.0, 10.0}, bad), InvalidInput);
}

TEST(Commands, RabiSummaryAtSingleTransitionAxis) {
  auto ctx = reference_context();
  std::ostringstream out, info;
  ctx.info = &info;
  cmd_rabi(ctx, {true}, out);
  EXPECT_NE(info.str().find("14.3"), std::string::npos) << info.str();
  EXPECT_EQ(rows(out.str())[0][0], "t_us");
}

TEST(Commands, SensitivityAndPrincipal) {
  auto ctx = reference_context();
  std::ostringstream s;
  cmd_sensitivity(ctx, {true, 0.5, 0.2}, s);
  bool found = false;
  for (const auto& r : rows(s.str())) {
    if (r[0] == "a_zz") {
      EXPECT_NEAR(std::stod(r[1]), 0.35, 0.1);
      found = true;
    }
  }
  EXPECT_TRUE(found);
  std::ostringstream p;
  cmd_principal(ctx, p);
  EXPECT_NE(p.str().find("theta_p"), std::string::npos);
}

TEST(Commands, SynthIsSeeded) {
  auto ctx = reference_context();
  std::ostringstream a, b;
  cmd_synth(ctx, {}, a);
  cmd_synth(ctx, {}, b);
  EXPECT_EQ(a.str(), b.str());
  ctx.config.seed += 1;
  std::ostringstream c;
  cmd_synth(ctx, {}, c);
  EXPECT_NE(a.str(), c.str());
  std::ostringstream bad;
  EXPECT_THROW(cmd_synth(ctx, {{"sq-everywhere"}, 20.0}, bad), InvalidInput);
}

TEST(Commands, FitMissingFile) {
  auto ctx = reference_context();
  std::ostringstream out;
  EXPECT_THROW(cmd_fit(ctx, {"/nonexistent.csv", {}, 0, ""}, out), InvalidInput);
}
