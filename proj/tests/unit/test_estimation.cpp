#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include "frozen_values.hpp"
#include "nvbeat/dynamics.hpp"
#include "nvbeat/errors.hpp"
#include "nvbeat/estimation/axis_search.hpp"
#include "nvbeat/estimation/fitting.hpp"
#include "nvbeat/estimation/forward_model.hpp"
#include "nvbeat/estimation/scan_dataset.hpp"
#include "nvbeat/estimation/sensitivity.hpp"
#include "nvbeat/estimation/synthesis.hpp"
#include "nvbeat/spectrum.hpp"

using namespace nvbeat;

namespace {

const HyperfineTensor kReference{166.9, 122.9, 90.0, -90.3};
const FitParameters kTruth = FitParameters::from(kReference, 40.3);

SystemParams reference_system() {
  SystemParams p;
  p.tensor = kReference;
  return p;
}

std::vector<DesignPoint> standard_design() {
  auto d = sq_lines_design(frozen::kStaTheta, 0.0);
  const auto zq = zq_phi_sweep_design(40.0);
  d.insert(d.end(), zq.begin(), zq.end());
  return d;
}

FitParameters perturbed(const FitParameters& p, double factor) {
  FitParameters out = p;
  for (ParamId id : {ParamId::a_xx, ParamId::a_yy, ParamId::a_zz, ParamId::a}) {
    out.set(id, p.get(id) * factor);
  }
  return out;
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

}  // namespace

TEST(ScanDataset, CsvRoundTrip) {
  const auto ds = synthesize_dataset(SystemParams{}, kTruth, standard_design(), {0.2, 0.2, 0.0}, std::nullopt, 3);
  std::stringstream ss;
  write_dataset_csv(ss, ds);
  const auto back = read_dataset_csv(ss);
  ASSERT_EQ(back.points.size(), ds.points.size());
  for (std::size_t i = 0; i < ds.points.size(); ++i) {
    EXPECT_EQ(back.points[i].value, ds.points[i].value);
    EXPECT_EQ(back.points[i].sigma, ds.points[i].sigma);
    EXPECT_EQ(back.points[i].theta_deg, ds.points[i].theta_deg);
    EXPECT_EQ(back.points[i].kind, ds.points[i].kind);
    EXPECT_EQ(back.points[i].transition_index, ds.points[i].transition_index);
  }
  EXPECT_EQ(std::stod(format_double(0.1)), 0.1);
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(ScanDataset, ParseErrorsNameTheLine) {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_dataset_csv(in, "scan.csv");
  };
  const std::string header = std::string(kDatasetHeader) + "\n";
  EXPECT_NE(error_of([&] { parse(header + "40,90,40.3,zq_frequency,6.2,0\n"); }).find("scan.csv:2"), std::string::npos);
  EXPECT_NE(error_of([&] { parse(header + "# c\n40,90,40.3,zq_freq,6.2,0.2,\n"); }).find("scan.csv:3"),
            std::string::npos);
  EXPECT_NE(error_of([&] { parse(header + "40,90,40.3,zq_frequency,x,0.2,\n"); }).find("cannot parse"),
            std::string::npos);
  EXPECT_NE(error_of([&] { parse(header + "40,90,40.3,sq_frequency,2700,0.2,\n"); }).find("transition_index"),
            std::string::npos);
  EXPECT_NE(error_of([&] { parse("40,90,40.3,zq_frequency,6.2,0.2,\n"); }).find("header"), std::string::npos);
  EXPECT_THROW(read_dataset_file("/nonexistent/scan.csv"), InvalidInput);
  EXPECT_THROW(observable_kind_from_string("dq_frequency"), InvalidInput);
}

TEST(ForwardModel, GradientMatchesFiniteDifferences) {
  const auto ds = synthesize_dataset(SystemParams{}, kTruth,
                                     [] {
                                       auto d = standard_design();
                                       const auto a = zq_amplitude_theta_design(0.0, {3.0, 7.0});
                                       d.insert(d.end(), a.begin(), a.end());
                                       return d;
                                     }(),
                                     {}, std::nullopt, 1);
  const ForwardModel model(SystemParams{}, ds);
  FitParameters p = kTruth;
  p.phi_offset = 3.0;
  for (std::size_t i = 0; i < ds.points.size(); ++i) {
    double v = 0.0;
    std::array<double, kParamCount> grad{};
    model.value_and_gradient(p, i, v, grad);
    EXPECT_DOUBLE_EQ(v, model.value(p, i));
    for (ParamId id : kAllParams) {
      const double h = id == ParamId::b ? 1e-3 : 1e-2;
      FitParameters up = p, dn = p;
      up.set(id, p.get(id) + h);
      dn.set(id, p.get(id) - h);
      const double fd = (model.value(up, i) - model.value(dn, i)) / (2 * h);
      EXPECT_NEAR(grad[static_cast<std::size_t>(id)], fd, 1e-5 + 1e-4 * std::abs(fd))
          << "point " << i << " param " << to_string(id);
    }
  }
  EXPECT_THROW(param_id_from_string("a_xy"), InvalidInput);
  EXPECT_EQ(param_id_from_string("phi_offset"), ParamId::phi_offset);
}

TEST(Fitting, NoiselessRoundTrip) {
  const auto ds = synthesize_dataset(SystemParams{}, kTruth, standard_design(), {}, std::nullopt, 1);
  for (double factor : {0.8, 1.2}) {
    const auto fit = fit_hyperfine(SystemParams{}, ds, perturbed(kTruth, factor));
    EXPECT_TRUE(fit.converged) << fit.message;
    EXPECT_NEAR(fit.params.a_xx, kReference.a_xx, 0.01);
    EXPECT_NEAR(fit.params.a_yy, kReference.a_yy, 0.01);
    EXPECT_NEAR(fit.params.a_zz, kReference.a_zz, 0.01);
    EXPECT_NEAR(fit.params.a, kReference.a, 0.01);
    EXPECT_GE(fit.chi2, 0.0);
    EXPECT_LT(fit.gradient_norm, FitOptions{}.gradient_acceptance);
  }
}

TEST(Fitting, RandomRecordsRoundTrip) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto design = sq_lines_design(5.0, 0.0);
  const auto zq = zq_phi_sweep_design(40.0);
  design.insert(design.end(), zq.begin(), zq.end());
  for (int k = 0; k < 50; ++k) {
    const FitParameters truth{150 + 50 * u(rng), 120 + 40 * u(rng), 90 + 40 * u(rng), -90 + 40 * u(rng),
                              40.3 + 5 * u(rng), 0.0};
    const auto ds = synthesize_dataset(SystemParams{}, truth, design, {}, std::nullopt, 1);
    FitParameters start = perturbed(truth, 1.0 + 0.1 * u(rng));
    start.b = ds.points.front().b_gauss;
    const auto fit = fit_hyperfine(SystemParams{}, ds, start);
    EXPECT_TRUE(fit.converged) << fit.message;
    for (ParamId id : {ParamId::a_xx, ParamId::a_yy, ParamId::a_zz, ParamId::a}) {
      EXPECT_NEAR(fit.params.get(id), truth.get(id), 0.01) << to_string(id) << " record " << k;
    }
  }
}

TEST(Fitting, BundledDatasetRecoversReference) {
  const auto ds = read_dataset_file(NVBEAT_DATA_DIR "/reference_synthetic.csv");
  const auto fit = fit_hyperfine(SystemParams{}, ds, perturbed(kTruth, 1.1));
  EXPECT_TRUE(fit.converged) << fit.message;
  for (ParamId id : {ParamId::a_xx, ParamId::a_yy, ParamId::a_zz, ParamId::a}) {
    const double sigma = fit.sigmas.get(id);
    EXPECT_GT(sigma, 0.0);
    EXPECT_LT(std::abs(fit.params.get(id) - kTruth.get(id)), 2.0 * sigma + 0.2) << to_string(id);
  }
}

TEST(Fitting, ZqOnlyWithFreeAzzIsDegenerate) {
  const auto ds = synthesize_dataset(SystemParams{}, kTruth, zq_phi_sweep_design(40.0), {0.0, 0.2, 0.0}, std::nullopt, 1);
  const std::string err = error_of([&] { fit_hyperfine(SystemParams{}, ds, perturbed(kTruth, 1.1)); });
  EXPECT_NE(err.find("degenerate parameter direction"), std::string::npos) << err;
  EXPECT_NE(err.find("a_zz"), std::string::npos) << err;
}

TEST(Fitting, ZqOnlyWithFixedAzzConverges) {
  const auto ds = synthesize_dataset(SystemParams{}, kTruth, zq_phi_sweep_design(40.0), {}, std::nullopt, 1);
  FitOptions opt;
  opt.fixed = {ParamId::a_zz, ParamId::b};
  FitParameters start = perturbed(kTruth, 1.05);
  start.a_zz = kTruth.a_zz;
  const auto fit = fit_hyperfine(SystemParams{}, ds, start, opt);
  EXPECT_TRUE(fit.converged) << fit.message;
  EXPECT_EQ(fit.sigmas.a_zz, 0.0);
  EXPECT_NEAR(fit.params.a_yy, kTruth.a_yy, 0.05);
  EXPECT_NEAR(std::hypot(fit.params.a_xx, fit.params.a), std::hypot(kTruth.a_xx, kTruth.a), 0.05);
}

TEST(Fitting, InputValidation) {
  const auto ds = synthesize_dataset(SystemParams{}, kTruth, sq_lines_design(5.0, 0.0), {}, std::nullopt, 1);
  FitOptions all;
  all.fixed = {kAllParams.begin(), kAllParams.end()};
  EXPECT_THROW(fit_hyperfine(SystemParams{}, ds, kTruth, all), InvalidInput);
  EXPECT_THROW(fit_hyperfine(SystemParams{}, ds, kTruth), InvalidInput);  // 4 points, 6 parameters
}

TEST(Fitting, ReportAndBootstrap) {
  const auto ds = read_dataset_file(NVBEAT_DATA_DIR "/reference_synthetic.csv");
  const auto fit = fit_hyperfine(SystemParams{}, ds, kTruth);
  const auto boot = bootstrap_fit(SystemParams{}, ds, fit, 8, 4);
  EXPECT_EQ(boot.n_requested, 8);
  EXPECT_GE(boot.n_success, 6);
  std::ostringstream out;
  write_fit_report(out, fit, ds, &boot);
  EXPECT_NE(out.str().find("a_zz"), std::string::npos);
  EXPECT_NE(out.str().find("[residuals]"), std::string::npos);
  EXPECT_THROW(bootstrap_fit(SystemParams{}, ds, fit, 1, 4), InvalidInput);
}

TEST(AxisMinimum, ExactParabola) {
  std::vector<double> x, y, s;
  for (int i = -6; i <= 6; ++i) {
    x.push_back(3.0 + 0.5 * i);
    y.push_back(2.0 + 0.7 * std::pow(x.back() - 3.137, 2));
    s.push_back(1e-9);
  }
  for (auto model : {AxisModel::quadratic, AxisModel::quartic}) {
    const auto m = find_axis_minimum(x, y, s, model);
    EXPECT_NEAR(m.angle, 3.137, 1e-6);
    EXPECT_NEAR(m.v0, 2.0, 1e-6);
    EXPECT_NEAR(m.curvature, 0.7, 1e-6);
  }
  EXPECT_NEAR(derivative_zero_crossing(x, y), 3.137, 0.3);
}

TEST(AxisMinimum, NotBracketed) {
  std::vector<double> x{0, 1, 2, 3, 4, 5}, y, s(6, 0.1);
  for (double v : x) y.push_back(v * v);
  EXPECT_NE(error_of([&] { find_axis_minimum(x, y, s); }).find("extremum not bracketed"), std::string::npos);
  EXPECT_THROW(derivative_zero_crossing(x, y), NumericalError);
  EXPECT_THROW(find_axis_minimum({0, 1, 2}, {1, 0, 1}, {1, 1, 1}), NumericalError);
}

TEST(AxisMinimum, NoisySqThetaScan) {
  // Signed polar angle through the NV axis: x > 0 at φ = 0, x < 0 at φ = 180.
  const auto p = reference_system();
  std::vector<double> x;
  std::vector<DesignPoint> design;
  for (int i = -10; i <= 10; ++i) {
    x.push_back(i);
    design.push_back({std::abs(1.0 * i), i < 0 ? 180.0 : 0.0, ObservableKind::sq_frequency, 0});
  }
  const auto clean = synthesize_dataset(p, kTruth, design, {}, std::nullopt, 1);
  std::vector<double> yc, sc;
  for (const auto& pt : clean.points) {
    yc.push_back(pt.value);
    sc.push_back(0.2);
  }
  const double truth = find_axis_minimum(x, yc, sc).angle;
  int inside = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto noisy = synthesize_dataset(p, kTruth, design, {0.2, 0.2, 0.0}, std::nullopt, seed);
    std::vector<double> y;
    for (const auto& pt : noisy.points) y.push_back(pt.value);
    const auto m = find_axis_minimum(x, y, sc);
    EXPECT_GT(m.uncertainty, 0.0);
    inside += std::abs(m.angle - truth) < 3.0 * m.uncertainty;
  }
  EXPECT_GE(inside, 19);
}

TEST(AxisMinimum, ZqAmplitudeScanFindsSingleTransitionAxis) {
  std::vector<double> thetas;
  for (double t = 3.5; t <= 6.5; t += 0.25) thetas.push_back(t);
  const auto ds = synthesize_dataset(SystemParams{}, kTruth, zq_amplitude_theta_design(0.0, thetas), {}, std::nullopt, 1);
  // The amplitude is not even about its zero (the weak element has a quadratic
  // term), which biases a polynomial vertex by a few tenths of a degree.
  const auto m = find_axis_minimum(ds, SweepAxis::theta, AxisModel::quartic);
  EXPECT_NEAR(m.angle, frozen::kStaTheta, 0.5);
  std::vector<double> y;
  for (const auto& pt : ds.points) y.push_back(pt.value);
  EXPECT_NEAR(derivative_zero_crossing(thetas, y), frozen::kStaTheta, 0.5);
  auto mixed = ds;
  mixed.points[1].phi_deg = 10.0;
  EXPECT_THROW(find_axis_minimum(mixed, SweepAxis::theta), InvalidInput);
}

TEST(AxisMinimum, ZqFrequencyMaximumLiesInMirrorPlane) {
  const auto sta = find_single_transition_axis(reference_system(), 40.3);
  std::vector<double> x, y, s;
  for (int i = -20; i <= 20; i += 2) {
    x.push_back(i);
    y.push_back(-zero_quantum_splitting_exact(solve(reference_system(), FieldOrientation::nv(40.3, 40.0, i))));
    s.push_back(0.01);
  }
  EXPECT_LT(std::abs(find_axis_minimum(x, y, s).angle - sta.phi), 1.0);
}

TEST(SingleTransitionAxis, Reference) {
  const auto p = reference_system();
  const auto sta = find_single_transition_axis(p, 40.3);
  EXPECT_NEAR(sta.theta, 5.1, 0.5);
  EXPECT_NEAR(sta.theta, frozen::kStaTheta, 0.01);
  EXPECT_NEAR(sta.phi, 0.0, 0.5);
  EXPECT_LT(sta.amplitude_ratio, 1e-3);
  const auto field = FieldOrientation::nv(40.3, sta.theta, sta.phi);
  EXPECT_LT(lambda_transition_amplitudes(solve(p, field), p, field).ratio(), 0.03);
  const auto trace = simulate_zq_ramsey(p, field, 0.035, 5.0, linspace(0.0, 5.0, 501));
  EXPECT_LT(beat_amplitude(trace, zero_quantum_splitting_exact(solve(p, field))), 0.02);
}

TEST(SingleTransitionAxis, UncoupledBranchesAlongZ) {
  SystemParams p;
  p.tensor = {200, 120, 130, 0};
  const auto sta = find_single_transition_axis(p, 40.3);
  EXPECT_NEAR(sta.theta, 0.0, 0.05);
}

TEST(SingleTransitionAxis, NoneInRange) {
  AxisSearchOptions opt;
  opt.theta_max = 2.0;
  opt.grid_step = 0.5;
  const std::string err = error_of([&] { find_single_transition_axis(reference_system(), 40.3, opt); });
  EXPECT_NE(err.find("no single-transition axis in range"), std::string::npos) << err;
}

TEST(Sensitivity, ReferenceAtSingleTransitionAxis) {
  const auto p = reference_system();
  const auto f = FieldOrientation::nv(40.3, frozen::kStaTheta, 0.0);
  const auto zz = sensitivity_c(p, f, ParamId::a_zz);
  const auto xx = sensitivity_c(p, f, ParamId::a_xx);
  const auto yy = sensitivity_c(p, f, ParamId::a_yy);
  const auto aa = sensitivity_c(p, f, ParamId::a);
  EXPECT_NEAR(zz.c_value, frozen::kSensitivityAzz, 1e-4);
  EXPECT_NEAR(xx.c_value, frozen::kSensitivityAxx, 1e-4);
  EXPECT_NEAR(yy.c_value, frozen::kSensitivityAyy, 1e-4);
  EXPECT_NEAR(aa.c_value, frozen::kSensitivityA, 1e-4);
  EXPECT_NEAR(zz.c_value, 0.35, 0.35 * 0.3);
  EXPECT_NEAR(xx.c_value, 0.045, 0.045 * 0.5);
  EXPECT_NEAR(yy.c_value, 0.033, 0.033 * 0.5);
  for (const auto& r : {zz, xx, yy, aa}) {
    double mean = 0.0;
    for (double s : r.slopes) mean += std::abs(s) / 4.0;
    EXPECT_DOUBLE_EQ(r.c_value, mean);
    EXPECT_NEAR(sensitivity_c(p, f, r.param, 0.25).c_value, r.c_value, 0.01 * r.c_value);
  }
}

TEST(Sensitivity, SecularLimit) {
  const auto r = sensitivity_c(SystemParams{}, FieldOrientation::nv(40.3, 0.0, 0.0), ParamId::a_zz);
  for (double s : r.slopes) EXPECT_NEAR(std::abs(s), 0.5, 1e-6);
  EXPECT_NEAR(r.c_value, 0.5, 1e-6);
}

TEST(Sensitivity, RejectsNonTensorParameters) {
  EXPECT_THROW(sensitivity_c(reference_system(), FieldOrientation::nv(40.3, 5, 0), ParamId::b), InvalidInput);
  EXPECT_THROW(sensitivity_c(reference_system(), FieldOrientation::nv(40.3, 5, 0), ParamId::a, 0.0), InvalidInput);
}

TEST(Sensitivity, PrecisionPropagation) {
  EXPECT_NEAR(precision_propagation(0.2, 0.35), 0.57, 0.01);
  EXPECT_NEAR(precision_propagation(0.2, 0.045), 4.4, 0.05);
  EXPECT_EQ(precision_propagation(0.0, 0.3), 0.0);
  EXPECT_NE(error_of([] { precision_propagation(0.2, 0.0); }).find("parameter unobservable"), std::string::npos);
  EXPECT_THROW(precision_propagation(-0.1, 0.3), InvalidInput);
}

TEST(Synthesis, NoiselessEqualsForwardModel) {
  const auto design = standard_design();
  const auto ds = synthesize_dataset(SystemParams{}, kTruth, design, {}, std::nullopt, 5);
  const auto model = ForwardModel(SystemParams{}, ds).values(kTruth);
  for (std::size_t i = 0; i < model.size(); ++i) EXPECT_EQ(ds.points[i].value, model[i]);
  EXPECT_EQ(ds.points.size(), 23u);
  EXPECT_EQ(ds.points[0].sigma, NoiseSigma{}.frequency_floor);
}

TEST(Synthesis, DeterministicForSeed) {
  const NoiseSigma noise{0.2, 0.2, 0.01};
  const auto a = synthesize_dataset(SystemParams{}, kTruth, standard_design(), noise, FieldImperfection{1.0}, 42);
  const auto b = synthesize_dataset(SystemParams{}, kTruth, standard_design(), noise, FieldImperfection{1.0}, 42);
  const auto c = synthesize_dataset(SystemParams{}, kTruth, standard_design(), noise, FieldImperfection{1.0}, 43);
  std::ostringstream sa, sb, sc;
  write_dataset_csv(sa, a);
  write_dataset_csv(sb, b);
  write_dataset_csv(sc, c);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_NE(sa.str(), sc.str());
}

TEST(Synthesis, FieldImperfectionLeavesThreeFoldResiduals) {
  auto design = sq_lines_design(frozen::kStaTheta, 0.0);
  const auto zq = zq_phi_sweep_design(40.0, 0.0, 350.0, 10.0);
  design.insert(design.end(), zq.begin(), zq.end());
  const auto ds = synthesize_dataset(SystemParams{}, kTruth, design, {}, FieldImperfection{1.0, 120.0, 0.0}, 1);
  const auto fit = fit_hyperfine(SystemParams{}, ds, kTruth);
  std::vector<double> harmonic(7, 0.0);
  for (int h = 1; h <= 6; ++h) {
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < ds.points.size(); ++i) {
      if (ds.points[i].kind != ObservableKind::zq_frequency) continue;
      acc += fit.residuals[i] * std::polar(1.0, -h * deg_to_rad(ds.points[i].phi_deg));
    }
    harmonic[static_cast<std::size_t>(h)] = std::abs(acc);
  }
  EXPECT_EQ(std::max_element(harmonic.begin(), harmonic.end()) - harmonic.begin(), 3);
}

TEST(Synthesis, DesignHelpers) {
  EXPECT_EQ(zq_phi_sweep_design(40.0).size(), 19u);
  EXPECT_EQ(sq_lines_design(5.0, 0.0).size(), 4u);
  EXPECT_THROW(zq_phi_sweep_design(40.0, 0.0, 360.0, 0.0), InvalidInput);
  EXPECT_NEAR((FieldImperfection{1.0, 120.0, 0.0}.field(40.0, 120.0)), 41.0, 1e-12);
  EXPECT_NEAR((FieldImperfection{1.0, 120.0, 0.0}.field(40.0, 60.0)), 39.0, 1e-12);
  EXPECT_THROW(synthesize_dataset(SystemParams{}, kTruth, {}, {}, std::nullopt, 1), InvalidInput);
}
