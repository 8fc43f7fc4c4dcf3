#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ebspline/errors.hpp"
#include "ebspline/simlab.hpp"
#include "test_support.hpp"

using namespace ebs;
using Eigen::VectorXd;
using nlohmann::json;

TEST_CASE("generators") {
  auto f2 = Generator::f2();
  f2.range_scaled = false;
  const VectorXd v = generate(f2, DesignGrid::make(5, Convention::midpoint));
  CHECK(std::abs(v[0]) < 1e-15);  // cos(0.5 pi)

  const auto grid = DesignGrid::make(300, Convention::right);
  const VectorXd scaled = generate(Generator::f2(), grid);
  CHECK(scaled.maxCoeff() - scaled.minCoeff() == doctest::Approx(1.0));
  const VectorXd f1 = generate(Generator::f1(), grid);
  CHECK(f1.maxCoeff() - f1.minCoeff() == doctest::Approx(1.0));

  const VectorXd line = generate(Generator::polynomial(2), grid);
  for (Eigen::Index i = 2; i < line.size(); ++i)
    CHECK(line[i] - 2.0 * line[i - 1] + line[i - 2] == doctest::Approx(0.0).epsilon(1e-12));
  const auto b2 = make_basis(grid, 2, BasisKind::natural_modes);
  CHECK(forward(b2, line).tail(298).cwiseAbs().maxCoeff() <= 1e-10);

  const VectorXd custom = generate(Generator::custom({0.0, 0.0, 1.0}, 2), grid);
  CHECK(forward(b2, custom)[2] == doctest::Approx(1.0));

  CHECK(parse_generator_kind("f1") == GeneratorKind::f1_spectral);
  CHECK_THROWS_AS(parse_generator_kind("f3"), InputError);
  CHECK_THROWS_AS(Generator::polynomial(0), InputError);
  CHECK(std::isinf(Generator::f2().beta_nominal()));
  CHECK(Generator::f1().beta_nominal() == 3.0);
}

TEST_CASE("noise") {
  auto e1 = rng::engine(1, rng::kNoise, 0);
  auto e2 = rng::engine(1, rng::kNoise, 0);
  const VectorXd f = VectorXd::Zero(5000);
  const VectorXd a = add_noise(f, NoiseModel{0.5}, e1);
  const VectorXd b = add_noise(f, NoiseModel{0.5}, e2);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::sqrt(a.squaredNorm() / 5000.0) == doctest::Approx(0.5).epsilon(0.05));
  CHECK(rng::substream(1, 1, 0) != rng::substream(1, 2, 0));
  CHECK(rng::substream(1, 1, 0) != rng::substream(2, 1, 0));
}

TEST_CASE("single replicate study equals one fit") {
  StudyConfig c;
  c.n = 200;
  c.M = 1;
  c.gcv_q = {3};
  const auto rep = run_study(c);

  const auto grid = DesignGrid::make(200, Convention::right);
  const ModelFamily fam(grid, BasisKind::natural_modes);
  const VectorXd f = generate(Generator::f1(), grid);
  auto eng = rng::engine(1, rng::kNoise, 0);
  const VectorXd y = add_noise(f, NoiseModel{0.01}, eng);
  const FitResult fr = fit(fam, y);

  const MethodRow* eb = rep.row("EB");
  REQUIRE(eb != nullptr);
  CHECK(eb->mean_lambda == fr.lambda_hat);
  CHECK(eb->var_lambda == 0.0);
  CHECK(eb->amse == doctest::Approx((fr.fitted - f).squaredNorm() / 200.0).epsilon(1e-9));
  CHECK(rep.q_hat_fraction(fr.q_hat) == 1.0);
  CHECK(rep.mean_q_star == fr.q_star);

  const auto m3 = fam.model(3);
  const auto g = select_lambda_gcv(*m3, y);
  const MethodRow* gr = rep.row("GCV", 3);
  REQUIRE(gr != nullptr);
  CHECK(gr->mean_lambda == g.lambda_f_hat);
  const VectorXd fg = inverse(m3->basis, smoother_weights(m3->eigen, g.lambda_f_hat).cwiseProduct(forward(m3->basis, y)));
  CHECK(gr->amse == doctest::Approx((fg - f).squaredNorm() / 200.0).epsilon(1e-9));
  CHECK(gr->ratio == doctest::Approx(gr->amse / eb->amse));
}

TEST_CASE("study replay and replicate-order invariance") {
  StudyConfig c;
  c.n = 150;
  c.M = 6;
  c.gcv_q = {2, 4};
  c.threads = 1;
  const auto a = run_study(c);
  c.threads = 3;
  const auto b = run_study(c);
  CHECK(to_json(a).dump() == to_json(b).dump());
  CHECK(to_csv_table(a) == to_csv_table(b));
  std::size_t total = 0;
  for (const auto& [q, k] : a.q_hat_histogram) total += k;
  CHECK(total == 6);
  CHECK(a.eb_lambda.size() == 6);
  c.seed = 2;
  CHECK(to_json(run_study(c)).dump() != to_json(a).dump());
}

TEST_CASE("study config parsing") {
  const auto c = parse_study_config(json::parse(R"({
    "generator": "f2", "n": 500, "M": 10, "sigma": 0.02,
    "q_grid": {"min": 1, "max": 4, "step": 1}, "methods": ["EB"],
    "seed": 9, "design_convention": "midpoint", "basis": "natural"})"));
  CHECK(c.generator.kind == GeneratorKind::f2_cosine);
  CHECK(c.n == 500);
  CHECK(c.M == 10);
  CHECK(c.sigma == 0.02);
  CHECK(c.q_grid.values.size() == 4);
  CHECK(c.eb);
  CHECK(c.gcv_q.empty());
  CHECK(c.seed == 9);
  CHECK(c.convention == Convention::midpoint);

  const auto c2 = parse_study_config(json::parse(R"({"generator": {"kind": "f1", "params": {"beta": 3}}, "q_grid": [1, 2, 3]})"));
  CHECK(c2.q_grid.values.size() == 3);
  CHECK(c2.generator.param("index_origin", -1) == 0.0);

  CHECK_THROWS_AS(parse_study_config(json::parse(R"({"nn": 5})")), InputError);
  CHECK_THROWS_AS(parse_study_config(json::parse(R"({"methods": ["EB", "AIC"]})")), InputError);
  CHECK_THROWS_AS(parse_study_config(json::parse(R"({"M": 0})")), InputError);
  CHECK_THROWS_AS(parse_study_config(json::parse(R"({"n": "big"})")), InputError);
  CHECK_THROWS_AS(parse_study_config(json::parse(R"({"q_grid": [3, 2]})")), InputError);
  CHECK_THROWS_AS(parse_study_config(json::parse("[1]")), InputError);
}

TEST_CASE("report layout") {
  StudyConfig c;
  c.n = 100;
  c.M = 2;
  c.gcv_q = {2, 3};
  const auto rep = run_study(c);
  const json j = to_json(rep);
  CHECK(j["schema_version"] == 1);
  CHECK(j["rows"].size() == 3);
  CHECK(j["config"]["n"] == 100);
  const std::string table = to_csv_table(rep);
  CHECK(table.rfind("statistic,EB,GCV q=2,GCV q=3\n", 0) == 0);
  CHECK(table.find("\nR,") != std::string::npos);
  CHECK(table.find("\namse,") != std::string::npos);
}
