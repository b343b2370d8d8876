#include <doctest.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "tetra/error.hpp"
#include "tetra/objectives.hpp"

using namespace tetra;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> box_point(const std::vector<Bounds>& box, const std::vector<double>& unit) {
  std::vector<double> x(box.size());
  for (std::size_t j = 0; j < box.size(); ++j) x[j] = box[j].lower + unit[j] * (box[j].upper - box[j].lower);
  return x;
}

}  // namespace

TEST_CASE("cov worked examples") {
  CHECK(cov({{0.5, 0.5, 0.5, 0.5}, {}}) == 0.0);
  CHECK(cov({{0.25, 0.75}, {}}) == doctest::Approx(0.5).epsilon(1e-12));
  // mean 0.4, population sigma sqrt(2/75)
  CHECK(cov({{0.2, 0.4, 0.6}, {}}) == doctest::Approx(std::sqrt(2.0 / 75.0) / 0.4).epsilon(1e-12));
  CHECK(cov({{0.2, 0.4, 0.6}, {}}) == doctest::Approx(0.40825).epsilon(1e-5));
}

TEST_CASE("cov weighted statistics") {
  // Weights 1, 3 equal to repeating the second sample three times.
  const double weighted = cov({{0.2, 0.6}, {1.0, 3.0}});
  const double repeated = cov({{0.2, 0.6, 0.6, 0.6}, {}});
  CHECK(weighted == doctest::Approx(repeated).epsilon(1e-12));
  CHECK(cov({{0.3, 0.7}, {2.0, 2.0}}) == doctest::Approx(cov({{0.3, 0.7}, {}})).epsilon(1e-12));
}

TEST_CASE("cov scale invariance and zero iff constant") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng() % 30);
    SectionField f;
    double top = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      f.fractions.push_back(u(rng));
      top = std::max(top, f.fractions.back());
    }
    const double alpha = std::uniform_real_distribution<double>(0.05, 1.0 / top)(rng);
    SectionField g = f;
    for (double& v : g.fractions) v *= alpha;
    CHECK(cov(g) == doctest::Approx(cov(f)).epsilon(1e-10));
    CHECK(cov(f) > 0.0);
    const SectionField flat{std::vector<double>(n, f.fractions.front()), {}};
    CHECK(std::abs(cov(flat)) <= 1e-12);
  }
}

TEST_CASE("cov rejects invalid fields") {
  CHECK_THROWS_AS(cov({{}, {}}), InvalidArgument);
  CHECK_THROWS_AS(cov({{0.0, 0.0}, {}}), NumericalError);
  CHECK_THROWS_AS(cov({{0.5, 1.5}, {}}), InvalidArgument);
  CHECK_THROWS_AS(cov({{0.5, 0.5}, {1.0}}), InvalidArgument);
  CHECK_THROWS_AS(cov({{0.5, 0.5}, {1.0, 0.0}}), InvalidArgument);
}

TEST_CASE("section field csv") {
  std::istringstream with_header("fraction,weight\n0.2,1\n0.6,3\n");
  const SectionField f = read_section_field_csv(with_header);
  CHECK(f.fractions == std::vector<double>{0.2, 0.6});
  CHECK(f.weights == std::vector<double>{1, 3});
  std::istringstream plain("0.25\n0.75\n");
  CHECK(cov(read_section_field_csv(plain)) == doctest::Approx(0.5));
  std::istringstream mixed("0.2,1\n0.6\n");
  CHECK_THROWS_AS(read_section_field_csv(mixed), InvalidArgument);
  std::istringstream junk("0.2\nabc\n");
  CHECK_THROWS_AS(read_section_field_csv(junk), InvalidArgument);
}

TEST_CASE("mixer surrogate box and corners") {
  const std::vector<Bounds> box = mixer_bounds();
  REQUIRE(box.size() == 4);
  CHECK(box[0].lower == 0.0);
  CHECK(box[0].upper == 30.0);
  CHECK(box[3].upper == 0.6);
  CHECK(mixer_parameter_names().size() == 4);
  for (unsigned mask = 0; mask < 16; ++mask) {
    std::vector<double> p(4);
    for (std::size_t j = 0; j < 4; ++j) p[j] = (mask >> j) & 1U ? box[j].upper : box[j].lower;
    const double v = mixer_surrogate(p);
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
  }
  CHECK_THROWS_AS(mixer_surrogate(std::vector<double>{31.0, 0.3, 1.0, 0.3}), InvalidArgument);
  CHECK_THROWS_AS(mixer_surrogate(std::vector<double>{10.0, 0.3, 1.0}), InvalidArgument);
}

TEST_CASE("mixer surrogate matches the exhaustive-sweep fixture") {
  std::ifstream in(std::string(TETRA_FIXTURE_DIR) + "/mixer_grid.csv");
  REQUIRE(in.good());
  const std::vector<Bounds> box = mixer_bounds();
  std::string line;
  std::getline(in, line);
  std::size_t rows = 0;
  double best = 1e300;
  std::vector<double> best_p;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<double> p(4);
    std::string cell;
    for (std::size_t j = 0; j < 4; ++j) {
      std::getline(ls, cell, ',');
      const double t = std::stod(cell) / 4.0;
      p[j] = box[j].lower * (1 - t) + box[j].upper * t;
    }
    std::getline(ls, cell, ',');
    const double expected = std::stod(cell);
    CHECK(mixer_surrogate(p) == doctest::Approx(expected).epsilon(1e-12));
    if (mixer_surrogate(p) < best) {
      best = mixer_surrogate(p);
      best_p = p;
    }
    ++rows;
  }
  CHECK(rows == 625);

  std::ifstream min_in(std::string(TETRA_FIXTURE_DIR) + "/mixer_grid_minimum.txt");
  std::size_t i0, i1, i2, i3;
  double value;
  min_in >> i0 >> i1 >> i2 >> i3 >> value;
  CHECK(best == doctest::Approx(value).epsilon(1e-12));
  CHECK(best_p[0] == doctest::Approx(7.5 * double(i0)));
  CHECK(best_p[2] == doctest::Approx(0.5 + 0.25 * double(i2)));
}

TEST_CASE("mixer slice has several local minima") {
  // y-angle x connection length at fixed radii, both label readings of the slice.
  for (const auto& [conn_r, inlet_r] : {std::pair{0.3, 0.275}, std::pair{0.275, 0.3}}) {
    constexpr int n = 100;
    std::vector<double> f(n * n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        f[i * n + j] = mixer_surrogate(std::vector<double>{30.0 * i / (n - 1), conn_r, 0.5 + 1.0 * j / (n - 1), inlet_r});
      }
    }
    int minima = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        bool lowest = true;
        for (int di = -1; di <= 1 && lowest; ++di) {
          for (int dj = -1; dj <= 1; ++dj) {
            const int a = i + di;
            const int b = j + dj;
            if ((di == 0 && dj == 0) || a < 0 || b < 0 || a >= n || b >= n) continue;
            if (f[a * n + b] <= f[i * n + j]) {
              lowest = false;
              break;
            }
          }
        }
        if (lowest) ++minima;
      }
    }
    CHECK(minima >= 2);
  }
}

TEST_CASE("mixer surrogate Lipschitz probe") {
  const std::vector<Bounds> box = mixer_bounds();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    std::vector<double> a(4);
    std::vector<double> b(4);
    const double h = std::pow(10.0, -1.0 - 4.0 * u(rng));
    double dist2 = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      a[j] = u(rng);
      b[j] = std::clamp(a[j] + h * g(rng), 0.0, 1.0);
      dist2 += (a[j] - b[j]) * (a[j] - b[j]);
    }
    const double fa = mixer_surrogate(box_point(box, a));
    const double fb = mixer_surrogate(box_point(box, b));
    CHECK(std::abs(fa - fb) <= kMixerLipschitz * std::sqrt(dist2) + 1e-15);
    CHECK(fa > 0.0);
  }
}

TEST_CASE("benchmarks attain documented minima") {
  for (const std::string name : {"quadratic", "rosenbrock", "rastrigin", "ackley"}) {
    for (std::size_t d : {1u, 2u, 5u}) {
      const BlackBoxObjective obj = benchmark(name, d);
      const BenchmarkMinimum m = benchmark_minimum(name, d);
      CHECK(obj.dimension() == d);
      CHECK(obj(m.argmin) == m.value);
      // Nearby points are worse.
      std::vector<double> off = m.argmin;
      off[0] += 0.01;
      CHECK(obj(off) > m.value);
    }
  }
  CHECK(benchmark("rastrigin", 3)(std::vector<double>{0, 0, 0}) == 0.0);
  CHECK(benchmark("rosenbrock", 3)(std::vector<double>{1, 1, 1}) == 0.0);
  const BlackBoxObjective q = quadratic_objective({0.1, 0.9}, {{0, 1}, {0, 1}});
  CHECK(q(std::vector<double>{0.1, 0.9}) == 0.0);
  CHECK(q(std::vector<double>{0.0, 0.0}) == doctest::Approx(0.82));
  CHECK_THROWS_AS(benchmark("sphere", 2), InvalidArgument);
  CHECK_THROWS_AS(benchmark("ackley", 0), InvalidArgument);
  CHECK_THROWS_AS(q(std::vector<double>{0.1}), InvalidArgument);
  CHECK(constant_objective(7.0, {{0, 1}})(std::vector<double>{0.4}) == 7.0);
}

TEST_CASE("latency wrapper") {
  const BlackBoxObjective base = benchmark("quadratic", 2);
  const std::vector<double> x{0.1, 0.7};
  CHECK(with_latency(base, 0.0)(x) == base(x));

  const BlackBoxObjective slow = with_latency(base, 0.05);
  auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < 10; ++k) CHECK(slow(x) == base(x));
  CHECK(seconds_since(t0) >= 0.5);

  const BlackBoxObjective burn = with_latency(base, 0.02, LatencyKind::cpu);
  t0 = std::chrono::steady_clock::now();
  CHECK(burn(x) == base(x));
  CHECK(seconds_since(t0) >= 0.02);
  CHECK_THROWS_AS(with_latency(base, -1.0), InvalidArgument);
}

TEST_CASE("failure wrappers") {
  const BlackBoxObjective base = benchmark("quadratic", 1);
  const BlackBoxObjective picky = with_failures(base, [](std::span<const double> x) { return x[0] > 0.5; });
  CHECK(picky(std::vector<double>{0.2}) == base(std::vector<double>{0.2}));
  CHECK_THROWS_AS(picky(std::vector<double>{0.8}), EvaluationError);

  const BlackBoxObjective flaky = with_random_failures(base, 0.3, 5);
  const BlackBoxObjective flaky_again = with_random_failures(base, 0.3, 5);
  int failures = 0;
  for (int k = 0; k < 2000; ++k) {
    const std::vector<double> x{k / 2000.0};
    bool a = false;
    bool b = false;
    try { flaky(x); } catch (const EvaluationError&) { a = true; }
    try { flaky_again(x); } catch (const EvaluationError&) { b = true; }
    CHECK(a == b);
    failures += a ? 1 : 0;
  }
  CHECK(failures > 450);
  CHECK(failures < 750);
  CHECK_THROWS_AS(with_random_failures(base, 1.5, 0), InvalidArgument);
}
