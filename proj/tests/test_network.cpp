#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bpinn/network.hpp"
#include "bpinn/rng.hpp"
#include "test_util.hpp"

using namespace bpinn;

TEST_CASE("time normalizer") {
  const auto norm = TimeNormalizer::make(10.0, 110.0);
  CHECK(norm.normalize(10.0) == 0.0);
  CHECK(norm.normalize(110.0) == 1.0);
  CHECK(norm.normalize(60.0) == doctest::Approx(0.5));
  CHECK(norm.scale() == doctest::Approx(0.01));
  CHECK_THROWS_AS(TimeNormalizer::make(5.0, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(TimeNormalizer::make(5.0, 4.0), std::invalid_argument);
}

TEST_CASE("zero network evaluates to zero everywhere") {
  auto net = SurrogateNetwork::create({1, 8, 8, 1}, 1);
  for (auto& l : net.layers) {
    std::fill(l.w.begin(), l.w.end(), 0.0);
    std::fill(l.b.begin(), l.b.end(), 0.0);
  }
  const auto norm = TimeNormalizer::make(0.0, 1.0);
  CHECK(forward(net, norm, 0.3) == 0.0);
  CHECK(time_derivative(net, norm, 0.3) == 0.0);
}

TEST_CASE("single hand-set hidden unit") {
  auto net = SurrogateNetwork::create({1, 1, 1}, 1);
  net.layers[0].w = {1.0};
  net.layers[0].b = {0.0};
  net.layers[1].w = {1.0};
  net.layers[1].b = {0.0};
  const auto norm = TimeNormalizer::make(0.0, 1.0);
  CHECK(forward(net, norm, 0.0) == doctest::Approx(0.0));          // tanh(0)
  CHECK(forward(net, norm, 1.0) == doctest::Approx(std::tanh(1.0)));
}

TEST_CASE("forward matches an independently coded evaluation") {
  const auto norm = TimeNormalizer::make(0.0, 730.0);
  for (int rep = 0; rep < 10; ++rep) {
    const auto net =
        test::random_network({1, 5, 7, 1}, static_cast<std::uint64_t>(rep) + 1);
    Rng rng(500 + static_cast<std::uint64_t>(rep));
    for (int k = 0; k < 10; ++k) {
      const double t = rng.uniform(-100.0, 900.0);
      CHECK(std::abs(forward(net, norm, t) - test::forward_reference(net, norm, t)) <
            1e-12);
    }
  }
}

TEST_CASE("time derivative matches central differences") {
  const auto norm = TimeNormalizer::make(0.0, 365.0);
  const double h = 1e-5 * (norm.t_max - norm.t_min);
  int checked = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto net =
        test::random_network({1, 6, 6, 1}, 40 + static_cast<std::uint64_t>(rep));
    Rng rng(900 + static_cast<std::uint64_t>(rep));
    const double t = rng.uniform(0.0, 365.0);
    const double fd = test::central_diff(
        [&](double x) { return forward(net, norm, x); }, t, h);
    const double ad = time_derivative(net, norm, t);
    CHECK(test::rel_err(ad, fd, 1e-8) < 1e-6);
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("near-linear regime: derivative is the weight product over the span") {
  auto net = SurrogateNetwork::create({1, 1, 1}, 1);
  const double w1 = 1e-4, w2 = 2e-4;
  net.layers[0].w = {w1};
  net.layers[0].b = {0.0};
  net.layers[1].w = {w2};
  net.layers[1].b = {0.0};
  const auto norm = TimeNormalizer::make(0.0, 200.0);
  const double expected = w1 * w2 / 200.0;
  const double got = time_derivative(net, norm, 50.0);
  CHECK(std::abs(got - expected) <= 1e-4 * std::abs(expected) + 1e-18);
}

TEST_CASE("integral of the derivative recovers the forward difference") {
  const auto norm = TimeNormalizer::make(0.0, 1.0);
  const auto net = test::random_network({1, 8, 8, 1}, 77);
  const double a = 0.1, b = 0.9;
  // composite Simpson on dy/dt with step 1e-4
  const int n = static_cast<int>((b - a) / 1e-4);
  const int n_even = n % 2 == 0 ? n : n + 1;
  const double h = (b - a) / n_even;
  double acc = time_derivative(net, norm, a) + time_derivative(net, norm, b);
  for (int i = 1; i < n_even; ++i)
    acc += time_derivative(net, norm, a + h * i) * (i % 2 == 1 ? 4.0 : 2.0);
  const double integral = acc * h / 3.0;
  CHECK(std::abs(integral - (forward(net, norm, b) - forward(net, norm, a))) < 1e-6);
}

TEST_CASE("softplus reparameterization") {
  CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)));
  CHECK(softplus(50.0) == doctest::Approx(50.0));
  CHECK(softplus(-40.0) > 0.0);
  for (double raw = -20.0; raw <= 20.0; raw += 0.25) {
    CHECK(std::abs(softplus_inv(softplus(raw)) - raw) < 1e-9);
  }
  const auto kin = KineticReparam::from_values(0.2, 0.05);
  CHECK(kin.alpha() == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(kin.beta() == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("initialization is seeded and in the expected range") {
  const auto a = SurrogateNetwork::create({1, 64, 64, 64, 1}, 42);
  const auto b = SurrogateNetwork::create({1, 64, 64, 64, 1}, 42);
  const auto c = SurrogateNetwork::create({1, 64, 64, 64, 1}, 43);
  CHECK(a.layers[1].w == b.layers[1].w);
  CHECK(a.layers[1].w != c.layers[1].w);
  CHECK(a.param_count() == 64 + 64 + 2 * (64 * 64 + 64) + 64 + 1);
  const double bound = std::sqrt(6.0 / (64 + 64));
  for (double w : a.layers[1].w) CHECK(std::abs(w) <= bound);
}

TEST_CASE("flatten round trip") {
  auto net = test::random_network({1, 4, 3, 1}, 5);
  std::vector<double> flat(static_cast<std::size_t>(net.param_count()));
  net.flatten_into(flat);
  auto other = SurrogateNetwork::create({1, 4, 3, 1}, 99);
  other.unflatten_from(flat);
  const auto norm = TimeNormalizer::make(0.0, 1.0);
  CHECK(forward(other, norm, 0.37) == forward(net, norm, 0.37));
}
