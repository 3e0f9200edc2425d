#include "cmplab/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cmplab/errors.hpp"

namespace cmplab {

namespace {

void require_dimensions(std::size_t states, std::size_t actions) {
  if (states < 2) {
    throw std::invalid_argument("environment needs at least 2 states, got " +
                                std::to_string(states));
  }
  if (actions < 2) {
    throw std::invalid_argument("environment needs at least 2 actions, got " +
                                std::to_string(actions));
  }
}

}  // namespace

Environment::Environment(std::size_t states, std::size_t actions,
                         std::vector<double> probabilities)
    : states_(states), actions_(actions), p_(std::move(probabilities)) {
  require_dimensions(states, actions);
  if (p_.size() != states * actions * states) {
    throw DimensionError("transition tensor has " + std::to_string(p_.size()) +
                         " entries, expected n*m*n = " +
                         std::to_string(states * actions * states));
  }
}

Environment Environment::uniform_chain(std::size_t states, std::size_t actions) {
  require_dimensions(states, actions);
  return Environment(states, actions,
                     std::vector<double>(states * actions * states,
                                         1.0 / static_cast<double>(states)));
}

StateDistribution::StateDistribution(std::vector<double> v, double tol) : v_(std::move(v)) {
  if (v_.empty()) throw std::invalid_argument("state distribution is empty");
  double sum = 0.0;
  for (double x : v_) {
    if (!(x >= 0.0)) throw std::invalid_argument("state distribution has a negative entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > tol) {
    std::ostringstream os;
    os.precision(17);
    os << "state distribution sums to " << sum << ", not 1";
    throw std::invalid_argument(os.str());
  }
}

StateDistribution StateDistribution::uniform(std::size_t states) {
  return StateDistribution(std::vector<double>(states, 1.0 / static_cast<double>(states)));
}

StateDistribution StateDistribution::point_mass(std::size_t states, std::size_t state) {
  if (state >= states) throw DimensionError("point mass state out of range");
  std::vector<double> v(states, 0.0);
  v[state] = 1.0;
  return StateDistribution(std::move(v));
}

bool StateDistribution::has_full_support() const noexcept {
  return std::all_of(v_.begin(), v_.end(), [](double x) { return x > 0.0; });
}

Environment sample_uniform_environment(std::size_t states, std::size_t actions,
                                       RandomStream& rng) {
  require_dimensions(states, actions);
  std::vector<double> p(states * actions * states);
  for (std::size_t row = 0; row < states * actions; ++row) {
    auto first = p.begin() + static_cast<std::ptrdiff_t>(row * states);
    auto last = first + static_cast<std::ptrdiff_t>(states);
    std::generate(first, last, [&] { return unit_exponential(rng); });
    const double total = std::accumulate(first, last, 0.0);
    std::for_each(first, last, [total](double& x) { x /= total; });
  }
  return Environment(states, actions, std::move(p));
}

ValidationResult validate_environment(const Environment& env, double tol) {
  ValidationResult result;
  for (std::size_t s = 0; s < env.states(); ++s) {
    for (std::size_t a = 0; a < env.actions(); ++a) {
      double sum = 0.0;
      const auto row = env.row(s, a);
      for (std::size_t next = 0; next < row.size(); ++next) {
        const double x = row[next];
        if (!(x >= 0.0 && x <= 1.0)) result.out_of_range.push_back({s, a, next, x});
        sum += x;
      }
      if (!(std::abs(sum - 1.0) <= tol)) result.bad_row_sums.push_back({s, a, sum});
    }
  }
  return result;
}

std::string ValidationResult::describe() const {
  if (ok()) return "ok";
  std::ostringstream os;
  os.precision(17);
  for (const auto& v : bad_row_sums) {
    os << "row (s=" << v.state << ", a=" << v.action << ") sums to " << v.row_sum << "; ";
  }
  for (const auto& v : out_of_range) {
    os << "entry (s=" << v.state << ", a=" << v.action << ", s'=" << v.next_state
       << ") = " << v.value << (v.value < 0.0 ? " is negative" : " is out of range") << "; ";
  }
  auto text = os.str();
  text.resize(text.size() - 2);
  return text;
}

double min_entry(const Environment& env) {
  const auto d = env.data();
  return *std::min_element(d.begin(), d.end());
}

}  // namespace cmplab
