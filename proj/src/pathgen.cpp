#include "clustex/pathgen.hpp"

#include <algorithm>
#include <stdexcept>

namespace clustex {

const char* to_string(Construction c) {
  return c == Construction::FiniteMean ? "finite-mean" : "censored";
}

Construction construction_from_string(const std::string& s) {
  if (s == "finite-mean") return Construction::FiniteMean;
  if (s == "censored") return Construction::Censored;
  throw std::invalid_argument("construction must be 'finite-mean' or 'censored', got '" +
                              s + "'");
}

SequenceModel SequenceModel::finite_mean(ClusterLaw g) {
  if (!g.finite_mean())
    throw std::invalid_argument("finite-mean construction requires a finite mean, but " +
                                g.descriptor() + " has infinite mean");
  return {Construction::FiniteMean, std::move(g), std::nullopt};
}

SequenceModel SequenceModel::censored(ClusterLaw g) {
  CensoredCycleLaw cl(g);
  return {Construction::Censored, std::move(g), std::move(cl)};
}

double SequenceModel::mean_cycle() const {
  return construction == Construction::FiniteMean ? law.mean()
                                                  : cycle_law->mean_cycle();
}

Cycle ModelCycles::next() {
  if (first_) {
    first_ = false;
    if (model_->construction == Construction::FiniteMean) {
      const std::int64_t len = model_->law.sample_stationary_delay(rng_);
      return {len, rng_.exp1()};
    }
    const InitialVector iv = model_->cycle_law->sample_initial(rng_);
    return {iv.excess, iv.height};
  }
  if (model_->construction == Construction::FiniteMean) {
    const std::int64_t len = model_->law.sample(rng_);
    return {len, rng_.exp1()};
  }
  const auto [len, y] = model_->cycle_law->sample_cycle(rng_);
  return {len, y};
}

double RegenerativePath::x_at(std::int64_t k) const {
  return height[cycle_covering(k)];
}

std::size_t RegenerativePath::cycle_covering(std::int64_t k) const {
  if (k < 0 || k >= csum.back())
    throw std::out_of_range("cycle_covering: index outside the generated path");
  const auto it = std::upper_bound(csum.begin(), csum.end(), k);
  return static_cast<std::size_t>(it - csum.begin());
}

RegenerativePath build_path(const SequenceModel& model, std::int64_t n, Rng rng) {
  if (n < 1) throw std::invalid_argument("build_path: horizon must be >= 1");
  RegenerativePath p;
  p.construction = model.construction;
  p.horizon = n;
  const auto expected =
      static_cast<std::size_t>(static_cast<double>(n) / model.mean_cycle() * 1.05) + 8;
  p.len.reserve(expected);
  p.height.reserve(expected);
  p.csum.reserve(expected);
  ModelCycles gen(model, rng);
  std::int64_t s = 0;
  while (s < n) {
    const Cycle c = gen.next();
    s += c.len;
    p.len.push_back(c.len);
    p.height.push_back(c.height);
    p.csum.push_back(s);
  }
  return p;
}

}  // namespace clustex
