/*
 * Copyright 2026 The distres Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "distres/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace distres::oracle {

using Rational = boost::multiprecision::cpp_rational;

InclusionTable exact_inclusion(std::span<const double> weights, std::size_t k) {
  const std::size_t n = weights.size();
  if (n > kMaxExactItems) {
    throw SizeError("exact enumeration supports at most " +
                    std::to_string(kMaxExactItems) + " items");
  }
  if (k > n) throw RangeError("sample size exceeds item count");
  std::vector<Rational> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    detail::check_weight(Weight{weights[i]});
    w[i] = Rational(weights[i]);
  }
  const Rational total = std::accumulate(w.begin(), w.end(), Rational(0));

  // prob[S]: probability that the first |S| draws are exactly the set S.
  const std::size_t states = std::size_t{1} << n;
  std::vector<Rational> prob(states);
  std::vector<Rational> mass(states);
  prob[0] = 1;
  for (std::size_t s = 0; s < states; ++s) {
    if (s != 0) {
      const std::size_t low = static_cast<std::size_t>(std::countr_zero(s));
      mass[s] = mass[s & (s - 1)] + w[low];
    }
    if (prob[s] == 0 || static_cast<std::size_t>(std::popcount(s)) >= k) continue;
    const Rational rest = total - mass[s];
    for (std::size_t i = 0; i < n; ++i) {
      if (s & (std::size_t{1} << i)) continue;
      prob[s | (std::size_t{1} << i)] += prob[s] * w[i] / rest;
    }
  }

  InclusionTable table;
  std::vector<Rational> incl(n);
  table.subset_probability.assign(states, 0.0);
  for (std::size_t s = 0; s < states; ++s) {
    if (static_cast<std::size_t>(std::popcount(s)) != k) continue;
    table.subset_probability[s] = static_cast<double>(prob[s]);
    for (std::size_t i = 0; i < n; ++i) {
      if (s & (std::size_t{1} << i)) incl[i] += prob[s];
    }
  }
  for (const Rational& r : incl) {
    table.exact.push_back(boost::multiprecision::numerator(r).str() + "/" +
                          boost::multiprecision::denominator(r).str());
    table.probability.push_back(static_cast<double>(r));
  }
  return table;
}

std::vector<std::size_t> reference_sample(Rng& rng, std::span<const double> weights,
                                          std::size_t k) {
  if (k > weights.size()) throw RangeError("sample size exceeds item count");
  std::vector<std::pair<double, std::size_t>> keyed(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    keyed[i] = {exponential_key(rng, Weight{weights[i]}).value, i};
  }
  std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(k),
                    keyed.end());
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = keyed[i].second;
  return out;
}

KeyedItem kth_of_merged(const std::vector<std::vector<KeyedItem>>& locals,
                        std::size_t k) {
  std::vector<KeyedItem> all;
  for (const auto& l : locals) all.insert(all.end(), l.begin(), l.end());
  if (k < 1 || k > all.size()) {
    throw RangeError("rank " + std::to_string(k) + " outside 1.." +
                     std::to_string(all.size()));
  }
  std::sort(all.begin(), all.end());
  return all[k - 1];
}

double chi_squared_sf(double statistic, double dof) {
  if (dof <= 0) return 1.0;
  if (statistic <= 0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, statistic / 2.0);
}

double chi_squared_gof(std::span<const std::uint64_t> observed,
                       std::span<const double> expected, std::uint64_t trials) {
  if (observed.size() != expected.size()) {
    throw SizeError("observed and expected differ in length");
  }
  double stat = 0.0;
  std::size_t bins = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = expected[i] * static_cast<double>(trials);
    if (e <= 0.0) {
      if (observed[i] != 0) return 0.0;
      continue;
    }
    const double d = static_cast<double>(observed[i]) - e;
    stat += d * d / e;
    ++bins;
  }
  return chi_squared_sf(stat, static_cast<double>(bins) - 1.0);
}

double chi_squared_two_sample(std::span<const std::uint64_t> a,
                              std::span<const std::uint64_t> b,
                              std::uint64_t min_bin_total) {
  if (a.size() != b.size()) throw SizeError("count vectors differ in length");
  std::vector<std::pair<double, double>> bins;
  std::uint64_t pa = 0;
  std::uint64_t pb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    pa += a[i];
    pb += b[i];
    if (pa + pb >= min_bin_total) {
      bins.emplace_back(static_cast<double>(pa), static_cast<double>(pb));
      pa = pb = 0;
    }
  }
  if (pa + pb > 0) {
    if (bins.empty()) {
      bins.emplace_back(static_cast<double>(pa), static_cast<double>(pb));
    } else {
      bins.back().first += static_cast<double>(pa);
      bins.back().second += static_cast<double>(pb);
    }
  }
  double na = 0.0;
  double nb = 0.0;
  for (const auto& [x, y] : bins) {
    na += x;
    nb += y;
  }
  const double n = na + nb;
  if (bins.size() < 2 || na == 0.0 || nb == 0.0) return 1.0;
  double stat = 0.0;
  for (const auto& [x, y] : bins) {
    const double ea = na * (x + y) / n;
    const double eb = nb * (x + y) / n;
    stat += (x - ea) * (x - ea) / ea + (y - eb) * (y - eb) / eb;
  }
  return chi_squared_sf(stat, static_cast<double>(bins.size()) - 1.0);
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace distres::oracle
