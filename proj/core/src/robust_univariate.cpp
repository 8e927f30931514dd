#include "mrcd/robust_univariate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace mrcd {

double median(std::span<const double> x) {
  if (x.empty()) {
    throw std::invalid_argument("median: empty sample");
  }
  std::vector<double> v(x.begin(), x.end());
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  auto mid_it = v.begin() + static_cast<std::ptrdiff_t>(mid);
  std::nth_element(v.begin(), mid_it, v.end());
  double med = *mid_it;
  if (n % 2 == 0) {
    med = 0.5 * (med + *std::max_element(v.begin(), mid_it));
  }
  return med;
}

double qn_correction(std::size_t n) {
  static constexpr std::array<double, 8> kSmall = {0.399, 0.994, 0.512, 0.844,
                                                   0.611, 0.857, 0.669, 0.872};
  if (n < 2) {
    throw std::invalid_argument("qn_correction: need n >= 2");
  }
  if (n <= 9) {
    return kSmall[n - 2];
  }
  const double dn = static_cast<double>(n);
  return (n % 2 == 1) ? dn / (dn + 1.4) : dn / (dn + 3.8);
}

std::size_t qn_rank(std::size_t n) {
  const std::size_t h = n / 2 + 1;
  return h * (h - 1) / 2;
}

namespace {

// Pairs (i < j) of the sorted sample with s[j] - s[i] <= t.
std::uint64_t count_pairs_within(const std::vector<double>& s, double t) {
  std::uint64_t count = 0;
  std::size_t i = 0;
  for (std::size_t j = 1; j < s.size(); ++j) {
    while (s[j] - s[i] > t) {
      ++i;
    }
    count += j - i;
  }
  return count;
}

}  // namespace

double kth_pairwise_difference(std::span<const double> x, std::size_t k) {
  const std::size_t n = x.size();
  if (n < 2) {
    throw std::invalid_argument("kth_pairwise_difference: need n >= 2");
  }
  const std::uint64_t pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  if (k < 1 || k > pairs) {
    throw std::invalid_argument("kth_pairwise_difference: rank out of range");
  }
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());

  // Bisect on the value until few pairs fall in (lo, hi], then select among
  // those exactly. lo < 0 stands for "below every difference".
  double lo = -1.0;
  double hi = s.back() - s.front();
  std::uint64_t below = 0;     // pairs with difference <= lo
  std::uint64_t at_hi = pairs;  // pairs with difference <= hi
  const std::uint64_t budget = 4 * static_cast<std::uint64_t>(n);
  while (at_hi - below > budget) {
    const double mid = lo < 0.0 ? 0.5 * hi : lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) {
      return hi;  // no double strictly inside: every remaining pair equals hi
    }
    const std::uint64_t c = count_pairs_within(s, mid);
    if (c >= k) {
      hi = mid;
      at_hi = c;
    } else {
      lo = mid;
      below = c;
    }
  }

  std::vector<double> inside;
  inside.reserve(static_cast<std::size_t>(at_hi - below));
  std::size_t first = 0;  // smallest i with s[j] - s[i] <= hi
  std::size_t last = 0;   // smallest i with s[j] - s[i] <= lo
  for (std::size_t j = 1; j < n; ++j) {
    while (s[j] - s[first] > hi) ++first;
    while (last < j && s[j] - s[last] > lo) ++last;
    for (std::size_t i = first; i < last; ++i) inside.push_back(s[j] - s[i]);
  }
  const auto nth = inside.begin() + static_cast<std::ptrdiff_t>(k - below - 1);
  std::nth_element(inside.begin(), nth, inside.end());
  return *nth;
}

double qn_scale(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) {
    throw std::invalid_argument("qn_scale: need at least 2 observations");
  }
  return kQnConsistency * qn_correction(n) *
         kth_pairwise_difference(x, qn_rank(n));
}

namespace {

std::int64_t tie_pairs(std::span<const double> sorted) {
  std::int64_t total = 0;
  std::int64_t run = 1;
  for (std::size_t i = 1; i <= sorted.size(); ++i) {
    if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
      ++run;
    } else {
      total += run * (run - 1) / 2;
      run = 1;
    }
  }
  return total;
}

// Stable merge sort on y; returns the number of strict inversions.
std::int64_t sort_count_swaps(std::vector<double>& y, std::vector<double>& buf,
                              std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) {
    return 0;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = sort_count_swaps(y, buf, lo, mid) +
                       sort_count_swaps(y, buf, mid, hi);
  std::size_t a = lo;
  std::size_t b = mid;
  std::size_t out = lo;
  while (a < mid && b < hi) {
    if (y[b] < y[a]) {
      buf[out++] = y[b++];
      swaps += static_cast<std::int64_t>(mid - a);
    } else {
      buf[out++] = y[a++];
    }
  }
  while (a < mid) buf[out++] = y[a++];
  while (b < hi) buf[out++] = y[b++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
            buf.begin() + static_cast<std::ptrdiff_t>(hi),
            y.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

}  // namespace

KendallTau kendall_tau(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("kendall_tau: length mismatch");
  }
  const std::size_t n = x.size();
  if (n < 2) {
    throw std::invalid_argument("kendall_tau: need at least 2 observations");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });

  std::vector<double> xs(n);
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = x[order[i]];
    ys[i] = y[order[i]];
  }

  const std::int64_t n0 = static_cast<std::int64_t>(n) * (n - 1) / 2;
  const std::int64_t n1 = tie_pairs(xs);

  std::int64_t n3 = 0;  // pairs tied in both coordinates
  std::int64_t run = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i < n && xs[i] == xs[i - 1] && ys[i] == ys[i - 1]) {
      ++run;
    } else {
      n3 += run * (run - 1) / 2;
      run = 1;
    }
  }

  std::vector<double> buf(n);
  const std::int64_t swaps = sort_count_swaps(ys, buf, 0, n);
  const std::int64_t n2 = tie_pairs(ys);

  if (n0 == n1 || n0 == n2) {
    return {0.0, true};
  }
  const double s = static_cast<double>(n0 - n1 - n2 + n3 - 2 * swaps);
  const double norm = std::sqrt(static_cast<double>(n0 - n1)) *
                      std::sqrt(static_cast<double>(n0 - n2));
  return {std::clamp(s / norm, -1.0, 1.0), false};
}

std::vector<double> average_ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && x[order[j]] == x[order[i]]) {
      ++j;
    }
    const double r = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      ranks[order[k]] = r;
    }
    i = j;
  }
  return ranks;
}

}  // namespace mrcd
