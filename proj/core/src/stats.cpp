#include "gsim/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gsim {

namespace {

// Pools cells whose expected count is below `min_expected` into the cell
// with the largest expected count among the small ones, repeatedly, by
// merging all small cells together and, if still short, folding them into
// the largest remaining cell.
void pool_cells(std::vector<double>& observed, std::vector<double>& expected,
                double min_expected) {
  std::vector<double> obs_keep, exp_keep;
  double obs_pool = 0, exp_pool = 0;
  for (size_t i = 0; i < expected.size(); ++i) {
    if (expected[i] < min_expected) {
      obs_pool += observed[i];
      exp_pool += expected[i];
    } else {
      obs_keep.push_back(observed[i]);
      exp_keep.push_back(expected[i]);
    }
  }
  if (exp_pool > 0) {
    if (exp_pool >= min_expected || exp_keep.empty()) {
      obs_keep.push_back(obs_pool);
      exp_keep.push_back(exp_pool);
    } else {
      size_t smallest = 0;
      for (size_t i = 1; i < exp_keep.size(); ++i)
        if (exp_keep[i] < exp_keep[smallest]) smallest = i;
      obs_keep[smallest] += obs_pool;
      exp_keep[smallest] += exp_pool;
    }
  }
  observed = std::move(obs_keep);
  expected = std::move(exp_keep);
}

double chi2_upper_p(double stat, double dof) {
  if (dof < 1) return 1.0;
  boost::math::chi_squared_distribution<double> dist(dof);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size())
    throw std::invalid_argument("tv_distance: size mismatch");
  double d = 0;
  for (size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - q[i]);
  return d / 2;
}

double chi2_pvalue(const std::vector<size_t>& counts,
                   const std::vector<double>& reference) {
  if (counts.size() != reference.size())
    throw std::invalid_argument("chi2_pvalue: size mismatch");
  double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  double mass = std::accumulate(reference.begin(), reference.end(), 0.0);
  if (std::abs(mass - 1.0) > 1e-6)
    throw std::invalid_argument("chi2_pvalue: reference does not sum to 1");
  std::vector<double> observed, expected;
  for (size_t i = 0; i < counts.size(); ++i) {
    if (reference[i] <= 0 && counts[i] == 0) continue;  // impossible, unseen
    observed.push_back(double(counts[i]));
    expected.push_back(reference[i] * total);
  }
  pool_cells(observed, expected, 5.0);
  double stat = 0;
  for (size_t i = 0; i < expected.size(); ++i) {
    if (expected[i] <= 0) return observed[i] > 0 ? 0.0 : 1.0;
    double d = observed[i] - expected[i];
    stat += d * d / expected[i];
  }
  return chi2_upper_p(stat, double(expected.size()) - 1.0);
}

double chi2_two_sample_pvalue(const std::vector<size_t>& a,
                              const std::vector<size_t>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("chi2_two_sample_pvalue: size mismatch");
  double na = std::accumulate(a.begin(), a.end(), 0.0);
  double nb = std::accumulate(b.begin(), b.end(), 0.0);
  // Pool on the pooled-estimate expected counts of the smaller sample.
  std::vector<double> obs_a, obs_b, exp_min;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] + b[i] == 0) continue;
    obs_a.push_back(double(a[i]));
    obs_b.push_back(double(b[i]));
    exp_min.push_back(double(a[i] + b[i]) * std::min(na, nb) / (na + nb));
  }
  // Pool the three arrays in lockstep, keyed on exp_min.
  std::vector<double> ka, kb, ke;
  double pa = 0, pb = 0, pe = 0;
  for (size_t i = 0; i < exp_min.size(); ++i) {
    if (exp_min[i] < 5.0) {
      pa += obs_a[i];
      pb += obs_b[i];
      pe += exp_min[i];
    } else {
      ka.push_back(obs_a[i]);
      kb.push_back(obs_b[i]);
      ke.push_back(exp_min[i]);
    }
  }
  if (pe > 0) {
    if (pe >= 5.0 || ke.empty()) {
      ka.push_back(pa);
      kb.push_back(pb);
      ke.push_back(pe);
    } else {
      size_t smallest = 0;
      for (size_t i = 1; i < ke.size(); ++i)
        if (ke[i] < ke[smallest]) smallest = i;
      ka[smallest] += pa;
      kb[smallest] += pb;
    }
  }
  double stat = 0;
  for (size_t i = 0; i < ka.size(); ++i) {
    double c = ka[i] + kb[i];
    double ea = c * na / (na + nb);
    double eb = c * nb / (na + nb);
    stat += (ka[i] - ea) * (ka[i] - ea) / ea;
    stat += (kb[i] - eb) * (kb[i] - eb) / eb;
  }
  return chi2_upper_p(stat, double(ka.size()) - 1.0);
}

StatSummary stat_tests(const std::vector<size_t>& counts,
                       const std::vector<double>& reference) {
  double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  std::vector<double> emp(counts.size(), 0.0);
  if (total > 0)
    for (size_t i = 0; i < counts.size(); ++i) emp[i] = counts[i] / total;
  return {tv_distance(emp, reference), chi2_pvalue(counts, reference)};
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_slope: need >= 2 points");
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace gsim
