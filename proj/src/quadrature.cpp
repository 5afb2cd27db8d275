#include "carnot/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <string>
#include <thread>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/random/sobol.hpp>

#include "carnot/random.hpp"

namespace carnot {

namespace {

constexpr std::size_t kMcBlock = 4096;
constexpr std::size_t kQmcBlock = 1024;
constexpr std::size_t kTensorBlock = 4096;
constexpr int kQmcReplicates = 16;
constexpr int kGaussOrder = 8;

/// Full 8-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::array<double, kGaussOrder> nodes{};
  std::array<double, kGaussOrder> weights{};

  GaussRule() {
    using rule = boost::math::quadrature::gauss<double, kGaussOrder>;
    const auto& a = rule::abscissa();
    const auto& w = rule::weights();
    const int half = kGaussOrder / 2;
    for (int i = 0; i < half; ++i) {
      nodes[half - 1 - i] = -a[i];
      weights[half - 1 - i] = w[i];
      nodes[half + i] = a[i];
      weights[half + i] = w[i];
    }
  }
};

const GaussRule& gauss_rule() {
  static const GaussRule rule;
  return rule;
}

/// Runs fn(block) for every block; worker w takes blocks w, w + W, ...
/// The first failing block (lowest index) decides which exception propagates.
template <typename Fn>
void for_each_block(std::size_t nblocks, int workers, Fn&& fn) {
  const std::size_t w = std::min<std::size_t>(std::max(workers, 1), std::max<std::size_t>(nblocks, 1));
  if (w <= 1) {
    for (std::size_t b = 0; b < nblocks; ++b) fn(b);
    return;
  }
  std::vector<std::exception_ptr> errors(w);
  std::vector<std::size_t> failed(w, std::numeric_limits<std::size_t>::max());
  std::vector<std::thread> threads;
  threads.reserve(w);
  for (std::size_t t = 0; t < w; ++t) {
    threads.emplace_back([&, t] {
      for (std::size_t b = t; b < nblocks; b += w) {
        try {
          fn(b);
        } catch (...) {
          errors[t] = std::current_exception();
          failed[t] = b;
          return;
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  const auto first = std::min_element(failed.begin(), failed.end()) - failed.begin();
  if (errors[first]) std::rethrow_exception(errors[first]);
}

void check_finite(std::span<const double> values, const Point& x) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      std::string where;
      for (Eigen::Index i = 0; i < x.size(); ++i) where += (i ? ", " : "") + std::to_string(x[i]);
      throw NonFiniteSample("integrand is not finite at (" + where + ")");
    }
  }
}

/// Evaluates the integrand, honouring the annulus indicator.
void evaluate(const VectorIntegrand& f, const Domain& d, const Point& x, std::span<double> out) {
  if (!d.contains(x)) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  f(x, out);
  check_finite(out, x);
}

bool within_tolerance(double value, double error, double tol) {
  return error <= tol * std::abs(value) || (error == 0.0 && value == 0.0);
}

std::vector<IntegrationResult> monte_carlo(int comps, const VectorIntegrand& f, const Domain& d,
                                           const QuadratureConfig& cfg) {
  const std::size_t n = cfg.budget;
  const std::size_t nblocks = (n + kMcBlock - 1) / kMcBlock;
  const int dim = d.dim();
  const CounterRng rng(cfg.seed);
  const Vector width = d.hi() - d.lo();
  std::vector<double> block_sum(nblocks * comps), block_sq(nblocks * comps);

  for_each_block(nblocks, resolve_workers(cfg.workers), [&](std::size_t b) {
    const std::size_t begin = b * kMcBlock;
    const std::size_t count = std::min(kMcBlock, n - begin);
    std::vector<double> vals(count * comps), sq(count * comps);
    std::vector<double> out(comps);
    Point x(dim);
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint64_t index = begin + i;
      for (int k = 0; k < dim; ++k) x[k] = d.lo()[k] + width[k] * rng.uniform(index, k);
      evaluate(f, d, x, out);
      for (int c = 0; c < comps; ++c) {
        vals[c * count + i] = out[c];
        sq[c * count + i] = out[c] * out[c];
      }
    }
    for (int c = 0; c < comps; ++c) {
      block_sum[b * comps + c] = pairwise_sum({vals.data() + c * count, count});
      block_sq[b * comps + c] = pairwise_sum({sq.data() + c * count, count});
    }
  });

  const double volume = d.box_volume();
  std::vector<IntegrationResult> results(comps);
  std::vector<double> column(nblocks);
  for (int c = 0; c < comps; ++c) {
    for (std::size_t b = 0; b < nblocks; ++b) column[b] = block_sum[b * comps + c];
    const double sum = pairwise_sum(column);
    for (std::size_t b = 0; b < nblocks; ++b) column[b] = block_sq[b * comps + c];
    const double sumsq = pairwise_sum(column);
    const double mean = sum / static_cast<double>(n);
    const double var = std::max(0.0, (sumsq - sum * mean) / static_cast<double>(n - 1));
    auto& r = results[c];
    r.value = volume * mean;
    r.error_estimate = volume * std::sqrt(var / static_cast<double>(n));
    r.evals = n;
    r.tolerance_met = within_tolerance(r.value, r.error_estimate, cfg.target_rel_tol);
  }
  return results;
}

/// Sobol points with kQmcReplicates independent random shifts modulo 1.
std::vector<IntegrationResult> quasi_monte_carlo(int comps, const VectorIntegrand& f, const Domain& d,
                                                 const QuadratureConfig& cfg) {
  const std::size_t points = cfg.budget / kQmcReplicates;
  const std::size_t nblocks = (points + kQmcBlock - 1) / kQmcBlock;
  const int dim = d.dim();
  const CounterRng rng(cfg.seed);
  const Vector width = d.hi() - d.lo();
  std::vector<std::array<double, kMaxDim>> shifts(kQmcReplicates);
  for (int r = 0; r < kQmcReplicates; ++r) {
    for (int k = 0; k < dim; ++k) shifts[r][k] = rng.uniform(r, k);
  }
  const std::size_t slots = static_cast<std::size_t>(kQmcReplicates) * comps;
  std::vector<double> block_sum(nblocks * slots);

  for_each_block(nblocks, resolve_workers(cfg.workers), [&](std::size_t b) {
    const std::size_t begin = b * kQmcBlock;
    const std::size_t count = std::min(kQmcBlock, points - begin);
    boost::random::sobol engine(dim);
    engine.seed(begin);
    std::vector<double> vals(count * slots);
    std::vector<double> out(comps);
    std::array<double, kMaxDim> u{};
    Point x(dim);
    for (std::size_t i = 0; i < count; ++i) {
      for (int k = 0; k < dim; ++k) u[k] = static_cast<double>(engine()) * 0x1.0p-64;
      for (int r = 0; r < kQmcReplicates; ++r) {
        for (int k = 0; k < dim; ++k) {
          double s = u[k] + shifts[r][k];
          if (s >= 1.0) s -= 1.0;
          x[k] = d.lo()[k] + width[k] * s;
        }
        evaluate(f, d, x, out);
        for (int c = 0; c < comps; ++c) vals[(r * comps + c) * count + i] = out[c];
      }
    }
    for (std::size_t s = 0; s < slots; ++s) block_sum[b * slots + s] = pairwise_sum({vals.data() + s * count, count});
  });

  const double volume = d.box_volume();
  std::vector<IntegrationResult> results(comps);
  std::vector<double> column(nblocks);
  for (int c = 0; c < comps; ++c) {
    std::array<double, kQmcReplicates> means{};
    for (int r = 0; r < kQmcReplicates; ++r) {
      for (std::size_t b = 0; b < nblocks; ++b) column[b] = block_sum[b * slots + r * comps + c];
      means[r] = volume * pairwise_sum(column) / static_cast<double>(points);
    }
    const double mean = pairwise_sum(means);
    const double avg = mean / kQmcReplicates;
    std::array<double, kQmcReplicates> dev{};
    for (int r = 0; r < kQmcReplicates; ++r) dev[r] = (means[r] - avg) * (means[r] - avg);
    auto& res = results[c];
    res.value = avg;
    res.error_estimate = std::sqrt(pairwise_sum(dev) / (kQmcReplicates * (kQmcReplicates - 1.0)));
    res.evals = points * kQmcReplicates;
    res.tolerance_met = within_tolerance(res.value, res.error_estimate, cfg.target_rel_tol);
  }
  return results;
}

std::vector<double> tensor_level(int comps, const VectorIntegrand& f, const Domain& d, int panels, int workers) {
  const auto& rule = gauss_rule();
  const int dim = d.dim();
  const std::size_t per_axis = static_cast<std::size_t>(panels) * kGaussOrder;
  std::size_t total = 1;
  for (int k = 0; k < dim; ++k) total *= per_axis;
  const std::size_t nblocks = (total + kTensorBlock - 1) / kTensorBlock;
  const Vector h = (d.hi() - d.lo()) / panels;
  std::vector<double> block_sum(nblocks * comps);

  for_each_block(nblocks, workers, [&](std::size_t b) {
    const std::size_t begin = b * kTensorBlock;
    const std::size_t count = std::min(kTensorBlock, total - begin);
    std::vector<double> vals(count * comps);
    std::vector<double> out(comps);
    Point x(dim);
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t flat = begin + i;
      double weight = 1.0;
      for (int k = 0; k < dim; ++k) {
        const std::size_t node = flat % per_axis;
        flat /= per_axis;
        const std::size_t panel = node / kGaussOrder;
        const std::size_t j = node % kGaussOrder;
        x[k] = d.lo()[k] + h[k] * (static_cast<double>(panel) + 0.5 * (1.0 + rule.nodes[j]));
        weight *= 0.5 * h[k] * rule.weights[j];
      }
      evaluate(f, d, x, out);
      for (int c = 0; c < comps; ++c) vals[c * count + i] = weight * out[c];
    }
    for (int c = 0; c < comps; ++c) block_sum[b * comps + c] = pairwise_sum({vals.data() + c * count, count});
  });

  std::vector<double> sums(comps);
  std::vector<double> column(nblocks);
  for (int c = 0; c < comps; ++c) {
    for (std::size_t b = 0; b < nblocks; ++b) column[b] = block_sum[b * comps + c];
    sums[c] = pairwise_sum(column);
  }
  return sums;
}

std::vector<IntegrationResult> adaptive_tensor(int comps, const VectorIntegrand& f, const Domain& d,
                                               const QuadratureConfig& cfg) {
  const int workers = resolve_workers(cfg.workers);
  std::vector<IntegrationResult> results(comps);
  std::vector<double> previous;
  std::uint64_t evals = 0;
  for (int panels = 1;; panels *= 2) {
    const double level_size = std::pow(static_cast<double>(panels * kGaussOrder), d.dim());
    if (static_cast<double>(evals) + level_size > static_cast<double>(cfg.budget)) {
      if (previous.empty()) throw InvalidArgument("budget too small for one tensor Gauss level");
      break;
    }
    const auto sums = tensor_level(comps, f, d, panels, workers);
    evals += static_cast<std::uint64_t>(level_size);
    bool converged = !previous.empty();
    for (int c = 0; c < comps; ++c) {
      auto& r = results[c];
      r.value = sums[c];
      r.error_estimate = previous.empty() ? std::abs(sums[c]) : std::abs(sums[c] - previous[c]);
      r.tolerance_met = !previous.empty() && within_tolerance(r.value, r.error_estimate, cfg.target_rel_tol);
      converged = converged && r.tolerance_met;
    }
    previous = sums;
    if (converged) break;
  }
  for (auto& r : results) r.evals = evals;
  return results;
}

double gauss_composite(const std::function<double(double)>& f, double a, double b, int panels) {
  const auto& rule = gauss_rule();
  const double h = (b - a) / panels;
  std::vector<double> vals(static_cast<std::size_t>(panels) * kGaussOrder);
  for (int p = 0; p < panels; ++p) {
    for (int j = 0; j < kGaussOrder; ++j) {
      const double s = a + h * (p + 0.5 * (1.0 + rule.nodes[j]));
      vals[p * kGaussOrder + j] = 0.5 * h * rule.weights[j] * f(s);
    }
  }
  return pairwise_sum(vals);
}

IntegrationResult gauss_with_estimate(const std::function<double(double)>& f, double a, double b, int panels) {
  IntegrationResult r;
  r.value = gauss_composite(f, a, b, panels);
  const double coarse = panels > 1 ? gauss_composite(f, a, b, panels / 2) : 0.0;
  r.error_estimate = std::abs(r.value - coarse);
  r.evals = static_cast<std::uint64_t>(panels + panels / 2) * kGaussOrder;
  return r;
}

}  // namespace

std::string_view to_string(QuadratureMethod method) {
  switch (method) {
    case QuadratureMethod::adaptive_tensor: return "adaptive_tensor";
    case QuadratureMethod::quasi_monte_carlo: return "quasi_monte_carlo";
    case QuadratureMethod::monte_carlo: return "monte_carlo";
  }
  return "unknown";
}

QuadratureMethod parse_quadrature_method(std::string_view name) {
  if (name == "adaptive_tensor" || name == "adaptive") return QuadratureMethod::adaptive_tensor;
  if (name == "quasi_monte_carlo" || name == "qmc") return QuadratureMethod::quasi_monte_carlo;
  if (name == "monte_carlo" || name == "mc") return QuadratureMethod::monte_carlo;
  throw InvalidArgument("unknown quadrature method '" + std::string(name) + "'");
}

void QuadratureConfig::validate() const {
  if (budget < 1000) throw InvalidArgument("quadrature budget must be at least 1000");
  if (!(target_rel_tol > 0.0)) throw InvalidArgument("target relative tolerance must be positive");
}

Domain Domain::box(Vector lo, Vector hi) {
  if (lo.size() != hi.size() || lo.size() == 0) throw InvalidArgument("box corners must have equal, nonzero dimension");
  if (!(lo.array() < hi.array()).all()) throw InvalidArgument("box must satisfy lo < hi on every axis");
  Domain d;
  d.lo_ = std::move(lo);
  d.hi_ = std::move(hi);
  return d;
}

Domain Domain::norm_annulus(const GroupSpec& g, double r_in, double r_out) {
  if (!(r_in >= 0.0 && r_in < r_out)) throw InvalidArgument("annulus needs 0 <= R_in < R_out");
  Vector half(g.dim());
  for (int i = 0; i < g.dim(); ++i) half[i] = std::pow(r_out, g.weights().exponents[i]);
  Domain d = box(-half, half);
  d.norm_ = [g](const Point& x) { return homogeneous_norm(g, x); };
  d.r_in_ = r_in;
  d.r_out_ = r_out;
  return d;
}

double Domain::box_volume() const { return (hi_ - lo_).prod(); }

bool Domain::contains(const Point& x) const {
  if (!norm_) return true;
  const double n = norm_(x);
  return n >= r_in_ && n < r_out_;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<IntegrationResult> integrate(int components, const VectorIntegrand& f, const Domain& d,
                                         const QuadratureConfig& cfg) {
  cfg.validate();
  if (components < 1) throw InvalidArgument("need at least one integrand component");
  switch (cfg.method) {
    case QuadratureMethod::monte_carlo: return monte_carlo(components, f, d, cfg);
    case QuadratureMethod::quasi_monte_carlo: return quasi_monte_carlo(components, f, d, cfg);
    case QuadratureMethod::adaptive_tensor: return adaptive_tensor(components, f, d, cfg);
  }
  throw InvalidArgument("unknown quadrature method");
}

IntegrationResult integrate(const Integrand& f, const Domain& d, const QuadratureConfig& cfg) {
  return integrate(1, [&f](const Point& x, std::span<double> out) { out[0] = f(x); }, d, cfg).front();
}

IntegrationResult integrate(const ScalarField& f, const Domain& d, const QuadratureConfig& cfg) {
  return integrate([&f](const Point& x) { return f.value(x); }, d, cfg);
}

RadialIntegrals radial_reduce(double Q, double alpha, const RadialProfile& f, const RadialGrid& grid) {
  if (!(Q + alpha - 2.0 > 0.0)) throw InvalidArgument("radial reduction needs Q + alpha - 2 > 0");
  if (!(f.lo > 0.0)) throw InvalidArgument("radial profile support must stay away from r = 0");
  if (!std::isfinite(f.hi) || !(f.hi > f.lo)) throw InvalidArgument("radial profile support must be a bounded interval");
  if (grid.panels < 2) throw InvalidArgument("radial grid needs at least two panels");
  const double a = std::log(f.lo);
  const double b = std::log(f.hi);
  // dr = r ds
  const auto num = [&](double s) {
    const double r = std::exp(s);
    const double d = f.df(r);
    return std::pow(r, alpha + Q) * d * d;
  };
  const auto den = [&](double s) {
    const double r = std::exp(s);
    const double v = f.f(r);
    return std::pow(r, alpha + Q - 2.0) * v * v;
  };
  return {gauss_with_estimate(num, a, b, grid.panels), gauss_with_estimate(den, a, b, grid.panels)};
}

IntegrationResult ball_volume(const GroupSpec& g, double R, const QuadratureConfig& cfg) {
  if (!(R > 0.0)) throw InvalidArgument("ball radius must be positive");
  const auto d = Domain::norm_annulus(g, 0.0, R);
  auto r = integrate([](const Point&) { return 1.0; }, d, cfg);
  if (!r.tolerance_met) {
    throw ToleranceNotMet("ball volume: standard error " + std::to_string(r.error_estimate) + " exceeds " +
                          std::to_string(cfg.target_rel_tol) + " relative to " + std::to_string(r.value));
  }
  return r;
}

}  // namespace carnot
