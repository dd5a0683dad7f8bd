#include "parasdc/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>

#include "parasdc/parallel.hpp"

namespace parasdc {

double spectral_radius_objective(const CollocationScheme& scheme, std::span<const double> q) {
  const std::size_t m = scheme.num_nodes();
  if (q.size() != m) throw DimensionMismatch("objective expects one entry per node");
  double negative_mass = 0.0;
  for (double v : q) {
    if (!std::isfinite(v)) return kObjectivePenalty;
    if (v < 0.0) negative_mass += std::abs(v);
  }
  RealMatrix e = RealMatrix::identity(m);
  const RealMatrix& qm = scheme.Q();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) e(i, j) -= q[i] * qm(i, j);
  double rho;
  try {
    rho = spectral_radius(e);
  } catch (const Error&) {
    return kObjectivePenalty;
  }
  if (negative_mass > 0.0) rho += kObjectivePenalty * (1.0 + negative_mass);
  return rho;
}

MinimizerResult nelder_mead(const Objective& objective, std::span<const double> start,
                            const NelderMeadOptions& options) {
  const std::size_t n = start.size();
  if (n == 0) throw InvalidArgument("nelder_mead needs a non-empty start");
  if (!(options.tol > 0.0)) throw InvalidArgument("nelder_mead tolerance must be positive");
  const std::size_t max_iter = options.max_iter ? options.max_iter : 200 * n;
  const std::size_t max_fun = max_iter;

  MinimizerResult result;
  result.start.assign(start.begin(), start.end());

  auto eval = [&](const Vector& x) {
    ++result.evaluations;
    return objective(x);
  };

  std::vector<Vector> sim(n + 1, Vector(start.begin(), start.end()));
  for (std::size_t k = 0; k < n; ++k) {
    double& y = sim[k + 1][k];
    y = y != 0.0 ? (1.0 + options.nonzero_delta) * y : options.zero_delta;
  }
  Vector fsim(n + 1);
  for (std::size_t k = 0; k <= n; ++k) fsim[k] = eval(sim[k]);

  auto sort_simplex = [&] {
    std::vector<std::size_t> idx(n + 1);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return fsim[a] < fsim[b]; });
    std::vector<Vector> s2(n + 1);
    Vector f2(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
      s2[k] = sim[idx[k]];
      f2[k] = fsim[idx[k]];
    }
    sim = std::move(s2);
    fsim = std::move(f2);
  };
  sort_simplex();

  const double rho = options.reflection, chi = options.expansion;
  const double psi = options.contraction, sigma = options.shrink;
  auto combine = [&](const Vector& xbar, double a, double b) {
    // a * xbar - b * worst
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = a * xbar[i] - b * sim[n][i];
    return x;
  };

  std::size_t iterations = 1;
  while (result.evaluations < max_fun && iterations < max_iter) {
    double extent = 0.0, spread = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      for (std::size_t i = 0; i < n; ++i) extent = std::max(extent, std::abs(sim[k][i] - sim[0][i]));
      spread = std::max(spread, std::abs(fsim[0] - fsim[k]));
    }
    if (extent <= options.tol && spread <= options.tol) {
      result.converged = true;
      break;
    }

    Vector xbar(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) xbar[i] += sim[k][i];
    for (double& v : xbar) v /= static_cast<double>(n);

    const Vector xr = combine(xbar, 1.0 + rho, rho);
    const double fxr = eval(xr);
    bool shrink = false;
    if (fxr < fsim[0]) {
      const Vector xe = combine(xbar, 1.0 + rho * chi, rho * chi);
      const double fxe = eval(xe);
      if (fxe < fxr) {
        sim[n] = xe;
        fsim[n] = fxe;
      } else {
        sim[n] = xr;
        fsim[n] = fxr;
      }
    } else if (fxr < fsim[n - 1]) {
      sim[n] = xr;
      fsim[n] = fxr;
    } else if (fxr < fsim[n]) {
      const Vector xc = combine(xbar, 1.0 + psi * rho, psi * rho);
      const double fxc = eval(xc);
      if (fxc <= fxr) {
        sim[n] = xc;
        fsim[n] = fxc;
      } else {
        shrink = true;
      }
    } else {
      Vector xcc(n);
      for (std::size_t i = 0; i < n; ++i) xcc[i] = (1.0 - psi) * xbar[i] + psi * sim[n][i];
      const double fxcc = eval(xcc);
      if (fxcc < fsim[n]) {
        sim[n] = xcc;
        fsim[n] = fxcc;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (std::size_t k = 1; k <= n; ++k) {
        for (std::size_t i = 0; i < n; ++i) sim[k][i] = sim[0][i] + sigma * (sim[k][i] - sim[0][i]);
        fsim[k] = eval(sim[k]);
      }
    }
    ++iterations;
    sort_simplex();
  }

  result.iterations = iterations;
  result.q_opt = sim[0];
  result.rho_opt = fsim[0];
  return result;
}

Preconditioner qdelta_min(const CollocationScheme& scheme, std::span<const double> start,
                          MinimizerResult* details) {
  if (start.size() != scheme.num_nodes())
    throw DimensionMismatch("qdelta_min start must have one entry per node");
  const MinimizerResult res = nelder_mead(
      [&](std::span<const double> q) { return spectral_radius_objective(scheme, q); }, start);
  if (details) *details = res;
  if (!res.converged) throw MinimizationFailed("Nelder-Mead did not converge");
  if (!(res.rho_opt < 1.0))
    throw MinimizationFailed("stiff-limit spectral radius " + std::to_string(res.rho_opt) +
                             " is not below 1");
  Vector diag(res.q_opt.size());
  for (std::size_t i = 0; i < diag.size(); ++i) {
    if (!(res.q_opt[i] > 0.0)) throw MinimizationFailed("minimizer has a non-positive entry");
    diag[i] = 1.0 / res.q_opt[i];
  }
  return {PreconditionerKind::MIN, RealMatrix::diagonal(diag), true};
}

std::vector<Vector> default_min_starts(std::size_t num_nodes) {
  std::vector<Vector> starts{Vector(num_nodes, 1.0)};
  for (std::size_t k = 0; k < num_nodes; ++k) {
    starts.emplace_back(num_nodes, 1.0);
    starts.back()[k] = 2.0;
  }
  Vector ramp(num_nodes);
  for (std::size_t k = 0; k < num_nodes; ++k) ramp[k] = static_cast<double>(k + 1);
  starts.push_back(ramp);
  return starts;
}

namespace {

struct CachedMin {
  Preconditioner precond;
  MinimizerResult details;
};

const CachedMin& cached_min(std::size_t num_nodes) {
  static std::mutex mutex;
  static std::map<std::size_t, CachedMin> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(num_nodes);
  if (it != cache.end()) return it->second;

  const CollocationScheme scheme = radau_right_scheme(num_nodes);
  std::optional<CachedMin> best;
  std::string last_error = "no start";
  for (const Vector& start : default_min_starts(num_nodes)) {
    MinimizerResult details;
    try {
      Preconditioner p = qdelta_min(scheme, start, &details);
      if (!best || details.rho_opt < best->details.rho_opt) best = CachedMin{std::move(p), details};
    } catch (const MinimizationFailed& e) {
      last_error = e.what();
    }
  }
  if (!best) throw MinimizationFailed("every start failed for M = " + std::to_string(num_nodes) +
                                      " (" + last_error + ")");
  return cache.emplace(num_nodes, std::move(*best)).first->second;
}

}  // namespace

const Preconditioner& cached_qdelta_min(std::size_t num_nodes) {
  return cached_min(num_nodes).precond;
}

const MinimizerResult& cached_qdelta_min_details(std::size_t num_nodes) {
  return cached_min(num_nodes).details;
}

Preconditioner make_preconditioner(PreconditionerKind kind, const CollocationScheme& scheme) {
  switch (kind) {
    case PreconditionerKind::IE: return qdelta_implicit_euler(scheme);
    case PreconditionerKind::LU: return qdelta_lu(scheme);
    case PreconditionerKind::Qpar: return qdelta_qpar(scheme);
    case PreconditionerKind::IEpar: return qdelta_iepar(scheme);
    case PreconditionerKind::MIN: return cached_qdelta_min(scheme.num_nodes());
    case PreconditionerKind::Custom: break;
  }
  throw InvalidArgument("custom preconditioners need an explicit matrix");
}

Landscape landscape_scan(const CollocationScheme& scheme, double q1_lo, double q1_hi, double q2_lo,
                         double q2_hi, std::size_t resolution, std::size_t workers) {
  if (scheme.num_nodes() != 2) throw InvalidArgument("landscape scan needs M = 2");
  if (resolution < 2) throw InvalidArgument("landscape resolution must be >= 2");
  if (!(q1_lo > 0.0 && q2_lo > 0.0 && q1_hi > q1_lo && q2_hi > q2_lo))
    throw InvalidArgument("landscape ranges must be positive and non-empty");
  Landscape out;
  out.q1.resize(resolution);
  out.q2.resize(resolution);
  const double r = static_cast<double>(resolution - 1);
  for (std::size_t i = 0; i < resolution; ++i) {
    out.q1[i] = q1_lo + (q1_hi - q1_lo) * static_cast<double>(i) / r;
    out.q2[i] = q2_lo + (q2_hi - q2_lo) * static_cast<double>(i) / r;
  }
  out.rho.assign(resolution * resolution, 0.0);
  parallel_for(resolution, workers, [&](std::size_t i) {
    double q[2];
    q[0] = out.q1[i];
    for (std::size_t j = 0; j < resolution; ++j) {
      q[1] = out.q2[j];
      out.rho[i * resolution + j] = spectral_radius_objective(scheme, q);
    }
  });
  return out;
}

}  // namespace parasdc
