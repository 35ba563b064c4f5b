#include "pushguide/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

namespace pushguide {

namespace {

constexpr int kSeedsPerDim = 8;

SweepRow evaluate_cell(const RunConfig& base, const std::vector<std::string>& params,
                       const std::vector<double>& coords, const std::string& objective) {
  SweepRow row;
  row.coords = coords;
  try {
    RunConfig cfg = base;
    for (std::size_t i = 0; i < params.size(); ++i)
      apply_parameter(cfg, params[i], coords[i]);
    row.report = evaluate_report(cfg);
    row.objective = objective_value(row.report, objective);
  } catch (const std::exception& e) {
    row.objective = std::numeric_limits<double>::quiet_NaN();
    row.error = e.what();
  }
  return row;
}

void parallel_rows(long n, int threads, const std::function<void(long)>& body) {
  if (threads <= 1 || n < 2) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  auto worker = [&]() {
    while (true) {
      const long i = next.fetch_add(1);
      if (i >= n) break;
      body(i);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

int detuning_index(const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i].find("detuning") != std::string::npos) return int(i);
  return -1;
}

}  // namespace

long SweepTable::best_row() const {
  const int det = detuning_index(axis_names);
  long best = -1;
  for (long i = 0; i < long(rows.size()); ++i) {
    const auto& row = rows[std::size_t(i)];
    if (!row.error.empty() || std::isnan(row.objective)) continue;
    if (best < 0) {
      best = i;
      continue;
    }
    const auto& cur = rows[std::size_t(best)];
    if (row.objective > cur.objective) {
      best = i;
    } else if (row.objective == cur.objective && det >= 0 &&
               std::abs(row.coords[std::size_t(det)]) <
                   std::abs(cur.coords[std::size_t(det)])) {
      best = i;  // ties resolved toward faster (smaller |detuning|) transfer
    }
  }
  return best;
}

SweepTable run_sweep(const SweepSpec& spec, const RunConfig& base, int threads) {
  if (spec.axes.empty() || spec.axes.size() > 3)
    throw ConfigError("sweep: between 1 and 3 axes required");
  SweepTable table;
  table.objective_name = spec.objective;
  std::vector<std::string> params;
  long total = 1;
  for (const auto& axis : spec.axes) {
    table.axis_names.push_back(axis.parameter);
    params.push_back(axis.parameter);
    total *= long(axis.values.size());
  }

  table.rows.resize(std::size_t(total));
  parallel_rows(total, threads, [&](long index) {
    std::vector<double> coords(spec.axes.size());
    long rest = index;
    for (long a = long(spec.axes.size()) - 1; a >= 0; --a) {
      const auto& vals = spec.axes[std::size_t(a)].values;
      coords[std::size_t(a)] = vals[std::size_t(rest % long(vals.size()))];
      rest /= long(vals.size());
    }
    table.rows[std::size_t(index)] = evaluate_cell(base, params, coords, spec.objective);
  });
  return table;
}

namespace {

struct Vertex {
  std::vector<double> x;
  double g = 0;  // negated objective (minimized)
};

}  // namespace

OptimizeResult optimize(const OptimizeSpec& spec, const RunConfig& base, int threads) {
  const std::size_t dim = spec.parameters.size();
  if (dim == 0 || dim > 4) throw ConfigError("optimize: 1 to 4 free parameters");

  OptimizeResult result;
  int evals = 0;
  auto evaluate = [&](const std::vector<double>& x) {
    double value = -std::numeric_limits<double>::infinity();
    try {
      RunConfig cfg = base;
      for (std::size_t i = 0; i < dim; ++i)
        apply_parameter(cfg, spec.parameters[i], x[i]);
      value = objective_value(evaluate_report(cfg), spec.objective);
      if (std::isnan(value)) value = -std::numeric_limits<double>::infinity();
    } catch (const std::exception&) {
      // invalid point: worst possible score
    }
    ++evals;
    result.trace.push_back({x, value});
    return value;
  };

  auto clip = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < dim; ++i)
      x[i] = std::clamp(x[i], spec.bounds[i].first, spec.bounds[i].second);
  };

  // --- coarse grid seeding, 8 points per dimension ---
  std::vector<std::vector<double>> seed_axes(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const auto [lo, hi] = spec.bounds[i];
    if (lo == hi) {
      seed_axes[i] = {lo};
    } else {
      for (int k = 0; k < kSeedsPerDim; ++k)
        seed_axes[i].push_back(lo + (hi - lo) * double(k) / double(kSeedsPerDim - 1));
    }
  }
  long n_seeds = 1;
  for (const auto& ax : seed_axes) n_seeds *= long(ax.size());

  std::vector<std::vector<double>> seeds(static_cast<std::size_t>(n_seeds),
                                         std::vector<double>(dim));
  for (long s = 0; s < n_seeds; ++s) {
    long rest = s;
    for (long a = long(dim) - 1; a >= 0; --a) {
      const auto& ax = seed_axes[std::size_t(a)];
      seeds[std::size_t(s)][std::size_t(a)] = ax[std::size_t(rest % long(ax.size()))];
      rest /= long(ax.size());
    }
  }

  // seeds evaluate independently; keep the trace in seed order
  std::vector<double> seed_values(static_cast<std::size_t>(n_seeds));
  {
    std::vector<OptimizeTracePoint> seed_trace(static_cast<std::size_t>(n_seeds));
    std::atomic<long> next{0};
    auto worker = [&]() {
      while (true) {
        const long i = next.fetch_add(1);
        if (i >= n_seeds) break;
        double value = -std::numeric_limits<double>::infinity();
        try {
          RunConfig cfg = base;
          for (std::size_t k = 0; k < dim; ++k)
            apply_parameter(cfg, spec.parameters[k], seeds[std::size_t(i)][k]);
          value = objective_value(evaluate_report(cfg), spec.objective);
          if (std::isnan(value)) value = -std::numeric_limits<double>::infinity();
        } catch (const std::exception&) {
        }
        seed_values[std::size_t(i)] = value;
        seed_trace[std::size_t(i)] = {seeds[std::size_t(i)], value};
      }
    };
    if (threads <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    for (auto& tp : seed_trace) result.trace.push_back(std::move(tp));
    evals += int(n_seeds);
  }

  const int det = detuning_index(spec.parameters);
  long best_seed = -1;
  for (long i = 0; i < n_seeds; ++i) {
    if (std::isinf(seed_values[std::size_t(i)]) && seed_values[std::size_t(i)] < 0)
      continue;
    if (best_seed < 0 || seed_values[std::size_t(i)] > seed_values[std::size_t(best_seed)] ||
        (seed_values[std::size_t(i)] == seed_values[std::size_t(best_seed)] && det >= 0 &&
         std::abs(seeds[std::size_t(i)][std::size_t(det)]) <
             std::abs(seeds[std::size_t(best_seed)][std::size_t(det)])))
      best_seed = i;
  }
  if (best_seed < 0) throw ModelError("optimize: every seed point is invalid");

  result.best_params = seeds[std::size_t(best_seed)];
  result.best_objective = seed_values[std::size_t(best_seed)];

  // --- Nelder-Mead on the negated objective, bounds enforced by clipping ---
  auto g_of = [&](const std::vector<double>& x) {
    const double v = evaluate(x);
    if (v > result.best_objective) {
      result.best_objective = v;
      result.best_params = x;
    }
    return -v;
  };

  std::vector<Vertex> simplex;
  simplex.push_back({result.best_params, -result.best_objective});
  for (std::size_t i = 0; i < dim; ++i) {
    std::vector<double> x = result.best_params;
    const auto [lo, hi] = spec.bounds[i];
    const double step = 0.1 * (hi - lo);
    if (step == 0) continue;  // degenerate dimension stays pinned
    x[i] = (x[i] + step <= hi) ? x[i] + step : x[i] - step;
    simplex.push_back({x, g_of(x)});
  }

  if (simplex.size() >= 2) {
    const int budget = spec.max_evals;
    while (evals - int(n_seeds) < budget) {
      std::sort(simplex.begin(), simplex.end(),
                [](const Vertex& a, const Vertex& b) { return a.g < b.g; });
      const double spread = simplex.back().g - simplex.front().g;
      if (std::abs(spread) <= spec.tolerance) break;

      const std::size_t worst = simplex.size() - 1;
      std::vector<double> centroid(dim, 0.0);
      for (std::size_t v = 0; v < worst; ++v)
        for (std::size_t i = 0; i < dim; ++i)
          centroid[i] += simplex[v].x[i] / double(worst);

      auto along = [&](double factor) {
        std::vector<double> x(dim);
        for (std::size_t i = 0; i < dim; ++i)
          x[i] = centroid[i] + factor * (simplex[worst].x[i] - centroid[i]);
        clip(x);
        return x;
      };

      const auto xr = along(-1.0);
      const double gr = g_of(xr);
      if (gr < simplex.front().g) {
        const auto xe = along(-2.0);
        const double ge = g_of(xe);
        simplex[worst] = ge < gr ? Vertex{xe, ge} : Vertex{xr, gr};
      } else if (gr < simplex[worst - 1].g) {
        simplex[worst] = {xr, gr};
      } else {
        const bool outside = gr < simplex[worst].g;
        const auto xc = along(outside ? -0.5 : 0.5);
        const double gc = g_of(xc);
        if (gc < std::min(gr, simplex[worst].g)) {
          simplex[worst] = {xc, gc};
        } else {
          // shrink toward the best vertex
          for (std::size_t v = 1; v < simplex.size(); ++v) {
            for (std::size_t i = 0; i < dim; ++i)
              simplex[v].x[i] =
                  simplex[0].x[i] + 0.5 * (simplex[v].x[i] - simplex[0].x[i]);
            simplex[v].g = g_of(simplex[v].x);
          }
        }
      }
    }
  }

  result.evaluations = evals;
  return result;
}

}  // namespace pushguide
