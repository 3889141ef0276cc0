// Copyright 2026 The Aerosim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "aerosim/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <Eigen/Dense>

namespace aerosim {

void parallel_for(std::size_t jobs, unsigned threads,
                  const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
  std::vector<std::exception_ptr> errors(jobs);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  auto worker = [&] {
    for (std::size_t i; !stop && (i = next++) < jobs;) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
        stop = true;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double reproduction_probability(const std::map<std::string, double>& risks,
                                const std::vector<std::string>& infected,
                                const std::vector<std::string>& not_infected) {
  auto risk_of = [&](const std::string& id) {
    const auto it = risks.find(id);
    if (it == risks.end()) throw ValidationError(id, "no risk for agent");
    if (!(it->second >= 0.0 && it->second <= 1.0)) {
      throw ValidationError(id, "risk must lie in [0, 1]");
    }
    return it->second;
  };
  double p = 1.0;
  for (const auto& id : infected) p *= risk_of(id);
  for (const auto& id : not_infected) p *= 1.0 - risk_of(id);
  return p;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) throw ValidationError("steps", "a grid axis needs at least 2 points");
  if (!(hi > lo)) throw ValidationError("range", "axis must be strictly increasing");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  }
  v.back() = hi;
  return v;
}

SweepResult sweep(const Scenario& scenario, const SweepOptions& o) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!(o.mu_min >= 0.0 && o.mu_max <= 1.0)) {
    throw ValidationError("mu", "viral load range must lie in [0, 1]");
  }
  if (!(o.dm_min > 0.0)) throw ValidationError("d_m", "median dose must be positive");
  SweepResult out;
  out.mu = linspace(o.mu_min, o.mu_max, o.mu_steps);
  out.d_m = linspace(o.dm_min, o.dm_max, o.dm_steps);
  out.p.assign(out.mu.size(), std::vector<double>(out.d_m.size(), 0.0));
  out.doses.resize(out.mu.size());

  const auto prepared = prepare(scenario);
  std::mutex progress_mutex;
  std::size_t done = 0;
  bool cancelled = false;
  parallel_for(out.mu.size(), o.threads, [&](std::size_t i) {
    TransportParams p = prepared->params;
    p.mu_normal = p.mu_superspreader = out.mu[i];
    RunOptions run;
    run.keep_frames = false;
    const SimulationResult r = simulate(*prepared, run, p);
    for (const auto& rec : r.records) {
      if (!rec.infectious) out.doses[i][rec.agent] = rec.final_dose;
    }
    for (std::size_t j = 0; j < out.d_m.size(); ++j) {
      std::map<std::string, double> risks;
      for (const auto& [id, dose] : out.doses[i]) {
        risks[id] = infection_risk(dose, out.d_m[j]);
      }
      out.p[i][j] = reproduction_probability(risks, o.infected, o.not_infected);
    }
    if (o.on_progress) {
      std::lock_guard lock(progress_mutex);
      ++done;
      if (!o.on_progress(static_cast<double>(done) / static_cast<double>(out.mu.size()))) {
        cancelled = true;
      }
    }
    if (cancelled) throw Cancelled();
  });
  out.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

double average_risk(const std::vector<double>& risks) {
  if (risks.empty()) throw ValidationError("records", "no susceptible agents");
  double s = 0.0;
  for (double r : risks) s += r;
  return s / static_cast<double>(risks.size());
}

double average_risk(const std::vector<ExposureRecord>& records) {
  std::vector<double> risks;
  for (const auto& r : records) {
    if (!r.infectious) risks.push_back(r.final_risk);
  }
  return average_risk(risks);
}

// ---------------------------------------------------------------- logistic

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

double LogisticFit::operator()(double t) const {
  if (plateau) return L;
  return L * sigmoid(k * (t - t0));
}

LogisticFit fit_logistic(const std::vector<std::pair<double, double>>& points,
                         int max_iterations, double tolerance) {
  const std::size_t n = points.size();
  if (n < 4) throw ValidationError("points", "a logistic fit needs at least 4 points");
  std::vector<std::pair<double, double>> pts = points;
  std::sort(pts.begin(), pts.end());
  const double t_lo = pts.front().first, t_hi = pts.back().first;
  double y_lo = pts.front().second, y_hi = y_lo;
  for (const auto& [t, y] : pts) {
    if (!std::isfinite(t) || !std::isfinite(y)) {
      throw ValidationError("points", "non-finite value");
    }
    y_lo = std::min(y_lo, y);
    y_hi = std::max(y_hi, y);
  }
  if (y_hi - y_lo <= 1e-12 * std::max(1.0, std::abs(y_hi)) || !(t_hi > t_lo)) {
    LogisticFit flat;
    double mean = 0.0;
    for (const auto& pt : pts) mean += pt.second;
    flat.L = std::clamp(mean / static_cast<double>(n), 0.0, 1.0);
    flat.t0 = t_lo;
    flat.plateau = true;
    for (const auto& [t, y] : pts) flat.rmse += (y - flat.L) * (y - flat.L);
    flat.rmse = std::sqrt(flat.rmse / static_cast<double>(n));
    return flat;
  }

  // Work in scaled time u = (t - centre) / scale for conditioning.
  const double centre = 0.5 * (t_lo + t_hi);
  const double scale = 0.5 * (t_hi - t_lo);
  std::vector<double> u(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = (pts[i].first - centre) / scale;
    y[i] = pts[i].second;
  }
  Eigen::Vector3d p;  // L, k (per unit u), u0
  p[0] = std::clamp(y_hi, 1e-12, 1.0);
  const double median_t = n % 2 ? pts[n / 2].first
                                : 0.5 * (pts[n / 2 - 1].first + pts[n / 2].first);
  p[2] = (median_t - centre) / scale;
  const double slope = (pts.back().second - pts.front().second) / (u.back() - u.front());
  p[1] = 4.0 * slope / p[0];
  if (std::abs(p[1]) < 1e-3) p[1] = slope >= 0.0 ? 1e-3 : -1e-3;

  auto sse = [&](const Eigen::Vector3d& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = q[0] * sigmoid(q[1] * (u[i] - q[2])) - y[i];
      s += r * r;
    }
    return s;
  };
  auto to_fit = [&](const Eigen::Vector3d& q, double s, int iterations) {
    LogisticFit f;
    f.L = q[0];
    f.k = q[1] / scale;
    f.t0 = centre + q[2] * scale;
    f.rmse = std::sqrt(s / static_cast<double>(n));
    f.iterations = iterations;
    return f;
  };

  double cost = sse(p);
  double damping = 1e-3;
  for (int it = 1; it <= max_iterations; ++it) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
      const double s = sigmoid(p[1] * (u[i] - p[2]));
      const double ds = s * (1.0 - s);
      const Eigen::Vector3d g(s, p[0] * ds * (u[i] - p[2]), -p[0] * ds * p[1]);
      jtj += g * g.transpose();
      jtr += g * (p[0] * s - y[i]);
    }
    // Try increasingly damped steps until one lowers the cost.
    bool improved = false;
    Eigen::Vector3d step = Eigen::Vector3d::Zero();
    for (int attempt = 0; attempt < 40 && !improved; ++attempt) {
      Eigen::Matrix3d a = jtj;
      for (int d = 0; d < 3; ++d) a(d, d) += damping * std::max(jtj(d, d), 1e-12);
      step = -a.ldlt().solve(jtr);
      Eigen::Vector3d q = p + step;
      q[0] = std::clamp(q[0], 0.0, 1.0);
      step = q - p;
      const double c = sse(q);
      if (std::isfinite(c) && c <= cost) {
        p = q;
        cost = c;
        damping = std::max(damping / 3.0, 1e-12);
        improved = true;
      } else {
        damping *= 4.0;
      }
    }
    if (!improved || step.norm() <= tolerance * (p.norm() + tolerance)) {
      return to_fit(p, cost, it);
    }
  }
  throw FitError("logistic fit did not converge in " + std::to_string(max_iterations) +
                     " iterations",
                 to_fit(p, cost, max_iterations));
}

// ------------------------------------------------------------------ fields

ConcentrationField time_averaged_field(const std::vector<Frame>& frames, double t_a,
                                       double t_b) {
  ConcentrationField out;
  std::size_t count = 0;
  for (const Frame& f : frames) {
    if (f.time < t_a - 1e-9 || f.time > t_b + 1e-9) continue;
    if (out.values.empty()) out.values.assign(f.values.size(), 0.0);
    if (f.values.size() != out.values.size()) {
      throw ContractViolation("frames come from different meshes");
    }
    for (std::size_t v = 0; v < f.values.size(); ++v) out.values[v] += f.values[v];
    ++count;
  }
  if (count == 0) throw ValidationError("window", "no frame in the averaging window");
  for (double& v : out.values) v /= static_cast<double>(count);
  out.time = 0.5 * (t_a + t_b);
  return out;
}

double time_averaged_mass(const std::vector<Frame>& frames, double t_a, double t_b) {
  double s = 0.0;
  std::size_t count = 0;
  for (const Frame& f : frames) {
    if (f.time < t_a - 1e-9 || f.time > t_b + 1e-9) continue;
    s += f.mass;
    ++count;
  }
  if (count == 0) throw ValidationError("window", "no frame in the averaging window");
  return s / static_cast<double>(count);
}

std::vector<std::pair<double, double>> exit_risks(const PreparedScenario& prepared,
                                                  const SimulationResult& result) {
  std::vector<std::pair<double, double>> out;
  for (std::size_t a = 0; a < result.records.size(); ++a) {
    const auto& rec = result.records[a];
    if (rec.infectious || prepared.trajectories[a].segments.empty()) continue;
    out.emplace_back(prepared.trajectories[a].end(), rec.final_risk);
  }
  return out;
}

// --------------------------------------------------------------- compare

std::vector<ComparisonRow> compare(const Scenario& baseline,
                                   const std::vector<NamedIntervention>& interventions,
                                   const CompareOptions& options) {
  std::vector<Scenario> runs = {baseline};
  std::vector<ComparisonRow> rows(interventions.size() + 1);
  rows[0].intervention = "baseline";
  rows[0].description = "no intervention";
  for (std::size_t i = 0; i < interventions.size(); ++i) {
    runs.push_back(apply_intervention(baseline, interventions[i].intervention));
    rows[i + 1].intervention = interventions[i].name;
    rows[i + 1].description = interventions[i].description;
  }
  const bool fitted = baseline.kind == ScenarioKind::supermarket && baseline.supermarket;
  const double close = fitted ? baseline.supermarket->arrivals_end : 0.0;
  std::mutex progress_mutex;
  std::size_t done = 0;
  parallel_for(runs.size(), options.threads, [&](std::size_t i) {
    const auto prepared = prepare(runs[i]);
    RunOptions run;
    run.keep_frames = false;
    const SimulationResult r = simulate(*prepared, run);
    ComparisonRow& row = rows[i];
    row.scenario = baseline.name;
    row.mean_final_risk = average_risk(r.records);
    row.metric = row.mean_final_risk;
    if (fitted) {
      LogisticFit fit;
      try {
        fit = fit_logistic(exit_risks(*prepared, r));
      } catch (const FitError& e) {
        fit = e.best();
      }
      row.fit = fit;
      row.metric = fit(close);
    }
    if (options.on_progress) {
      std::lock_guard lock(progress_mutex);
      ++done;
      if (!options.on_progress(static_cast<double>(done) / static_cast<double>(runs.size()))) {
        throw Cancelled();
      }
    }
  });
  for (auto& row : rows) row.delta = row.metric - rows[0].metric;
  return rows;
}

}  // namespace aerosim
