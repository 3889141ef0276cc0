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

#ifndef AEROSIM_ANALYSIS_HPP_
#define AEROSIM_ANALYSIS_HPP_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aerosim/error.hpp"
#include "aerosim/scenario.hpp"
#include "aerosim/simulation.hpp"

namespace aerosim {

// Product of P_i over the agents observed infected and of (1 - P_i) over
// those observed not infected. Throws ValidationError for a missing agent
// or a risk outside [0, 1].
double reproduction_probability(const std::map<std::string, double>& risks,
                                const std::vector<std::string>& infected,
                                const std::vector<std::string>& not_infected);

struct SweepOptions {
  double mu_min = 0.0;
  double mu_max = 1.0;
  int mu_steps = 26;
  double dm_min = 50.0;
  double dm_max = 260.0;
  int dm_steps = 22;
  std::vector<std::string> infected = {"P2", "P3", "P4"};
  std::vector<std::string> not_infected = {"P5", "P6", "P7", "P8", "P9", "P10"};
  // Worker threads; 0 means one per hardware thread.
  unsigned threads = 0;
  // Called with the fraction of mu columns done; return false to cancel.
  std::function<bool(double)> on_progress;
};

struct SweepResult {
  std::vector<double> mu;   // strictly increasing
  std::vector<double> d_m;  // strictly increasing
  // p[i][j] at (mu[i], d_m[j]).
  std::vector<std::vector<double>> p;
  // Final dose of every susceptible per mu column (d_m does not enter).
  std::vector<std::map<std::string, double>> doses;
  double runtime_seconds = 0.0;
};

std::vector<double> linspace(double lo, double hi, int n);

// One simulation per mu value, run on a work queue; results are ordered by
// grid index whatever the completion order. The viral load of every
// infectious agent is set to mu; each column's doses serve every d_m.
SweepResult sweep(const Scenario& scenario, const SweepOptions& options = {});

// Mean final risk of the susceptible agents. Throws ValidationError if
// there are none.
double average_risk(const std::vector<ExposureRecord>& records);
double average_risk(const std::vector<double>& risks);

struct LogisticFit {
  double L = 0.0;   // asymptote
  double k = 0.0;   // 1/s
  double t0 = 0.0;  // s
  double rmse = 0.0;
  int iterations = 0;
  // Constant data: the curve is the flat line L.
  bool plateau = false;

  double operator()(double t) const;
};

class FitError : public Error {
 public:
  FitError(const std::string& message, LogisticFit best)
      : Error(message), best_(best) {}
  const LogisticFit& best() const noexcept { return best_; }

 private:
  LogisticFit best_;
};

// Damped Gauss-Newton (Levenberg-Marquardt) fit of L / (1 + e^{-k (t - t0)}).
// Starts from L = max y, t0 = median t, k from the endpoint slope. Stops when
// the parameter update is below `tolerance` relative to the parameters;
// throws FitError holding the best fit after `max_iterations`. L is kept in
// [0, 1]. Needs at least 4 points (ValidationError otherwise).
LogisticFit fit_logistic(const std::vector<std::pair<double, double>>& points,
                         int max_iterations = 200, double tolerance = 1e-10);

// Nodal mean of the frames with time in [t_a, t_b]; throws ValidationError
// if the window holds no frame.
ConcentrationField time_averaged_field(const std::vector<Frame>& frames,
                                       double t_a, double t_b);
// Mean of the frames' total mass over the same window.
double time_averaged_mass(const std::vector<Frame>& frames, double t_a, double t_b);

// (time the agent leaves for good, final risk) for every susceptible agent.
std::vector<std::pair<double, double>> exit_risks(const PreparedScenario& prepared,
                                                  const SimulationResult& result);

struct ComparisonRow {
  std::string scenario;
  std::string intervention;  // "baseline" or the catalogue name
  std::string description;
  double mean_final_risk = 0.0;
  // Compared quantity: the fitted exit risk at closing time for supermarkets,
  // otherwise the mean final risk.
  double metric = 0.0;
  double delta = 0.0;  // metric - baseline metric
  std::optional<LogisticFit> fit;
};

struct CompareOptions {
  unsigned threads = 0;
  std::function<bool(double)> on_progress;
};

// Baseline first, then one row per intervention in the given order.
std::vector<ComparisonRow> compare(const Scenario& baseline,
                                   const std::vector<NamedIntervention>& interventions,
                                   const CompareOptions& options = {});

// Runs `jobs` on up to `threads` workers; exceptions are rethrown in index
// order after all workers stop.
void parallel_for(std::size_t jobs, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace aerosim

#endif  // AEROSIM_ANALYSIS_HPP_
