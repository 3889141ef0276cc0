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

// Command-line front end. Exit status: 0 success, 1 runtime failure,
// 2 invalid input, 3 unknown file or preset.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "aerosim/analysis.hpp"
#include "aerosim/artifacts.hpp"
#include "aerosim/scenario_io.hpp"
#include "aerosim/service.hpp"

namespace fs = std::filesystem;
using namespace aerosim;

namespace {

struct Common {
  std::string input;
  std::string npi;
  std::string out;
  std::optional<double> dt, mesh_size, threshold, frames_every;
  std::optional<std::uint64_t> seed;
};

void add_overrides(CLI::App* app, Common& c) {
  app->add_option("--dt", c.dt, "time step in seconds")->check(CLI::PositiveNumber);
  app->add_option("--mesh-size", c.mesh_size, "target mesh edge in metres")
      ->check(CLI::PositiveNumber);
  app->add_option("--seed", c.seed, "random seed (supermarket schedules)");
  app->add_option("--threshold", c.threshold, "infection threshold on risk")
      ->check(CLI::Range(0.0, 1.0));
  app->add_option("--frames-every", c.frames_every, "seconds between saved frames")
      ->check(CLI::PositiveNumber);
}

// A path to an existing file is a scenario document; anything else is a
// preset name.
Scenario load_input(const Common& c) {
  Scenario s;
  if (fs::exists(c.input)) {
    s = resolve_document(std::string_view(read_text_file(c.input)));
  } else if (c.input.find('/') != std::string::npos || c.input.ends_with(".json")) {
    throw NotFoundError("no such scenario file: " + c.input);
  } else {
    s = build_preset(c.input);
  }
  if (!c.npi.empty()) s = apply_intervention(s, find_npi(s, c.npi).intervention);
  RunOverrides o;
  o.dt = c.dt;
  o.target_edge = c.mesh_size;
  o.seed = c.seed;
  o.threshold = c.threshold;
  o.frame_every = c.frames_every;
  return apply_overrides(s, o);
}

int cmd_run(const Common& c) {
  const Scenario s = load_input(c);
  const auto prepared = prepare(s);
  RunOptions options;
  options.keep_frames = true;
  const SimulationResult result = simulate(*prepared, options);
  write_run_artifacts(*prepared, result, c.out);
  const Json summary = summary_json(*prepared, result);
  std::printf("%s: %zu agents, %zu steps, %.2f s\n", s.name.c_str(), s.agents.size(),
              result.steps, summary["runtime_seconds"].get<double>());
  for (const auto& [id, risk] : summary["final_risks"].items()) {
    std::printf("  %-8s risk %.4f\n", id.c_str(), risk.get<double>());
  }
  std::string infected;
  for (const auto& id : summary["infected"]) infected += " " + id.get<std::string>();
  std::printf("infected (risk >= %.3g):%s\n", s.simulation.threshold,
              infected.empty() ? " none" : infected.c_str());
  for (const auto& w : result.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("artifacts written to %s\n", c.out.c_str());
  return 0;
}

struct SweepArgs {
  int mu_steps = 26, dm_steps = 22;
  double mu_min = 0.0, mu_max = 1.0, dm_min = 50.0, dm_max = 260.0;
  unsigned threads = 0;
};

int cmd_sweep(const Common& c, const SweepArgs& a) {
  const Scenario s = load_input(c);
  SweepOptions o;
  o.mu_min = a.mu_min;
  o.mu_max = a.mu_max;
  o.mu_steps = a.mu_steps;
  o.dm_min = a.dm_min;
  o.dm_max = a.dm_max;
  o.dm_steps = a.dm_steps;
  o.threads = a.threads;
  const SweepResult r = sweep(s, o);
  write_directory_atomically(c.out, [&](const fs::path& dir) {
    write_text_file(dir / "sweep.csv", sweep_csv(r));
  });
  double best = 0.0;
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < r.mu.size(); ++i) {
    for (std::size_t j = 0; j < r.d_m.size(); ++j) {
      if (r.p[i][j] > best) best = r.p[i][j], bi = i, bj = j;
    }
  }
  std::printf("%zu x %zu grid in %.1f s; max p = %.4f at mu = %.4f, d_m = %.1f\n",
              r.mu.size(), r.d_m.size(), r.runtime_seconds, best, r.mu[bi], r.d_m[bj]);
  std::printf("written to %s\n", (fs::path(c.out) / "sweep.csv").c_str());
  return 0;
}

int cmd_compare(const Common& c, const std::string& npis, unsigned threads) {
  const Scenario s = load_input(c);
  std::vector<NamedIntervention> list;
  if (npis.empty() || npis == "all") {
    list = npi_catalog(s);
  } else {
    std::stringstream ss(npis);
    std::string name;
    while (std::getline(ss, name, ',')) {
      if (!name.empty()) list.push_back(find_npi(s, name));
    }
  }
  CompareOptions o;
  o.threads = threads;
  const auto rows = compare(s, list, o);
  write_directory_atomically(c.out, [&](const fs::path& dir) {
    write_text_file(dir / "compare.csv", compare_csv(rows));
  });
  std::printf("%-10s %-12s %-12s %s\n", "NPI", "mean risk", "metric", "delta");
  for (const auto& r : rows) {
    std::printf("%-10s %-12.5f %-12.5f %+.5f  %s\n", r.intervention.c_str(),
                r.mean_final_risk, r.metric, r.delta, r.description.c_str());
  }
  std::printf("written to %s\n", (fs::path(c.out) / "compare.csv").c_str());
  return 0;
}

int cmd_list_presets() {
  for (const auto& name : preset_names()) {
    const Scenario s = build_preset(name);
    std::printf("%s (%s): %s\n", name.c_str(), std::string(to_string(s.kind)).c_str(),
                s.description.c_str());
    for (const auto& n : npi_catalog(s)) {
      std::printf("  %-4s %s\n", n.name.c_str(), n.description.c_str());
    }
  }
  return 0;
}

int cmd_validate(const Common& c) {
  const Scenario s = load_input(c);
  const auto plan = FloorPlan::build(s.floorplan);
  std::printf("ok: %s, %zu rooms, %zu agents, %s to %s\n", s.name.c_str(),
              s.floorplan.rooms.size(), s.agents.size(),
              format_clock(s.simulation.clock_origin).c_str(),
              format_clock(s.simulation.clock_origin + s.simulation.duration).c_str());
  return 0;
}

int cmd_dump(const Common& c, bool params) {
  const Scenario s = load_input(c);
  if (params) {
    ParameterSet set = s.params;
    set.height = s.floorplan.height;
    const auto plan = FloorPlan::build(s.floorplan);
    std::cout << transport_params_to_json(TransportParams::resolve(set, plan.largest_room_volume()))
                     .dump(2)
              << "\n";
  } else {
    std::cout << dump_scenario(s);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Indoor airborne-infection simulator"};
  app.require_subcommand(1);
  Common c;
  SweepArgs sweep_args;
  std::string npis;
  unsigned threads = 0;

  auto* run = app.add_subcommand("run", "simulate one scenario and write artifacts");
  run->add_option("scenario", c.input, "scenario file or preset name")->required();
  run->add_option("--npi", c.npi, "apply a catalogue intervention first");
  run->add_option("--out", c.out, "output directory")->required();
  add_overrides(run, c);

  auto* sw = app.add_subcommand("sweep", "viral-load / median-dose sweep (sweep.csv)");
  sw->add_option("scenario", c.input, "scenario file or preset name")
      ->default_val("courtroom");
  sw->add_option("--out", c.out, "output directory")->required();
  sw->add_option("--mu-steps", sweep_args.mu_steps)->check(CLI::Range(2, 1000));
  sw->add_option("--dm-steps", sweep_args.dm_steps)->check(CLI::Range(2, 1000));
  sw->add_option("--mu-min", sweep_args.mu_min);
  sw->add_option("--mu-max", sweep_args.mu_max);
  sw->add_option("--dm-min", sweep_args.dm_min);
  sw->add_option("--dm-max", sweep_args.dm_max);
  sw->add_option("--threads", sweep_args.threads, "0 = one per hardware thread");
  add_overrides(sw, c);

  auto* cmp = app.add_subcommand("compare", "baseline against interventions (compare.csv)");
  cmp->add_option("scenario", c.input, "scenario file or preset name")->required();
  cmp->add_option("--npis", npis, "comma-separated names, default all");
  cmp->add_option("--out", c.out, "output directory")->required();
  cmp->add_option("--threads", threads, "0 = one per hardware thread");
  add_overrides(cmp, c);

  auto* lp = app.add_subcommand("list-presets", "presets and their interventions");

  auto* val = app.add_subcommand("validate", "check a scenario document");
  val->add_option("scenario", c.input, "scenario file or preset name")->required();
  add_overrides(val, c);

  auto* dump = app.add_subcommand("dump", "print a resolved scenario document");
  dump->add_option("scenario", c.input, "scenario file or preset name")->required();
  dump->add_option("--npi", c.npi, "apply a catalogue intervention first");
  bool params = false;
  dump->add_flag("--params", params, "print the resolved transport parameters instead");
  add_overrides(dump, c);

  std::string host = "127.0.0.1";
  int port = 8080;
  ServiceOptions service;
  std::string work_dir;
  auto* srv = app.add_subcommand("serve", "HTTP service for the companion app");
  srv->add_option("--host", host);
  srv->add_option("--port", port)->check(CLI::Range(0, 65535));
  srv->add_option("--max-jobs", service.max_running, "jobs running at once")
      ->check(CLI::PositiveNumber);
  srv->add_option("--work-dir", work_dir, "where finished jobs keep their artifacts");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(c);
    if (*sw) return cmd_sweep(c, sweep_args);
    if (*cmp) return cmd_compare(c, npis, threads);
    if (*lp) return cmd_list_presets();
    if (*val) return cmd_validate(c);
    if (*dump) return cmd_dump(c, params);
    if (*srv) {
      service.work_dir = work_dir;
      std::printf("listening on http://%s:%d\n", host.c_str(), port);
      std::fflush(stdout);
      serve(host, port, service);
      return 0;
    }
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return 2;
  } catch (const InfeasibleScheduleError& e) {
    std::fprintf(stderr, "infeasible schedule: %s\n", e.what());
    return 2;
  } catch (const NotFoundError& e) {
    std::fprintf(stderr, "not found: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
