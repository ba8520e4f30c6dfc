#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "aicon/bw/bench.hpp"
#include "aicon/bw/graph_demo.hpp"
#include "aicon/bw/io.hpp"
#include "aicon/drawer/episode.hpp"
#include "aicon/harness/field.hpp"
#include "aicon/harness/gradcheck.hpp"
#include "aicon/harness/report.hpp"
#include "aicon/util/csv.hpp"
#include "aicon/util/manifest.hpp"

namespace fs = std::filesystem;
using namespace aicon;

namespace {

std::string join_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string default_out_dir() {
  const char* env = std::getenv("AICON_OUT_DIR");
  return env ? env : ".";
}

std::string out_path(const std::string& flag_value) {
  fs::path p(flag_value);
  if (p.is_absolute() || flag_value.find('/') != std::string::npos)
    return flag_value;
  return (fs::path(default_out_dir()) / p).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write: " + path);
  out << text;
}

struct ManifestScope {
  RunManifest m;
  std::string path;
  explicit ManifestScope(const std::string& cmdline, const std::string& out) {
    m.command_line = cmdline;
    m.started_at = iso8601_now();
    m.outputs.push_back(out);
    path = out + ".manifest.json";
  }
  void finish() {
    m.finished_at = iso8601_now();
    m.write(path);
  }
};

int cmd_bw_generate(const bw::GenerateOptions& opts, const std::string& dir,
                    const std::string& cmdline) {
  fs::create_directories(dir);
  auto corpus = bw::generate_instances(opts);
  ManifestScope ms(cmdline, dir + "/corpus");
  ms.m.seeds = {opts.seed};
  for (const auto& inst : corpus) {
    bw::Instance io_inst{inst.initial, inst.goal};
    std::string path = dir + "/" + inst.id + ".txt";
    bw::save_instance(io_inst, path);
    ms.m.outputs.push_back(path);
  }
  ms.finish();
  std::cout << "wrote " << corpus.size() << " instances to " << dir << "\n";
  return 0;
}

std::vector<bw::BwInstance> load_corpus(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".txt") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ConfigError("no .txt instances in " + dir);
  std::vector<bw::BwInstance> corpus;
  for (const auto& f : files) {
    bw::Instance inst = bw::load_instance(f);
    bw::BwInstance bi;
    bi.id = fs::path(f).stem().string();
    bi.initial = inst.initial;
    bi.goal = inst.goal;
    corpus.push_back(std::move(bi));
  }
  return corpus;
}

int cmd_drawer_bench(const std::string& conditions, const std::string& modes,
                     int trials, uint64_t seed, int threads,
                     const std::string& out, const std::string& cmdline) {
  Config cfg = Config::from_file(conditions);
  auto scen_files = cfg.get_string_array("scenarios");
  if (scen_files.empty()) throw ConfigError("conditions file lists no scenarios");
  fs::path base = fs::path(conditions).parent_path();
  std::vector<std::pair<std::string, drawer::Scenario>> scenarios;
  for (const auto& f : scen_files) {
    fs::path p(f);
    if (!p.is_absolute()) p = base / p;
    scenarios.emplace_back(p.stem().string(),
                           drawer::Scenario::from_file(p.string()));
  }
  std::vector<drawer::EpisodeMode> mode_list;
  for (const auto& m : split_list(modes))
    mode_list.push_back(drawer::parse_mode(m));
  if (mode_list.empty()) throw ConfigError("no modes given");

  struct Cell {
    size_t si, mi;
    int trial;
    uint64_t seed;
  };
  std::vector<Cell> cells;
  for (size_t si = 0; si < scenarios.size(); ++si)
    for (size_t mi = 0; mi < mode_list.size(); ++mi)
      for (int t = 0; t < trials; ++t)
        cells.push_back({si, mi, t, Rng::mix(seed, cells.size())});

  std::vector<drawer::EpisodeResult> results(cells.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const Cell& c = cells[i];
      results[i] = drawer::run_episode(scenarios[c.si].second,
                                       mode_list[c.mi], c.seed);
    }
  };
  int nthreads = std::max(1, threads);
  std::vector<std::thread> pool;
  for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  ManifestScope ms(cmdline, out);
  ms.m.seeds = {seed};
  ms.m.config_hash = cfg.hash();
  std::ostringstream csv;
  csv << "scenario,mode,trial,seed,success,ticks,final_q_error,jerk,status\n";
  int failures = 0;
  for (size_t i = 0; i < cells.size(); ++i) {
    const Cell& c = cells[i];
    const auto& r = results[i];
    if (!r.success) ++failures;
    csv << scenarios[c.si].first << ',' << drawer::mode_name(mode_list[c.mi])
        << ',' << c.trial << ',' << c.seed << ',' << (r.success ? 1 : 0) << ','
        << r.ticks << ',' << fmt_num(r.final_q_error) << ',' << fmt_num(r.jerk)
        << ',' << r.status << '\n';
  }
  write_text(out, csv.str());
  ms.finish();
  std::cout << cells.size() - failures << "/" << cells.size()
            << " episodes succeeded; results in " << out << "\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient-descent behavior generation: Blocks World and drawer opening"};
  app.require_subcommand(1);
  std::string cmdline = join_args(argc, argv);

  // bw
  auto* bw_cmd = app.add_subcommand("bw", "Blocks World domain");
  bw_cmd->require_subcommand(1);

  auto* bw_gen = bw_cmd->add_subcommand("generate", "generate an instance corpus");
  std::string gen_dir = "corpus";
  bw::GenerateOptions gen_opts;
  bw_gen->add_option("dir", gen_dir, "output directory");
  bw_gen->add_option("--count", gen_opts.count);
  bw_gen->add_option("--blocks-min", gen_opts.blocks_min);
  bw_gen->add_option("--blocks-max", gen_opts.blocks_max);
  bw_gen->add_option("--towers-min", gen_opts.towers_min);
  bw_gen->add_option("--towers-max", gen_opts.towers_max);
  bw_gen->add_option("--seed", gen_opts.seed, "corpus seed")->required();
  bw_gen->add_flag("--unstacking-only", gen_opts.unstacking_only);

  auto* bw_solve = bw_cmd->add_subcommand("solve", "solve one instance");
  std::string solve_file, solve_variant = "naive", solve_norm = "crisp",
              solve_out;
  uint64_t solve_seed = 0;
  int solve_cap = -1;
  bw_solve->add_option("instance", solve_file)->required();
  bw_solve->add_option("--variant", solve_variant,
                       "naive | interconnected");
  bw_solve->add_option("--norm", solve_norm, "paper | crisp");
  bw_solve->add_option("--seed", solve_seed);
  bw_solve->add_option("--step-cap", solve_cap);
  bw_solve->add_option("--out", solve_out, "solution CSV path");

  auto* bw_bench = bw_cmd->add_subcommand("bench", "run the corpus benchmark");
  std::string bench_dir, bench_variants = "naive,interconnected",
              bench_out = "bw_results.csv";
  uint64_t bench_seed = 0;
  int bench_threads = static_cast<int>(std::thread::hardware_concurrency());
  bw_bench->add_option("corpus", bench_dir)->required();
  bw_bench->add_option("--variants", bench_variants);
  bw_bench->add_option("--seed", bench_seed)->required();
  bw_bench->add_option("--threads", bench_threads);
  bw_bench->add_option("--out", bench_out);

  // drawer
  auto* dr_cmd = app.add_subcommand("drawer", "drawer-opening domain");
  dr_cmd->require_subcommand(1);

  auto* dr_run = dr_cmd->add_subcommand("run", "run one episode");
  std::string run_scenario, run_mode = "full", run_trace;
  uint64_t run_seed = 0;
  dr_run->add_option("scenario", run_scenario)->required();
  dr_run->add_option("--mode", run_mode);
  dr_run->add_option("--seed", run_seed);
  dr_run->add_option("--trace", run_trace, "trace CSV path");

  auto* dr_bench = dr_cmd->add_subcommand("bench", "sweep scenarios x modes");
  std::string cond_file, bench_modes = "full", dr_out = "drawer_results.csv";
  int trials = 10;
  uint64_t dr_seed = 0;
  int dr_threads = static_cast<int>(std::thread::hardware_concurrency());
  dr_bench->add_option("--conditions", cond_file)->required();
  dr_bench->add_option("--modes", bench_modes);
  dr_bench->add_option("--trials", trials);
  dr_bench->add_option("--seed", dr_seed)->required();
  dr_bench->add_option("--threads", dr_threads);
  dr_bench->add_option("--out", dr_out);

  auto* dr_field = dr_cmd->add_subcommand("sample-field",
                                          "sample the gradient field");
  std::string field_scenario, field_mode = "full", field_out = "field.csv";
  uint64_t field_seed = 0;
  int field_tick = 0;
  harness::FieldOptions fopts;
  dr_field->add_option("scenario", field_scenario)->required();
  dr_field->add_option("--mode", field_mode);
  dr_field->add_option("--seed", field_seed);
  dr_field->add_option("--tick", field_tick, "snapshot tick");
  dr_field->add_option("--axes", fopts.axes, "two of x,y,z");
  dr_field->add_option("--min-a", fopts.min_a);
  dr_field->add_option("--max-a", fopts.max_a);
  dr_field->add_option("--min-b", fopts.min_b);
  dr_field->add_option("--max-b", fopts.max_b);
  dr_field->add_option("--na", fopts.n_a);
  dr_field->add_option("--nb", fopts.n_b);
  dr_field->add_option("--out", field_out);

  // gradcheck / report
  auto* gc = app.add_subcommand("gradcheck", "finite-difference Jacobian check");
  uint64_t gc_seed = 0;
  int gc_points = 100;
  gc->add_option("--seed", gc_seed);
  gc->add_option("--points", gc_points);

  auto* rep = app.add_subcommand("report", "aggregate result CSVs");
  std::vector<std::string> rep_files;
  std::string rep_out;
  rep->add_option("files", rep_files)->required();
  rep->add_option("--out", rep_out, "summary CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp"
               ? 0
               : 2;
  }

  try {
    if (*bw_gen) return cmd_bw_generate(gen_opts, out_path(gen_dir), cmdline);

    if (*bw_solve) {
      bw::Instance inst = bw::load_instance(solve_file);
      if (solve_variant == "interconnected")
        inst.goal.mode = bw::BwGoal::interconnected;
      else if (solve_variant != "naive")
        throw ConfigError("unknown variant: " + solve_variant);
      bw::SolveOptions opts;
      opts.seed = solve_seed;
      opts.step_cap = solve_cap;
      opts.norm = solve_norm == "paper" ? bw::ClearNorm::paper
                 : solve_norm == "crisp"
                     ? bw::ClearNorm::crisp
                     : throw ConfigError("unknown norm: " + solve_norm);
      bw::Solution sol = bw::solve(inst.initial, inst.goal, opts);
      if (!solve_out.empty())
        write_text(out_path(solve_out),
                   bw::solution_csv(inst.initial, inst.goal, sol));
      std::cout << (sol.status == bw::Solution::solved ? "solved" : "unsolved")
                << " in " << sol.steps << " steps\n";
      return sol.status == bw::Solution::solved ? 0 : 1;
    }

    if (*bw_bench) {
      auto corpus = load_corpus(bench_dir);
      auto res = bw::run_benchmark(corpus, split_list(bench_variants),
                                   {bench_seed}, std::max(1, bench_threads));
      std::string out = out_path(bench_out);
      ManifestScope ms(cmdline, out);
      ms.m.seeds = {bench_seed};
      write_text(out, bw::bench_csv(res));
      ms.finish();
      std::cout << res.summary.solved << "/" << res.summary.records
                << " cells solved, max steps " << res.summary.max_steps
                << "; results in " << out << "\n";
      return res.summary.solved == res.summary.records ? 0 : 1;
    }

    if (*dr_run) {
      drawer::Scenario scenario = drawer::Scenario::from_file(run_scenario);
      drawer::EpisodeMode mode = drawer::parse_mode(run_mode);
      std::ofstream trace;
      std::ostream* trace_ptr = nullptr;
      std::string trace_path;
      if (!run_trace.empty()) {
        trace_path = out_path(run_trace);
        trace.open(trace_path);
        if (!trace) throw ConfigError("cannot write: " + trace_path);
        trace_ptr = &trace;
      }
      auto r = drawer::run_episode(scenario, mode, run_seed, trace_ptr);
      if (!trace_path.empty()) {
        trace.close();
        ManifestScope ms(cmdline, trace_path);
        ms.m.seeds = {run_seed};
        ms.m.config_hash = scenario.config.hash();
        ms.finish();
      }
      std::cout << (r.success ? "success" : "failure") << " after " << r.ticks
                << " ticks, |q - 0.20| = " << fmt_num(r.final_q_error)
                << ", jerk " << fmt_num(r.jerk) << " (" << r.status << ")\n";
      return r.success ? 0 : 1;
    }

    if (*dr_bench)
      return cmd_drawer_bench(cond_file, bench_modes, trials, dr_seed,
                              dr_threads, out_path(dr_out), cmdline);

    if (*dr_field) {
      drawer::Scenario scenario = drawer::Scenario::from_file(field_scenario);
      auto net = harness::snapshot_at_tick(
          scenario, drawer::parse_mode(field_mode), field_seed, field_tick);
      std::string out = out_path(field_out);
      std::ostringstream os;
      int clipped = harness::sample_field(*net, fopts, os);
      ManifestScope ms(cmdline, out);
      ms.m.seeds = {field_seed};
      ms.m.config_hash = scenario.config.hash();
      write_text(out, os.str());
      ms.finish();
      if (clipped > 0)
        std::cerr << "warning: " << clipped
                  << " grid coordinates clipped to the workspace\n";
      std::cout << "field written to " << out << "\n";
      return 0;
    }

    if (*gc) {
      auto report = harness::run_gradcheck(gc_seed, gc_points);
      for (const auto& c : report.checks)
        if (!c.pass)
          std::cout << "FAIL " << c.name << " err " << c.max_err << "\n";
      std::cout << (report.all_pass ? "gradcheck passed: " : "gradcheck FAILED: ")
                << report.checks.size() << " jacobians checked\n";
      return report.all_pass ? 0 : 1;
    }

    if (*rep) {
      auto summary = harness::aggregate_report(rep_files);
      std::cout << summary.human;
      if (!rep_out.empty()) {
        std::string text = summary.csv_header + "\n";
        for (const auto& r : summary.csv_rows) text += r + "\n";
        write_text(out_path(rep_out), text);
      }
      return 0;
    }
  } catch (const harness::ReportError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const bw::BwError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
