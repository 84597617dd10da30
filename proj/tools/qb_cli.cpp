#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qb/analysis.hpp"
#include "qb/config.hpp"
#include "qb/csv.hpp"
#include "qb/runner.hpp"
#include "qb/single_excitation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitEngine = 4;
constexpr int kExitComparison = 5;

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw qb::engine_error("cannot open '" + path + "' for writing");
  out << text;
}

qb::TimeWindow parse_window(const std::string& text) {
  const auto sep = text.find(':');
  if (sep == std::string::npos)
    throw qb::config_error("--window expects t0:t1, got '" + text + "'");
  try {
    return {std::stod(text.substr(0, sep)), std::stod(text.substr(sep + 1))};
  } catch (const std::exception&) {
    throw qb::config_error("--window expects numbers, got '" + text + "'");
  }
}

int cmd_spectrum(const std::string& config_path, const std::string& output) {
  const qb::Config config = qb::Config::load(config_path);
  for (const auto& [k, v] : config.entries())
    if (k.rfind("lattice.", 0) != 0 && k != "convention" && k != "output.path")
      throw qb::config_error("unknown spectrum config key '" + k + "'");

  const auto num = [&](const std::string& key, const char* fallback) {
    const std::string v = fallback ? config.get_or(key, fallback) : config.get(key);
    try {
      return std::stod(v);
    } catch (const std::exception&) {
      throw qb::config_error("key '" + key + "' is not a number: '" + v + "'");
    }
  };
  qb::LatticeSpec spec;
  spec.n_sites = static_cast<int>(num("lattice.n_sites", nullptr));
  spec.delta_a = num("lattice.delta_a", "1.0");
  spec.delta_b = num("lattice.delta_b", nullptr);
  spec.gamma_a = num("lattice.gamma_a", nullptr);
  spec.gamma_b = num("lattice.gamma_b", nullptr);
  spec.coupling = num("lattice.coupling", nullptr);
  spec.gamma_collective = num("lattice.gamma_collective", "0.0");
  spec.validate();

  const std::string convention = config.get_or("convention", "half_gamma");
  if (convention != "half_gamma" && convention != "full_gamma")
    throw qb::validation_error("convention must be half_gamma or full_gamma");
  const auto report = qb::decay_band_report(
      spec, convention == "half_gamma" ? qb::DecayConvention::half_gamma
                                       : qb::DecayConvention::full_gamma);

  qb::CsvTable table;
  table.comments.push_back(spec.summary());
  table.comments.push_back(
      "site frequencies: Omega = Delta - i*gamma/2 (an isolated excited spin "
      "has population decay exp(-gamma t))");
  table.comments.push_back("uniform_reference (" + convention + ") = " +
                           qb::format_full(report.uniform_reference));
  table.names = {"l", "k", "band", "re_omega", "im_omega",
                 "abs_im_over_delta_a"};
  table.columns.resize(table.names.size());
  for (const auto& row : report.rows) {
    table.columns[0].push_back(row.l);
    table.columns[1].push_back(row.k);
    table.columns[2].push_back(row.band == qb::Band::minus ? -1.0 : 1.0);
    table.columns[3].push_back(row.re_omega);
    table.columns[4].push_back(row.im_omega);
    table.columns[5].push_back(row.abs_im / spec.delta_a);
  }

  std::ostringstream out;
  qb::write_csv(out, table);
  emit(output.empty() ? config.get_or("output.path", "") : output, out.str());
  return kExitOk;
}

int cmd_run(const std::string& config_path, const std::string& output,
            const std::string& format) {
  const qb::Config config = qb::Config::load(config_path);
  qb::RunConfig rc = qb::RunConfig::from_config(config);
  if (!output.empty()) rc.output_path = output;
  if (!format.empty()) rc.output_format = format;

  const qb::Trajectory traj = qb::run_config(rc);

  std::vector<std::string> echo;
  for (const auto& [k, v] : config.entries()) echo.push_back(k + " = " + v);
  const qb::CsvTable table = qb::trajectory_table(traj, echo);

  std::ostringstream out;
  if (rc.output_format == "csv") {
    qb::write_csv(out, table);
  } else {
    nlohmann::json j;
    j["meta"]["engine"] = traj.engine();
    j["meta"]["spec"] = traj.spec().summary();
    for (std::size_t i = 0; i < table.names.size(); ++i)
      j["series"][table.names[i]] = table.columns[i];
    out << j.dump(2) << '\n';
  }
  emit(rc.output_path, out.str());
  return kExitOk;
}

int cmd_compare(const std::string& file_d, const std::string& file_u,
                const std::optional<qb::TimeWindow>& window,
                const std::string& output) {
  const qb::CsvTable csv_d = qb::read_csv_file(file_d);
  const qb::CsvTable csv_u = qb::read_csv_file(file_u);

  const auto to_report = [&]() {
    const auto& td = csv_d.column("t");
    const auto& tu = csv_u.column("t");
    if (td.size() != tu.size())
      throw qb::validation_error("time grids have different lengths");
    for (std::size_t i = 0; i < td.size(); ++i)
      if (td[i] != tu[i]) throw qb::validation_error("time grids do not match");

    qb::ExcessReport report;
    report.times = td;
    const auto& ed = csv_d.column("energy");
    const auto& eu = csv_u.column("energy");
    report.relative_excess.resize(td.size());
    report.absolute_excess.resize(td.size());
    report.ill_conditioned.resize(td.size());
    for (std::size_t i = 0; i < td.size(); ++i) {
      report.absolute_excess[i] = ed[i] - eu[i];
      const bool bad =
          std::abs(eu[i]) < qb::ExcessReport::kIllConditionedThreshold;
      report.ill_conditioned[i] = bad;
      report.relative_excess[i] = bad ? 0.0 : (ed[i] - eu[i]) / eu[i];
    }
    return report;
  };

  qb::ExcessReport report;
  try {
    report = to_report();
  } catch (const qb::validation_error& ex) {
    std::cerr << "comparison failed: " << ex.what() << '\n';
    return kExitComparison;
  }

  const double t_max = report.times.back();
  const qb::TimeWindow fit_window =
      window ? *window : qb::TimeWindow{2.0 * t_max / 3.0, t_max};

  nlohmann::json j;
  j["meta"]["file_d"] = file_d;
  j["meta"]["file_u"] = file_u;
  j["series"]["t"] = report.times;
  j["series"]["relative_excess"] = report.relative_excess;
  j["series"]["absolute_excess"] = report.absolute_excess;

  std::vector<std::string> flags;
  bool any_flagged = false;
  for (bool b : report.ill_conditioned) any_flagged = any_flagged || b;
  if (any_flagged) flags.push_back("ill_conditioned_times_excluded");

  const auto turnover = qb::turnover_time(report);
  j["turnover_time"] = turnover ? nlohmann::json(*turnover) : nlohmann::json();
  if (!turnover) flags.push_back("no_interior_turnover");

  double max_rel = 0.0;
  for (std::size_t i = 0; i < report.times.size(); ++i)
    if (report.times[i] >= fit_window.t0 && report.times[i] <= fit_window.t1)
      max_rel = std::max(max_rel, std::abs(report.relative_excess[i]));

  j["alpha"]["window"] = {fit_window.t0, fit_window.t1};
  if (max_rel < 1e-12) {
    j["alpha"]["value"] = nullptr;
    flags.push_back("alpha_undefined");
  } else {
    try {
      j["alpha"]["value"] = qb::power_law_fit(report, fit_window);
    } catch (const qb::validation_error&) {
      j["alpha"]["value"] = nullptr;
      flags.push_back("alpha_undefined");
    }
  }
  j["flags"] = flags;

  emit(output, j.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dissipative spin-lattice battery simulator"};
  app.require_subcommand(1);

  std::string config_path, output, format, window_text;
  std::string file_d, file_u;

  auto* spectrum = app.add_subcommand(
      "spectrum", "write the two-band decay spectrum as CSV");
  spectrum->add_option("--config", config_path)->required();
  spectrum->add_option("--output", output);

  auto* run = app.add_subcommand("run", "propagate one engine run");
  run->add_option("--config", config_path)->required();
  run->add_option("--output", output);
  run->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  auto* compare = app.add_subcommand(
      "compare", "energy excess report for a dimeric/uniform run pair");
  compare->add_option("file_d", file_d)->required();
  compare->add_option("file_u", file_u)->required();
  compare->add_option("--window", window_text);
  compare->add_option("--output", output);
  compare->add_option("--format", format)->check(CLI::IsMember({"json"}));

  auto* verify =
      app.add_subcommand("verify", "cross-engine consistency suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitParse;
  }

  try {
    if (spectrum->parsed()) return cmd_spectrum(config_path, output);
    if (run->parsed()) return cmd_run(config_path, output, format);
    if (compare->parsed()) {
      std::optional<qb::TimeWindow> window;
      if (!window_text.empty()) window = parse_window(window_text);
      return cmd_compare(file_d, file_u, window, output);
    }
    if (verify->parsed()) return qb::run_verify(std::cout) ? 0 : 1;
  } catch (const qb::config_error& ex) {
    std::cerr << "config error: " << ex.what() << '\n';
    return kExitParse;
  } catch (const qb::validation_error& ex) {
    std::cerr << "validation error: " << ex.what() << '\n';
    return kExitValidation;
  } catch (const qb::engine_error& ex) {
    std::cerr << "engine error: " << ex.what() << '\n';
    return kExitEngine;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kExitEngine;
  }
  return kExitOk;
}
