// tfim-sense: command line front end for the rotating-frame Ising-chain
// sensing toolkit. Subcommands: curve, halfwidth, fit, collapse, protocol,
// verify. Exit codes: 0 success, 2 validation error, 3 insufficient data,
// 4 verification failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <tfim/analysis.hpp>
#include <tfim/chain.hpp>
#include <tfim/echo.hpp>
#include <tfim/ed_oracle.hpp>
#include <tfim/protocol.hpp>

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitInsufficientData = 3;
constexpr int kExitVerificationFailed = 4;

[[noreturn]] void fail(int code, const std::string& message) {
  std::cerr << "tfim-sense: " << message << "\n";
  std::exit(code);
}

std::string format17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// temp-file-then-rename so readers never observe a partial file
void write_atomically(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(kExitValidation, "cannot open output file: " + path);
    out << content;
    if (!out.flush()) fail(kExitValidation, "write failed: " + path);
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) fail(kExitValidation, "rename failed: " + path + " (" + ec.message() + ")");
}

std::vector<double> parse_double_list(const std::string& csv, const char* what) {
  std::vector<double> values;
  std::stringstream stream(csv);
  std::string token;
  while (std::getline(stream, token, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      fail(kExitValidation, std::string("cannot parse ") + what + " entry '" + token + "'");
    }
  }
  if (values.empty()) fail(kExitValidation, std::string("empty ") + what + " list");
  return values;
}

struct CommonChainFlags {
  int n = 0;
  double lattice = 1.0;
  double coupling = 1.0;
  double hbar = 1.0;

  tfim::ChainSpec spec() const { return {n, lattice, coupling, hbar}; }
};

void add_chain_flags(CLI::App* cmd, CommonChainFlags& flags) {
  cmd->add_option("--n", flags.n, "number of spins (even)")->required();
  cmd->add_option("--lattice", flags.lattice, "lattice spacing a")->capture_default_str();
  cmd->add_option("--coupling", flags.coupling, "Ising coupling J")->capture_default_str();
  cmd->add_option("--hbar", flags.hbar, "hbar")->capture_default_str();
}

// ---------------------------------------------------------------- curve ----

int run_curve(const CommonChainFlags& chain, double delta, double lambda, double time,
              double omega_min, double omega_max, int points, const std::string& out) {
  tfim::ChainSpec spec = chain.spec();
  if (points < 1) fail(kExitValidation, "--points must be >= 1");
  if (points > 1 && !(omega_max > omega_min)) {
    fail(kExitValidation, "--omega-max must exceed --omega-min");
  }
  if (time < 0.0) time = tfim::characteristic_time(spec);

  std::vector<double> grid(static_cast<std::size_t>(points));
  if (points == 1) {
    grid[0] = omega_min;
  } else {
    const double step = (omega_max - omega_min) / (points - 1);
    for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = omega_min + i * step;
  }

  const tfim::EchoCurve curve = tfim::scan_curve(spec, delta, lambda, time, grid);

  std::string body = "omega,lambda_tilde,loschmidt_echo\n";
  for (const auto& s : curve.samples) {
    body += format17(s.omega);
    body += ',';
    body += format17(s.lambda_tilde);
    body += ',';
    body += format17(s.loschmidt);
    body += '\n';
  }
  write_atomically(out, body);
  return kExitOk;
}

// ---------------------------------------------------- halfwidth and fit ----

struct HalfWidthRow {
  double delta;
  std::optional<tfim::HalfWidthResult> result;
};

json halfwidth_report(const CommonChainFlags& chain, const std::vector<HalfWidthRow>& rows,
                      double time, const std::string& convention) {
  json points = json::array();
  for (const auto& row : rows) {
    json p;
    p["delta"] = row.delta;
    if (row.result) {
      if (convention == "chord_omega") {
        // Blue-line reading: the quoted width is the full chord in Omega
        // units, and delta_omega equals it (it is already an Omega width).
        p["epsilon0"] = row.result->chord_omega;
        p["delta_omega"] = row.result->chord_omega;
      } else {
        p["epsilon0"] = row.result->epsilon0;
        p["delta_omega"] = row.result->delta_omega;
      }
    } else {
      p["epsilon0"] = nullptr;
      p["delta_omega"] = nullptr;
    }
    points.push_back(p);
  }
  json report;
  report["n"] = chain.n;
  report["time"] = time;
  report["convention"] = convention;
  report["points"] = points;
  report["sqrt_eta"] = nullptr;
  report["r_squared"] = nullptr;
  return report;
}

int run_halfwidth(const CommonChainFlags& chain, const std::string& deltas_csv, double lambda,
                  double time, double window, const std::string& convention,
                  const std::string& out, bool do_fit) {
  tfim::ChainSpec spec = chain.spec();
  const std::vector<double> deltas = parse_double_list(deltas_csv, "--deltas");
  if (do_fit && deltas.size() < 3) fail(kExitValidation, "fit requires at least 3 deltas");
  if (time < 0.0) time = tfim::characteristic_time(spec);

  std::vector<HalfWidthRow> rows;
  for (double delta : deltas) {
    HalfWidthRow row{delta, std::nullopt};
    try {
      row.result = tfim::half_width(spec, delta, lambda, time, window);
    } catch (const tfim::AnalysisError& e) {
      std::cerr << "tfim-sense: delta=" << delta << ": " << e.what() << "\n";
    }
    rows.push_back(row);
  }

  json report = halfwidth_report(chain, rows, time, convention);

  std::vector<tfim::EtaFitPoint> usable;
  for (const auto& row : rows) {
    if (!row.result) continue;
    const double y =
        convention == "chord_omega" ? row.result->chord_omega : row.result->epsilon0;
    usable.push_back({row.delta, y});
  }

  if (do_fit) {
    if (usable.size() < 3) {
      write_atomically(out, report.dump(2) + "\n");
      fail(kExitInsufficientData,
           "fewer than 3 usable half-widths (" + std::to_string(usable.size()) + ")");
    }
    const tfim::EtaFit fit = tfim::fit_eta(usable, chain.n);
    report["sqrt_eta"] = fit.sqrt_eta;
    report["r_squared"] = fit.r_squared;
  } else if (usable.empty()) {
    write_atomically(out, report.dump(2) + "\n");
    fail(kExitInsufficientData, "no usable half-widths");
  }

  write_atomically(out, report.dump(2) + "\n");
  return kExitOk;
}

// ------------------------------------------------------------- collapse ----

int run_collapse(const std::string& cases_csv, double lambda, double time, double window,
                 const std::string& out) {
  std::vector<tfim::CollapseCase> cases;
  std::stringstream stream(cases_csv);
  std::string token;
  while (std::getline(stream, token, ',')) {
    const auto colon = token.find(':');
    if (colon == std::string::npos) {
      fail(kExitValidation, "case entry must be N:delta, got '" + token + "'");
    }
    try {
      cases.push_back({std::stoi(token.substr(0, colon)), std::stod(token.substr(colon + 1))});
    } catch (const std::exception&) {
      fail(kExitValidation, "cannot parse case entry '" + token + "'");
    }
  }
  if (cases.size() < 2) fail(kExitValidation, "need at least 2 cases");
  if (time < 0.0) time = 0.5;  // t0 in the default J = hbar = 1 units

  tfim::CollapseReport result;
  try {
    result = tfim::collapse_check(cases, lambda, time, window);
  } catch (const tfim::AnalysisError& e) {
    fail(kExitInsufficientData, e.what());
  }

  json entries = json::array();
  for (const auto& e : result.entries) {
    entries.push_back({{"n", e.n_spins},
                       {"delta", e.delta},
                       {"delta_sqrt_n", e.delta_sqrt_n},
                       {"epsilon0", e.epsilon0},
                       {"delta_omega", e.delta_omega}});
  }
  json report;
  report["lambda"] = lambda;
  report["time"] = time;
  report["cases"] = entries;
  report["max_pairwise_rel_dev"] = result.max_pairwise_rel_dev;
  report["pass"] = result.pass;
  write_atomically(out, report.dump(2) + "\n");
  return kExitOk;
}

// ------------------------------------------------------------- protocol ----

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(kExitValidation, "unknown key '" + key + "' in " + where);
    }
  }
}

tfim::ProtocolConfig parse_protocol_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(kExitValidation, "cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(kExitValidation, std::string("config parse error: ") + e.what());
  }

  reject_unknown_keys(doc, {"spec", "true_omega", "sigma", "noise_model", "delta", "time",
                            "scan_points", "trials", "seed", "sqrt_eta"},
                      "config");
  tfim::ProtocolConfig config;
  try {
    const json& spec = doc.at("spec");
    reject_unknown_keys(spec, {"n_spins", "lattice_spacing", "coupling", "hbar"}, "spec");
    config.spec.n_spins = spec.at("n_spins").get<int>();
    config.spec.lattice_spacing = spec.value("lattice_spacing", 1.0);
    config.spec.coupling = spec.value("coupling", 1.0);
    config.spec.hbar = spec.value("hbar", 1.0);

    config.true_omega = doc.at("true_omega").get<double>();
    config.sigma = doc.at("sigma").get<double>();
    config.delta = doc.at("delta").get<double>();
    config.time = doc.value("time", -1.0);
    config.scan_points = doc.value("scan_points", 2001);
    config.trials = doc.value("trials", 1);
    config.seed = doc.value("seed", std::uint64_t{0});
    config.sqrt_eta = doc.value("sqrt_eta", 0.375);

    const std::string noise = doc.value("noise_model", std::string("uniform"));
    if (noise == "uniform") {
      config.noise_model = tfim::NoiseModel::uniform;
    } else if (noise == "gaussian") {
      config.noise_model = tfim::NoiseModel::gaussian;
    } else {
      fail(kExitValidation, "noise_model must be 'uniform' or 'gaussian', got '" + noise + "'");
    }
  } catch (const json::exception& e) {
    fail(kExitValidation, std::string("config error: ") + e.what());
  }
  try {
    config.validate();
  } catch (const std::exception& e) {
    fail(kExitValidation, std::string("config error: ") + e.what());
  }
  return config;
}

int run_protocol(const std::string& config_path, const std::string& summary_out,
                 const std::string& trials_out) {
  const tfim::ProtocolConfig config = parse_protocol_config(config_path);
  const tfim::ProtocolSummary summary = tfim::run_trials(config);

  std::string csv = "trial,omega0,lambda0,omega1,omega1_corrected,abs_error,status\n";
  for (const auto& t : summary.per_trial) {
    csv += std::to_string(t.index);
    csv += ',';
    csv += format17(t.omega0);
    if (t.ok) {
      csv += ',';
      csv += format17(t.lambda0);
      csv += ',';
      csv += format17(t.omega1);
      csv += ',';
      csv += format17(t.omega1_corrected);
      csv += ',';
      csv += format17(t.abs_error);
      csv += ",ok\n";
    } else {
      csv += ",,,,,flat_scan\n";
    }
  }
  write_atomically(trials_out, csv);

  json report;
  report["trials"] = summary.trials;
  if (summary.succeeded > 0) {
    report["mean_abs_error"] = summary.mean_abs_error;
    report["p95_abs_error"] = summary.p95_abs_error;
  } else {
    report["mean_abs_error"] = nullptr;
    report["p95_abs_error"] = nullptr;
  }
  report["success_rate"] = summary.success_rate;
  report["resolution_delta_omega"] = summary.resolution_delta_omega;
  report["feasible"] = summary.feasible;
  write_atomically(summary_out, report.dump(2) + "\n");

  if (summary.succeeded == 0) {
    fail(kExitInsufficientData, "no trial succeeded (flat scans)");
  }
  return kExitOk;
}

// --------------------------------------------------------------- verify ----

int run_verify(int max_n, double delta, double le_bound, double frame_bound,
               double frame_zero_bound, int steps, const std::string& out) {
  if (max_n > 12) fail(kExitValidation, "--max-n exceeds the dense oracle cap (12)");
  if (max_n < 4) fail(kExitValidation, "--max-n must be at least 4");

  tfim::ChainSpec unit_spec{2, 1.0, 1.0, 1.0};
  const double t0 = tfim::characteristic_time(unit_spec);

  bool ok = true;
  json le_per_n = json::array();
  for (int n = 4; n <= max_n; n += 2) {
    double worst = 0.0;
    for (double lt : {1.5, 2.0}) {
      for (int i = 0; i < 20; ++i) {
        const double t = 2.0 * t0 * i / 19.0;
        tfim::ChainSpec spec{n, 1.0, 1.0, 1.0};
        const double product = tfim::loschmidt_echo_at(spec, lt, delta, t);
        const double dense = tfim::loschmidt_echo_ed(n, lt, delta, t).value;
        worst = std::max(worst, std::abs(product - dense));
      }
    }
    le_per_n.push_back({{"n", n}, {"max_abs_dev", worst}});
    if (worst > le_bound) ok = false;
  }

  json frame_checks = json::array();
  for (int n = 1; n <= 3; ++n) {
    const double inf_rot = tfim::frame_equivalence_check(n, 2.0, 2.0, 10.0, steps);
    const double inf_zero = tfim::frame_equivalence_check(n, 2.0, 0.0, 10.0, 1000);
    frame_checks.push_back({{"n", n}, {"omega", 2.0}, {"steps", steps}, {"max_infidelity", inf_rot}});
    frame_checks.push_back({{"n", n}, {"omega", 0.0}, {"steps", 1000}, {"max_infidelity", inf_zero}});
    if (inf_rot > frame_bound || inf_zero > frame_zero_bound) ok = false;
  }

  json report;
  report["le"] = {{"delta", delta}, {"bound", le_bound}, {"per_n", le_per_n}};
  report["frame"] = {{"bound", frame_bound},
                     {"zero_bound", frame_zero_bound},
                     {"checks", frame_checks}};
  report["pass"] = ok;
  write_atomically(out, report.dump(2) + "\n");

  if (!ok) fail(kExitVerificationFailed, "verification bounds exceeded (see report)");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rotating-frame Ising chain sensing toolkit"};
  app.require_subcommand(1);

  // curve
  auto* curve = app.add_subcommand("curve", "Loschmidt echo over an Omega grid (CSV)");
  CommonChainFlags curve_chain;
  add_chain_flags(curve, curve_chain);
  double curve_delta = 0.0;
  double curve_lambda = 2.0;
  double curve_time = -1.0;
  double omega_min = 0.0;
  double omega_max = 4.0;
  int curve_points = 2001;
  std::string curve_out;
  curve->add_option("--delta", curve_delta, "probe coupling")->required();
  curve->add_option("--lambda", curve_lambda, "transverse field")->capture_default_str();
  curve->add_option("--time", curve_time, "evaluation time (default hbar/2J)")
      ->check(CLI::NonNegativeNumber);
  curve->add_option("--omega-min", omega_min, "grid start")->capture_default_str();
  curve->add_option("--omega-max", omega_max, "grid end")->capture_default_str();
  curve->add_option("--points", curve_points, "grid size")->capture_default_str();
  curve->add_option("--out", curve_out, "output CSV path (default stdout)");

  // halfwidth / fit share flags
  CommonChainFlags hw_chain;
  std::string hw_deltas;
  double hw_lambda = 2.0;
  double hw_time = -1.0;
  double hw_window = 1.0;
  std::string hw_convention = "one_sided";
  std::string hw_out;

  auto configure_hw = [&](CLI::App* cmd) {
    add_chain_flags(cmd, hw_chain);
    cmd->add_option("--deltas", hw_deltas, "comma-separated probe couplings")->required();
    cmd->add_option("--lambda", hw_lambda, "transverse field")->capture_default_str();
    cmd->add_option("--time", hw_time, "evaluation time (default hbar/2J)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--window", hw_window, "search window in field units")->capture_default_str();
    cmd->add_option("--convention", hw_convention, "one_sided | chord_omega")
        ->check(CLI::IsMember({"one_sided", "chord_omega"}))
        ->capture_default_str();
    cmd->add_option("--out", hw_out, "output JSON path (default stdout)");
  };
  auto* halfwidth = app.add_subcommand("halfwidth", "L = 1/2 half-widths per delta (JSON)");
  configure_hw(halfwidth);
  auto* fit = app.add_subcommand("fit", "half-widths plus origin-constrained sqrt(eta) fit");
  configure_hw(fit);

  // collapse
  auto* collapse = app.add_subcommand("collapse", "half-width collapse across (N, delta) cases");
  std::string collapse_cases;
  double collapse_lambda = 2.0;
  double collapse_time = -1.0;
  double collapse_window = 1.0;
  std::string collapse_out;
  collapse->add_option("--cases", collapse_cases, "comma list of N:delta")->required();
  collapse->add_option("--lambda", collapse_lambda, "transverse field")->capture_default_str();
  collapse->add_option("--time", collapse_time, "evaluation time (default hbar/2J)")
      ->check(CLI::NonNegativeNumber);
  collapse->add_option("--window", collapse_window, "search window")->capture_default_str();
  collapse->add_option("--out", collapse_out, "output JSON path (default stdout)");

  // protocol
  auto* protocol = app.add_subcommand("protocol", "Monte Carlo sensing runs from a JSON config");
  std::string protocol_config;
  std::string summary_out = "protocol_summary.json";
  std::string trials_out = "protocol_trials.csv";
  protocol->add_option("config", protocol_config, "JSON config path")->required();
  protocol->add_option("--summary-out", summary_out, "summary JSON path")->capture_default_str();
  protocol->add_option("--trials-out", trials_out, "per-trial CSV path")->capture_default_str();

  // verify
  auto* verify = app.add_subcommand("verify", "dense-oracle and frame-equivalence checks");
  int verify_max_n = 8;
  double verify_delta = 0.1;
  double verify_le_bound = 0.05;
  double verify_frame_bound = 1e-6;
  double verify_frame_zero_bound = 1e-10;
  int verify_steps = 2000;
  std::string verify_out;
  verify->add_option("--max-n", verify_max_n, "largest chain for the dense comparison")
      ->capture_default_str();
  verify->add_option("--delta", verify_delta, "probe coupling")->capture_default_str();
  verify->add_option("--le-bound", verify_le_bound, "max allowed |L_product - L_ed|")
      ->capture_default_str();
  verify->add_option("--frame-bound", verify_frame_bound, "max allowed rotating-frame infidelity")
      ->capture_default_str();
  verify->add_option("--frame-zero-bound", verify_frame_zero_bound,
                     "max allowed infidelity in the Omega = 0 control")
      ->capture_default_str();
  verify->add_option("--steps", verify_steps, "integrator steps")->capture_default_str();
  verify->add_option("--out", verify_out, "output JSON path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "tfim-sense: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (curve->parsed()) {
      return run_curve(curve_chain, curve_delta, curve_lambda, curve_time, omega_min, omega_max,
                       curve_points, curve_out);
    }
    if (halfwidth->parsed() || fit->parsed()) {
      return run_halfwidth(hw_chain, hw_deltas, hw_lambda, hw_time, hw_window, hw_convention,
                           hw_out, fit->parsed());
    }
    if (collapse->parsed()) {
      return run_collapse(collapse_cases, collapse_lambda, collapse_time, collapse_window,
                          collapse_out);
    }
    if (protocol->parsed()) {
      return run_protocol(protocol_config, summary_out, trials_out);
    }
    if (verify->parsed()) {
      return run_verify(verify_max_n, verify_delta, verify_le_bound, verify_frame_bound,
                        verify_frame_zero_bound, verify_steps, verify_out);
    }
  } catch (const tfim::AnalysisError& e) {
    fail(kExitInsufficientData, e.what());
  } catch (const std::exception& e) {
    fail(kExitValidation, e.what());
  }
  return kExitOk;
}
