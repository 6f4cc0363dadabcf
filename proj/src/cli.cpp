#include "tailbalance/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tailbalance/condorcet.hpp"
#include "tailbalance/errors.hpp"
#include "tailbalance/io.hpp"
#include "tailbalance/jury_sim.hpp"
#include "tailbalance/signal_model.hpp"
#include "tailbalance/tail_balance.hpp"

namespace tailbalance {

using nlohmann::json;

namespace {

struct Options {
  std::string format = "csv";
  std::string config_path;

  // alpha
  std::string alpha_kind;
  std::optional<double> theta;
  std::optional<double> a;
  std::optional<double> intercept;
  std::optional<double> slope;
  std::string table_path;

  // solve / verify
  std::string method = "auto";
  std::string h_source = "closed-form";
  int grid = 0;
  bool uniform_limit = false;
  double tol = 1e-10;

  // sample / posterior
  std::string state = "A";
  std::int64_t count = 1000;
  std::optional<std::uint64_t> seed;
  std::optional<double> s;

  // jury
  std::vector<double> abilities;
  std::optional<std::string> tie_break;
  std::optional<std::int64_t> trials;
  std::string mode = "prior";

  // condorcet
  double p = 0.0;
  int n_max = 1;
};

struct Output {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
  json summary = json::object();
};

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open --config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("--config file '" + path + "' is not valid JSON: " + e.what());
  }
}

std::vector<Knot> load_knots(const std::string& path, const char* flag) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument(std::string("cannot open ") + flag + " file '" + path + "'");
  return read_knots_csv(in);
}

std::optional<json> config_section(const Options& o, const char* key, const char* marker) {
  if (o.config_path.empty()) return std::nullopt;
  json doc = load_json_file(o.config_path);
  if (doc.contains(key)) return doc.at(key);
  if (doc.contains(marker)) return doc;
  throw std::invalid_argument(std::string("--config document has no '") + key + "' section");
}

AlphaSpec resolve_alpha(const Options& o) {
  if (auto doc = config_section(o, "alpha", "kind")) {
    if (!o.alpha_kind.empty()) {
      throw std::invalid_argument("give the alpha spec either inline (--alpha) or via --config");
    }
    return alpha_from_json(*doc);
  }
  if (o.alpha_kind.empty()) throw std::invalid_argument("missing --alpha (or --config)");
  const double theta = o.theta.value_or(0.5);
  if (o.alpha_kind == "linear") {
    if (!o.a) throw std::invalid_argument("--alpha linear needs --a");
    return AlphaSpec::linear(Prior(theta), Ability(*o.a));
  }
  if (o.alpha_kind == "affine") {
    if (!o.intercept || !o.slope) {
      throw std::invalid_argument("--alpha affine needs --intercept and --slope");
    }
    return AlphaSpec::affine(*o.intercept, *o.slope, Prior(theta));
  }
  if (o.alpha_kind == "table") {
    if (o.table_path.empty()) throw std::invalid_argument("--alpha table needs --table <csv>");
    std::optional<Prior> prior;
    if (o.theta) prior = Prior(*o.theta);
    return AlphaSpec::table(load_knots(o.table_path, "--table"), prior);
  }
  throw std::invalid_argument("--alpha must be linear, affine or table");
}

JuryConfig resolve_jury(const Options& o) {
  if (auto doc = config_section(o, "jury", "abilities")) {
    if (!o.abilities.empty() || o.theta || o.tie_break) {
      throw std::invalid_argument(
          "give the jury (--abilities, --theta, --tie-break) either inline or via --config");
    }
    // --trials and --seed override the document.
    JuryConfig config = jury_from_json(*doc);
    if (o.trials) config.trials = *o.trials;
    if (o.seed) config.seed = *o.seed;
    config.validate(false);
    return config;
  }
  if (o.abilities.empty()) throw std::invalid_argument("missing --abilities (or --config)");
  JuryConfig config;
  for (double a : o.abilities) config.abilities.emplace_back(a);
  config.prior = Prior(o.theta.value_or(0.5));
  config.tie_break = tie_break_from_string(o.tie_break.value_or("follow_signal"));
  config.trials = o.trials.value_or(config.trials);
  config.seed = o.seed.value_or(config.seed);
  config.validate(false);
  return config;
}

const Ability& linear_ability(const AlphaSpec& alpha, const std::string& what) {
  if (const auto* lin = std::get_if<AlphaSpec::Linear>(&alpha.kind())) return lin->a;
  throw std::invalid_argument(what + " requires --alpha linear");
}

SolvedCdf solve_with(const std::string& method, const AlphaSpec& alpha, const Options& o) {
  const Prior prior = alpha.prior();
  const DegeneratePolicy policy =
      o.uniform_limit ? DegeneratePolicy::UniformLimit : DegeneratePolicy::Reject;
  if (method == "auto") {
    return prior.is_balanced() ? solve_balanced(alpha, policy) : solve_odds(alpha, prior, policy);
  }
  if (method == "balanced") return solve_balanced(alpha, policy);
  if (method == "odds") return solve_odds(alpha, prior, policy);
  if (method == "affine-pair") return solve_affine_pair(odds_coefficients(alpha, prior));
  if (method == "closed-form") {
    const Ability& a = linear_ability(alpha, "closed-form");
    if (!prior.is_balanced()) return closed_form_linear_odds(a, prior, policy);
    return closed_form_linear(a);
  }
  if (method == "decomposition") {
    const Ability& a = linear_ability(alpha, "decomposition");
    if (!prior.is_balanced()) throw std::invalid_argument("decomposition requires theta = 0.5");
    return alt_decomposition_solver(a);
  }
  throw std::invalid_argument("unknown method '" + method + "'");
}

std::vector<double> uniform_grid(int n) {
  if (n < 2) throw std::invalid_argument("--grid must be at least 2");
  std::vector<double> ts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ts[static_cast<std::size_t>(i)] = (2.0 * i - (n - 1)) / (n - 1);
  return ts;
}

State parse_state(const std::string& s) {
  if (s == "A" || s == "a") return State::A;
  if (s == "B" || s == "b") return State::B;
  throw std::invalid_argument("--state must be A or B");
}

unsigned worker_cap() {
  const char* env = std::getenv("TAILBALANCE_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) {
    throw std::invalid_argument("TAILBALANCE_THREADS must be a positive integer");
  }
  return static_cast<unsigned>(v);
}

json verdict_row_ordering(const std::vector<double>& ordering) {
  std::string s;
  for (std::size_t i = 0; i < ordering.size(); ++i) {
    if (i) s += ';';
    s += format_double(ordering[i]);
  }
  return s;
}

void emit(std::ostream& out, const Options& o, const json& spec, const Output& data) {
  if (o.format == "json") {
    json rows = json::array();
    for (const auto& r : data.rows) rows.push_back(r);
    json doc = {{"metadata", {{"tool", "tailbalance"}, {"version", kVersion}, {"spec", spec}}},
                {"columns", data.columns},
                {"rows", rows}};
    if (!data.summary.empty()) doc["summary"] = data.summary;
    out << doc.dump(2) << '\n';
    return;
  }
  out << "# tailbalance " << kVersion << ' ' << spec.dump() << '\n';
  for (std::size_t i = 0; i < data.columns.size(); ++i) {
    out << (i ? "," : "") << data.columns[i];
  }
  out << '\n';
  for (const auto& row : data.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      const json& cell = row[i];
      if (cell.is_string()) {
        out << cell.get<std::string>();
      } else if (cell.is_number_integer()) {
        out << cell.get<std::int64_t>();
      } else {
        out << format_double(cell.get<double>());
      }
    }
    out << '\n';
  }
  if (!data.summary.empty()) {
    out << '#';
    bool first = true;
    for (const auto& [key, value] : data.summary.items()) {
      out << (first ? " " : ",") << key << '=';
      if (value.is_string()) {
        out << value.get<std::string>();
      } else if (value.is_number_float()) {
        out << format_double(value.get<double>());
      } else {
        out << value.dump();
      }
      first = false;
    }
    out << '\n';
  }
}

int dispatch(const std::string& cmd, const Options& o, std::ostream& out) {
  json spec = {{"subcommand", cmd}, {"format", o.format}};
  Output data;
  int status = kExitOk;

  if (cmd == "solve") {
    const AlphaSpec alpha = resolve_alpha(o);
    const int grid = o.grid > 0 ? o.grid : 201;
    const SolvedCdf h = solve_with(o.method, alpha, o);
    spec["alpha"] = to_json(alpha);
    spec["method"] = o.method;
    spec["grid"] = grid;
    spec["uniform_limit"] = o.uniform_limit;
    data.columns = {"t", "H"};
    for (double t : uniform_grid(grid)) data.rows.push_back({t, h(t)});
    data.summary = {{"provenance", std::string(to_string(h.provenance()))},
                    {"max_residual", h.max_residual()},
                    {"is_valid_cdf", h.is_valid_cdf()}};
  } else if (cmd == "verify") {
    const AlphaSpec alpha = resolve_alpha(o);
    const int grid = o.grid > 0 ? o.grid : 1001;
    const Prior prior = alpha.prior();
    static const std::vector<std::string> named = {"closed-form", "balanced",     "odds",
                                                   "decomposition", "affine-pair", "auto"};
    const bool is_named =
        std::find(named.begin(), named.end(), o.h_source) != named.end();
    const SolvedCdf h = is_named ? solve_with(o.h_source, alpha, o)
                                 : tabulated_cdf(load_knots(o.h_source, "--h"), alpha, prior);
    const ResidualReport report = residual_check(h, alpha, prior, grid);
    spec["alpha"] = to_json(alpha);
    spec["h"] = o.h_source;
    spec["grid"] = grid;
    spec["tol"] = o.tol;
    data.columns = {"t", "H", "alpha", "residual"};
    for (const ResidualRow& r : report.rows) data.rows.push_back({r.t, r.h, r.alpha, r.residual});
    const bool pass = report.max_residual <= o.tol;
    data.summary = {{"max_residual", report.max_residual},
                    {"argmax", report.argmax},
                    {"status", pass ? "pass" : "fail"}};
    status = pass ? kExitOk : kExitVerifyFail;
  } else if (cmd == "sample") {
    if (!o.a) throw std::invalid_argument("sample needs --a");
    if (o.count < 1) throw std::invalid_argument("--n must be at least 1");
    const Ability a(*o.a);
    const State state = parse_state(o.state);
    spec["a"] = a.value();
    spec["state"] = std::string(to_string(state));
    spec["n"] = o.count;
    spec["seed"] = o.seed.value_or(0);
    RngStream rng(o.seed.value_or(0));
    data.columns = {"i", "signal"};
    for (std::int64_t i = 0; i < o.count; ++i) {
      data.rows.push_back({i, sample_signal(a, state, rng).value()});
    }
  } else if (cmd == "posterior") {
    if (!o.a) throw std::invalid_argument("posterior needs --a");
    const Ability a(*o.a);
    const Prior prior(o.theta.value_or(0.5));
    spec["a"] = a.value();
    spec["theta"] = prior.theta();
    data.columns = {"s", "posterior_A"};
    std::vector<double> signals;
    if (o.s) {
      spec["s"] = *o.s;
      signals.push_back(*o.s);
    } else {
      const int grid = o.grid > 0 ? o.grid : 201;
      spec["grid"] = grid;
      signals = uniform_grid(grid);
    }
    for (double s : signals) data.rows.push_back({s, posterior_from_signal(a, Signal(s), prior)});
  } else if (cmd == "simulate" || cmd == "exact") {
    const JuryConfig config = resolve_jury(o);
    spec["jury"] = to_json(config);
    VerdictStats stats;
    if (cmd == "exact") {
      stats = exact_verdict_probability(config);
    } else {
      if (o.mode != "prior" && o.mode != "per-state") {
        throw std::invalid_argument("--mode must be prior or per-state");
      }
      spec["mode"] = o.mode;
      stats = monte_carlo_verdict(
          config, o.mode == "prior" ? SamplingMode::PriorDraw : SamplingMode::PerState,
          worker_cap());
    }
    std::vector<double> ordering;
    for (const Ability& a : config.abilities) ordering.push_back(a.value());
    data.columns = {"ordering", "p_correct", "method", "stderr"};
    data.rows.push_back({verdict_row_ordering(ordering), stats.p_correct,
                         std::string(to_string(stats.method)), stats.std_error});
    data.summary = {{"trials_used", stats.trials_used},
                    {"p_correct_given_A", stats.p_correct_given_A},
                    {"p_correct_given_B", stats.p_correct_given_B}};
  } else if (cmd == "order-scan") {
    const JuryConfig config = resolve_jury(o);
    spec["jury"] = to_json(config);
    data.columns = {"ordering", "p_correct", "method", "stderr"};
    for (const OrderingResult& r : order_scan(config.abilities, config.prior, config.tie_break)) {
      data.rows.push_back({verdict_row_ordering(r.ordering), r.p_correct, "exact", 0.0});
    }
  } else if (cmd == "condorcet") {
    spec["p"] = o.p;
    spec["n_max"] = o.n_max;
    data.columns = {"n", "probability"};
    for (const CurvePoint& c : condorcet_curve(o.p, o.n_max)) {
      data.rows.push_back({c.n, c.probability});
    }
  }
  emit(out, o, spec, data);
  return status;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tail-balance solvers and sequential jury simulation"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--config", o.config_path, "JSON document with alpha and/or jury sections");
  };
  auto add_alpha = [&o](CLI::App* sub) {
    sub->add_option("--alpha", o.alpha_kind, "linear | affine | table");
    sub->add_option("--theta", o.theta, "Prior probability of state A");
    sub->add_option("--a", o.a, "Ability in [0, 1]");
    sub->add_option("--intercept", o.intercept, "Affine alpha intercept");
    sub->add_option("--slope", o.slope, "Affine alpha slope");
    sub->add_option("--table", o.table_path, "CSV of t,alpha knots");
    sub->add_flag("--uniform-limit", o.uniform_limit,
                  "Answer degenerate (constant) alpha with the uniform CDF");
  };
  auto add_jury = [&o](CLI::App* sub) {
    sub->add_option("--abilities", o.abilities, "Abilities in voting order")->delimiter(',');
    sub->add_option("--theta", o.theta, "Prior probability of state A");
    sub->add_option("--tie-break", o.tie_break, "follow_signal | vote_a | vote_b");
  };

  auto* solve = app.add_subcommand("solve", "Solve the tail-balance equation on a grid");
  add_common(solve);
  add_alpha(solve);
  solve->add_option("--method", o.method,
                    "auto | balanced | odds | affine-pair | closed-form | decomposition");
  solve->add_option("--grid", o.grid, "Number of grid points (default 201)");

  auto* verify = app.add_subcommand("verify", "Residual of a CDF against the equation");
  verify->set_help_flag("--help", "Print this help message and exit");
  add_common(verify);
  add_alpha(verify);
  verify->add_option("--h", o.h_source, "Solver name or CSV file of t,H knots");
  verify->add_option("--grid", o.grid, "Odd number of grid points (default 1001)");
  verify->add_option("--tol", o.tol, "Pass threshold for the max residual");

  auto* sample = app.add_subcommand("sample", "Inverse-transform signal draws");
  add_common(sample);
  sample->add_option("--a", o.a, "Ability in [0, 1]");
  sample->add_option("--state", o.state, "A or B");
  sample->add_option("--n", o.count, "Number of draws");
  sample->add_option("--seed", o.seed, "RNG seed");

  auto* posterior = app.add_subcommand("posterior", "Single-juror posterior of A given a signal");
  add_common(posterior);
  posterior->add_option("--a", o.a, "Ability in [0, 1]");
  posterior->add_option("--theta", o.theta, "Prior probability of state A");
  posterior->add_option("--s", o.s, "Signal (otherwise a grid over [-1, 1])");
  posterior->add_option("--grid", o.grid, "Grid points when --s is absent (default 201)");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo verdict accuracy");
  add_common(simulate);
  add_jury(simulate);
  simulate->add_option("--trials", o.trials, "Number of simulated juries");
  simulate->add_option("--seed", o.seed, "RNG seed");
  simulate->add_option("--mode", o.mode, "prior | per-state");

  auto* exact = app.add_subcommand("exact", "Exact verdict accuracy by enumeration");
  add_common(exact);
  add_jury(exact);

  auto* scan = app.add_subcommand("order-scan", "Rank all voting orders");
  add_common(scan);
  add_jury(scan);

  auto* condorcet = app.add_subcommand("condorcet", "Binary Condorcet majority accuracy");
  add_common(condorcet);
  condorcet->add_option("--p", o.p, "Per-juror accuracy")->required();
  condorcet->add_option("--n-max", o.n_max, "Largest odd jury size")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    return dispatch(cmd, o, out);
  } catch (const SolverError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace tailbalance
