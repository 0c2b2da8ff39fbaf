// Copyright 2026 The sidesum Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Exit codes: 0 success, 1 invalid packing or
// inconsistent ledger, 2 usage error or unreachable request, 3 malformed
// or unreadable input file.

#pragma once

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sidesum/bounds.hpp"
#include "sidesum/constructions.hpp"
#include "sidesum/ledger_json.hpp"
#include "sidesum/optimizer.hpp"
#include "sidesum/packing_json.hpp"
#include "sidesum/svg.hpp"

namespace sidesum::cli {

enum ExitCode : int { kOk = 0, kFailed = 1, kUsage = 2, kMalformed = 3 };

struct CommandOutcome {
  int exit_code = kOk;
  Json payload = Json::object();
  std::string text;
  std::vector<std::string> files;
};

/// Wraps an outcome-level failure that carries its own exit code.
class CommandError : public Error {
 public:
  CommandError(int code, const std::string& what, Json details = Json::object())
      : Error(what), code_(code), details_(std::move(details)) {}
  int code() const { return code_; }
  const Json& details() const { return details_; }

 private:
  int code_;
  Json details_;
};

namespace detail {

inline std::string decimal(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

inline std::string human(const Rational& r) { return r.str() + " (" + decimal(r.to_double()) + ")"; }
inline std::string human(const Surd& s) { return s.str() + " (" + decimal(s.to_double()) + ")"; }

inline Container container_for(const std::string& shape) {
  if (shape == "square") return Container::unit_square();
  if (shape == "triangle") return Container::unit_triangle();
  throw InvalidArgument("unknown shape '" + shape + "' (expected square or triangle)");
}

/// Single-writer lock on a sidecar file, held for the object's lifetime.
class FileLock {
 public:
  explicit FileLock(const std::string& path) : fd_(::open((path + ".lock").c_str(), O_CREAT | O_RDWR, 0644)) {
    if (fd_ < 0) throw Error("cannot open lock file for '" + path + "'");
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw Error("cannot lock '" + path + "'");
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_;
};

/// Write to a temporary sibling, then rename over the target.
inline void write_atomically(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  write_text_file(tmp, text);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot replace '" + path + "': " + ec.message());
}

inline Packing load_packing_file(const std::string& path) {
  try {
    return load_packing(path);
  } catch (const ParseError& e) {
    throw CommandError(kMalformed, path + ": " + e.what());
  }
}

inline Ledger load_audited_ledger(const std::string& path) {
  Ledger ledger;
  try {
    ledger = load_ledger(path);
  } catch (const ParseError& e) {
    throw CommandError(kMalformed, path + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw CommandError(kMalformed, path + ": " + e.what());
  }
  const auto report = audit(ledger);
  if (!report.ok) throw CommandError(kMalformed, path + ": ledger fails replay: " + report.problems.front());
  return ledger;
}

inline Json report_json(const VerificationReport& r) { return to_json(r); }

inline std::string report_text(const VerificationReport& r) {
  std::ostringstream os;
  os << "valid: " << (r.valid ? "yes" : "no") << "\n";
  os << "side_sum: " << human(r.side_sum) << "\n";
  os << "violations: " << r.violations.size() << "\n";
  for (const auto& v : r.violations) {
    os << "  " << v.reason << " (" << v.first;
    if (v.second) os << ", " << *v.second;
    os << ")\n";
  }
  return os.str();
}

inline std::string short_rule(const Ledger& ledger, const std::optional<std::size_t>& id) {
  if (!id) return "trivial";
  const auto& r = ledger.rules()[*id];
  std::string s = std::string(to_string(r.rule));
  if (r.rule == RuleKind::kStarLower || r.rule == RuleKind::kStarUpper) {
    s += "(a=" + std::to_string(r.a) + ",b=" + std::to_string(r.b) + ",m=" + std::to_string(r.m) + ")";
  } else if (r.rule == RuleKind::kHypothesis) {
    s += "(n=" + std::to_string(r.hyp_n) + (r.alpha ? ",alpha=" + r.alpha->str() : "") + ")";
  } else if (r.rule == RuleKind::kCertificate) {
    s += "(" + r.digest + ")";
  }
  if (r.hypothetical) s += "*";
  return "#" + std::to_string(*id) + " " + s;
}

inline HypothesisWitness parse_hypothesis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw InvalidArgument("--hypothesis expects n=alpha, got '" + text + "'");
  HypothesisWitness w;
  try {
    std::size_t used = 0;
    w.n = std::stoll(text.substr(0, eq), &used);
    if (used != eq) throw std::invalid_argument("n");
    w.alpha = Rational::parse(text.substr(eq + 1));
  } catch (const std::exception&) {
    throw InvalidArgument("--hypothesis expects n=alpha, got '" + text + "'");
  }
  return w;
}

inline Frame parse_frame(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidArgument("--frame expects four numbers e1x,e1y,e2x,e2y");
    }
  }
  if (values.size() != 4) throw InvalidArgument("--frame expects four numbers e1x,e1y,e2x,e2y");
  return Frame{{{values[0], values[1]}, {values[2], values[3]}}};
}

}  // namespace detail

struct ConstructOptions {
  std::string shape = "square";
  int n = 0;
  std::string method = "auto";
  int a = 0;
  int b = 0;
  std::string out;
};

inline CommandOutcome cmd_construct(const ConstructOptions& o) {
  const Container c = detail::container_for(o.shape);
  if (o.n < 1) throw InvalidArgument("--n must be at least 1");
  Packing pk;
  if (o.method == "auto") {
    pk = best_constructive(o.n, c).packing;
  } else if (o.method == "grid") {
    const auto k = exact_isqrt(o.n);
    if (k < 0) throw CommandError(kUsage, "grid method needs a square n; " + std::to_string(o.n) + " is not");
    pk = grid_packing(static_cast<int>(k), c);
  } else if (o.method == "split") {
    if (o.n % 3 != 1) throw CommandError(kUsage, "split method reaches n = 1 + 3t only");
    std::vector<ConstructionMove> moves{ConstructionMove::base(1)};
    for (int i = 0; i < (o.n - 1) / 3; ++i) moves.push_back(ConstructionMove::split_largest());
    pk = apply_moves(moves, c);
  } else if (o.method == "substitute") {
    if (o.a < 1 || o.a > o.b) throw InvalidArgument("substitute needs 1 <= a <= b (--a, --b)");
    const long long base_n = o.n - (static_cast<long long>(o.b) * o.b - static_cast<long long>(o.a) * o.a);
    if (base_n < 1) {
      throw CommandError(kUsage, "substitute(" + std::to_string(o.a) + "," + std::to_string(o.b) +
                                     ") cannot reach n=" + std::to_string(o.n));
    }
    pk = substitute(best_constructive(static_cast<int>(base_n), c).packing, {o.a, o.b});
  } else {
    throw InvalidArgument("unknown method '" + o.method + "' (auto, grid, split, substitute)");
  }
  const auto report = verify_packing(pk);
  CommandOutcome out;
  out.payload["n"] = o.n;
  out.payload["shape"] = o.shape;
  out.payload["method"] = o.method;
  out.payload["meta"] = pk.meta;
  out.payload["side_sum"] = report.side_sum.str();
  out.payload["valid"] = report.valid;
  std::ostringstream text;
  text << "n: " << o.n << "\nmeta: " << pk.meta << "\nside_sum: " << detail::human(report.side_sum)
       << "\nvalid: " << (report.valid ? "yes" : "no") << "\n";
  if (!o.out.empty()) {
    save_packing(o.out, pk);
    out.files.push_back(o.out);
  } else {
    out.payload["packing"] = to_json(pk);
  }
  out.text = text.str();
  out.exit_code = report.valid ? kOk : kFailed;
  return out;
}

inline CommandOutcome cmd_verify(const std::string& path) {
  const Packing pk = detail::load_packing_file(path);
  const auto report = verify_packing(pk);
  CommandOutcome out;
  out.payload["path"] = path;
  out.payload["report"] = detail::report_json(report);
  out.text = detail::report_text(report);
  out.exit_code = report.valid ? kOk : kFailed;
  return out;
}

struct OptimizeOptions {
  std::string shape = "square";
  int n = 0;
  std::uint64_t seed = 1;
  double time = 60.0;
  int restarts = 4;
  int steps = 20000;
  std::int64_t denominator_limit = 1'000'000;
  std::string out;
};

inline CommandOutcome cmd_optimize(const OptimizeOptions& o) {
  const Container c = detail::container_for(o.shape);
  if (o.n < 1) throw InvalidArgument("--n must be at least 1");
  AnnealConfig cfg;
  cfg.seed = o.seed;
  cfg.time_budget_seconds = o.time;
  cfg.restarts = o.restarts;
  cfg.steps_per_restart = o.steps;
  const auto result = anneal(o.n, c, cfg);
  const Packing pk = rationalize_snap(result.packing, o.denominator_limit);
  const auto report = verify_packing(pk);
  if (!report.valid) throw Error("internal error: snapped packing failed verification");
  const double float_sum = score(result.packing).sum;
  CommandOutcome out;
  out.payload["n"] = o.n;
  out.payload["shape"] = o.shape;
  out.payload["seed"] = o.seed;
  out.payload["float_objective"] = result.objective;
  out.payload["float_sum"] = float_sum;
  out.payload["certified_sum"] = report.side_sum.str();
  out.payload["gap"] = float_sum - report.side_sum.to_double();
  out.payload["timed_out"] = result.timed_out;
  out.payload["meta"] = pk.meta;
  std::ostringstream text;
  text << "float objective: " << detail::decimal(result.objective) << "\ncertified sum: "
       << detail::human(report.side_sum) << "\ngap: " << detail::decimal(float_sum - report.side_sum.to_double())
       << "\n";
  if (result.timed_out) text << "note: time budget reached; result depends on timing\n";
  if (!o.out.empty()) {
    save_packing(o.out, pk);
    out.files.push_back(o.out);
  } else {
    out.payload["packing"] = to_json(pk);
  }
  out.text = text.str();
  return out;
}

struct BoundsOptions {
  std::string shape = "square";
  std::int64_t max_n = 0;
  std::string ledger;
  std::vector<std::string> ingest;
  std::optional<std::string> hypothesis;
  std::optional<std::int64_t> zero;
  bool persist_hypotheses = false;
  bool no_monotone = false;
  std::string delta = "1/1000000000";
};

inline CommandOutcome cmd_bounds(const BoundsOptions& o) {
  const LedgerFamily family = family_of(detail::container_for(o.shape).kind);
  if (o.max_n < 0) throw InvalidArgument("--max-n must be at least 1");
  PropagateOptions popts;
  popts.monotone = !o.no_monotone;
  try {
    popts.delta = Rational::parse(o.delta);
  } catch (const ParseError&) {
    throw InvalidArgument("--delta must be a rational p/q");
  }
  std::optional<HypothesisWitness> witness;
  if (o.hypothesis) witness = detail::parse_hypothesis(*o.hypothesis);

  std::optional<detail::FileLock> lock;
  if (!o.ledger.empty()) lock.emplace(o.ledger);

  Ledger ledger;
  if (!o.ledger.empty() && std::filesystem::exists(o.ledger)) {
    ledger = detail::load_audited_ledger(o.ledger);
    if (ledger.family() != family) throw InvalidArgument("ledger is for the " + std::string(to_string(ledger.family())) + " family");
    if (o.max_n != 0 && o.max_n != ledger.max_n()) {
      throw InvalidArgument("ledger has N=" + std::to_string(ledger.max_n()) + " but --max-n is " +
                            std::to_string(o.max_n));
    }
  } else {
    if (o.max_n < 1) throw InvalidArgument("--max-n must be at least 1");
    ledger = seed_anchors(o.max_n, family);
  }

  for (const auto& path : o.ingest) {
    const Packing pk = detail::load_packing_file(path);
    try {
      ingest_certificate(ledger, pk);
    } catch (const CertificateRejected& e) {
      throw CommandError(kFailed, path + ": " + e.what(), Json{{"report", to_json(e.report())}});
    }
  }
  const auto base_result = propagate(ledger, popts);

  Ledger view = ledger;
  const bool hypothetical = witness || o.zero;
  std::optional<PropagateResult> hyp_result;
  try {
    if (witness) hypothesize_epsilon(view, *witness);
    if (o.zero) zero_propagation(view, *o.zero);
    if (hypothetical) hyp_result = propagate(view, popts);
  } catch (const InconsistentLedger& e) {
    throw CommandError(kFailed, e.what());
  }

  CommandOutcome out;
  if (!o.ledger.empty()) {
    detail::write_atomically(o.ledger, dump_canonical(to_json(o.persist_hypotheses ? view : ledger)));
    out.files.push_back(o.ledger);
  }
  const auto& result = hyp_result ? *hyp_result : base_result;
  out.payload["container"] = std::string(to_string(view.family()));
  out.payload["N"] = view.max_n();
  out.payload["rounds"] = result.rounds;
  out.payload["converged"] = result.converged;
  out.payload["hypothetical"] = hypothetical;
  out.payload["hypotheses_persisted"] = hypothetical && o.persist_hypotheses && !o.ledger.empty();
  Json rows = Json::array();
  std::ostringstream text;
  text << std::setw(6) << "n" << " | " << std::setw(24) << "lower" << " | " << std::setw(28) << "upper"
       << " | provenance\n";
  for (const auto& e : view.entries()) {
    Json row = Json::object();
    row["n"] = e.n;
    row["lower"] = e.lower.str();
    row["upper"] = bound_to_json(e.upper);
    row["lower_rule"] = detail::short_rule(view, e.lower_prov);
    row["upper_rule"] = detail::short_rule(view, e.upper_prov);
    rows.push_back(std::move(row));
    text << std::setw(6) << e.n << " | " << std::setw(24) << detail::human(e.lower) << " | " << std::setw(28)
         << detail::human(e.upper) << " | " << detail::short_rule(view, e.lower_prov) << " ; "
         << detail::short_rule(view, e.upper_prov) << "\n";
  }
  out.payload["rows"] = std::move(rows);
  text << "rounds: " << result.rounds << " converged: " << (result.converged ? "yes" : "no") << "\n";
  if (hypothetical) {
    text << "rows marked * derive from a hypothesis; "
         << (o.persist_hypotheses && !o.ledger.empty() ? "persisted to the ledger\n" : "not persisted\n");
  }
  out.text = text.str();
  return out;
}

struct SeriesOptions {
  std::string ledger;
  std::int64_t max_k = 0;
};

inline CommandOutcome cmd_series(const SeriesOptions& o) {
  if (o.ledger.empty()) throw InvalidArgument("--ledger (or SIDESUM_LEDGER) is required");
  if (!std::filesystem::exists(o.ledger)) throw CommandError(kMalformed, "cannot open '" + o.ledger + "'");
  const Ledger ledger = detail::load_audited_ledger(o.ledger);
  if (o.max_k < 1) throw InvalidArgument("--max-k must be at least 1");
  if (o.max_k > 3037000499LL || !ledger.in_range(o.max_k * o.max_k + 1)) {
    throw CommandError(kUsage, "ledger covers n <= " + std::to_string(ledger.max_n()) + ", series to k=" +
                                   std::to_string(o.max_k) + " needs n = k^2 + 1");
  }
  const auto report = epsilon_partial_sums(ledger, o.max_k);
  CommandOutcome out;
  Json rows = Json::array();
  std::ostringstream text;
  text << std::setw(5) << "k" << " | " << std::setw(22) << "eps_lower" << " | " << std::setw(34) << "eps_upper"
       << " | partial sum\n";
  for (const auto& r : report.rows) {
    rows.push_back(Json{{"k", r.k},
                        {"eps_lower", r.eps_lower.str()},
                        {"eps_upper", bound_to_json(r.eps_upper)},
                        {"partial_sum", r.partial_sum.str()}});
    text << std::setw(5) << r.k << " | " << std::setw(22) << detail::human(r.eps_lower) << " | " << std::setw(34)
         << detail::human(r.eps_upper) << " | " << detail::human(r.partial_sum) << "\n";
  }
  out.payload["rows"] = std::move(rows);
  out.payload["any_positive"] = report.any_positive;
  if (report.any_positive) {
    out.payload["floor"] = Json{{"from_k", *report.floor_from}, {"constant", report.floor_constant->str()}};
    text << "divergence floor Omega(1/k): eps(k) >= c/k for k >= " << *report.floor_from
         << " with c = " << detail::human(*report.floor_constant) << "\n";
  }
  if (ledger.has_hypotheses()) text << "note: ledger contains hypothetical bounds\n";
  out.payload["hypothetical"] = ledger.has_hypotheses();
  out.text = text.str();
  return out;
}

struct RenderOptions {
  std::string path;
  std::string out;
  std::string frame;
};

inline CommandOutcome cmd_render(const RenderOptions& o) {
  const Packing pk = detail::load_packing_file(o.path);
  std::optional<Frame> frame;
  if (!o.frame.empty()) frame = detail::parse_frame(o.frame);
  const std::string svg = render_svg(pk, frame);
  CommandOutcome out;
  out.payload["path"] = o.path;
  out.payload["polygons"] = pk.size();
  if (!o.out.empty()) {
    write_text_file(o.out, svg);
    out.files.push_back(o.out);
    out.text = "polygons: " + std::to_string(pk.size()) + "\n";
  } else {
    out.payload["svg"] = svg;
    out.text = svg;
  }
  return out;
}

/// Entry point shared by the binary and the integration tests.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"sidesum: packings, certificates and bound ledgers for maximal side sums"};
  app.require_subcommand(1);
  bool json = false;
  app.add_flag("--json", json, "Emit exactly one JSON document on stdout");

  ConstructOptions co;
  auto* construct = app.add_subcommand("construct", "Build an exact packing by construction");
  construct->add_option("--shape", co.shape, "square or triangle")->capture_default_str();
  construct->add_option("--n", co.n, "Number of placements")->required();
  construct->add_option("--method", co.method, "auto, grid, split or substitute")->capture_default_str();
  construct->add_option("--a", co.a, "Substitution parameter a");
  construct->add_option("--b", co.b, "Substitution parameter b");
  construct->add_option("--out", co.out, "Packing JSON output path");

  std::string verify_path;
  auto* verify = app.add_subcommand("verify", "Verify a packing file exactly");
  verify->add_option("path", verify_path, "Packing JSON file")->required();

  OptimizeOptions oo;
  auto* optimize = app.add_subcommand("optimize", "Anneal, then snap to a certified exact packing");
  optimize->add_option("--shape", oo.shape, "square or triangle")->capture_default_str();
  optimize->add_option("--n", oo.n, "Number of placements")->required();
  optimize->add_option("--seed", oo.seed, "Random seed")->capture_default_str();
  optimize->add_option("--time", oo.time, "Time budget in seconds")->capture_default_str();
  optimize->add_option("--restarts", oo.restarts, "Annealing restarts")->capture_default_str();
  optimize->add_option("--steps", oo.steps, "Steps per restart")->capture_default_str();
  optimize->add_option("--limit", oo.denominator_limit, "Snap denominator limit")->capture_default_str();
  optimize->add_option("--out", oo.out, "Packing JSON output path");

  BoundsOptions bo;
  std::string hypothesis;
  std::int64_t zero = 0;
  auto* bounds = app.add_subcommand("bounds", "Seed or load a bound ledger, ingest, propagate and report");
  bounds->add_option("--shape", bo.shape, "square or triangle")->capture_default_str();
  bounds->add_option("--max-n", bo.max_n, "Ledger size N");
  bounds->add_option("--ledger", bo.ledger, "Ledger JSON path (default: $SIDESUM_LEDGER)");
  bounds->add_option("--ingest", bo.ingest, "Packing certificate files");
  auto* hyp_opt = bounds->add_option("--hypothesis", hypothesis, "What-if f(n^2+1) = n + alpha, as n=alpha");
  auto* zero_opt = bounds->add_option("--zero", zero, "What-if f(n^2+1) = n");
  bounds->add_flag("--persist-hypotheses", bo.persist_hypotheses, "Write hypothetical bounds to the ledger");
  bounds->add_flag("--no-monotone", bo.no_monotone, "Disable the monotone rule");
  bounds->add_option("--delta", bo.delta, "Convergence threshold as p/q")->capture_default_str();

  SeriesOptions so;
  auto* series = app.add_subcommand("series", "Partial sums of eps lower bounds");
  series->add_option("--ledger", so.ledger, "Ledger JSON path (default: $SIDESUM_LEDGER)");
  series->add_option("--max-k", so.max_k, "Last k")->required();

  RenderOptions ro;
  auto* render = app.add_subcommand("render", "Render a packing as SVG");
  render->add_option("path", ro.path, "Packing JSON file")->required();
  render->add_option("--out", ro.out, "SVG output path");
  render->add_option("--frame", ro.frame, "Parallelogram frame e1x,e1y,e2x,e2y");

  for (auto* sub : {construct, verify, optimize, bounds, series, render}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  const char* env_ledger = std::getenv("SIDESUM_LEDGER");
  if (bo.ledger.empty() && env_ledger) bo.ledger = env_ledger;
  if (so.ledger.empty() && env_ledger) so.ledger = env_ledger;
  if (hyp_opt->count() > 0) bo.hypothesis = hypothesis;
  if (zero_opt->count() > 0) bo.zero = zero;

  std::string command;
  CommandOutcome outcome;
  try {
    if (*construct) {
      command = "construct";
      outcome = cmd_construct(co);
    } else if (*verify) {
      command = "verify";
      outcome = cmd_verify(verify_path);
    } else if (*optimize) {
      command = "optimize";
      outcome = cmd_optimize(oo);
    } else if (*bounds) {
      command = "bounds";
      outcome = cmd_bounds(bo);
    } else if (*series) {
      command = "series";
      outcome = cmd_series(so);
    } else {
      command = "render";
      outcome = cmd_render(ro);
    }
  } catch (const std::exception& e) {
    int code = kUsage;
    Json details = Json::object();
    if (const auto* ce = dynamic_cast<const CommandError*>(&e)) {
      code = ce->code();
      details = ce->details();
    } else if (dynamic_cast<const ParseError*>(&e)) {
      code = kMalformed;
    } else if (dynamic_cast<const InconsistentLedger*>(&e)) {
      code = kFailed;
    }
    if (json) {
      Json doc = Json::object();
      doc["command"] = command;
      doc["exit_code"] = code;
      doc["error"] = e.what();
      for (auto& [key, value] : details.items()) doc[key] = value;
      out << dump_canonical(doc);
    } else {
      err << "error: " << e.what() << "\n";
    }
    return code;
  }

  if (json) {
    Json doc = Json::object();
    doc["command"] = command;
    doc["exit_code"] = outcome.exit_code;
    for (auto& [key, value] : outcome.payload.items()) doc[key] = value;
    doc["files"] = outcome.files;
    out << dump_canonical(doc);
  } else {
    out << outcome.text;
    for (const auto& f : outcome.files) out << "wrote: " << f << "\n";
  }
  return outcome.exit_code;
}

}  // namespace sidesum::cli
