#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "shiftconv/acceptance.hpp"
#include "shiftconv/circle.hpp"
#include "shiftconv/coefficients.hpp"
#include "shiftconv/exp_sums.hpp"
#include "shiftconv/optimizer.hpp"
#include "shiftconv/spectral.hpp"
#include "shiftconv/voronoi.hpp"

namespace shiftconv::cli {

using shiftconv::to_string;

namespace {

using json = nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Type { Int, UInt, Real, Str, Flag };

struct Param {
  std::string name;
  json def;
  Type type;
  double lo = -1e18, hi = 1e18;
  std::string help;
};

struct Output {
  std::vector<json> rows;
  std::string text;
  std::optional<bool> pass;
};

using Handler = std::function<Output(const RunConfig&)>;

struct Command {
  std::string name;
  std::string help;
  std::vector<Param> params;
  Handler handler;
};

const std::vector<Command>& commands();

const Command& find_command(const std::string& name) {
  for (const auto& c : commands()) {
    if (c.name == name) return c;
  }
  throw UsageError("unknown subcommand: " + name);
}

// --- parameter access -----------------------------------------------------------

i64 get_i(const RunConfig& c, const char* k) { return c.params.at(k).get<i64>(); }
u64 get_u(const RunConfig& c, const char* k) { return c.params.at(k).get<u64>(); }
double get_d(const RunConfig& c, const char* k) { return c.params.at(k).get<double>(); }
std::string get_s(const RunConfig& c, const char* k) { return c.params.at(k).get<std::string>(); }
bool get_b(const RunConfig& c, const char* k) { return c.params.at(k).get<bool>(); }

json parse_value(const Param& p, const std::string& raw) {
  const std::string where = "--" + p.name + " " + raw;
  try {
    std::size_t used = 0;
    switch (p.type) {
      case Type::Int: {
        const long long v = std::stoll(raw, &used);
        if (used != raw.size()) break;
        return v;
      }
      case Type::UInt: {
        if (!raw.empty() && raw.front() == '-') throw RangeError(where + ": must be nonnegative");
        const unsigned long long v = std::stoull(raw, &used);
        if (used != raw.size()) break;
        return v;
      }
      case Type::Real: {
        const double v = std::stod(raw, &used);
        if (used != raw.size()) break;
        return v;
      }
      case Type::Str: return raw;
      case Type::Flag:
        if (raw == "true" || raw == "1" || raw.empty()) return true;
        if (raw == "false" || raw == "0") return false;
        break;
    }
  } catch (const std::out_of_range&) {
    throw RangeError(where + ": out of range");
  } catch (const std::invalid_argument&) {
  }
  throw UsageError(where + ": not a valid value");
}

void check_range(const Param& p, const json& v) {
  if (p.type != Type::Int && p.type != Type::UInt && p.type != Type::Real) return;
  const double x = v.get<double>();
  if (!(x >= p.lo && x <= p.hi)) {
    throw RangeError(fmt::format("--{} {} outside [{}, {}]", p.name, v.dump(), p.lo, p.hi));
  }
}

void set_global(RunConfig& config, const std::string& key, const std::string& value) {
  if (key == "format") {
    config.format = format_from_string(value);
  } else if (key == "workers") {
    const json v = parse_value({"workers", 1, Type::UInt, 1, 256, ""}, value);
    check_range({"workers", 1, Type::UInt, 1, 256, ""}, v);
    config.workers = v.get<unsigned>();
  } else if (key == "cache-dir") {
    config.cache_dir = value;
  } else if (key == "seed") {
    config.seed = parse_value({"seed", 0, Type::UInt, 0, 1.9e19, ""}, value).get<std::uint64_t>();
  } else {
    throw UsageError("unknown setting: " + key);
  }
}

bool is_global(const std::string& key) {
  return key == "format" || key == "workers" || key == "cache-dir" || key == "seed";
}

void set_param(RunConfig& config, const Command& cmd, const std::string& key, const std::string& value) {
  for (const auto& p : cmd.params) {
    if (p.name == key) {
      config.params[key] = parse_value(p, value);
      return;
    }
  }
  throw UsageError(fmt::format("unknown parameter for {}: {}", cmd.name, key));
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// key=value lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("config line without '=': " + line);
    std::string key = trim(line.substr(0, eq));
    while (!key.empty() && key.front() == '-') key.erase(0, 1);
    out.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return out;
}

RunConfig read_replay(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open replay file " + path);
  std::string line;
  std::getline(in, line);
  const std::string prefix = "# config: ";
  try {
    if (line.rfind(prefix, 0) == 0) return RunConfig::from_json(json::parse(line.substr(prefix.size())));
    return RunConfig::from_json(json::parse(line).at("config"));
  } catch (const json::exception& e) {
    throw UsageError("replay file has no config header: " + std::string(e.what()));
  }
}

// --- output -----------------------------------------------------------------------

std::string csv_cell(const json& v) {
  std::string s = v.is_string() ? v.get<std::string>() : v.is_null() ? std::string() : v.dump();
  if (s.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (char ch : s) {
      if (ch == '"') quoted += '"';
      quoted += ch;
    }
    return quoted + '"';
  }
  return s;
}

std::string status_word(const Output& o) {
  if (!o.pass) return "REPORT";
  return *o.pass ? "PASS" : "FAIL";
}

void emit(const RunConfig& config, const Output& o, std::ostream& out) {
  switch (config.format) {
    case Format::Json:
      out << json{{"config", config.to_json()}}.dump() << '\n';
      for (const auto& row : o.rows) out << row.dump() << '\n';
      out << json{{"status", status_word(o)}}.dump() << '\n';
      return;
    case Format::Csv: {
      out << "# config: " << config.to_json().dump() << '\n';
      std::vector<std::string> columns;
      for (const auto& row : o.rows) {
        for (const auto& [k, v] : row.items()) {
          if (std::find(columns.begin(), columns.end(), k) == columns.end()) columns.push_back(k);
        }
      }
      for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << csv_cell(columns[i]);
      out << '\n';
      for (const auto& row : o.rows) {
        for (std::size_t i = 0; i < columns.size(); ++i) {
          out << (i ? "," : "");
          if (row.contains(columns[i])) out << csv_cell(row[columns[i]]);
        }
        out << '\n';
      }
      return;
    }
    case Format::Text:
      out << "# config: " << config.to_json().dump() << '\n';
      if (!o.text.empty()) {
        out << o.text;
        if (o.text.back() != '\n') out << '\n';
      } else {
        for (const auto& row : o.rows) {
          std::string line;
          for (const auto& [k, v] : row.items()) {
            line += fmt::format("{}{}={}", line.empty() ? "" : " ", k, v.is_string() ? v.get<std::string>() : v.dump());
          }
          out << line << '\n';
        }
      }
      out << status_word(o) << '\n';
      return;
  }
}

json cplx_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}, {"abs", std::abs(z)}}; }

json merge(json a, const json& b) {
  a.update(b);
  return a;
}

// --- streams --------------------------------------------------------------------

CoefficientStream load_stream(StreamKind kind, u64 n, const RunConfig& c) {
  if (c.cache_dir.empty()) return build_stream(kind, n);
  return StreamCache(c.cache_dir).get(kind, n);
}

struct ConvolutionStreams {
  CoefficientStream gl3, gl2;
};

ConvolutionStreams convolution_streams(double x, const RunConfig& c) {
  const auto n2 = static_cast<u64>(std::ceil(3 * x)) + 2;
  const auto n3 = static_cast<u64>(std::ceil(2 * x)) + 2;
  return {load_stream(StreamKind::Gl3Sym2Lift, n3, c), load_stream(StreamKind::Gl2HolomorphicDelta, n2, c)};
}

// --- handlers -------------------------------------------------------------------

Output criterion_output(const CriterionResult& r) {
  Output o;
  o.rows.push_back(merge({{"criterion", r.name}, {"pass", r.pass}, {"summary", r.summary}}, r.data));
  o.text = fmt::format("{} {}: {}\n", r.pass ? "PASS" : "FAIL", r.name, r.summary);
  o.pass = r.pass;
  return o;
}

Output do_kloosterman(const RunConfig& c) {
  const i64 m = get_i(c, "m"), n = get_i(c, "n");
  const u64 q = get_u(c, "c");
  const auto s = kloosterman(m, n, q);
  Output o;
  json row = merge({{"m", m}, {"n", n}, {"c", q}, {"term_count", s.term_count}}, cplx_json(s.value));
  if (is_prime(q) && mod_reduce(m, q) != 0 && mod_reduce(n, q) != 0) {
    const double bound = 2 * std::sqrt(static_cast<double>(q));
    row["weil_bound"] = bound;
    o.pass = std::abs(s.value) <= bound;
  }
  o.rows.push_back(row);
  return o;
}

Output do_baby_sums(const RunConfig& c) {
  const i64 h = get_i(c, "h"), n = get_i(c, "n"), m = get_i(c, "m"), a = get_i(c, "a"), b = get_i(c, "b");
  const u64 q = get_u(c, "c"), d = get_u(c, "d");
  Output o;
  o.rows.push_back(merge({{"sum", "S"}, {"h", h}, {"n", n}, {"m", m}, {"c", q}, {"d", d}}, cplx_json(baby_s(h, n, m, q, d).value)));
  o.rows.push_back(merge({{"sum", "T"}, {"a", a}, {"b", b}, {"m", m}, {"c", q}}, cplx_json(baby_t(a, b, m, q).value)));
  return o;
}

Output do_verify(const RunConfig& c) {
  const auto r = check_identities(get_u(c, "max-modulus"), get_u(c, "exhaustive-max"), get_u(c, "samples"), c.seed,
                                  c.workers);
  Output o = criterion_output(r);
  const auto& d = r.data;
  o.text = fmt::format("{} S-factorization: {} checks, {} failures, max rel err {:.3e}\n"
                       "{} T-multiplicativity: {} checks, {} failures, max rel err {:.3e}\n",
                       d["s_failures"] == 0 ? "PASS" : "FAIL", d["s_checked"].get<u64>(), d["s_failures"].get<u64>(),
                       d["s_max_rel_error"].get<double>(), d["t_failures"] == 0 ? "PASS" : "FAIL",
                       d["t_checked"].get<u64>(), d["t_failures"].get<u64>(), d["t_max_rel_error"].get<double>());
  return o;
}

Output do_correlation(const RunConfig& c) {
  if (get_u(c, "lo") >= get_u(c, "hi")) throw RangeError("--lo must be below --hi");
  return criterion_output(check_correlation(get_u(c, "lo"), get_u(c, "hi"), get_u(c, "tuples"), c.seed, c.workers));
}

Output do_exponent_pair(const RunConfig& c) {
  const std::string name = get_s(c, "pair");
  ExponentPair pair;
  if (name == "trivial") pair = ExponentPair::trivial();
  else if (name == "polya-vinogradov") pair = ExponentPair::polya_vinogradov();
  else if (name == "weyl") pair = ExponentPair::weyl_type();
  else if (name == "third") pair = ExponentPair::third();
  else throw UsageError("unknown exponent pair: " + name);
  CounterRng rng(c.seed, 5);
  const std::vector<cplx> w{1.0};
  const auto rep = exponent_pair_measurement(KloostermanTrace{get_u(c, "q")}, pair, w, get_u(c, "intervals"), rng);
  Output o;
  o.rows.push_back(rep.to_json());
  o.pass = rep.pass;
  return o;
}

Output do_ft(const RunConfig& c) {
  return criterion_output(check_fourier(get_u(c, "p-max"), get_u(c, "functions"), c.seed));
}

ModuliMode mode_param(const RunConfig& c) {
  try {
    return moduli_mode_from_string(get_s(c, "mode"));
  } catch (const std::invalid_argument&) {
    throw UsageError("unknown moduli mode: " + get_s(c, "mode"));
  }
}

Output do_jutila(const RunConfig& c) {
  const double delta = get_d(c, "delta");
  const auto ms = build_moduli_set(get_d(c, "Q"), get_d(c, "eta"), mode_param(c),
                                   delta > 0 ? std::optional<double>(delta) : std::nullopt);
  const auto rep = variance(ms);
  json row = rep.to_json();
  row["mass_error"] = ms.empty() ? 1.0 : std::abs(eval_I(ms).integral() - 1.0);
  Output o;
  o.rows.push_back(row);
  return o;
}

Output do_dstar(const RunConfig& c) {
  const double x = get_d(c, "X");
  const double q = get_d(c, "Q") > 0 ? get_d(c, "Q") : std::pow(x, 6.0 / 11.0);
  const double delta = get_d(c, "delta") > 0 ? get_d(c, "delta") : 1.0 / x;
  const auto ms = build_moduli_set(q, get_d(c, "eta"), mode_param(c), delta);
  if (ms.empty()) throw RangeError("moduli set is empty for these parameters");
  const auto streams = convolution_streams(x, c);
  const ConvolutionInputs in{streams.gl3, streams.gl2};
  const auto rep = dstar_gap(get_i(c, "h"), x, ms, in, c.workers);
  Output o;
  o.rows.push_back(rep.to_json());
  return o;
}

Output do_coeffs(const RunConfig& c) {
  StreamKind kind;
  try {
    kind = stream_kind_from_string(get_s(c, "kind"));
  } catch (const std::invalid_argument&) {
    throw UsageError("unknown stream kind: " + get_s(c, "kind"));
  }
  const auto stream = load_stream(kind, get_u(c, "n"), c);
  Output o;
  const u64 shown = std::min(get_u(c, "print"), stream.size());
  for (u64 n = 1; n <= shown; ++n) o.rows.push_back({{"n", n}, {"value", stream(n)}});
  if (stream.size() >= 64) {
    const auto check = second_moment_check(stream, stream.size());
    o.rows.push_back(check.to_json());
    o.pass = check.pass;
  }
  return o;
}

Output do_shifted_conv(const RunConfig& c) {
  const double x = get_d(c, "X");
  const auto streams = convolution_streams(x, c);
  const ConvolutionInputs in{streams.gl3, streams.gl2};
  Output o;
  if (!c.params.at("h").is_null()) {
    const i64 h = get_i(c, "h");
    o.rows.push_back(merge({{"h", h}}, cplx_json(shifted_conv_direct(h, x, in))));
    return o;
  }
  const auto spectrum = shifted_conv_all(x, in);
  for (i64 h = spectrum.h_min(); h <= spectrum.h_max(); ++h) o.rows.push_back(merge({{"h", h}}, cplx_json(spectrum.at(h))));
  return o;
}

Output do_parseval(const RunConfig& c) {
  const double x = get_d(c, "X");
  const auto streams = convolution_streams(x, c);
  const ConvolutionInputs in{streams.gl3, streams.gl2};
  const auto spectrum = shifted_conv_all(x, in);
  const auto pc = parseval_check(spectrum, in);
  const auto agree = fft_vs_direct(spectrum, in, get_u(c, "samples"), c.seed);
  Output o;
  o.rows.push_back(merge(pc.to_json(), {{"fft_checked", agree.checked},
                                        {"fft_max_rel_error", agree.max_rel_error},
                                        {"fft_worst_h", agree.worst_h}}));
  o.pass = pc.ratio <= 1e-6 && agree.max_rel_error <= 1e-9;
  return o;
}

json sup_json(const char* name, const ResonanceSup& s) {
  return {{"sum", name},           {"X", s.x_scale},         {"exponent", s.exponent},
          {"sup", s.sup},          {"argmax_alpha", s.argmax_alpha}, {"grid_points", s.grid_points},
          {"farey_points", s.farey_points}};
}

Output do_wilton(const RunConfig& c) {
  const double x = get_d(c, "X");
  const std::string which = get_s(c, "stream");
  if (which != "gl2" && which != "sym2" && which != "both") throw UsageError("--stream must be gl2, sym2 or both");
  Output o;
  if (which != "sym2") {
    const auto s = load_stream(StreamKind::Gl2HolomorphicDelta, static_cast<u64>(std::ceil(3 * x)) + 2, c);
    o.rows.push_back(sup_json("S2", resonance_sup_gl2(x, s, c.workers)));
  }
  if (which != "gl2") {
    const auto s = load_stream(StreamKind::Gl3Sym2Lift, static_cast<u64>(std::ceil(2 * x)) + 2, c);
    o.rows.push_back(sup_json("S1", resonance_sup_gl3(x, s, c.workers)));
  }
  return o;
}

std::vector<double> parse_list(const std::string& s, const char* flag) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (trim(item.substr(used)).size()) throw std::invalid_argument(item);
    } catch (const std::invalid_argument&) {
      throw UsageError(fmt::format("--{}: not a number list: {}", flag, s));
    }
  }
  if (out.empty()) throw UsageError(fmt::format("--{}: empty list", flag));
  return out;
}

Output do_voronoi(const RunConfig& c) {
  const auto ys = parse_list(get_s(c, "Y"), "Y");
  for (double y : ys) {
    if (!(y >= 10 && y <= 1e5)) throw RangeError(fmt::format("--Y {} outside [10, 1e5]", y));
  }
  const u64 q_max = get_u(c, "q") ? get_u(c, "q") : get_u(c, "q-max");
  const auto stream = load_stream(StreamKind::Gl2HolomorphicDelta, voronoi_stream_length(q_max, ys), c);
  Output o;
  std::vector<VoronoiResult> rows;
  if (get_u(c, "q")) {
    for (double y : ys) {
      VoronoiTestCase tc;
      tc.q = get_u(c, "q");
      tc.a = get_i(c, "a");
      tc.y_scale = y;
      rows.push_back(voronoi_check(tc, stream, c.workers));
    }
  } else {
    rows = voronoi_sweep(q_max, ys, stream, c.workers);
  }
  bool pass = true;
  for (const auto& r : rows) {
    o.rows.push_back(r.to_json());
    pass = pass && r.rel_err <= 1e-4 && !r.warn;
  }
  if (get_b(c, "decay")) {
    for (double y : ys) {
      const auto rep = transform_decay_check(y, decay_grid(y));
      json row = {{"decay_Y", y}, {"A", rep.value.real()}, {"last_abs_h_over_y", rep.params["last_abs_h_over_y"]}};
      o.rows.push_back(row);
      pass = pass && rep.pass.value_or(false);
    }
  }
  o.pass = pass;
  return o;
}

// "Q^{5/6} X^{1/2} + Q^{5/3}" or with plain exponents "Q^5/6 X^1/2".
MonomialBound parse_terms(const std::string& text) {
  std::vector<Monomial> terms;
  std::stringstream in(text);
  std::string term;
  while (std::getline(in, term, '+')) {
    Monomial m;
    m.label = trim(term);
    std::stringstream factors(term);
    std::string f;
    while (factors >> f) {
      std::erase_if(f, [](char ch) { return ch == '{' || ch == '}'; });
      const auto caret = f.find('^');
      const std::string var = f.substr(0, caret);
      Rational e = 1;
      if (caret != std::string::npos) {
        try {
          e = Rational(f.substr(caret + 1));
        } catch (const std::exception&) {
          throw UsageError("bad exponent in term: " + f);
        }
      }
      if (var.empty()) throw UsageError("bad factor in term: " + f);
      m.exponents[var] += e;
    }
    if (m.label.empty()) throw UsageError("empty term in --terms");
    terms.push_back(std::move(m));
  }
  if (terms.empty()) throw UsageError("--terms is empty");
  return MonomialBound(std::move(terms));
}

Output do_optimize(const RunConfig& c) {
  Output o;
  const std::string terms = get_s(c, "terms");
  if (terms.empty() || get_b(c, "pipeline") || get_b(c, "paper-pipeline")) {
    const auto p = exponent_pipeline();
    o.rows.push_back(p.to_json());
    std::ostringstream text;
    write_trace_text(text, p);
    o.text = text.str();
    o.pass = p.d_exponent == Rational(2, 3) && p.q_exponent == Rational(6, 11) &&
             p.final_exponent == Rational(21, 22) && p.q_above_half && p.delta_in_range;
    return o;
  }
  const auto bound = parse_terms(terms);
  const auto r = optimize_single(bound, get_s(c, "var"), get_s(c, "objective"));
  o.rows.push_back(merge(r.to_json(), {{"terms", bound.to_string()}}));
  std::string text = fmt::format("terms: {}\n", bound.to_string());
  for (const auto& x : r.crossings) {
    text += fmt::format("crossing {} {} at {} value {}\n", x.i, x.j, to_string(x.at), to_string(x.value));
  }
  text += r.bounded ? fmt::format("optimum {} = {}^{{{}}}, exponent {}\n", r.var, r.objective_var, to_string(r.optimum),
                                  to_string(r.value))
                    : std::string("unbounded\n");
  o.text = text;
  return o;
}

std::set<int> parse_only(const std::string& s) {
  std::set<int> out;
  if (s.empty()) return out;
  for (double v : parse_list(s, "only")) {
    if (v < 1 || v > kCriterionCount || v != std::floor(v)) throw RangeError(fmt::format("--only {}: no such criterion", v));
    out.insert(static_cast<int>(v));
  }
  return out;
}

Output do_suite(const RunConfig& c) {
  AcceptanceContext ctx(AcceptanceOptions{get_b(c, "quick"), c.workers, c.seed, c.cache_dir});
  const auto results = run_acceptance(ctx, parse_only(get_s(c, "only")));
  Output o;
  bool pass = true;
  for (const auto& r : results) {
    o.rows.push_back(r.to_json());
    o.text += format_line(r) + '\n';
    pass = pass && r.pass;
  }
  o.pass = pass;
  return o;
}

const std::vector<Command>& commands() {
  static const std::vector<Command> table = {
      {"kloosterman", "complete Kloosterman sum S(m, n; c)",
       {{"m", 1, Type::Int, -1e15, 1e15, "first argument"},
        {"n", 1, Type::Int, -1e15, 1e15, "second argument"},
        {"c", 7, Type::UInt, 1, 1e7, "modulus"}},
       do_kloosterman},
      {"baby-sums", "baby sums S(h,n,m;c,d) and T(a,b,m;c)",
       {{"h", 1, Type::Int, -1e15, 1e15, ""}, {"n", 1, Type::Int, -1e15, 1e15, ""},
        {"m", 1, Type::Int, -1e15, 1e15, ""}, {"a", 1, Type::Int, -1e15, 1e15, ""},
        {"b", 1, Type::Int, -1e15, 1e15, ""}, {"c", 15, Type::UInt, 1, 1e5, "modulus"},
        {"d", 3, Type::UInt, 1, 1e5, "divisor of c"}},
       do_baby_sums},
      {"verify-identities", "S-factorization and T multiplicativity sweep",
       {{"max-modulus", 300, Type::UInt, 1, 2000, "largest d l"},
        {"exhaustive-max", 60, Type::UInt, 1, 100, "exhaustive up to this d l"},
        {"samples", 100, Type::UInt, 1, 1e5, "random triples per pair"}},
       do_verify},
      {"correlation", "T-sum correlation over primes 2 mod 3",
       {{"lo", 50, Type::UInt, 2, 1e4, "primes above"},
        {"hi", 500, Type::UInt, 3, 1e4, "primes below"},
        {"tuples", 20, Type::UInt, 1, 1e4, "off-diagonal tuples per prime"}},
       do_correlation},
      {"exponent-pair", "incomplete Kloosterman sums against an exponent pair",
       {{"q", 1009, Type::UInt, 3, 1e6, "squarefree modulus"},
        {"pair", "polya-vinogradov", Type::Str, 0, 0, "trivial|polya-vinogradov|weyl|third"},
        {"intervals", 50, Type::UInt, 1, 1e5, "random intervals"}},
       do_exponent_pair},
      {"ft-modp", "Fourier transform mod p: involution and Plancherel",
       {{"p-max", 97, Type::UInt, 2, 1e4, "largest prime"},
        {"functions", 10, Type::UInt, 1, 1e4, "random functions per prime"}},
       do_ft},
      {"jutila", "kernel I and its variance",
       {{"Q", 200, Type::Real, 4, 1e5, "moduli scale"},
        {"eta", 1.0, Type::Real, 1e-9, 1, "prime size exponent"},
        {"mode", "all-squarefree", Type::Str, 0, 0, "two-mod-three|all-squarefree"},
        {"delta", 0.0, Type::Real, 0, 1, "arc half-width, 0 = Q^-3/2"}},
       do_jutila},
      {"dstar", "D_h against its circle-method approximation",
       {{"h", 1, Type::Int, -1e9, 1e9, "shift"},
        {"X", 2000, Type::Real, 16, 1e6, "size"},
        {"Q", 0.0, Type::Real, 0, 1e5, "moduli scale, 0 = X^6/11"},
        {"eta", 1.0, Type::Real, 1e-9, 1, ""},
        {"mode", "all-squarefree", Type::Str, 0, 0, "two-mod-three|all-squarefree"},
        {"delta", 0.0, Type::Real, 0, 1, "0 = 1/X"}},
       do_dstar},
      {"coeffs", "coefficient streams",
       {{"kind", "gl2", Type::Str, 0, 0, "gl2|sym2|tau3"},
        {"n", 1000, Type::UInt, 1, 1e6, "length"},
        {"print", 20, Type::UInt, 0, 1e6, "values to list"}},
       do_coeffs},
      {"shifted-conv", "shifted convolution sums D_h(X)",
       {{"X", 1024, Type::Real, 16, 1e6, "size"}, {"h", nullptr, Type::Int, -3e6, 3e6, "single shift (default: all)"}},
       do_shifted_conv},
      {"parseval", "Parseval identity and FFT agreement",
       {{"X", 4096, Type::Real, 16, 1e6, "size"}, {"samples", 50, Type::UInt, 0, 1e4, "direct shifts"}},
       do_parseval},
      {"wilton", "resonance sups of the GL(2) and GL(3) sums",
       {{"X", 1e4, Type::Real, 16, 3e5, "size"}, {"stream", "both", Type::Str, 0, 0, "gl2|sym2|both"}},
       do_wilton},
      {"voronoi", "GL(2) Voronoi identity",
       {{"q-max", 10, Type::UInt, 1, 30, "sweep moduli up to"},
        {"q", 0, Type::UInt, 0, 30, "single modulus (0 = sweep)"},
        {"a", 1, Type::Int, -1e6, 1e6, "numerator for --q"},
        {"Y", "500,1000", Type::Str, 0, 0, "comma separated window scales"},
        {"decay", false, Type::Flag, 0, 0, "also fit the transform decay"}},
       do_voronoi},
      {"optimize", "exponent optimisation",
       {{"pipeline", false, Type::Flag, 0, 0, "run the closing optimisation"},
        {"paper-pipeline", false, Type::Flag, 0, 0, "alias of --pipeline"},
        {"terms", "", Type::Str, 0, 0, "custom terms, e.g. 'E + X E^-1'"},
        {"var", "Q", Type::Str, 0, 0, "variable to optimise"},
        {"objective", "X", Type::Str, 0, 0, "base of the objective"}},
       do_optimize},
      {"suite", "acceptance battery",
       {{"quick", false, Type::Flag, 0, 0, "reduced sizes"}, {"only", "", Type::Str, 0, 0, "criteria ids, e.g. 1,9"}},
       do_suite},
  };
  return table;
}

}  // namespace

std::string_view to_string(Format f) {
  switch (f) {
    case Format::Csv: return "csv";
    case Format::Json: return "json";
    case Format::Text: return "text";
  }
  return "text";
}

Format format_from_string(std::string_view name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  if (name == "text") return Format::Text;
  throw UsageError("unknown format: " + std::string(name));
}

json RunConfig::to_json() const {
  return {{"subcommand", subcommand}, {"params", params}, {"format", cli::to_string(format)},
          {"workers", workers},       {"cache_dir", cache_dir}, {"seed", seed}};
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  c.subcommand = j.at("subcommand").get<std::string>();
  c.params = j.at("params");
  c.format = format_from_string(j.at("format").get<std::string>());
  c.workers = j.at("workers").get<unsigned>();
  c.cache_dir = j.at("cache_dir").get<std::string>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

std::vector<std::string> subcommands() {
  std::vector<std::string> out;
  for (const auto& c : commands()) out.push_back(c.name);
  return out;
}

json default_params(const std::string& subcommand) {
  json out = json::object();
  for (const auto& p : find_command(subcommand).params) out[p.name] = p.def;
  return out;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const auto& cmd = find_command(config.subcommand);
    for (const auto& p : cmd.params) {
      if (!config.params.contains(p.name)) throw UsageError("missing parameter " + p.name);
      if (!config.params[p.name].is_null()) check_range(p, config.params[p.name]);
    }
    const Output o = cmd.handler(config);
    emit(config, o, out);
    return o.pass.value_or(true) ? kPass : kFail;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const RangeError& e) {
    err << "range error: " << e.what() << '\n';
    return kRange;
  } catch (const std::invalid_argument& e) {
    err << "range error: " << e.what() << '\n';
    return kRange;
  } catch (const std::out_of_range& e) {
    err << "range error: " << e.what() << '\n';
    return kRange;
  } catch (const std::domain_error& e) {
    err << "range error: " << e.what() << '\n';
    return kRange;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical experiments on shifted convolution sums"};
  app.fallthrough();
  app.require_subcommand(0, 1);

  std::map<std::string, std::string> globals;
  std::string config_file, replay_file;
  for (const char* name : {"format", "workers", "cache-dir", "seed"}) {
    app.add_option(std::string("--") + name, globals[name], name);
  }
  app.add_option("--config", config_file, "key=value file");
  app.add_option("--replay", replay_file, "re-run the config embedded in an earlier output");

  struct Flags {
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
  };
  std::map<std::string, Flags> flags;
  std::map<std::string, CLI::App*> subs;
  for (const auto& cmd : commands()) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->set_help_flag("--help", "Print this help message and exit");
    subs[cmd.name] = sub;
    auto& f = flags[cmd.name];
    for (const auto& p : cmd.params) {
      const std::string flag = "--" + p.name;
      const std::string help = p.type == Type::Flag || p.def.is_null()
                                   ? p.help
                                   : fmt::format("{} [default: {}]", p.help, p.def.is_string() ? p.def.get<std::string>() : p.def.dump());
      f.options[p.name] = p.type == Type::Flag ? sub->add_flag(flag, help) : sub->add_option(flag, f.values[p.name], help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kUsage;
  }

  try {
    std::string name;
    for (const auto& [n, sub] : subs) {
      if (sub->parsed()) name = n;
    }
    RunConfig config;
    if (!replay_file.empty()) {
      config = read_replay(replay_file);
      if (!name.empty() && name != config.subcommand) throw UsageError("subcommand differs from the replayed one");
    } else {
      if (name.empty()) throw UsageError("no subcommand given");
      config.subcommand = name;
      config.params = default_params(name);
      if (const char* w = std::getenv("SHIFTCONV_WORKERS"); w && *w) set_global(config, "workers", w);
      if (const char* d = std::getenv("SHIFTCONV_CACHE_DIR"); d && *d) set_global(config, "cache-dir", d);
    }
    const auto& cmd = find_command(config.subcommand);

    if (!config_file.empty()) {
      for (const auto& [k, v] : read_config_file(config_file)) {
        if (is_global(k)) set_global(config, k, v);
        else set_param(config, cmd, k, v);
      }
    }
    for (const auto& [k, v] : globals) {
      if (app.get_option("--" + k)->count()) set_global(config, k, v);
    }
    if (!name.empty()) {
      const auto& f = flags[name];
      for (const auto& p : cmd.params) {
        const auto* opt = f.options.at(p.name);
        if (!opt->count()) continue;
        config.params[p.name] = p.type == Type::Flag ? json(true) : parse_value(p, f.values.at(p.name));
      }
    }
    return run(config, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kUsage;
  } catch (const RangeError& e) {
    err << "range error: " << e.what() << '\n';
    return kRange;
  }
}

}  // namespace shiftconv::cli
