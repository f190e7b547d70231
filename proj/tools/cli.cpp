#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "plot.hpp"
#include "symentropy/symentropy.hpp"

namespace symentropy::cli {
namespace {

using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DiagnosticExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string dump(const json& j) { return j.dump(2, ' ', false, json::error_handler_t::replace) + "\n"; }

std::string read_file(const std::string& path) {
  if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !out.write(content.data(), static_cast<std::streamsize>(content.size())))
    throw std::runtime_error("cannot write '" + path + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

unsigned resolve_threads(std::optional<unsigned> flag) {
  if (flag) return std::max(1u, *flag);
  if (const char* env = std::getenv("THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct InputOptions {
  std::string path;
  std::string format = "bytes";
  bool keep_blank_runs = false;
  std::string binary_map;
};

void add_input_options(CLI::App& cmd, InputOptions& in) {
  cmd.add_option("input", in.path, "Input file ('-' for stdin)")->required();
  cmd.add_option("--format", in.format, "Input format")
      ->check(CLI::IsMember({"text", "fasta", "bytes", "tokens"}))
      ->capture_default_str();
  cmd.add_flag("--keep-blank-runs", in.keep_blank_runs, "Text: one blank per non-letter character");
  cmd.add_option("--binary-map", in.binary_map, "Comma-separated symbols mapped to 1, the rest to 0");
}

IngestResult load_input(const InputOptions& options) {
  const std::string bytes = read_file(options.path);
  IngestResult result = [&] {
    if (options.format == "text") return coarse_grain_text(bytes, {options.keep_blank_runs});
    if (options.format == "fasta") return parse_fasta(bytes);
    return read_raw_symbols(bytes, options.format == "tokens" ? RawMode::tokens : RawMode::bytes);
  }();
  if (!options.binary_map.empty()) {
    const auto one_set = split_list(options.binary_map);
    result.sequence = symentropy::binary_map(result.sequence, one_set);
    result.stats.alphabet = result.sequence.alphabet().symbols();
  }
  return result;
}

json input_json(const InputOptions& options, const CorpusStats& stats) {
  json j;
  j["path"] = options.path;
  j["format"] = options.format;
  j["keep_blank_runs"] = options.keep_blank_runs;
  j["binary_map"] = options.binary_map.empty() ? json(nullptr) : json(split_list(options.binary_map));
  j["bytes"] = stats.input_bytes;
  j["tokens"] = stats.input_tokens;
  j["emitted"] = stats.emitted;
  j["dropped"] = stats.dropped;
  return j;
}

json optional_json(const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); }

CorrelationSeries estimate(const SymbolSequence& seq, std::size_t r_max, const std::string& estimator,
                           unsigned threads) {
  const CorrelationOptions options{threads};
  if (estimator == "direct") return correlation_series(seq, r_max, options);
  if (estimator == "fft") return correlation_series_fast(seq, r_max, options);
  return correlation_series_auto(seq, r_max, options);
}

struct AnalysisOptions {
  InputOptions input;
  std::optional<std::size_t> r_max;
  std::optional<std::size_t> l_max;
  std::optional<std::size_t> block_l_max;
  std::optional<std::size_t> diag_lags;
  std::string correction = "on";
  std::string method = "both";
  std::string estimator = "auto";
  double tol = 1e-4;
  std::size_t window = 10;
  double diag_threshold = 0.3;
  std::optional<unsigned> threads;
  std::string out;
  std::string csv;
  std::string plot;
};

void add_analysis_options(CLI::App& cmd, AnalysisOptions& o, bool with_method) {
  add_input_options(cmd, o.input);
  cmd.add_option("--r-max", o.r_max, "Largest correlation lag (default min(M/10, 1e5))");
  cmd.add_option("--l-max", o.l_max, "Largest word length of the correlation curve (default r_max)");
  cmd.add_option("--block-l-max", o.block_l_max, "Largest block length (default min(L_max, 32, M-1))");
  cmd.add_option("--correction", o.correction, "Fluctuation correction")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  if (with_method)
    cmd.add_option("--method", o.method, "Estimators to run")
        ->check(CLI::IsMember({"corr", "block", "both"}))
        ->capture_default_str();
  cmd.add_option("--estimator", o.estimator, "Correlation route")
      ->check(CLI::IsMember({"auto", "direct", "fft"}))
      ->capture_default_str();
  cmd.add_option("--tol", o.tol, "Plateau tolerance in bits for R_c")->check(CLI::PositiveNumber)->capture_default_str();
  cmd.add_option("--window", o.window, "Plateau window for R_c")->check(CLI::PositiveNumber)->capture_default_str();
  cmd.add_option("--diag-lags", o.diag_lags, "Lags entering the diagnostic D (default R_s, else L_max)");
  cmd.add_option("--diag-threshold", o.diag_threshold, "Warn when D exceeds this")->capture_default_str();
  cmd.add_option("--threads", o.threads, "Worker threads (default $THREADS, else all cores)");
  cmd.add_option("--out", o.out, "JSON report path");
  cmd.add_option("--csv", o.csv, "Curve CSV path");
  cmd.add_option("--plot", o.plot, "SVG plot path");
}

struct Analysis {
  explicit Analysis(IngestResult in) : input(std::move(in)) {}

  IngestResult input;
  std::size_t r_max = 0;
  std::size_t l_max = 0;
  std::size_t block_l_max = 0;
  std::optional<CorrelationSeries> corr;
  std::optional<EntropyCurve> curve;
  std::optional<BlockEntropyCurve> block;
  LengthReport lengths;
  std::optional<double> diagnostic;
  std::size_t diag_lags = 0;
  std::optional<std::size_t> validity;
  std::vector<std::string> warnings;
};

Analysis analyze(const AnalysisOptions& o, unsigned threads) {
  Analysis a(load_input(o.input));
  const auto& seq = a.input.sequence;
  const std::size_t M = seq.size();
  const bool run_corr = o.method != "block";
  const bool run_block = o.method != "corr";

  std::size_t default_lag = default_max_lag(M);
  if (o.l_max && !o.r_max) default_lag = std::max(default_lag, *o.l_max);
  a.r_max = o.r_max.value_or(default_lag);
  a.l_max = o.l_max.value_or(a.r_max);
  if (run_corr && a.l_max > a.r_max)
    throw UsageError("--l-max " + std::to_string(a.l_max) + " exceeds --r-max " + std::to_string(a.r_max));
  a.block_l_max = o.block_l_max.value_or(std::min<std::size_t>({a.l_max, 32, M > 1 ? M - 1 : 1}));

  const std::size_t m = seq.alphabet_size();
  if (m >= 2 && M >= m) a.validity = validity_limit(m, M);

  if (run_corr) {
    a.corr = estimate(seq, a.r_max, o.estimator, threads);
    a.curve = correlation_entropy_curve(*a.corr, a.l_max,
                                        o.correction == "on" ? FluctuationCorrection::on : FluctuationCorrection::off);
    a.lengths.stationarity_length = stationarity_length(*a.corr);
    a.lengths.correlation_length = correlation_length(a.curve->values(true), o.tol, o.window);
    a.diag_lags = std::min(a.l_max, o.diag_lags.value_or(a.lengths.stationarity_length.value_or(a.l_max)));
    a.diagnostic = weak_correlation_diagnostic(normalize(*a.corr), a.diag_lags);
    if (*a.diagnostic > o.diag_threshold)
      a.warnings.push_back("weak-correlation diagnostic D = " + format_number(*a.diagnostic) +
                           " exceeds threshold " + format_number(o.diag_threshold));
    if (a.curve->corrected_exceeds_h0())
      a.warnings.push_back("corrected entropy exceeds h0 beyond the stationarity length");
    for (std::size_t i = 1; i < a.curve->points.size(); ++i)
      if (a.curve->points[i].h > a.curve->points[i - 1].h) {
        a.warnings.push_back("h_corr increases at L = " + std::to_string(i + 1));
        break;
      }
  }
  if (run_block) {
    a.block = block_entropy_curve(seq, a.block_l_max);
    for (std::size_t i = 1; i < a.block->points.size(); ++i)
      if (a.block->points[i].block_entropy < a.block->points[i - 1].block_entropy) {
        a.warnings.push_back("block entropy decreases at L = " + std::to_string(i + 1));
        break;
      }
  }
  return a;
}

json report_json(const std::string& command, const AnalysisOptions& o, const Analysis& a, unsigned threads) {
  const auto& seq = a.input.sequence;
  const auto p = symbol_probabilities(seq);
  json j;
  j["schema_version"] = kSchemaVersion;
  j["tool"] = {{"name", "symentropy"}, {"version", std::string(kVersion)}};
  j["command"] = command;
  j["input"] = input_json(o.input, a.input.stats);
  j["alphabet"] = seq.alphabet().symbols();
  j["M"] = seq.size();
  j["p"] = p.values();
  j["h0"] = uncorrelated_entropy(p);
  j["parameters"] = {{"method", o.method},
                     {"r_max", a.corr ? json(a.r_max) : json(nullptr)},
                     {"l_max", a.corr ? json(a.l_max) : json(nullptr)},
                     {"block_l_max", a.block ? json(a.block_l_max) : json(nullptr)},
                     {"correction", o.correction},
                     {"estimator", o.estimator},
                     {"tol", o.tol},
                     {"window", o.window},
                     {"diag_lags", a.corr ? json(a.diag_lags) : json(nullptr)},
                     {"diag_threshold", o.diag_threshold},
                     {"threads", threads}};
  j["validity_limit"] = optional_json(a.validity);

  json curve = nullptr;
  if (a.curve) {
    curve = json::array();
    for (const auto& pt : a.curve->points)
      curve.push_back({{"L", pt.length},
                       {"S", pt.correlation_sum},
                       {"fluct_term", pt.fluctuation_term},
                       {"h_corr", pt.h},
                       {"h_corr_corrected", pt.h_corrected ? json(*pt.h_corrected) : json(nullptr)}});
  }
  j["correlation_curve"] = curve;

  json block = nullptr;
  if (a.block) {
    block = json::array();
    for (const auto& pt : a.block->points)
      block.push_back({{"L", pt.length},
                       {"H_block", pt.block_entropy},
                       {"h_block", pt.differential},
                       {"words", pt.word_count},
                       {"valid_block", pt.valid}});
  }
  j["block_curve"] = block;
  j["lengths"] = {{"R_c", optional_json(a.lengths.correlation_length)},
                  {"R_s", optional_json(a.lengths.stationarity_length)}};
  j["diagnostic"] = a.diagnostic ? json{{"D", *a.diagnostic},
                                        {"lags", a.diag_lags},
                                        {"threshold", o.diag_threshold},
                                        {"exceeded", *a.diagnostic > o.diag_threshold}}
                                 : json(nullptr);
  j["warnings"] = a.warnings;
  return j;
}

std::string curve_csv(const Analysis& a) {
  std::ostringstream csv;
  write_entropy_csv(csv, a.curve ? &*a.curve : nullptr, a.block ? &*a.block : nullptr);
  return csv.str();
}

void write_plot(const std::string& path, const std::string& title, const Analysis& a) {
  std::vector<PlotSeries> series;
  if (a.curve) {
    PlotSeries h{"h_corr", "#1f77b4", {}, {}};
    PlotSeries hc{"h_corr_corrected", "#d62728", {}, {}};
    for (const auto& pt : a.curve->points) {
      h.x.push_back(static_cast<double>(pt.length));
      h.y.push_back(pt.h);
      if (pt.h_corrected) {
        hc.x.push_back(static_cast<double>(pt.length));
        hc.y.push_back(*pt.h_corrected);
      }
    }
    series.push_back(std::move(h));
    series.push_back(std::move(hc));
  }
  if (a.block) {
    PlotSeries hb{"h_block", "#2ca02c", {}, {}};
    for (const auto& pt : a.block->points) {
      hb.x.push_back(static_cast<double>(pt.length));
      hb.y.push_back(pt.differential);
    }
    series.push_back(std::move(hb));
  }
  std::ostringstream svg;
  write_svg_plot(svg, title, series);
  write_file(path, svg.str());
}

int cmd_analyze(const AnalysisOptions& o, std::ostream& out) {
  const unsigned threads = resolve_threads(o.threads);
  const Analysis a = analyze(o, threads);
  const std::string report = dump(report_json("analyze", o, a, threads));
  if (!o.csv.empty()) write_file(o.csv, curve_csv(a));
  if (!o.plot.empty()) write_plot(o.plot, "Differential entropy", a);
  if (o.out.empty())
    out << report;
  else
    write_file(o.out, report);
  return kOk;
}

int cmd_compare(AnalysisOptions o, std::ostream& out) {
  o.method = "both";
  const unsigned threads = resolve_threads(o.threads);
  const Analysis a = analyze(o, threads);
  const std::string csv = curve_csv(a);
  if (!o.out.empty()) write_file(o.out, dump(report_json("compare", o, a, threads)));
  if (!o.plot.empty()) write_plot(o.plot, "Correlation vs block entropy", a);
  if (o.csv.empty())
    out << csv;
  else
    write_file(o.csv, csv);
  return kOk;
}

struct CorrOptions {
  InputOptions input;
  std::optional<std::size_t> r_max;
  std::string estimator = "auto";
  std::optional<unsigned> threads;
  std::string csv;
};

int cmd_corr(const CorrOptions& o, std::ostream& out) {
  const auto input = load_input(o.input);
  const auto& seq = input.sequence;
  const auto corr = estimate(seq, o.r_max.value_or(default_max_lag(seq.size())), o.estimator,
                             resolve_threads(o.threads));
  std::ostringstream csv;
  write_correlation_csv(csv, corr, seq.alphabet());
  if (o.csv.empty())
    out << csv.str();
  else
    write_file(o.csv, csv.str());
  return kOk;
}

struct MemfnOptions {
  InputOptions input;
  std::size_t order = 1;
  std::string solver = "exact";
  std::string estimator = "auto";
  std::optional<unsigned> threads;
  std::string csv;
  std::string out;
};

int cmd_memfn(const MemfnOptions& o, std::ostream& out) {
  const auto input = load_input(o.input);
  const auto& seq = input.sequence;
  const unsigned threads = resolve_threads(o.threads);
  const auto corr = estimate(seq, o.order, o.estimator, threads);
  const MemoryFunction F = o.solver == "exact"
                               ? memory_function_exact(corr, o.order)
                               : memory_function_series(normalize(corr), o.order, o.solver == "series2" ? 2 : 1);
  std::ostringstream csv;
  write_memory_csv(csv, F, seq.alphabet());
  if (!o.out.empty()) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["tool"] = {{"name", "symentropy"}, {"version", std::string(kVersion)}};
    j["command"] = "memfn";
    j["input"] = input_json(o.input, input.stats);
    j["alphabet"] = seq.alphabet().symbols();
    j["M"] = seq.size();
    j["p"] = corr.probabilities().values();
    j["parameters"] = {{"N", o.order}, {"solver", o.solver}, {"estimator", o.estimator}, {"threads", threads}};
    j["residual"] = memory_function_residual(corr, F);
    write_file(o.out, dump(j));
  }
  if (o.csv.empty())
    out << csv.str();
  else
    write_file(o.csv, csv.str());
  return kOk;
}

struct GenerateOptions {
  std::string spec;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> length;
  std::optional<std::size_t> burn_in;
};

/// Reads per-lag values: scalars (binary shorthand) or m x m matrices.
struct LagTable {
  bool scalar = true;
  std::vector<double> scalars;
  std::vector<std::vector<std::vector<double>>> matrices;
  std::size_t size() const { return scalar ? scalars.size() : matrices.size(); }
};

LagTable read_lag_table(const json& node, const char* name, std::size_t m) {
  if (!node.is_array() || node.empty()) throw UsageError(std::string("'") + name + "' must be a non-empty array");
  LagTable t;
  t.scalar = node.front().is_number();
  for (const auto& v : node) {
    if (t.scalar) {
      if (!v.is_number()) throw UsageError(std::string("'") + name + "' mixes scalars and matrices");
      t.scalars.push_back(v.get<double>());
      continue;
    }
    auto mat = v.get<std::vector<std::vector<double>>>();
    if (mat.size() != m || std::any_of(mat.begin(), mat.end(), [&](const auto& row) { return row.size() != m; }))
      throw UsageError(std::string("'") + name + "' matrices must be m x m");
    t.matrices.push_back(std::move(mat));
  }
  if (t.scalar && m != 2) throw UsageError(std::string("scalar '") + name + "' lists need a binary alphabet");
  return t;
}

struct ChainSpec {
  ChainSpec(AdditiveCpf c, std::shared_ptr<const Alphabet> a) : cpf(std::move(c)), alphabet(std::move(a)) {}

  AdditiveCpf cpf;
  std::shared_ptr<const Alphabet> alphabet;
  std::size_t length = 0;
  std::uint64_t seed = 0;
  std::optional<std::size_t> burn_in;
  std::string source;
  std::string solver;
  std::string diagnostic_name;
  double diagnostic = 0.0;
};

ChainSpec read_chain_spec(const std::string& text) {
  const json spec = json::parse(text);
  if (!spec.is_object()) throw UsageError("spec must be a JSON object");
  const bool has_k = spec.contains("K");
  const bool has_f = spec.contains("F");
  if (has_k == has_f) throw UsageError("spec needs exactly one of 'K' or 'F'");

  std::size_t m = 0;
  if (spec.contains("m")) m = spec["m"].get<std::size_t>();
  if (spec.contains("alphabet")) {
    const auto symbols = spec["alphabet"].get<std::vector<std::string>>();
    if (m && symbols.size() != m) throw UsageError("'alphabet' size does not match 'm'");
    m = symbols.size();
  }
  if (spec.contains("p")) {
    const auto size = spec["p"].size();
    if (m && size != m) throw UsageError("'p' size does not match the alphabet");
    m = size;
  }
  if (m == 0) m = 2;
  if (m < 2 || m > kMaxAlphabetSize) throw UsageError("alphabet size must be in [2, 256]");

  ChainSpec out(AdditiveCpf{ProbabilityVector(std::vector<double>(m, 1.0 / static_cast<double>(m))), MemoryFunction(m, 0)},
                nullptr);
  if (spec.contains("p")) out.cpf.p = ProbabilityVector(spec["p"].get<std::vector<double>>());
  out.alphabet = std::make_shared<const Alphabet>(
      spec.contains("alphabet") ? Alphabet(spec["alphabet"].get<std::vector<std::string>>()) : default_alphabet(m));
  if (!spec.contains("M")) throw UsageError("spec needs the sequence length 'M'");
  out.length = spec["M"].get<std::size_t>();
  if (out.length < 1) throw UsageError("'M' must be positive");
  out.seed = spec.value("seed", std::uint64_t{1});
  if (spec.contains("burn_in")) out.burn_in = spec["burn_in"].get<std::size_t>();

  const auto table = read_lag_table(spec[has_k ? "K" : "F"], has_k ? "K" : "F", m);
  const std::size_t N = spec.value("N", table.size());
  if (N < table.size()) throw UsageError("'N' is shorter than the prescribed lags");
  const auto& p = out.cpf.p;

  if (has_k) {
    out.source = "K";
    out.solver = spec.value("solver", std::string("exact"));
    if (out.solver != "exact" && out.solver != "series1" && out.solver != "series2")
      throw UsageError("'solver' must be exact, series1 or series2");
    std::vector<double> values((N + 1) * m * m, 1.0);
    for (std::size_t r = 1; r <= N; ++r)
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
          double v = 0.0;
          if (r <= table.size()) v = table.scalar ? table.scalars[r - 1] : table.matrices[r - 1][a][b];
          values[(r * m + a) * m + b] = v;
        }
    const NormalizedSeries target(p, N, std::move(values));
    out.diagnostic_name = "D";
    out.diagnostic = weak_correlation_diagnostic(target, N);
    if (out.diagnostic > 1.0 + 1e-9)
      throw DiagnosticExceeded("weak-correlation diagnostic D = " + format_number(out.diagnostic) + " exceeds 1");
    out.cpf.memory = out.solver == "exact" ? memory_function_exact(denormalize(target), N)
                                           : memory_function_series(target, N, out.solver == "series2" ? 2 : 1);
  } else {
    out.source = "F";
    out.solver = "direct";
    if (table.scalar) {
      std::vector<double> f(N, 0.0);
      std::copy(table.scalars.begin(), table.scalars.end(), f.begin());
      out.cpf.memory = binary_memory_function(f, p);
    } else {
      MemoryFunction F(m, N);
      for (std::size_t r = 1; r <= table.size(); ++r)
        for (std::size_t a = 0; a < m; ++a)
          for (std::size_t b = 0; b < m; ++b) F.at(r, a, b) = table.matrices[r - 1][a][b];
      out.cpf.memory = F.gauge_fixed(p);
    }
    out.diagnostic_name = "deviation_bound";
    out.diagnostic = memory_deviation_bound(out.cpf);
    if (out.diagnostic > 1.0 + 1e-9)
      throw DiagnosticExceeded("memory deviation bound " + format_number(out.diagnostic) + " exceeds 1");
  }
  return out;
}

int cmd_generate(const GenerateOptions& o, std::ostream& out) {
  ChainSpec spec = [&] {
    const std::string text = read_file(o.spec);
    try {
      return read_chain_spec(text);
    } catch (const json::exception& e) {
      throw UsageError(std::string("invalid spec: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("invalid spec: ") + e.what());
    } catch (const Error& e) {
      if (dynamic_cast<const DegenerateCorrelations*>(&e)) throw;
      throw UsageError(std::string("invalid spec: ") + e.what());
    }
  }();
  if (o.seed) spec.seed = *o.seed;
  if (o.length) spec.length = *o.length;
  if (o.burn_in) spec.burn_in = *o.burn_in;

  const auto chain = generate(spec.cpf, spec.length, spec.seed, {spec.burn_in, spec.alphabet});
  const auto& symbols = spec.alphabet->symbols();
  const bool bytes = std::all_of(symbols.begin(), symbols.end(), [](const std::string& s) {
    return s.size() == 1 && !std::isspace(static_cast<unsigned char>(s[0]));
  });
  std::string data;
  if (bytes) {
    data.reserve(chain.sequence.size());
    for (auto s : chain.sequence.indices()) data += symbols[s];
  } else {
    for (std::size_t i = 0; i < chain.sequence.size(); ++i) {
      if (i) data += ' ';
      data += symbols[chain.sequence[i]];
    }
    data += '\n';
  }
  write_file(o.out, data);

  const std::string format = bytes ? "bytes" : "tokens";
  std::ostringstream meta;
  meta << "version=" << kVersion << '\n'
       << "rng=" << chain.rng << '\n'
       << "seed=" << chain.seed << '\n'
       << "N=" << spec.cpf.memory.order() << '\n'
       << "M=" << chain.sequence.size() << '\n'
       << "burn_in=" << chain.burn_in << '\n'
       << "clamp_events=" << chain.clamp_events << '\n'
       << "source=" << spec.source << '\n'
       << "solver=" << spec.solver << '\n'
       << spec.diagnostic_name << '=' << format_number(spec.diagnostic) << '\n'
       << "format=" << format << '\n'
       << "alphabet=" << json(symbols).dump(-1, ' ', false, json::error_handler_t::replace) << '\n'
       << "p=" << json(spec.cpf.p.values()).dump() << '\n';
  write_file(o.out + ".meta", meta.str());

  json j;
  j["schema_version"] = kSchemaVersion;
  j["tool"] = {{"name", "symentropy"}, {"version", std::string(kVersion)}};
  j["command"] = "generate";
  j["out"] = o.out;
  j["meta"] = o.out + ".meta";
  j["format"] = format;
  j["alphabet"] = symbols;
  j["p"] = spec.cpf.p.values();
  j["M"] = chain.sequence.size();
  j["N"] = spec.cpf.memory.order();
  j["seed"] = chain.seed;
  j["rng"] = chain.rng;
  j["burn_in"] = chain.burn_in;
  j["clamp_events"] = chain.clamp_events;
  j["source"] = spec.source;
  j["solver"] = spec.solver;
  j["diagnostic"] = {{"name", spec.diagnostic_name}, {"value", spec.diagnostic}, {"limit", 1.0}};
  out << dump(j);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entropy and correlation analysis of symbolic sequences", "symentropy"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  AnalysisOptions analyze_opts;
  auto* analyze_cmd = app.add_subcommand("analyze", "Entropy curves, lengths and diagnostics as a JSON report");
  add_analysis_options(*analyze_cmd, analyze_opts, true);

  AnalysisOptions compare_opts;
  auto* compare_cmd = app.add_subcommand("compare", "CSV of correlation-based and block entropies per L");
  add_analysis_options(*compare_cmd, compare_opts, false);

  GenerateOptions generate_opts;
  auto* generate_cmd = app.add_subcommand("generate", "Sample an additive Markov chain from a JSON spec");
  generate_cmd->add_option("spec", generate_opts.spec, "Chain spec (JSON)")->required();
  generate_cmd->add_option("--out", generate_opts.out, "Output symbol file")->required();
  generate_cmd->add_option("--seed", generate_opts.seed, "Override the spec seed");
  generate_cmd->add_option("--length", generate_opts.length, "Override the spec length M")->check(CLI::PositiveNumber);
  generate_cmd->add_option("--burn-in", generate_opts.burn_in, "Discarded prefix (default 10 N)");

  CorrOptions corr_opts;
  auto* corr_cmd = app.add_subcommand("corr", "Dump the correlation series as CSV");
  add_input_options(*corr_cmd, corr_opts.input);
  corr_cmd->add_option("--r-max", corr_opts.r_max, "Largest lag (default min(M/10, 1e5))");
  corr_cmd->add_option("--estimator", corr_opts.estimator, "Correlation route")
      ->check(CLI::IsMember({"auto", "direct", "fft"}))
      ->capture_default_str();
  corr_cmd->add_option("--threads", corr_opts.threads, "Worker threads");
  corr_cmd->add_option("--csv", corr_opts.csv, "CSV path (default stdout)");

  MemfnOptions memfn_opts;
  auto* memfn_cmd = app.add_subcommand("memfn", "Solve for the memory function of the measured correlations");
  add_input_options(*memfn_cmd, memfn_opts.input);
  memfn_cmd->add_option("--order,-N", memfn_opts.order, "Memory length N")->required()->check(CLI::PositiveNumber);
  memfn_cmd->add_option("--solver", memfn_opts.solver, "Solver")
      ->check(CLI::IsMember({"exact", "series1", "series2"}))
      ->capture_default_str();
  memfn_cmd->add_option("--estimator", memfn_opts.estimator, "Correlation route")
      ->check(CLI::IsMember({"auto", "direct", "fft"}))
      ->capture_default_str();
  memfn_cmd->add_option("--threads", memfn_opts.threads, "Worker threads");
  memfn_cmd->add_option("--csv", memfn_opts.csv, "CSV path (default stdout)");
  memfn_cmd->add_option("--out", memfn_opts.out, "JSON report path");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadFlags;
  }

  try {
    if (*analyze_cmd) return cmd_analyze(analyze_opts, out);
    if (*compare_cmd) return cmd_compare(compare_opts, out);
    if (*generate_cmd) return cmd_generate(generate_opts, out);
    if (*corr_cmd) return cmd_corr(corr_opts, out);
    if (*memfn_cmd) return cmd_memfn(memfn_opts, out);
  } catch (const EmptyInput& e) {
    err << "error: " << e.what() << '\n';
    return kEmptyInput;
  } catch (const DiagnosticExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kDiagnosticExceeded;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kParseError;
  } catch (const MalformedFasta& e) {
    err << "error: " << e.what() << '\n';
    return kParseError;
  } catch (const UnknownSymbol& e) {
    err << "error: " << e.what() << '\n';
    return kParseError;
  } catch (const AlphabetError& e) {
    err << "error: " << e.what() << '\n';
    return kParseError;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kBadFlags;
  } catch (const InvalidLag& e) {
    err << "error: " << e.what() << '\n';
    return kBadFlags;
  } catch (const InvalidLength& e) {
    err << "error: " << e.what() << '\n';
    return kBadFlags;
  } catch (const InvalidPartition& e) {
    err << "error: " << e.what() << '\n';
    return kBadFlags;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kBadFlags;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace symentropy::cli
