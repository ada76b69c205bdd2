#include "spikecls/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "spikecls/csv.hpp"
#include "spikecls/parallel.hpp"
#include "spikecls/quadrature.hpp"
#include "spikecls/rng.hpp"

namespace spikecls {

namespace {

std::string trim(const std::string& s) {
  std::size_t left = s.find_first_not_of(" \t");
  std::size_t right = s.find_last_not_of(" \t");
  if (left == std::string::npos) return "";
  return s.substr(left, right - left + 1);
}

double strict_stod(const std::string& s, const std::string& what) {
  if (s.empty()) throw ConfigError("config field " + what + ": empty number");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("config field " + what + ": not a number: " + s);
  }
  if (used != s.size())
    throw ConfigError("config field " + what + ": trailing junk in: " + s);
  return v;
}

long long strict_stoll(const std::string& s, const std::string& what) {
  if (s.empty()) throw ConfigError("config field " + what + ": empty integer");
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("config field " + what + ": not an integer: " + s);
  }
  if (used != s.size())
    throw ConfigError("config field " + what + ": trailing junk in: " + s);
  return v;
}

double parse_real_named(const std::string& text, const std::string& what) {
  std::string s = trim(text);
  if (s.empty()) throw ConfigError("config field " + what + ": empty value");
  double sign = 1.0;
  if (s[0] == '+' || s[0] == '-') {
    if (s[0] == '-') sign = -1.0;
    s = s.substr(1);
  }
  const std::size_t pos = s.find("pi");
  if (pos == std::string::npos) return sign * strict_stod(s, what);
  double mult = 1.0;
  double div = 1.0;
  const std::string pre = s.substr(0, pos);
  const std::string post = s.substr(pos + 2);
  if (!pre.empty()) {
    if (pre.back() != '*')
      throw ConfigError("config field " + what + ": bad pi expression: " + text);
    mult = strict_stod(pre.substr(0, pre.size() - 1), what);
  }
  if (!post.empty()) {
    if (post.front() != '/')
      throw ConfigError("config field " + what + ": bad pi expression: " + text);
    div = strict_stod(post.substr(1), what);
  }
  return sign * mult * std::numbers::pi / div;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream ss(s);
  while (std::getline(ss, part, sep)) parts.push_back(trim(part));
  return parts;
}

std::vector<double> parse_real_list_named(const std::string& text,
                                          const std::string& what) {
  const std::string s = trim(text);
  if (s.rfind("log:", 0) == 0) {
    const auto parts = split(s.substr(4), ':');
    if (parts.size() != 3)
      throw ConfigError("config field " + what + ": log range needs lo:hi:n");
    const double lo = parse_real_named(parts[0], what);
    const double hi = parse_real_named(parts[1], what);
    const long long n = strict_stoll(parts[2], what);
    if (!(lo > 0.0) || !(hi > lo) || n < 2)
      throw ConfigError("config field " + what + ": bad log range");
    std::vector<double> out(static_cast<std::size_t>(n));
    const double lg_lo = std::log10(lo);
    const double lg_hi = std::log10(hi);
    for (long long k = 0; k < n; ++k)
      out[static_cast<std::size_t>(k)] =
          std::pow(10.0, lg_lo + (lg_hi - lg_lo) * k / (n - 1));
    return out;
  }
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() != 3)
      throw ConfigError("config field " + what + ": range needs a:b:step");
    const double a = parse_real_named(parts[0], what);
    const double b = parse_real_named(parts[1], what);
    const double step = parse_real_named(parts[2], what);
    if (!(step > 0.0) || b < a)
      throw ConfigError("config field " + what + ": bad range");
    std::vector<double> out;
    const long long n = static_cast<long long>(std::floor((b - a) / step + 1e-9));
    for (long long k = 0; k <= n; ++k) out.push_back(a + step * k);
    return out;
  }
  std::vector<double> out;
  for (const auto& token : split(s, ','))
    if (!token.empty()) out.push_back(parse_real_named(token, what));
  return out;
}

class KeyStore {
 public:
  explicit KeyStore(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  std::string take(const std::string& key) {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing config key: " + key);
    std::string v = it->second;
    kv_.erase(it);
    return v;
  }

  std::string take_or(const std::string& key, const std::string& fallback) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::string v = it->second;
    kv_.erase(it);
    return v;
  }

  void reject_leftovers() const {
    if (!kv_.empty())
      throw ConfigError("unknown config key: " + kv_.begin()->first);
  }

 private:
  std::map<std::string, std::string> kv_;
};

IntensityModel parse_intensity(KeyStore& store, const std::string& prefix,
                               int depth) {
  if (depth > 3)
    throw ConfigError("config field " + prefix + ": scaled nesting too deep");
  const std::string kind = store.take(prefix + ".kind");
  if (kind == "homogeneous")
    return IntensityModel::homogeneous(
        parse_real_named(store.take(prefix + ".rate"), prefix + ".rate"));
  if (kind == "harmonic")
    return IntensityModel::harmonic(
        parse_real_named(store.take(prefix + ".phase"), prefix + ".phase"));
  if (kind == "gaussian_bump")
    return IntensityModel::gaussian_bump(
        parse_real_named(store.take(prefix + ".amplitude"), prefix + ".amplitude"),
        parse_real_named(store.take(prefix + ".width"), prefix + ".width"));
  if (kind == "scaled") {
    const double factor =
        parse_real_named(store.take(prefix + ".factor"), prefix + ".factor");
    return IntensityModel::scaled(
        parse_intensity(store, prefix + ".base", depth + 1), factor);
  }
  if (kind == "tabulated")
    return IntensityModel::tabulated_from_csv(store.take(prefix + ".file"));
  throw ConfigError("config field " + prefix + ".kind: unknown kind: " + kind);
}

std::string canon_intensity(const IntensityModel& m) {
  switch (m.kind()) {
    case IntensityKind::homogeneous:
      return "homogeneous(" + fmt_double(m.rate()) + ")";
    case IntensityKind::harmonic:
      return "harmonic(" + fmt_double(m.phase()) + ")";
    case IntensityKind::gaussian_bump:
      return "gaussian_bump(" + fmt_double(m.amplitude()) + "," +
             fmt_double(m.width()) + ")";
    case IntensityKind::scaled:
      return "scaled(" + fmt_double(m.factor()) + "," +
             canon_intensity(m.base()) + ")";
    case IntensityKind::tabulated: {
      // Node-level canonical form so distinct tables hash differently.
      std::ostringstream ss;
      ss << "tabulated(";
      for (std::size_t i = 0; i < m.table().size(); ++i) {
        if (i > 0) ss << ';';
        ss << fmt_double(m.table()[i].first) << ':'
           << fmt_double(m.table()[i].second);
      }
      ss << ")";
      return ss.str();
    }
  }
  return "?";
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += '|';
    out += fmt_double(v[i]);
  }
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += '|';
    out += std::to_string(v[i]);
  }
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ensure_out_dir(const ExperimentConfig& config) {
  std::filesystem::create_directories(config.out_dir);
}

}  // namespace

double parse_real(const std::string& text) { return parse_real_named(text, "value"); }

std::vector<double> parse_real_list(const std::string& text) {
  return parse_real_list_named(text, "value");
}

ExperimentConfig default_config() { return parse_config({}); }

ExperimentConfig parse_config(const std::map<std::string, std::string>& kv) {
  ExperimentConfig c;
  for (const auto& [k, v] : kv) {
    (void)v;
    c.explicit_keys.insert(k);
  }
  KeyStore store(kv);

  c.lambda1 = store.has("lambda1.kind")
                  ? parse_intensity(store, "lambda1", 0)
                  : IntensityModel::harmonic(std::numbers::pi / 16.0);
  c.lambda2 = store.has("lambda2.kind")
                  ? parse_intensity(store, "lambda2", 0)
                  : IntensityModel::harmonic(std::numbers::pi / 4.0);

  c.pi1 = parse_real_named(store.take_or("pi1", "0.5"), "pi1");
  c.pi2 = parse_real_named(store.take_or("pi2", "0.5"), "pi2");
  if (!(c.pi1 > 0.0) || !(c.pi2 > 0.0) || std::abs(c.pi1 + c.pi2 - 1.0) > 1e-9)
    throw ConfigError("config field pi1/pi2: priors must be positive and sum to 1");

  c.T = parse_real_named(store.take_or("T", "10"), "T");
  if (!(c.T > 0.0)) throw ConfigError("config field T: must be > 0");
  c.T_grid = parse_real_list_named(store.take_or("T_grid", "2:20:2"), "T_grid");
  if (c.T_grid.empty()) throw ConfigError("config field T_grid: grid must be nonempty");
  for (double t : c.T_grid)
    if (!(t > 0.0)) throw ConfigError("config field T_grid: entries must be > 0");

  c.L = static_cast<int>(strict_stoll(store.take_or("L", "200"), "L"));
  if (c.L < 1) throw ConfigError("config field L: must be >= 1");
  {
    const auto raw = parse_real_list_named(store.take_or("L_grid", "10,25,50,100,200"), "L_grid");
    if (raw.empty()) throw ConfigError("config field L_grid: grid must be nonempty");
    for (double v : raw) {
      if (!(v >= 1.0) || v != std::floor(v))
        throw ConfigError("config field L_grid: entries must be positive integers");
      c.L_grid.push_back(static_cast<int>(v));
    }
  }

  const std::string kernel = store.take_or("kernel", "gaussian");
  if (kernel == "gaussian")
    c.kernel = KernelFamily::gaussian;
  else if (kernel == "epanechnikov")
    c.kernel = KernelFamily::epanechnikov;
  else
    throw ConfigError("config field kernel: unknown kernel: " + kernel);

  c.h_grid = parse_real_list_named(store.take_or("h_grid", "log:0.1:10:10"), "h_grid");
  if (c.h_grid.empty()) throw ConfigError("config field h_grid: grid must be nonempty");
  for (double h : c.h_grid)
    if (!(h > 0.0)) throw ConfigError("config field h_grid: entries must be > 0");

  c.folds = static_cast<int>(strict_stoll(store.take_or("folds", "5"), "folds"));
  if (c.folds < 2) throw ConfigError("config field folds: must be >= 2");
  c.n_test = static_cast<int>(strict_stoll(store.take_or("n_test", "10000"), "n_test"));
  if (c.n_test < 1) throw ConfigError("config field n_test: must be >= 1");
  c.runs = static_cast<int>(strict_stoll(store.take_or("runs", "10"), "runs"));
  if (c.runs < 1) throw ConfigError("config field runs: must be >= 1");

  c.seed = static_cast<std::uint64_t>(
      strict_stoll(store.take_or("seed", "20250810"), "seed"));
  c.out_dir = store.take_or("out_dir", "out");
  c.threads = static_cast<int>(strict_stoll(store.take_or("threads", "0"), "threads"));

  const std::string pairs_raw =
      store.take_or("pairs", "pi/16:pi/8,pi/16:pi/4,pi/16:pi");
  for (const auto& token : split(pairs_raw, ',')) {
    if (token.empty()) continue;
    const auto parts = split(token, ':');
    if (parts.size() != 2)
      throw ConfigError("config field pairs: each entry needs phi1:phi2");
    c.phase_pairs.emplace_back(parse_real_named(parts[0], "pairs"),
                               parse_real_named(parts[1], "pairs"));
  }
  if (c.phase_pairs.empty())
    throw ConfigError("config field pairs: list must be nonempty");

  store.reject_leftovers();
  c.config_id = hex64(fnv1a_hash(canonical_config(c)));
  return c;
}

ExperimentConfig load_config(const std::string& path,
                             const std::map<std::string, std::string>& overrides) {
  std::map<std::string, std::string> kv;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::size_t hash_pos = line.find('#');
      if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
      line = trim(line);
      if (line.empty()) continue;
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": expected key = value");
      kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
  }
  for (const auto& [k, v] : overrides) kv[k] = v;
  return parse_config(kv);
}

std::string canonical_config(const ExperimentConfig& c) {
  std::ostringstream ss;
  ss << "lambda1=" << canon_intensity(c.lambda1) << '\n'
     << "lambda2=" << canon_intensity(c.lambda2) << '\n'
     << "pi1=" << fmt_double(c.pi1) << '\n'
     << "pi2=" << fmt_double(c.pi2) << '\n'
     << "T=" << fmt_double(c.T) << '\n'
     << "T_grid=" << join_doubles(c.T_grid) << '\n'
     << "L=" << c.L << '\n'
     << "L_grid=" << join_ints(c.L_grid) << '\n'
     << "kernel=" << (c.kernel == KernelFamily::gaussian ? "gaussian" : "epanechnikov") << '\n'
     << "h_grid=" << join_doubles(c.h_grid) << '\n'
     << "folds=" << c.folds << '\n'
     << "n_test=" << c.n_test << '\n'
     << "runs=" << c.runs << '\n'
     << "seed=" << c.seed << '\n';
  ss << "pairs=";
  for (std::size_t i = 0; i < c.phase_pairs.size(); ++i) {
    if (i > 0) ss << '|';
    ss << fmt_double(c.phase_pairs[i].first) << ':'
       << fmt_double(c.phase_pairs[i].second);
  }
  ss << '\n';
  return ss.str();
}

std::uint64_t fnv1a_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

const std::string risk_row_na = "nan";

void append_paired_rows(CsvWriter& csv, const std::vector<std::string>& prefix,
                        const PairedRiskReport& pr, int n_test,
                        std::uint64_t cell_seed) {
  for (std::size_t r = 0; r < pr.plugin.run_risks.size(); ++r) {
    std::vector<std::string> row = prefix;
    row[1] = "plugin";
    row.push_back(std::to_string(r));
    row.push_back(fmt_double(pr.plugin.run_risks[r]));
    row.push_back(std::to_string(n_test));
    row.push_back(std::to_string(cell_seed));
    row.push_back(fmt_double(pr.h1_per_run[r]));
    row.push_back(fmt_double(pr.h2_per_run[r]));
    csv.row(row);
  }
  for (std::size_t r = 0; r < pr.bayes.run_risks.size(); ++r) {
    std::vector<std::string> row = prefix;
    row[1] = "bayes";
    row.push_back(std::to_string(r));
    row.push_back(fmt_double(pr.bayes.run_risks[r]));
    row.push_back(std::to_string(n_test));
    row.push_back(std::to_string(cell_seed));
    row.push_back(risk_row_na);
    row.push_back(risk_row_na);
    csv.row(row);
  }
}

std::string figure_bayes_risk_vs_T(const ExperimentConfig& c) {
  const std::string path = c.out_dir + "/bayes_risk_vs_T.csv";
  CsvWriter csv(path);
  csv.row({"config_id", "seed", "phi1", "phi2", "T", "risk", "se", "bhatt_bound"});
  const std::uint64_t stream = fnv1a_hash("bayes-risk-vs-T");
  const int threads = resolve_threads(c.threads);
  std::uint64_t cell = 0;
  for (const auto& [phi1, phi2] : c.phase_pairs) {
    for (double T : c.T_grid) {
      const std::uint64_t s = derive_seed(c.seed, stream, cell++);
      const BayesRule rule =
          make_bayes_rule(IntensityModel::harmonic(phi1),
                          IntensityModel::harmonic(phi2), c.pi1, c.pi2, T);
      const RiskReport rr = estimate_bayes_risk(rule, c.n_test, c.runs, s, threads);
      const double bound = bhattacharyya_bound(
          bhattacharyya_exponent(rule.lambda1, rule.lambda2, T), c.pi1, c.pi2);
      csv.row({c.config_id, std::to_string(s), fmt_double(phi1), fmt_double(phi2),
               fmt_double(T), fmt_double(rr.mean), fmt_double(rr.std_error),
               fmt_double(bound)});
    }
  }
  csv.close();
  return path;
}

std::string figure_risk_vs_T_by_L(const ExperimentConfig& c) {
  const std::string path = c.out_dir + "/risk_vs_T_by_L.csv";
  CsvWriter csv(path);
  csv.row({"config_id", "rule", "T", "L", "run", "risk", "n_test", "seed", "h1", "h2"});
  const std::uint64_t stream = fnv1a_hash("risk-vs-T-by-L");
  const int threads = resolve_threads(c.threads);
  std::uint64_t cell = 0;
  for (int L : c.L_grid) {
    for (double T : c.T_grid) {
      const std::uint64_t s = derive_seed(c.seed, stream, cell++);
      const PairedRiskReport pr = estimate_plugin_risk(
          c.lambda1, c.lambda2, c.pi1, c.pi2, L, T, c.kernel, c.h_grid, c.folds,
          c.n_test, c.runs, s, threads);
      append_paired_rows(csv,
                         {c.config_id, "", fmt_double(T), std::to_string(L)}, pr,
                         c.n_test, s);
    }
  }
  csv.close();
  return path;
}

std::string figure_bandwidth_vs_T(const ExperimentConfig& c) {
  const std::string path = c.out_dir + "/bandwidth_vs_T.csv";
  CsvWriter csv(path);
  csv.row({"config_id", "seed", "T", "L", "class", "run", "h_selected", "boundary"});
  const std::uint64_t stream = fnv1a_hash("bandwidth-vs-T");
  const int threads = resolve_threads(c.threads);
  std::vector<double> sorted_grid = c.h_grid;
  std::sort(sorted_grid.begin(), sorted_grid.end());
  std::uint64_t cell = 0;
  for (int L : c.L_grid) {
    for (double T : c.T_grid) {
      for (int r = 0; r < c.runs; ++r) {
        const std::uint64_t s = derive_seed(c.seed, stream, cell++);
        const TrainingSet training = generate_training_set(
            c.lambda1, c.lambda2, c.pi1, c.pi2, L, T, s, threads);
        const int L1 = training.count_class(ClassLabel::omega1);
        const int L2 = training.count_class(ClassLabel::omega2);
        if (L1 < 2 || L2 < 2) continue;
        const int folds_eff = std::min(c.folds, std::min(L1, L2));
        for (ClassLabel label : {ClassLabel::omega1, ClassLabel::omega2}) {
          const double h = select_bandwidth_cv(training, label, c.kernel,
                                               c.h_grid, folds_eff, s, nullptr,
                                               threads);
          const bool boundary =
              h == sorted_grid.front() || h == sorted_grid.back();
          csv.row({c.config_id, std::to_string(s), fmt_double(T),
                   std::to_string(L), std::to_string(static_cast<int>(label)),
                   std::to_string(r), fmt_double(h), boundary ? "1" : "0"});
        }
      }
    }
  }
  csv.close();
  return path;
}

std::string figure_risk_vs_L_by_phi(const ExperimentConfig& c) {
  const std::string path = c.out_dir + "/risk_vs_L_by_phi.csv";
  CsvWriter csv(path);
  csv.row({"config_id", "rule", "phi1", "phi2", "T", "L", "run", "risk",
           "n_test", "seed", "h1", "h2"});
  const std::uint64_t stream = fnv1a_hash("risk-vs-L-by-phi");
  const int threads = resolve_threads(c.threads);
  std::uint64_t cell = 0;
  for (const auto& [phi1, phi2] : c.phase_pairs) {
    const IntensityModel l1 = IntensityModel::harmonic(phi1);
    const IntensityModel l2 = IntensityModel::harmonic(phi2);
    // Reference rows for the horizontal Bayes line, tagged L = 0.
    {
      const std::uint64_t s = derive_seed(c.seed, stream, cell++);
      const BayesRule rule = make_bayes_rule(l1, l2, c.pi1, c.pi2, c.T);
      const RiskReport rr = estimate_bayes_risk(rule, c.n_test, c.runs, s, threads);
      for (std::size_t r = 0; r < rr.run_risks.size(); ++r)
        csv.row({c.config_id, "bayes", fmt_double(phi1), fmt_double(phi2),
                 fmt_double(c.T), "0", std::to_string(r),
                 fmt_double(rr.run_risks[r]), std::to_string(c.n_test),
                 std::to_string(s), risk_row_na, risk_row_na});
    }
    for (int L : c.L_grid) {
      const std::uint64_t s = derive_seed(c.seed, stream, cell++);
      const PairedRiskReport pr =
          estimate_plugin_risk(l1, l2, c.pi1, c.pi2, L, c.T, c.kernel, c.h_grid,
                               c.folds, c.n_test, c.runs, s, threads);
      append_paired_rows(csv,
                         {c.config_id, "", fmt_double(phi1), fmt_double(phi2),
                          fmt_double(c.T), std::to_string(L)},
                         pr, c.n_test, s);
    }
  }
  csv.close();
  return path;
}

std::string figure_gaussian_failure(const ExperimentConfig& c) {
  const std::string path = c.out_dir + "/gaussian_failure.csv";
  CsvWriter csv(path);
  csv.row({"config_id", "rule", "T", "L", "run", "risk", "n_test", "seed", "h1", "h2"});
  const std::uint64_t stream = fnv1a_hash("gaussian-failure");
  const int threads = resolve_threads(c.threads);

  const bool configured_bumps =
      c.lambda1.kind() == IntensityKind::gaussian_bump &&
      c.lambda2.kind() == IntensityKind::gaussian_bump;
  const IntensityModel l1 =
      configured_bumps ? c.lambda1 : IntensityModel::gaussian_bump(300.0, 20.0);
  const IntensityModel l2 =
      configured_bumps ? c.lambda2 : IntensityModel::gaussian_bump(600.0, 40.0);
  const std::vector<double> T_grid =
      c.was_set("T_grid") ? c.T_grid
                          : parse_real_list("0.25:2.0:0.25");
  const std::vector<int> L_grid = c.was_set("L_grid") ? c.L_grid
                                                      : std::vector<int>{10, 20, 50};

  std::uint64_t cell = 0;
  for (int L : L_grid) {
    for (double T : T_grid) {
      const std::uint64_t s = derive_seed(c.seed, stream, cell++);
      const PairedRiskReport pr =
          estimate_plugin_risk(l1, l2, c.pi1, c.pi2, L, T, c.kernel, c.h_grid,
                               c.folds, c.n_test, c.runs, s, threads);
      append_paired_rows(csv,
                         {c.config_id, "", fmt_double(T), std::to_string(L)}, pr,
                         c.n_test, s);
    }
  }
  csv.close();
  return path;
}

}  // namespace

std::string figure(const std::string& id, const ExperimentConfig& config) {
  ensure_out_dir(config);
  if (id == "bayes-risk-vs-T") return figure_bayes_risk_vs_T(config);
  if (id == "risk-vs-T-by-L") return figure_risk_vs_T_by_L(config);
  if (id == "bandwidth-vs-T") return figure_bandwidth_vs_T(config);
  if (id == "risk-vs-L-by-phi") return figure_risk_vs_L_by_phi(config);
  if (id == "gaussian-failure") return figure_gaussian_failure(config);
  throw ConfigError("unknown figure id: " + id);
}

namespace {

using CheckFn = ValidationCheck (*)(const ExperimentConfig&);

ValidationCheck check_sampler_moments(const ExperimentConfig& c) {
  constexpr int kReps = 4000;
  const IntensityModel model = IntensityModel::homogeneous(2.0);
  const double T = 10.0;
  const PoissonSampler sampler(model, T);
  std::vector<double> counts(kReps), first_half(kReps), second_half(kReps);
  parallel_for(kReps, resolve_threads(c.threads), [&](std::int64_t i) {
    const SpikeTrain train =
        sampler.draw(derive_seed(c.seed, fnv1a_hash("validate-sampler"),
                                 static_cast<std::uint64_t>(i)));
    int h1 = 0;
    for (double t : train.times)
      if (t <= 5.0) ++h1;
    counts[static_cast<std::size_t>(i)] = train.count();
    first_half[static_cast<std::size_t>(i)] = h1;
    second_half[static_cast<std::size_t>(i)] = train.count() - h1;
  });
  const double mean = mean_of(counts);
  double var = 0.0, m4 = 0.0;
  for (double n : counts) {
    const double d = n - mean;
    var += d * d;
    m4 += d * d * d * d;
  }
  var /= kReps - 1;
  m4 /= kReps;
  const double se_mean = std::sqrt(20.0 / kReps);
  const double se_var = std::sqrt(std::max(m4 - var * var, 0.0) / kReps);
  const double m1 = mean_of(first_half), m2 = mean_of(second_half);
  double cov = 0.0, v1 = 0.0, v2 = 0.0;
  for (int i = 0; i < kReps; ++i) {
    const double d1 = first_half[static_cast<std::size_t>(i)] - m1;
    const double d2 = second_half[static_cast<std::size_t>(i)] - m2;
    cov += d1 * d2;
    v1 += d1 * d1;
    v2 += d2 * d2;
  }
  const double corr = cov / std::sqrt(v1 * v2);
  std::ostringstream detail;
  detail << "mean=" << mean << " var=" << var << " corr=" << corr;
  const bool ok = std::abs(mean - 20.0) <= 5.0 * se_mean &&
                  std::abs(var - 20.0) <= 5.0 * se_var &&
                  std::abs(corr) <= 5.0 / std::sqrt(static_cast<double>(kReps));
  return {"sampler_moments", ok ? "pass" : "fail", detail.str()};
}

ValidationCheck check_three_forms(const ExperimentConfig& c) {
  const std::uint64_t stream = fnv1a_hash("validate-three-forms");
  int mismatches = 0;
  for (int p = 0; p < 3; ++p) {
    Rng rng(derive_seed(c.seed, stream, static_cast<std::uint64_t>(p)));
    const double phi1 = 0.05 + rng.uniform() * 1.5;
    const double phi2 = phi1 + 0.1 + rng.uniform() * 1.5;
    const BayesRule rule =
        make_bayes_rule(IntensityModel::harmonic(phi1),
                        IntensityModel::harmonic(phi2), c.pi1, c.pi2, 10.0);
    const PoissonSampler s1(rule.lambda1, 10.0);
    const PoissonSampler s2(rule.lambda2, 10.0);
    for (int i = 0; i < 300; ++i) {
      const SpikeTrain x = (i % 2 == 0 ? s1 : s2).draw(rng.next());
      const ClassLabel a = decide(rule, x);
      const ClassLabel b = decide_product_form(rule, x);
      const ClassLabel d = decide_shape_form(rule, x);
      if (a != b || a != d) ++mismatches;
    }
  }
  return {"three_form_equivalence", mismatches == 0 ? "pass" : "fail",
          "mismatches=" + std::to_string(mismatches)};
}

ValidationCheck check_homogeneous_reduction(const ExperimentConfig& c) {
  Rng rng(derive_seed(c.seed, fnv1a_hash("validate-homog"), 0));
  int mismatches = 0;
  for (int k = 0; k < 12; ++k) {
    const double l1 = 0.5 + 4.5 * rng.uniform();
    const double l2 = 0.5 + 4.5 * rng.uniform();
    const double T = 1.0 + 9.0 * rng.uniform();
    const double pi1 = 0.2 + 0.6 * rng.uniform();
    const BayesRule rule = make_bayes_rule(IntensityModel::homogeneous(l1),
                                           IntensityModel::homogeneous(l2),
                                           pi1, 1.0 - pi1, T);
    for (int n = 0; n <= 60; ++n) {
      SpikeTrain x;
      x.window_T = T;
      for (int i = 1; i <= n; ++i)
        x.times.push_back(T * i / (n + 1));
      const double kappa = std::log((1.0 - pi1) / pi1);
      const bool ref = n >= 1 ? n * std::log(l1 / l2) + T * (l2 - l1) >= kappa
                              : (l2 - l1) >= kappa / T;
      const bool got = decide(rule, x) == ClassLabel::omega1;
      if (ref != got) ++mismatches;
    }
  }
  return {"homogeneous_reduction", mismatches == 0 ? "pass" : "fail",
          "mismatches=" + std::to_string(mismatches)};
}

ValidationCheck check_lemma1(const ExperimentConfig& c) {
  Rng rng(derive_seed(c.seed, fnv1a_hash("validate-lemma1"), 0));
  int violations = 0;
  for (int k = 0; k < 30; ++k) {
    const double phi1 = 0.05 + 1.5 * rng.uniform();
    const double phi2 = phi1 + 0.1 + 1.5 * rng.uniform();
    const double T = 5.0 + 10.0 * rng.uniform();
    const BayesRule rule =
        make_bayes_rule(IntensityModel::harmonic(phi1),
                        IntensityModel::harmonic(phi2), 0.5, 0.5, T);
    const IntensityBounds bounds = combine_bounds(
        verify_bounds(rule.lambda1, T, 20001), verify_bounds(rule.lambda2, T, 20001));
    try {
      const TheoreticalRiskReport report = theoretical_report(rule, bounds, bounds.d_hat);
      for (const ClassTheory* ct : {&report.class1, &report.class2}) {
        if (!ct->alpha_T) { ++violations; continue; }
        if (*ct->alpha_T < *ct->lemma1_lower - 1e-8 ||
            *ct->alpha_T > *ct->lemma1_upper + 1e-8)
          ++violations;
      }
    } catch (const std::exception&) {
      ++violations;
    }
  }
  return {"lemma1_sandwich", violations == 0 ? "pass" : "fail",
          "violations=" + std::to_string(violations)};
}

ValidationCheck check_lemma3(const ExperimentConfig& c) {
  Rng rng(derive_seed(c.seed, fnv1a_hash("validate-lemma3"), 0));
  int violations = 0;
  for (int k = 0; k < 200; ++k) {
    const double phi1 = 0.05 + 2.0 * rng.uniform();
    const double phi2 = phi1 + 0.05 + 2.0 * rng.uniform();
    const double T = 4.0 + 16.0 * rng.uniform();
    const auto p = shape_decompose(IntensityModel::harmonic(phi1), T);
    const auto q = shape_decompose(IntensityModel::harmonic(phi2), T);
    const double kl = kl_divergence(p, q);
    const double kv = kl_variation(p, q);
    if (kl < -1e-8 || kl > std::sqrt(std::max(kv, 0.0)) + 1e-9) ++violations;
  }
  return {"lemma3_kl_variation", violations == 0 ? "pass" : "fail",
          "violations=" + std::to_string(violations)};
}

ValidationCheck check_martingale_variance(const ExperimentConfig& c) {
  constexpr int kReps = 4000;
  const IntensityModel l1 = IntensityModel::homogeneous(2.0);
  const IntensityModel l2 = IntensityModel::scaled(l1, 4.0);
  const double T = 10.0;
  auto g = [&](double t) { return std::log(l1.eval(t) / l2.eval(t)); };
  std::ostringstream detail;
  bool ok = true;
  int class_idx = 0;
  for (const IntensityModel* own : {&l1, &l2}) {
    const double compensator = integrate_adaptive(
        [&](double t) { return g(t) * own->eval(t); }, 0.0, T);
    const double target = integrate_adaptive(
        [&](double t) { const double v = g(t); return v * v * own->eval(t); },
        0.0, T);
    const PoissonSampler sampler(*own, T);
    std::vector<double> u(kReps);
    parallel_for(kReps, resolve_threads(c.threads), [&](std::int64_t i) {
      const SpikeTrain x = sampler.draw(
          derive_seed(c.seed, fnv1a_hash("validate-martingale"),
                      static_cast<std::uint64_t>(class_idx * kReps + i)));
      double s = 0.0;
      for (double t : x.times) s += g(t);
      u[static_cast<std::size_t>(i)] = s - compensator;
    });
    const double mean = mean_of(u);
    double var = 0.0;
    for (double v : u) var += (v - mean) * (v - mean);
    var /= kReps - 1;
    const double rel = std::abs(var - target) / target;
    detail << "class" << (class_idx + 1) << ": mc=" << var
           << " target=" << target << " rel=" << rel << "; ";
    if (rel > 0.08) ok = false;
    ++class_idx;
  }
  return {"martingale_variance", ok ? "pass" : "fail", detail.str()};
}

ValidationCheck check_kernel_mass(const ExperimentConfig& c) {
  const IntensityModel model = IntensityModel::harmonic(std::numbers::pi / 16.0);
  const double T = 10.0;
  const double h = 0.4;
  const PoissonSampler sampler(model, T);
  double worst = 0.0;
  int tested = 0;
  for (int k = 0; k < 8; ++k) {
    SpikeTrain train = sampler.draw(
        derive_seed(c.seed, fnv1a_hash("validate-kernel-mass"),
                    static_cast<std::uint64_t>(k)));
    std::vector<double> inner;
    for (double t : train.times)
      if (t >= h && t <= T - h) inner.push_back(t);
    if (inner.empty()) continue;
    train.times = inner;
    const auto events = collect_shape_events({&train});
    const AggregatedShape shape(events, {KernelFamily::epanechnikov, h}, T);
    worst = std::max(worst, std::abs(shape.integral(0.0, T) - 1.0));
    ++tested;
  }
  const bool ok = tested > 0 && worst <= 1e-8;
  return {"kernel_mass", ok ? "pass" : "fail",
          "tested=" + std::to_string(tested) + " worst=" + fmt_double(worst)};
}

ValidationCheck check_a1(const ExperimentConfig& c) {
  const double max_T = *std::max_element(c.T_grid.begin(), c.T_grid.end());
  const IntensityBounds bounds = combine_bounds(
      verify_bounds(c.lambda1, max_T, 20001), verify_bounds(c.lambda2, max_T, 20001));
  std::ostringstream detail;
  detail << "delta=" << fmt_double(bounds.delta) << " C=" << fmt_double(bounds.C)
         << " d_hat=" << fmt_double(bounds.d_hat);
  if (bounds.a1_violated)
    return {"a1_assumption", "warn",
            "positivity violated on configured pair; " + detail.str()};
  return {"a1_assumption", "pass", detail.str()};
}

ValidationCheck check_bandwidth_grid(const ExperimentConfig&) {
  const auto grid = default_bandwidth_grid();
  bool ok = grid.size() == 10 && std::abs(grid.front() - 0.1) < 1e-12 &&
            std::abs(grid.back() - 10.0) < 1e-11;
  for (std::size_t i = 2; ok && i < grid.size(); ++i)
    if (std::abs(grid[i] / grid[i - 1] - grid[1] / grid[0]) > 1e-9) ok = false;
  return {"bandwidth_default_grid", ok ? "pass" : "fail",
          "n=" + std::to_string(grid.size())};
}

ValidationCheck check_determinism(const ExperimentConfig& c) {
  ExperimentConfig mini = c;
  mini.phase_pairs = {{std::numbers::pi / 16.0, std::numbers::pi / 4.0}};
  mini.T_grid = {2.0, 4.0};
  mini.runs = 2;
  mini.n_test = 300;
  mini.config_id = hex64(fnv1a_hash(canonical_config(mini)));
  mini.threads = 1;
  mini.out_dir = c.out_dir + "/determinism_t1";
  const std::string path1 = figure("bayes-risk-vs-T", mini);
  mini.threads = 2;
  mini.out_dir = c.out_dir + "/determinism_t2";
  const std::string path2 = figure("bayes-risk-vs-T", mini);
  const bool ok = read_file_bytes(path1) == read_file_bytes(path2);
  return {"determinism_across_threads", ok ? "pass" : "fail",
          ok ? "byte-identical CSVs" : "CSV bytes differ between thread counts"};
}

}  // namespace

std::vector<ValidationCheck> validate(const ExperimentConfig& config) {
  ensure_out_dir(config);
  const CheckFn checks[] = {
      check_sampler_moments,  check_three_forms, check_homogeneous_reduction,
      check_lemma1,           check_lemma3,      check_martingale_variance,
      check_kernel_mass,      check_a1,          check_bandwidth_grid,
      check_determinism,
  };
  std::vector<ValidationCheck> results;
  for (CheckFn fn : checks) {
    try {
      results.push_back(fn(config));
    } catch (const std::exception& e) {
      results.push_back({"unknown", "fail", std::string("exception: ") + e.what()});
    }
  }
  CsvWriter csv(config.out_dir + "/validate_report.csv");
  csv.row({"check", "status", "detail"});
  for (const auto& r : results) csv.row({r.name, r.status, r.detail});
  csv.close();
  return results;
}

bool validation_passed(const std::vector<ValidationCheck>& checks) {
  for (const auto& c : checks)
    if (c.status == "fail") return false;
  return true;
}

std::string run_simulate_command(const ExperimentConfig& c) {
  ensure_out_dir(c);
  const TrainingSet data =
      generate_training_set(c.lambda1, c.lambda2, c.pi1, c.pi2, c.L, c.T,
                            c.seed, resolve_threads(c.threads));
  const std::string events_path = c.out_dir + "/dataset_events.csv";
  const std::string manifest_path = c.out_dir + "/dataset_manifest.csv";
  write_dataset_csv(data, events_path, manifest_path);
  return events_path;
}

std::string run_bayes_risk_command(const ExperimentConfig& c) {
  ensure_out_dir(c);
  const std::uint64_t stream = fnv1a_hash("bayes-risk");
  const int threads = resolve_threads(c.threads);
  const std::string risk_path = c.out_dir + "/bayes_risk.csv";
  CsvWriter risk_csv(risk_path);
  risk_csv.row({"config_id", "rule", "T", "L", "run", "risk", "n_test", "seed",
                "h1", "h2"});
  CsvWriter theory_csv(c.out_dir + "/bayes_theory.csv");
  theory_csv.row({"T", "quantity", "value", "class", "seed"});
  std::uint64_t cell = 0;
  for (double T : c.T_grid) {
    const std::uint64_t s = derive_seed(c.seed, stream, cell++);
    const BayesRule rule = make_bayes_rule(c.lambda1, c.lambda2, c.pi1, c.pi2, T);
    const RiskReport rr = estimate_bayes_risk(rule, c.n_test, c.runs, s, threads);
    for (std::size_t r = 0; r < rr.run_risks.size(); ++r)
      risk_csv.row({c.config_id, "bayes", fmt_double(T), "0", std::to_string(r),
                    fmt_double(rr.run_risks[r]), std::to_string(c.n_test),
                    std::to_string(s), "nan", "nan"});
    const IntensityBounds bounds = combine_bounds(
        verify_bounds(c.lambda1, T, 20001), verify_bounds(c.lambda2, T, 20001));
    const TheoreticalRiskReport report = theoretical_report(rule, bounds, bounds.d_hat);
    append_theory_rows(theory_csv, report, T, s);
  }
  risk_csv.close();
  theory_csv.close();
  return risk_path;
}

std::string run_plugin_risk_command(const ExperimentConfig& c) {
  ensure_out_dir(c);
  const std::uint64_t stream = fnv1a_hash("plugin-risk");
  const int threads = resolve_threads(c.threads);
  const std::string path = c.out_dir + "/plugin_risk.csv";
  CsvWriter csv(path);
  csv.row({"config_id", "rule", "T", "L", "run", "risk", "n_test", "seed", "h1", "h2"});
  std::uint64_t cell = 0;
  for (int L : c.L_grid) {
    const std::uint64_t s = derive_seed(c.seed, stream, cell++);
    const PairedRiskReport pr =
        estimate_plugin_risk(c.lambda1, c.lambda2, c.pi1, c.pi2, L, c.T,
                             c.kernel, c.h_grid, c.folds, c.n_test, c.runs, s,
                             threads);
    append_paired_rows(csv, {c.config_id, "", fmt_double(c.T), std::to_string(L)},
                       pr, c.n_test, s);
  }
  csv.close();
  return path;
}

std::string run_bandwidth_scan_command(const ExperimentConfig& c) {
  ensure_out_dir(c);
  const int threads = resolve_threads(c.threads);
  const TrainingSet training = generate_training_set(
      c.lambda1, c.lambda2, c.pi1, c.pi2, c.L, c.T, c.seed, threads);
  const int L1 = training.count_class(ClassLabel::omega1);
  const int L2 = training.count_class(ClassLabel::omega2);
  if (L1 < 2 || L2 < 2)
    throw std::domain_error("bandwidth-scan: a class has fewer than 2 samples");
  const int folds_eff = std::min(c.folds, std::min(L1, L2));
  std::vector<double> sorted_grid = c.h_grid;
  std::sort(sorted_grid.begin(), sorted_grid.end());

  const std::string path = c.out_dir + "/bandwidth_scan.csv";
  CsvWriter scan_csv(path);
  scan_csv.row({"config_id", "seed", "class", "L", "h", "fold", "log_likelihood"});
  CsvWriter sel_csv(c.out_dir + "/bandwidth_selected.csv");
  sel_csv.row({"config_id", "seed", "class", "L", "h_selected", "boundary"});
  double selected[2] = {0.0, 0.0};
  for (ClassLabel label : {ClassLabel::omega1, ClassLabel::omega2}) {
    std::vector<CvTraceRow> trace;
    const double h = select_bandwidth_cv(training, label, c.kernel, c.h_grid,
                                         folds_eff, c.seed, &trace, threads);
    for (const auto& row : trace)
      scan_csv.row({c.config_id, std::to_string(c.seed),
                    std::to_string(static_cast<int>(label)), std::to_string(c.L),
                    fmt_double(row.h), std::to_string(row.fold),
                    fmt_double(row.log_likelihood)});
    const bool boundary = h == sorted_grid.front() || h == sorted_grid.back();
    sel_csv.row({c.config_id, std::to_string(c.seed),
                 std::to_string(static_cast<int>(label)), std::to_string(c.L),
                 fmt_double(h), boundary ? "1" : "0"});
    selected[label == ClassLabel::omega1 ? 0 : 1] = h;
  }
  scan_csv.close();
  sel_csv.close();
  export_estimate_csv(fit(training, c.kernel, selected[0], selected[1]),
                      c.out_dir + "/shape_estimate.csv");
  return path;
}

}  // namespace spikecls
