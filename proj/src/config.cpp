#include "sdelab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace sdelab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

double parse_double(const std::string& s) {
  const std::string t = trim(s);
  if (t == "inf" || t == "infinity" || t == "Inf") return kInf;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end == t.c_str() || *end != '\0')
    throw std::invalid_argument("not a number: '" + t + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  const std::string t = trim(s);
  char* end = nullptr;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (end == t.c_str() || *end != '\0' || t.find('-') != std::string::npos)
    throw std::invalid_argument("not a non-negative integer: '" + t + "'");
  return v;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t prev = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t cur = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, prev + (a[i - 1] == b[j - 1] ? 0 : 1)});
      prev = cur;
    }
  }
  return row[b.size()];
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "alpha",         "dim",       "drift",          "p",
      "q",             "T",         "steps",          "variant",
      "cutoff_B",      "x0",        "seed",           "paths",
      "lattice_points", "half_width", "bandwidth",    "eval_time",
      "duhamel_nodes", "duhamel_tolerance", "duhamel_max_iterations",
      "ladder",        "reference", "out",            "workers"};
  return keys;
}

std::string nearest_key(const std::string& key) {
  std::size_t best = static_cast<std::size_t>(-1);
  std::string who;
  for (const auto& k : known_keys()) {
    const std::size_t d = edit_distance(key, k);
    if (d < best) {
      best = d;
      who = k;
    }
  }
  return who;
}

std::map<std::string, std::string> parse_kv(const std::string& body,
                                            const std::string& context) {
  std::map<std::string, std::string> kv;
  if (trim(body).empty()) return kv;
  for (const auto& item : split(body, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(context + ": expected key=value, got '" + item + "'");
    kv[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
  }
  return kv;
}

double take(std::map<std::string, std::string>& kv, const std::string& key, double fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  const double v = parse_double(it->second);
  kv.erase(it);
  return v;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> all)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "configuration invalid (" << all.size() << " issue" << (all.size() == 1 ? "" : "s")
           << "):";
        for (const auto& s : all) os << "\n  - " << s;
        return os.str();
      }()),
      issues(std::move(all)) {}

DriftPtr parse_drift_declaration(const std::string& decl, double p, double q, int dim) {
  const auto colon = decl.find(':');
  const std::string kind = trim(decl.substr(0, colon));
  auto kv = parse_kv(colon == std::string::npos ? "" : decl.substr(colon + 1), "drift '" + kind + "'");

  DriftPtr out;
  if (kind == "zero") {
    out = zero_drift(dim);
  } else if (kind == "constant") {
    std::vector<double> c(static_cast<std::size_t>(dim), 0.0);
    c[0] = take(kv, "c", 1.0);
    for (int a = 1; a < dim; ++a) {
      char name[8];
      std::snprintf(name, sizeof(name), "c%d", a + 1);
      c[static_cast<std::size_t>(a)] = take(kv, name, 0.0);
    }
    out = constant_drift(c);
  } else if (kind == "smooth") {
    out = builtin_singular_drift("smooth", take(kv, "c", 1.0), 0.0, 0.0, 1.0, dim, kInf, kInf);
  } else if (kind == "radial") {
    out = builtin_singular_drift("radial", take(kv, "c", 1.0), take(kv, "beta", 0.0),
                                 take(kv, "delta", 0.0), take(kv, "R", 1.0), dim, p, q);
  } else if (kind == "tabulated") {
    auto it = kv.find("file");
    if (it == kv.end())
      throw std::invalid_argument("drift 'tabulated' requires file=<csv of x,value rows>");
    std::ifstream in(it->second);
    if (!in) throw std::invalid_argument("drift table '" + it->second + "' not readable");
    kv.erase(it);
    std::vector<double> xs, vs;
    std::string line;
    while (std::getline(in, line)) {
      line = trim(line);
      if (line.empty() || line[0] == '#') continue;
      const auto cols = split(line, ',');
      if (cols.size() != 2)
        throw std::invalid_argument("drift table: expected 2 columns, got '" + line + "'");
      try {
        xs.push_back(parse_double(cols[0]));
        vs.push_back(parse_double(cols[1]));
      } catch (const std::exception&) {
        if (xs.empty() && vs.empty()) continue;  // header row
        throw;
      }
    }
    out = tabulated_drift(std::move(xs), std::move(vs), p, q);
  } else {
    throw std::invalid_argument("unknown drift kind '" + kind +
                                "' (expected zero|constant|smooth|radial|tabulated)");
  }
  if (!kv.empty())
    throw std::invalid_argument("drift '" + kind + "': unknown parameter '" + kv.begin()->first +
                                "'");
  return out;
}

DriftPtr ExperimentConfig::make_drift() const {
  return parse_drift_declaration(drift_decl, p, q, params.dim);
}

SchemeConfig ExperimentConfig::scheme() const {
  SchemeConfig sc;
  sc.params = params;
  sc.horizon = horizon;
  sc.steps = steps;
  sc.variant = variant;
  sc.cutoff_B = cutoff_B;
  sc.x0 = x0;
  sc.seed = seed;
  sc.workers = workers;
  return sc;
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::vector<std::string> issues;
  auto attempt = [&](const std::string& key, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      issues.push_back(key + ": " + e.what());
    }
  };

  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      issues.push_back("line " + std::to_string(lineno) + ": expected key = value, got '" + line +
                       "'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));

    if (key == "alpha")
      attempt(key, [&] { cfg.params.alpha = parse_double(val); });
    else if (key == "dim")
      attempt(key, [&] { cfg.params.dim = static_cast<int>(parse_u64(val)); });
    else if (key == "drift")
      cfg.drift_decl = val;
    else if (key == "p")
      attempt(key, [&] { cfg.p = parse_double(val); });
    else if (key == "q")
      attempt(key, [&] { cfg.q = parse_double(val); });
    else if (key == "T")
      attempt(key, [&] { cfg.horizon = parse_double(val); });
    else if (key == "steps")
      attempt(key, [&] { cfg.steps = parse_u64(val); });
    else if (key == "variant")
      attempt(key, [&] { cfg.variant = parse_variant(val); });
    else if (key == "cutoff_B")
      attempt(key, [&] { cfg.cutoff_B = parse_double(val); });
    else if (key == "x0")
      attempt(key, [&] {
        cfg.x0.clear();
        for (const auto& c : split(val, ',')) cfg.x0.push_back(parse_double(c));
      });
    else if (key == "seed")
      attempt(key, [&] { cfg.seed = parse_u64(val); });
    else if (key == "paths")
      attempt(key, [&] { cfg.paths = parse_u64(val); });
    else if (key == "lattice_points")
      attempt(key, [&] { cfg.lattice_points = parse_u64(val); });
    else if (key == "half_width")
      attempt(key, [&] { cfg.half_width = parse_double(val); });
    else if (key == "bandwidth")
      attempt(key, [&] { cfg.bandwidth = parse_double(val); });
    else if (key == "eval_time")
      attempt(key, [&] { cfg.eval_time = parse_double(val); });
    else if (key == "duhamel_nodes")
      attempt(key, [&] { cfg.duhamel_nodes = parse_u64(val); });
    else if (key == "duhamel_tolerance")
      attempt(key, [&] { cfg.duhamel_tolerance = parse_double(val); });
    else if (key == "duhamel_max_iterations")
      attempt(key, [&] { cfg.duhamel_max_iterations = parse_u64(val); });
    else if (key == "ladder")
      attempt(key, [&] {
        cfg.ladder.clear();
        for (const auto& c : split(val, ',')) cfg.ladder.push_back(parse_u64(c));
      });
    else if (key == "reference")
      cfg.reference = val;
    else if (key == "out")
      cfg.out_dir = val;
    else if (key == "workers")
      attempt(key, [&] { cfg.workers = static_cast<int>(parse_u64(val)); });
    else
      issues.push_back("unknown key '" + key + "' (did you mean '" + nearest_key(key) + "'?)");
  }

  // semantic validation -- all of it, not just the first failure
  if (!(cfg.params.alpha > 0.0) || cfg.params.alpha > 2.0)
    issues.push_back("alpha: must lie in (0, 2], got " + std::to_string(cfg.params.alpha));
  if (cfg.params.dim < 1 || cfg.params.dim > 2)
    issues.push_back("dim: must be 1 or 2 for experiments");
  if (!(cfg.horizon > 0.0)) issues.push_back("T: horizon must be positive");
  if (cfg.steps < 1) issues.push_back("steps: need at least one step");
  if (cfg.paths < 1) issues.push_back("paths: need at least one path");
  if (cfg.lattice_points < 2) issues.push_back("lattice_points: need at least 2");
  if (!(cfg.cutoff_B > 0.0)) issues.push_back("cutoff_B: must be positive");
  if (cfg.half_width < 0.0) issues.push_back("half_width: must be >= 0 (0 selects the default)");
  if (cfg.bandwidth < 0.0) issues.push_back("bandwidth: must be >= 0 (0 selects the rule)");
  if (cfg.eval_time < 0.0 || cfg.eval_time > cfg.horizon + 1e-12)
    issues.push_back("eval_time: must lie in [0, T]");
  if (!(cfg.duhamel_tolerance > 0.0)) issues.push_back("duhamel_tolerance: must be positive");
  if (cfg.duhamel_nodes < 4) issues.push_back("duhamel_nodes: need at least 4");
  if (cfg.duhamel_max_iterations < 1) issues.push_back("duhamel_max_iterations: need at least 1");
  if (cfg.ladder.empty()) issues.push_back("ladder: need at least one step count");
  for (std::size_t n : cfg.ladder)
    if (n < 1) issues.push_back("ladder: step counts must be >= 1");
  if (cfg.reference != "duhamel" && cfg.reference != "richardson")
    issues.push_back("reference: expected duhamel|richardson, got '" + cfg.reference + "'");
  if (!cfg.x0.empty() && cfg.x0.size() != static_cast<std::size_t>(cfg.params.dim))
    issues.push_back("x0: expected " + std::to_string(cfg.params.dim) + " coordinates");

  DriftPtr drift;
  if (cfg.params.alpha > 0.0 && cfg.params.alpha <= 2.0 && cfg.params.dim >= 1) {
    try {
      drift = cfg.make_drift();
    } catch (const std::exception& e) {
      issues.push_back(std::string("drift: ") + e.what());
    }
  }
  if (drift) {
    try {
      serrin_gap(cfg.params.alpha, cfg.params.dim, drift->p_exponent(), drift->q_exponent());
    } catch (const std::exception& e) {
      issues.push_back(e.what());
    }
    // the declared L^q-L^p class must itself be subcritical, even when the
    // chosen drift kind is more regular than declared
    if (drift->p_exponent() != cfg.p || drift->q_exponent() != cfg.q) {
      try {
        serrin_gap(cfg.params.alpha, cfg.params.dim, cfg.p, cfg.q);
      } catch (const std::exception& e) {
        issues.push_back(e.what());
      }
    }
  }

  if (!issues.empty()) throw ConfigError(std::move(issues));
  return cfg;
}

ExperimentConfig parse_config(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError({"cannot open config file '" + file + "'"});
  std::ostringstream body;
  body << in.rdbuf();
  return parse_config_text(body.str());
}

}  // namespace sdelab
