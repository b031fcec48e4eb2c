#include "epiwave/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "epiwave/csv.hpp"

namespace epiwave {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(x))
      throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for key " + key + ": '" + v + "'");
  }
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    if (kv.count(key))
      throw ConfigError("duplicate key " + key);
    kv[key] = val;
  }

  RunConfig cfg{};
  const char* model_keys[] = {"mu", "eta",  "phi", "beta1", "beta2",
                              "beta", "b1", "b2",  "d_h",   "d_v"};
  double* model_slots[] = {&cfg.params.mu,    &cfg.params.eta,  &cfg.params.phi,
                           &cfg.params.beta1, &cfg.params.beta2, &cfg.params.beta,
                           &cfg.params.b1,    &cfg.params.b2,   &cfg.params.d_h,
                           &cfg.params.d_v};
  for (int i = 0; i < 10; ++i) {
    const auto it = kv.find(model_keys[i]);
    if (it == kv.end())
      throw ConfigError(std::string("missing key ") + model_keys[i]);
    *model_slots[i] = parse_number(model_keys[i], it->second);
    kv.erase(it);
  }

  const auto take = [&](const char* key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  if (auto v = take("grid.length")) cfg.grid_length = parse_number("grid.length", *v);
  if (auto v = take("grid.n")) {
    const double n = parse_number("grid.n", *v);
    if (n < 3 || n != std::floor(n)) throw ConfigError("grid.n must be an integer >= 3");
    cfg.grid_n = static_cast<std::size_t>(n);
  }
  if (auto v = take("time.t_end")) cfg.t_end = parse_number("time.t_end", *v);
  if (auto v = take("time.dt")) {
    if (*v == "auto")
      cfg.dt.reset();
    else
      cfg.dt = parse_number("time.dt", *v);
  }
  if (auto v = take("time.snapshot_every"))
    cfg.snapshot_every = parse_number("time.snapshot_every", *v);
  if (auto v = take("ic.split_at")) cfg.split_at = parse_number("ic.split_at", *v);
  if (auto v = take("out.dir")) cfg.out_dir = *v;

  if (!kv.empty()) throw ConfigError("unknown key " + kv.begin()->first);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("mu", fmt_double(params.mu));
  kv.emplace_back("eta", fmt_double(params.eta));
  kv.emplace_back("phi", fmt_double(params.phi));
  kv.emplace_back("beta1", fmt_double(params.beta1));
  kv.emplace_back("beta2", fmt_double(params.beta2));
  kv.emplace_back("beta", fmt_double(params.beta));
  kv.emplace_back("b1", fmt_double(params.b1));
  kv.emplace_back("b2", fmt_double(params.b2));
  kv.emplace_back("d_h", fmt_double(params.d_h));
  kv.emplace_back("d_v", fmt_double(params.d_v));
  kv.emplace_back("grid.length", fmt_double(grid_length));
  kv.emplace_back("grid.n", std::to_string(grid_n));
  kv.emplace_back("time.t_end", fmt_double(t_end));
  kv.emplace_back("time.dt", dt ? fmt_double(*dt) : "auto");
  kv.emplace_back("time.snapshot_every", fmt_double(snapshot_every));
  kv.emplace_back("ic.split_at", fmt_double(split_at));
  kv.emplace_back("out.dir", out_dir);
  return kv;
}

}  // namespace epiwave
