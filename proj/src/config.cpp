#include "sleppulse/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace sleppulse {

namespace {

constexpr std::array<const char*, 10> kKeys = {"alpha", "beta", "gamma", "D", "epsilon",
                                               "regime", "tau_hat", "theta_hat", "tau", "theta"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_number(const std::string& key, const std::string& value) {
  double out = 0;
  const char* first = value.data();
  const char* last = first + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    throw ParamError(Errc::config, key, "value of '" + key + "' is not a number: '" + value + "'");
  }
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::config, "config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      throw ParamError(Errc::config, key, "unknown config key '" + key + "'");
    }
    if (cfg.entries.count(key)) throw ParamError(Errc::config, key, "repeated config key '" + key + "'");
    cfg.entries[key] = value;
  }

  auto num = [&](const char* key) -> std::optional<double> {
    const auto it = cfg.entries.find(key);
    if (it == cfg.entries.end()) return std::nullopt;
    return to_number(key, it->second);
  };
  RawParams raw{num("alpha"), num("beta"), num("gamma"), num("D"), num("epsilon")};
  cfg.params = validate(raw, &cfg.warnings);

  const auto th = num("tau_hat"), thh = num("theta_hat"), t = num("tau"), tt = num("theta");
  const bool slow_keys = th || thh;
  const bool o1_keys = t || tt;
  std::optional<Regime> regime;
  if (const auto it = cfg.entries.find("regime"); it != cfg.entries.end()) {
    if (it->second == "slow") regime = Regime::slow;
    else if (it->second == "order1") regime = Regime::order1;
    else throw ParamError(Errc::config, "regime", "unknown regime '" + it->second + "' (order1 or slow)");
  }
  if (slow_keys && o1_keys) {
    throw Error(Errc::config, "config mixes tau_hat/theta_hat with tau/theta");
  }
  if (!regime && (slow_keys || o1_keys)) regime = slow_keys ? Regime::slow : Regime::order1;
  if (regime) {
    const bool slow = *regime == Regime::slow;
    if ((slow && o1_keys) || (!slow && slow_keys)) {
      throw ParamError(Errc::config, "regime", "rate keys do not match regime '" + cfg.entries["regime"] + "'");
    }
    const auto a = slow ? th : t;
    const auto b = slow ? thh : tt;
    const char* na = slow ? "tau_hat" : "tau";
    const char* nb = slow ? "theta_hat" : "theta";
    if (!a) throw ParamError(Errc::config, na, std::string("missing parameter '") + na + "'");
    if (!b) throw ParamError(Errc::config, nb, std::string("missing parameter '") + nb + "'");
    if (!(*a > 0.0) || !(*b > 0.0)) {
      throw ParamError(Errc::non_positive_parameter, !(*a > 0.0) ? na : nb, "relaxation rates must be positive");
    }
    cfg.rates = slow ? TimeScale::slow(*a, *b) : TimeScale::order1(*a, *b);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config, "cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

TimeScale require_rates(const RunConfig& cfg) {
  if (!cfg.rates) throw ParamError(Errc::config, "tau_hat", "config needs tau_hat/theta_hat or tau/theta");
  return *cfg.rates;
}

}  // namespace sleppulse
