#include "fdnoma/config_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string_view>

namespace fdnoma {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

class LineError {
 public:
  LineError(std::string source, int line, std::string key)
      : source_(std::move(source)), line_(line), key_(std::move(key)) {}

  [[noreturn]] void raise(const std::string& why) const {
    std::ostringstream os;
    os << source_ << ':' << line_ << ": " << key_ << ": " << why;
    throw ConfigError(os.str());
  }

 private:
  std::string source_;
  int line_;
  std::string key_;
};

double parse_number(std::string_view token, const LineError& err) {
  token = trim(token);
  auto parse_plain = [&](std::string_view t) {
    t = trim(t);
    double v = 0.0;
    const auto* end = t.data() + t.size();
    const auto res = std::from_chars(t.data(), end, v);
    if (t.empty() || res.ec != std::errc() || res.ptr != end) {
      err.raise("cannot parse number '" + std::string(t) + "'");
    }
    return v;
  };
  const auto slash = token.find('/');
  if (slash == std::string_view::npos) return parse_plain(token);
  const double num = parse_plain(token.substr(0, slash));
  const double den = parse_plain(token.substr(slash + 1));
  if (den == 0.0) err.raise("division by zero in '" + std::string(token) + "'");
  return num / den;
}

std::vector<double> parse_list(std::string_view value, const LineError& err) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = value.find(',', start);
    out.push_back(parse_number(value.substr(start, comma - start), err));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

int parse_count(std::string_view value, const LineError& err) {
  const double v = parse_number(value, err);
  if (v != static_cast<int>(v)) err.raise("expected an integer");
  return static_cast<int>(v);
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

SystemConfig parse_config(std::istream& in, const std::string& source) {
  SystemConfig cfg;
  // Per-user arrays are resolved after `a` is known, so that a scalar can be
  // broadcast to L users regardless of key order.
  struct Pending {
    std::vector<double> values;
    int line;
  };
  std::map<std::string, Pending> per_user;

  using Scalar = std::function<void(std::string_view, const LineError&)>;
  const std::map<std::string, Scalar> scalars = {
      {"n_B", [&](auto v, auto& e) { cfg.n_B = parse_count(v, e); }},
      {"n_R", [&](auto v, auto& e) { cfg.n_R = parse_count(v, e); }},
      {"m_SR", [&](auto v, auto& e) { cfg.m_SR = parse_number(v, e); }},
      {"m_RR", [&](auto v, auto& e) { cfg.m_RR = parse_number(v, e); }},
      {"d_SR", [&](auto v, auto& e) { cfg.d_SR = parse_number(v, e); }},
      {"eta", [&](auto v, auto& e) { cfg.eta = parse_number(v, e); }},
      {"mu", [&](auto v, auto& e) { cfg.mu = parse_number(v, e); }},
      {"alpha_si", [&](auto v, auto& e) { cfg.alpha_si = parse_number(v, e); }},
      {"sigma2_est_SR", [&](auto v, auto& e) { cfg.sigma2_est_SR = parse_number(v, e); }},
      {"fd_tau_SR", [&](auto v, auto& e) { cfg.fd_tau_SR = parse_number(v, e); }},
  };
  const std::set<std::string> arrays = {"a",        "gamma_th",      "m_RU",
                                        "d_RU",     "sigma2_est_RU", "fd_tau_RU"};

  std::set<std::string> seen;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string key(trim(line.substr(0, eq)));
    const LineError err(source, line_no, key.empty() ? std::string("<line>") : key);
    if (eq == std::string_view::npos) err.raise("expected 'key = value'");
    const auto value = trim(line.substr(eq + 1));
    if (value.empty()) err.raise("missing value");
    if (!seen.insert(key).second) err.raise("duplicate key");

    if (auto it = scalars.find(key); it != scalars.end()) {
      it->second(value, err);
    } else if (arrays.count(key)) {
      per_user[key] = {parse_list(value, err), line_no};
    } else {
      err.raise("unknown key");
    }
  }

  if (auto it = per_user.find("a"); it != per_user.end()) cfg.a = it->second.values;
  const std::size_t L = cfg.users();
  auto resolve = [&](const std::string& key, std::vector<double>& field) {
    auto it = per_user.find(key);
    if (it == per_user.end()) {
      // Defaults describe three users; broadcast their first value otherwise.
      if (field.size() != L) field.assign(L, field.empty() ? 0.0 : field.front());
      return;
    }
    const LineError err(source, it->second.line, key);
    auto& v = it->second.values;
    if (v.size() == 1) v.assign(L, v.front());
    if (v.size() != L) {
      err.raise("expected " + std::to_string(L) + " values (one per user), got " + std::to_string(v.size()));
    }
    field = v;
  };
  resolve("gamma_th", cfg.gamma_th);
  resolve("m_RU", cfg.m_RU);
  resolve("d_RU", cfg.d_RU);
  resolve("sigma2_est_RU", cfg.sigma2_est_RU);
  resolve("fd_tau_RU", cfg.fd_tau_RU);

  try {
    validate(cfg);
  } catch (const InfeasibleAllocation& e) {
    throw InfeasibleAllocation(source + ": " + e.what(), e.user());
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  return parse_config(in, path);
}

std::string serialize_config(const SystemConfig& cfg) {
  std::ostringstream os;
  os << "n_B = " << cfg.n_B << '\n'
     << "n_R = " << cfg.n_R << '\n'
     << "m_SR = " << format_double(cfg.m_SR) << '\n'
     << "m_RR = " << format_double(cfg.m_RR) << '\n'
     << "m_RU = " << join(cfg.m_RU) << '\n'
     << "d_SR = " << format_double(cfg.d_SR) << '\n'
     << "d_RU = " << join(cfg.d_RU) << '\n'
     << "eta = " << format_double(cfg.eta) << '\n'
     << "a = " << join(cfg.a) << '\n'
     << "gamma_th = " << join(cfg.gamma_th) << '\n'
     << "mu = " << format_double(cfg.mu) << '\n'
     << "alpha_si = " << format_double(cfg.alpha_si) << '\n'
     << "sigma2_est_SR = " << format_double(cfg.sigma2_est_SR) << '\n'
     << "sigma2_est_RU = " << join(cfg.sigma2_est_RU) << '\n'
     << "fd_tau_SR = " << format_double(cfg.fd_tau_SR) << '\n'
     << "fd_tau_RU = " << join(cfg.fd_tau_RU) << '\n';
  return os.str();
}

}  // namespace fdnoma
