#include "gluecert/config.hpp"

#include <cstdlib>
#include <sstream>

#include "gluecert/chain_io.hpp"

namespace gluecert {

double TomlValue::number() const {
  if (auto* d = std::get_if<double>(&v)) return *d;
  throw DomainError("config: expected a number");
}
bool TomlValue::boolean() const {
  if (auto* b = std::get_if<bool>(&v)) return *b;
  throw DomainError("config: expected a boolean");
}
const std::string& TomlValue::str() const {
  if (auto* s = std::get_if<std::string>(&v)) return *s;
  throw DomainError("config: expected a string");
}
const std::vector<double>& TomlValue::array() const {
  if (auto* a = std::get_if<std::vector<double>>(&v)) return *a;
  throw DomainError("config: expected an array of numbers");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

TomlValue parse_value(const std::string& raw, int line_no) {
  const std::string s = trim(raw);
  if (s.empty()) throw DomainError("config line " + std::to_string(line_no) + ": empty value");
  if (s == "true") return {true};
  if (s == "false") return {false};
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"')
      throw DomainError("config line " + std::to_string(line_no) + ": unterminated string");
    return {s.substr(1, s.size() - 2)};
  }
  if (s.front() == '[') {
    if (s.back() != ']')
      throw DomainError("config line " + std::to_string(line_no) + ": unterminated array");
    std::vector<double> arr;
    std::stringstream ss(s.substr(1, s.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      try {
        arr.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw DomainError("config line " + std::to_string(line_no) + ": bad array entry '" + item + "'");
      }
    }
    return {arr};
  }
  try {
    std::size_t used = 0;
    const double d = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return {d};
  } catch (const std::exception&) {
    throw DomainError("config line " + std::to_string(line_no) + ": cannot parse value '" + s + "'");
  }
}

}  // namespace

std::map<std::string, TomlValue> parse_toml(const std::string& text) {
  std::map<std::string, TomlValue> out;
  std::stringstream ss(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (auto pos = line.find('#'); pos != std::string::npos) {
      // keep '#' inside quoted strings
      const auto q1 = line.find('"');
      if (q1 == std::string::npos || pos < q1) line = line.substr(0, pos);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw DomainError("config line " + std::to_string(line_no) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DomainError("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw DomainError("config line " + std::to_string(line_no) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    out[key] = parse_value(line.substr(eq + 1), line_no);
  }
  return out;
}

void apply_toml(RunConfig& cfg, const std::map<std::string, TomlValue>& kv) {
  for (const auto& [key, val] : kv) {
    if (key == "scheme") cfg.scheme = val.str();
    else if (key == "dim") cfg.dim = static_cast<int>(val.number());
    else if (key == "check_rounds") cfg.check_rounds = static_cast<int>(val.number());
    else if (key == "ells") {
      cfg.search.ells.clear();
      for (double d : val.array()) cfg.search.ells.push_back(static_cast<int>(d));
    } else if (key == "delta_grid") cfg.search.delta_grid = val.array();
    else if (key == "k_max") cfg.search.k_max = static_cast<int>(val.number());
    else if (key == "gamma_max") cfg.search.gamma_max = val.number();
    else if (key == "gamma_steps") cfg.search.gamma_steps = static_cast<int>(val.number());
    else if (key == "box_budget") cfg.search.box_budget = static_cast<long>(val.number());
    else if (key == "total_budget") cfg.search.total_budget = static_cast<long>(val.number());
    else if (key == "target") cfg.search.target = val.number();
    else if (key == "annulus_target") cfg.search.annulus_target = val.number();
    else if (key == "polish_rounds") cfg.search.polish_rounds = static_cast<int>(val.number());
    else if (key == "threads") cfg.search.threads = static_cast<int>(val.number());
    else throw DomainError("config: unknown key '" + key + "'");
  }
}

RunConfig load_run_config(const std::string& path) {
  RunConfig cfg;
  apply_toml(cfg, parse_toml(read_text_file(path)));
  return cfg;
}

std::string RunConfig::echo() const {
  std::ostringstream os;
  os << "scheme=" << scheme << " dim=" << dim << " ells=[";
  for (std::size_t i = 0; i < search.ells.size(); ++i) os << (i ? "," : "") << search.ells[i];
  os << "] delta_grid=[";
  for (std::size_t i = 0; i < search.delta_grid.size(); ++i)
    os << (i ? "," : "") << search.delta_grid[i];
  os << "] k_max=" << search.k_max << " gamma_max=" << search.gamma_max
     << " gamma_steps=" << search.gamma_steps << " box_budget=" << search.box_budget
     << " total_budget=" << search.total_budget << " target=" << search.target
     << " annulus_target=" << search.annulus_target << " polish_rounds=" << search.polish_rounds
     << " threads=" << search.threads << " check_rounds=" << check_rounds;
  return os.str();
}

int threads_from_env() {
  if (const char* env = std::getenv("GLUE_CERT_THREADS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      return 1;
    }
  }
  return 1;
}

}  // namespace gluecert
