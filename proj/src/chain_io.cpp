#include "gluecert/chain_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace gluecert {

Chain chain_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw DomainError(std::string("chain parse error: ") + e.what());
  }
  if (!j.contains("dim") || !j["dim"].is_number_integer())
    throw DomainError("chain file: missing integer field 'dim'");
  if (!j.contains("points") || !j["points"].is_array())
    throw DomainError("chain file: missing array field 'points'");
  const int dim = j["dim"].get<int>();
  if (dim < 1) throw DomainError("chain file: dim must be >= 1");
  const auto& pts = j["points"];
  if (pts.empty()) throw DomainError("chain file: 'points' is empty");
  Chain p(dim, static_cast<int>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!pts[i].is_array() || static_cast<int>(pts[i].size()) != dim)
      throw DomainError("chain file: points[" + std::to_string(i) + "] must be an array of " +
                        std::to_string(dim) + " numbers");
    for (int c = 0; c < dim; ++c) {
      if (!pts[i][c].is_number())
        throw DomainError("chain file: points[" + std::to_string(i) + "][" + std::to_string(c) +
                          "] is not a number");
      const double v = pts[i][c].get<double>();
      if (!std::isfinite(v))
        throw DomainError("chain file: points[" + std::to_string(i) + "] has a non-finite coordinate");
      p.at(static_cast<int>(i), c) = v;
    }
  }
  return p;
}

std::string chain_to_json(const Chain& p) {
  nlohmann::json j;
  j["dim"] = p.dim();
  nlohmann::json pts = nlohmann::json::array();
  for (int i = 0; i < p.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < p.dim(); ++c) row.push_back(p.at(i, c));
    pts.push_back(row);
  }
  j["points"] = pts;
  return j.dump(2);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("cannot open file: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  if (!f) throw DomainError("cannot write file: " + path);
  f << content;
}

Chain load_chain(const std::string& path) { return chain_from_json(read_text_file(path)); }

void save_chain(const Chain& p, const std::string& path) { write_text_file(path, chain_to_json(p)); }

}  // namespace gluecert
