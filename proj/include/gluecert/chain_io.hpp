#pragma once

#include <string>

#include "gluecert/chain.hpp"

namespace gluecert {

// Chain file format: {"dim": d, "points": [[x, ...], ...]}.
Chain chain_from_json(const std::string& text);
Chain load_chain(const std::string& path);
std::string chain_to_json(const Chain& p);
void save_chain(const Chain& p, const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace gluecert
