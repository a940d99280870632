#pragma once

#include <string>

#include "gluecert/config.hpp"

namespace gluecert {

// Exit-code contract: 0 success/certified, 2 usage or domain error,
// 3 inconclusive/unknown (which is not a refutation).
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 2;
inline constexpr int kExitInconclusive = 3;

int cmd_subdivide(const std::string& scheme_id, int dim, const std::string& chain_path, int rounds,
                  const std::string& out_path);

int cmd_kappa(const std::string& scheme_id, int dim, const std::string& chain_path, int rounds);

int cmd_certify(const RunConfig& cfg);

int cmd_check(const std::string& scheme_id, int dim, const std::string& cert_path,
              const std::string& chain_path, int max_rounds, const std::string& out_path);

int cmd_companion(const std::string& scheme_id, int dim, const std::string& cert_path);

int cmd_limit(const std::string& scheme_id, int dim, const std::string& chain_path, int level,
              double z, int samples, const std::string& format, const std::string& out_path,
              int holder_order, const std::string& generator_name);

int cmd_jsr(const std::string& scheme_id, int dim, int order, int ell_max);

}  // namespace gluecert
