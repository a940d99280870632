#include <iostream>

#include "CLI11.hpp"
#include "gluecert/cli.hpp"
#include "gluecert/version.hpp"

using namespace gluecert;

int main(int argc, char** argv) {
  CLI::App app{"GLUE subdivision schemes and certified Hoelder regularity of their limit curves"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string scheme = "cps2d", chain_path, out_path, cert_path, config_path;
  int dim = 2, rounds = 1, level = 8, samples = 256, holder = 0, order = 2, ell_max = 8;
  int max_rounds = 10, threads = 0;
  double z = 1.0;
  std::string format = "csv", generator = "hat";

  auto add_scheme = [&](CLI::App* c) {
    c->add_option("--scheme", scheme, "scheme id (chaikin, fps, cps2d, spoiler, bspline_tau:<t>, or mask .json)");
    c->add_option("--dim", dim, "ambient dimension (cps2d is planar)");
  };

  CLI::App* sub = app.add_subcommand("subdivide", "apply the scheme and write the refined chain");
  add_scheme(sub);
  sub->add_option("--chain", chain_path, "input chain JSON")->required();
  sub->add_option("--rounds", rounds, "number of subdivision rounds");
  sub->add_option("--out", out_path, "output chain path (stdout if omitted)");

  CLI::App* kap = app.add_subcommand("kappa", "relative distortion of the chain and its iterates");
  add_scheme(kap);
  kap->add_option("--chain", chain_path)->required();
  kap->add_option("--rounds", rounds, "how many iterates to report");

  CLI::App* cert = app.add_subcommand("certify", "precompute a straightening certificate");
  add_scheme(cert);
  cert->add_option("--config", config_path, "TOML run configuration");
  cert->add_option("--out", out_path, "certificate JSON path");
  cert->add_option("--threads", threads, "worker threads (or GLUE_CERT_THREADS)");
  double opt_gamma_max = -1.0;
  long opt_budget = -1, opt_total = -1;
  std::vector<int> opt_ells;
  std::vector<double> opt_deltas;
  int opt_kmax = -1;
  cert->add_option("--ells", opt_ells, "composition depths to try");
  cert->add_option("--delta-grid", opt_deltas, "inner radii to try");
  cert->add_option("--k-max", opt_kmax, "max annulus depth");
  cert->add_option("--gamma-max", opt_gamma_max, "largest outer radius to try");
  cert->add_option("--box-budget", opt_budget, "boxes per bound computation");
  cert->add_option("--total-budget", opt_total, "total box budget");

  CLI::App* chk = app.add_subcommand("check", "check a chain against a certificate");
  add_scheme(chk);
  chk->add_option("--certificate", cert_path)->required();
  chk->add_option("--chain", chain_path)->required();
  chk->add_option("--max-rounds", max_rounds, "subdivision rounds before giving up");
  chk->add_option("--out", out_path, "verdict JSON path");

  CLI::App* comp = app.add_subcommand("companion", "derivative schemes at e and their spectral data");
  add_scheme(comp);
  comp->add_option("--certificate", cert_path, "optional certificate to fold into the verdict");

  CLI::App* lim = app.add_subcommand("limit", "sample the limit curve");
  add_scheme(lim);
  lim->add_option("--chain", chain_path)->required();
  lim->add_option("--level", level, "subdivision depth for sampling");
  lim->add_option("--z", z, "boundary margin of the parameter interval");
  lim->add_option("--samples", samples, "number of samples");
  lim->add_option("--format", format, "csv or svg");
  lim->add_option("--out", out_path, "output path (stdout if omitted)");
  lim->add_option("--holder", holder, "also report an empirical exponent of this order (1 or 2)");
  lim->add_option("--generator", generator, "hat or basic (B-spline schemes only)");

  CLI::App* jsr = app.add_subcommand("jsr", "difference scheme and its spectral-radius bounds");
  add_scheme(jsr);
  jsr->add_option("--order", order, "difference order");
  jsr->add_option("--ell-max", ell_max, "depths 1..ell_max");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  if (sub->parsed()) return cmd_subdivide(scheme, dim, chain_path, rounds, out_path);
  if (kap->parsed()) return cmd_kappa(scheme, dim, chain_path, rounds);
  if (cert->parsed()) {
    RunConfig cfg;
    try {
      if (!config_path.empty()) cfg = load_run_config(config_path);
    } catch (const DomainError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitError;
    }
    if (cert->count("--scheme")) cfg.scheme = scheme;
    if (cert->count("--dim")) cfg.dim = dim;
    if (!opt_ells.empty()) cfg.search.ells = opt_ells;
    if (!opt_deltas.empty()) cfg.search.delta_grid = opt_deltas;
    if (opt_kmax >= 0) cfg.search.k_max = opt_kmax;
    if (opt_gamma_max > 0) cfg.search.gamma_max = opt_gamma_max;
    if (opt_budget >= 0) cfg.search.box_budget = opt_budget;
    if (opt_total >= 0) cfg.search.total_budget = opt_total;
    cfg.search.threads = threads > 0 ? threads : threads_from_env();
    cfg.out_path = out_path;
    return cmd_certify(cfg);
  }
  if (chk->parsed()) return cmd_check(scheme, dim, cert_path, chain_path, max_rounds, out_path);
  if (comp->parsed()) return cmd_companion(scheme, dim, cert_path);
  if (lim->parsed())
    return cmd_limit(scheme, dim, chain_path, level, z, samples, format, out_path, holder, generator);
  if (jsr->parsed()) return cmd_jsr(scheme, dim, order, ell_max);
  return kExitError;
}
