#include "gluecert/cli.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iostream>

#include "gluecert/chain_io.hpp"
#include "gluecert/limits.hpp"
#include "gluecert/version.hpp"
#include "json.hpp"

namespace gluecert {

namespace {

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&tt));
  return buf;
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const SchemeEvalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace

int cmd_subdivide(const std::string& scheme_id, int dim, const std::string& chain_path, int rounds,
                  const std::string& out_path) {
  return run_guarded([&] {
    const SchemePtr g = make_scheme(scheme_id, dim);
    Chain p = load_chain(chain_path);
    std::cout << "N^0 = " << p.size() << "\n";
    for (int r = 1; r <= rounds; ++r) {
      p = subdivide_once(*g, p);
      std::cout << "N^" << r << " = " << p.size() << "\n";
    }
    if (!out_path.empty())
      save_chain(p, out_path);
    else
      std::cout << chain_to_json(p) << "\n";
    return kExitOk;
  });
}

int cmd_kappa(const std::string& scheme_id, int dim, const std::string& chain_path, int rounds) {
  return run_guarded([&] {
    const SchemePtr g = make_scheme(scheme_id, dim);
    Chain p = load_chain(chain_path);
    for (int r = 0; r <= rounds; ++r) {
      const ExtendedReal k = kappa_chain(p, g->spread());
      std::cout << "kappa(P^" << r << ") = ";
      if (k.is_infinite())
        std::cout << "inf";
      else
        std::cout << k.value();
      std::cout << "\n";
      if (r < rounds) p = subdivide_once(*g, p);
    }
    return kExitOk;
  });
}

int cmd_certify(const RunConfig& cfg) {
  return run_guarded([&] {
    const SchemePtr g = make_scheme(cfg.scheme, cfg.dim);
    const auto t0 = std::chrono::steady_clock::now();
    const CertifyOutcome oc = certify_rate(*g, cfg.search);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    nlohmann::json j;
    j["version"] = kVersion;
    j["config"] = cfg.echo();
    j["timestamp"] = {{"when", now_iso8601()}, {"wall_seconds", wall}};
    if (oc.cert) {
      nlohmann::json cj = nlohmann::json::parse(certificate_to_json(*oc.cert));
      for (auto& [k, v] : cj.items()) j[k] = v;
      const std::string text = j.dump(2);
      if (!cfg.out_path.empty())
        write_text_file(cfg.out_path, text);
      else
        std::cout << text << "\n";
      std::cout << "certified: bound " << oc.cert->bound << " at depth " << oc.cert->ell
                << ", alpha = " << oc.cert->alpha << ", delta = " << oc.cert->delta
                << ", gamma = " << oc.cert->gamma << " (boxes: " << oc.boxes_used << ")\n";
      return kExitOk;
    }
    j["inconclusive"] = true;
    j["note"] = oc.note;
    j["best_inner_bound"] = oc.best_inner_bound;
    j["best_ell"] = oc.best_ell;
    j["best_delta"] = oc.best_delta;
    j["boxes_used"] = oc.boxes_used;
    const std::string text = j.dump(2);
    if (!cfg.out_path.empty())
      write_text_file(cfg.out_path, text);
    else
      std::cout << text << "\n";
    std::cerr << "inconclusive: best bound " << oc.best_inner_bound << " (" << oc.note << ")\n";
    return kExitInconclusive;
  });
}

int cmd_check(const std::string& scheme_id, int dim, const std::string& cert_path,
              const std::string& chain_path, int max_rounds, const std::string& out_path) {
  return run_guarded([&] {
    const SchemePtr g = make_scheme(scheme_id, dim);
    const Certificate cert = certificate_from_json(read_text_file(cert_path));
    const Chain p = load_chain(chain_path);
    const Verdict base = check_chain(*g, cert, p, max_rounds);
    Verdict v = base;
    if (base.level != Verdict::Level::unknown) {
      try {
        const CompanionAnalysis comp = analyze_companion(*g);
        v = regularity_verdict(*g, &cert, &comp, &base);
      } catch (const DomainError&) {
        // no companion structure: keep the chain-level verdict
      }
    }
    const std::string text = verdict_to_json(v, g->info().id);
    if (!out_path.empty())
      write_text_file(out_path, text);
    else
      std::cout << text << "\n";
    if (v.level == Verdict::Level::unknown) {
      std::cerr << "unknown: " << v.note << "\n";
      return kExitInconclusive;
    }
    std::cout << "verdict: " << level_name(v.level) << " (exponent " << v.alpha << ") at round "
              << v.certified_round << "\n";
    return kExitOk;
  });
}

int cmd_companion(const std::string& scheme_id, int dim, const std::string& cert_path) {
  return run_guarded([&] {
    const SchemePtr g = make_scheme(scheme_id, dim);
    const CompanionAnalysis comp = analyze_companion(*g);
    std::cout << "tangential rules:\n" << comp.a_rules << "\n";
    std::cout << "normal rules:\n" << comp.b_rules << "\n";
    std::cout << "locally linear: " << (comp.pair.locally_linear ? "yes" : "no")
              << " (deviation " << comp.pair.deviation << ")\n";
    for (const auto& rows : {std::make_pair("A", &comp.a_orders), std::make_pair("B", &comp.b_orders)}) {
      for (const auto& info : *rows.second) {
        std::cout << "rho_l(" << rows.first << "_" << info.order << "):";
        if (!info.exists) {
          std::cout << " does not exist\n";
          continue;
        }
        for (double r : info.rho_by_ell) std::cout << " " << r;
        std::cout << "\n";
      }
      if (comp.pair.locally_linear) break;  // B == A
    }
    std::optional<Certificate> cert;
    if (!cert_path.empty()) cert = certificate_from_json(read_text_file(cert_path));
    const Verdict v =
        regularity_verdict(*g, cert ? &*cert : nullptr, &comp, nullptr, /*premise=*/true);
    std::cout << "composed verdict (for chains the scheme straightens): " << level_name(v.level);
    if (v.level != Verdict::Level::unknown) std::cout << ", exponent " << v.alpha;
    std::cout << "\n";
    return kExitOk;
  });
}

int cmd_limit(const std::string& scheme_id, int dim, const std::string& chain_path, int level,
              double z, int samples, const std::string& format, const std::string& out_path,
              int holder_order, const std::string& generator_name) {
  return run_guarded([&] {
    const SchemePtr g = make_scheme(scheme_id, dim);
    const Chain p = load_chain(chain_path);
    Generator gen = hat_generator();
    if (generator_name == "basic") {
      const auto* lin = dynamic_cast<const LinearGlueScheme*>(g.get());
      if (!lin) throw DomainError("--generator basic requires a linear scheme");
      const auto basic = basic_generator(*lin);
      if (!basic) throw DomainError("this scheme has no closed-form basic generator");
      gen = *basic;
    } else if (generator_name != "hat") {
      throw DomainError("unknown generator: " + generator_name);
    }
    const SampledCurve curve = limit_samples(*g, p, level, gen, z, samples);
    const std::string text = (format == "svg") ? curve_to_svg(curve) : curve_to_csv(curve);
    if (!out_path.empty())
      write_text_file(out_path, text);
    else
      std::cout << text;
    if (holder_order > 0) {
      HolderOptions ho;
      ho.deep_level = std::max(8, level);
      const HolderEstimate est = empirical_holder(*g, p, holder_order, z, ho);
      if (est.exact)
        std::cout << "# empirical order-" << holder_order << " modulus is exactly zero\n";
      else
        std::cout << "# empirical Hoelder exponent (order " << holder_order
                  << "): " << est.alpha_hat << "\n";
    }
    return kExitOk;
  });
}

int cmd_jsr(const std::string& scheme_id, int dim, int order, int ell_max) {
  return run_guarded([&] {
    const SchemePtr g = make_scheme(scheme_id, dim);
    const auto* lin = dynamic_cast<const LinearGlueScheme*>(g.get());
    if (!lin) throw DomainError("jsr needs a linear scheme; use companion for nonlinear ones");
    const DifferenceScheme ds = difference_scheme(*lin, order);
    std::cout << "difference scheme order " << order << ", rules (offset " << ds.r0 << "):\n"
              << ds.rules << "\n";
    for (int ell = 1; ell <= ell_max; ++ell)
      std::cout << "rho_" << ell << " = " << jsr_upper(ds.b0, ds.b1, ell) << "\n";
    return kExitOk;
  });
}

}  // namespace gluecert
